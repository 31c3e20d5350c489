//! Machine-readable reports.
//!
//! JSON floats are written in scientific notation with 17 significant
//! digits; NaN and infinities become `null`. Field order is fixed by the
//! struct definitions, so equal inputs give byte-identical output.

use crate::classify::ResidualReport;
use crate::error::Result;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;
use std::io::Write;

pub const SCHEMA: &str = "nbgeo/1";

/// Fixed-width text of a float: `{:.16e}`, or `null` when not finite.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_float(x)).expect("formatted float is valid JSON")
}

pub fn num<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw(*x).serialize(s)
}

pub fn opt_num<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => num(v, s),
        None => s.serialize_none(),
    }
}

fn seq<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut out = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        out.serialize_element(&raw(x))?;
    }
    out.end()
}

pub fn nums<S: Serializer>(xs: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
    seq(xs, s)
}

pub fn num_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    seq(xs, s)
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with the schema tag prepended.
pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&Versioned { schema: SCHEMA, body })?;
    text.push('\n');
    Ok(text)
}

pub const CSV_HEADER: [&str; 11] = [
    "u", "v", "t", "F12", "F13", "F23", "Fhat_max", "H_norm", "HS_res", "AJH_res", "flags",
];

/// One row per sample; missing optional residuals are empty fields.
pub fn write_csv<W: Write>(report: &ResidualReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for s in &report.samples {
        w.write_record([
            format_float(s.u),
            format_float(s.v),
            format_float(s.t),
            format_float(s.f[0]),
            format_float(s.f[1]),
            format_float(s.f[2]),
            format_float(s.fhat_max),
            format_float(s.h_norm),
            opt(s.hs_res),
            opt(s.ajh_res),
            s.flags.label(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(report: &ResidualReport) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(report, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{sample_and_verify, SampleOptions, DEFAULT_T_SET};
    use crate::surface::catalog_surface;
    use std::collections::BTreeMap;

    #[derive(Serialize)]
    struct Probe {
        #[serde(serialize_with = "num")]
        x: f64,
        #[serde(serialize_with = "opt_num")]
        y: Option<f64>,
        #[serde(serialize_with = "nums")]
        z: [f64; 3],
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "null");
        let text = serde_json::to_string(&Probe { x: 1.5, y: None, z: [0.0, f64::INFINITY, 1e-300] }).unwrap();
        assert_eq!(
            text,
            r#"{"x":1.5000000000000000e0,"y":null,"z":[0.0000000000000000e0,null,1.0000000000000000e-300]}"#
        );
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"], 1.5);
    }

    #[test]
    fn report_round_trip_and_determinism() {
        let c = catalog_surface("cone", &BTreeMap::new()).unwrap();
        let run = || sample_and_verify(&c, (4, 4), &DEFAULT_T_SET, 1e-8, &SampleOptions::default()).unwrap();
        let a = to_json(&run()).unwrap();
        assert_eq!(a, to_json(&run()).unwrap());
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["verdict"], "Maslovian");
        assert_eq!(v["samples"].as_array().unwrap().len(), 4 * 4 * 9);
        assert_eq!(v["shape"]["shape"]["kind"], "Cone");

        let csv_text = to_csv(&run()).unwrap();
        let mut rows = csv::Reader::from_reader(csv_text.as_bytes());
        assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
        let recs: Vec<csv::StringRecord> = rows.records().map(|r| r.unwrap()).collect();
        assert_eq!(recs.len(), 4 * 4 * 9);
        assert!(recs.iter().any(|r| &r[10] == "zero_t"));
        assert!(recs[0][9].parse::<f64>().is_ok());
    }
}
