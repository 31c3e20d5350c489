use super::*;
use crate::bundle::{complex_structure, frames, BundlePoint};
use crate::oracle::{maslov_residual_oracle, mean_curvature_oracle, JetEvaluator};
use crate::surface::{catalog_surface, principal_frame, principal_frame_with, ChartPoint, SurfaceChart, UmbilicPolicy};
use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn chart(name: &str, params: &[(&str, f64)]) -> SurfaceChart {
    let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog_surface(name, &p).unwrap()
}

fn pd_at(c: &SurfaceChart, u: f64, v: f64) -> PrincipalData {
    principal_frame_with(c, ChartPoint::new(u, v), UmbilicPolicy::Fallback).unwrap()
}

fn cone_unit() -> PrincipalData {
    pd_at(&chart("cone", &[("r", 1.0)]), 1.0, 0.0)
}

/// Arbitrary principal data on a genuine orthonormal frame, with the
/// Codazzi relations imposed.
fn synthetic(rng: &mut ChaCha8Rng) -> PrincipalData {
    let base = pd_at(&chart("torus", &[]), rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0));
    let mut g = || rng.gen_range(-2.0..2.0);
    let (a, b) = (g(), g());
    let (w1, w2) = (g(), g());
    PrincipalData {
        a,
        b,
        omega12_e1: w1,
        omega12_e2: w2,
        e1a: g(),
        e2b: g(),
        e1b: (a - b) * w2,
        e2a: (a - b) * w1,
        umbilic: false,
        ..base
    }
}

fn random_derivatives(rng: &mut ChaCha8Rng) -> HFieldDerivatives {
    let mut g = || rng.gen_range(-3.0..3.0);
    HFieldDerivatives {
        e1p: g(),
        e2p: g(),
        dp_dt: g(),
        e1q: g(),
        e2q: g(),
        dq_dt: g(),
        e1r: g(),
        e2r: g(),
        dr_dt: g(),
    }
}

const TS: [f64; 8] = [-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0];

#[test]
fn cone_pqr_and_inner_products() {
    let d = cone_unit();
    assert!(d.a.abs() < 1e-14 && (d.b - 1.0).abs() < 1e-14);
    assert!((d.e1b + 1.0).abs() < 1e-12);
    let Pqr { p, q, r } = pqr(&d, 0.5);
    assert_relative_eq!(p, -0.8, epsilon = 1e-12);
    assert!(q.abs() < 1e-12);
    assert_relative_eq!(r, 0.8, epsilon = 1e-12);
    let inner = jh_inner(&d, 0.5);
    assert_relative_eq!(inner[0], -0.4, epsilon = 1e-12);
    assert!(inner[1].abs() < 1e-12);
    assert_relative_eq!(inner[2], 0.8, epsilon = 1e-12);
    let comp = jh_components(&d, 0.5);
    assert_relative_eq!(comp[0], -0.4, epsilon = 1e-12);
    assert!(comp[1].abs() < 1e-12);
    assert_relative_eq!(comp[2], 0.8, epsilon = 1e-12);
}

#[test]
fn zero_section_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let d = synthetic(&mut rng);
        let Pqr { p, q, r } = pqr(&d, 0.0);
        assert_eq!(p, d.e1a + d.e1b);
        assert_eq!(q, d.e2a + d.e2b);
        assert_eq!(r, d.a + d.b);
        assert_eq!(jh_inner(&d, 0.0), [0.0, 0.0, d.a + d.b]);
        assert_eq!(jhh_tangent(&d, 0.0).map(f64::abs), [0.0; 3]);
    }
}

#[test]
fn isoparametric_points() {
    let d = pd_at(&chart("cylinder", &[("radius", 0.7)]), 1.0, 0.3);
    for t in TS {
        let Pqr { p, q, r } = pqr(&d, t);
        assert!(p.abs() < 1e-14 && q.abs() < 1e-14);
        let expect = d.a / (1.0 + t * t * d.a * d.a) + d.b / (1.0 + t * t * d.b * d.b);
        assert_relative_eq!(r, expect, epsilon = 1e-14);
        let tan = jhh_tangent(&d, t);
        assert!(tan.iter().all(|x| x.abs() < 1e-13));
        let inner = jh_inner(&d, t);
        assert!(inner[0].abs() < 1e-14 && inner[1].abs() < 1e-14);
    }
}

#[test]
fn plane_and_sphere_mean_curvature() {
    let plane = pd_at(&chart("plane", &[]), 0.3, -0.2);
    for t in TS {
        assert_eq!(mean_curvature_closed(&plane, t).norm(), 0.0);
    }
    let sphere = pd_at(&chart("sphere", &[]), 1.1, 0.4);
    let h = mean_curvature_closed(&sphere, 0.0);
    assert_relative_eq!(h, join(&(sphere.normal * -2.0), &Vector3::zeros()), epsilon = 1e-12);
}

#[test]
fn h_assembles_from_diagonal_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let d = synthetic(&mut rng);
        for t in TS {
            let fr = frames(&d, t);
            let [h4, h5, h6] = second_fundamental_diag(&d, t).traces();
            let assembled = fr.normal[0] * h4 + fr.normal[1] * h5 + fr.normal[2] * h6;
            let h = mean_curvature_closed(&d, t);
            assert!((assembled - h).norm() <= 1e-12 * (1.0 + h.norm()));
        }
    }
}

#[test]
fn jh_is_j_of_h_and_has_norm_of_h() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let d = synthetic(&mut rng);
        for t in TS {
            let h = mean_curvature_closed(&d, t);
            let jh = maslov_field(&d, t);
            assert!((complex_structure(&h) - jh).norm() <= 1e-12 * (1.0 + h.norm()));
            let fr = frames(&d, t);
            let inner = jh_inner(&d, t);
            let comps = fr.tangent_components(&jh);
            for i in 0..3 {
                assert!((comps[i] - inner[i]).abs() <= 1e-12 * (1.0 + h.norm()));
            }
            let Pqr { p, q, r } = pqr(&d, t);
            let alpha = 1.0 + t * t * d.a * d.a;
            let beta = 1.0 + t * t * d.b * d.b;
            let n2 = t * t * p * p * alpha + t * t * q * q * beta + r * r;
            assert!((h.norm_squared() - n2).abs() <= 1e-12 * (1.0 + n2));
        }
    }
}

#[test]
fn residual_parity_in_t_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let d = synthetic(&mut rng);
        for t in TS {
            let Ok(plus) = maslov_residuals(&d, t) else { continue };
            let minus = maslov_residuals(&d, -t).unwrap();
            assert_eq!(minus.f[0].to_bits(), plus.f[0].to_bits());
            assert_eq!(minus.f[1].to_bits(), (-plus.f[1]).to_bits());
            assert_eq!(minus.f[2].to_bits(), (-plus.f[2]).to_bits());
            assert_eq!(minus.fhat, plus.fhat);
        }
    }
}

#[test]
fn swapped_pair_flips_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = synthetic(&mut rng);
    let tan = jhh_tangent(&d, 0.7);
    let inner = jh_inner(&d, 0.7);
    let f = residuals_from_parts(&tan, &inner, 1.0, 1.0).f;
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let swapped = tan[j] * inner[i] - tan[i] * inner[j];
        assert_eq!(swapped, -f[k]);
    }
}

#[test]
fn expanded_display_reduces_to_simplified_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..500 {
        let d = synthetic(&mut rng);
        let dd = random_derivatives(&mut rng);
        for t in TS {
            let full = jhh_vector_expanded(&d, t, &dd);
            let tan = frames(&d, t).tangent_components(&full);
            let simple = jhh_tangent(&d, t);
            let scale = full.norm().max(simple.iter().fold(0.0f64, |m, x| m.max(x.abs())));
            for i in 0..3 {
                assert!((tan[i] - simple[i]).abs() <= 1e-10 * scale.max(1e-300), "t={t} i={i}");
            }
        }
    }
}

#[test]
fn expanded_display_matches_derivative_of_h_field() {
    let c = chart("torus", &[]);
    let d = pd_at(&c, 0.4, 1.3);
    let t = 0.8;
    let h = 1e-5;
    let at = |du: f64, dv: f64| pd_at(&c, d.point.u + du, d.point.v + dv);
    let along = |coords: Vector2Like, sign: f64| at(sign * h * coords.0, sign * h * coords.1);
    type Vector2Like = (f64, f64);
    let e1c = (d.e1_coords[0], d.e1_coords[1]);
    let e2c = (d.e2_coords[0], d.e2_coords[1]);
    let diff = |f: &dyn Fn(&PrincipalData, f64) -> f64, dir: Vector2Like| {
        (f(&along(dir, 1.0), t) - f(&along(dir, -1.0), t)) / (2.0 * h)
    };
    let pf = |p: &PrincipalData, t: f64| pqr(p, t).p;
    let qf = |p: &PrincipalData, t: f64| pqr(p, t).q;
    let rf = |p: &PrincipalData, t: f64| pqr(p, t).r;
    let dt = |f: &dyn Fn(&PrincipalData, f64) -> f64| (f(&d, t + h) - f(&d, t - h)) / (2.0 * h);
    let derivs = HFieldDerivatives {
        e1p: diff(&pf, e1c),
        e2p: diff(&pf, e2c),
        dp_dt: dt(&pf),
        e1q: diff(&qf, e1c),
        e2q: diff(&qf, e2c),
        dq_dt: dt(&qf),
        e1r: diff(&rf, e1c),
        e2r: diff(&rf, e2c),
        dr_dt: dt(&rf),
    };
    let expanded = jhh_vector_expanded(&d, t, &derivs);
    let c3 = maslov_coords(&d, t);
    let s = 1e-5 / c3.amax();
    let h_at = |sign: f64| {
        let p = at(sign * s * c3[0], sign * s * c3[1]);
        mean_curvature_closed(&p, t + sign * s * c3[2])
    };
    let fd = (h_at(1.0) - h_at(-1.0)) / (2.0 * s);
    assert!((expanded - fd).norm() < 1e-6 * (1.0 + fd.norm()), "{}", (expanded - fd).norm());
}

#[test]
fn isoparametric_surfaces_are_maslovian() {
    for (name, params, pts) in [
        ("sphere", vec![("radius", 2.5)], [(0.5, 0.1), (1.4, 2.0), (2.5, 5.0)]),
        ("cylinder", vec![("radius", 0.7)], [(0.5, 0.1), (1.4, -0.5), (2.5, 0.9)]),
    ] {
        let c = chart(name, &params);
        for (u, v) in pts {
            let d = pd_at(&c, u, v);
            for t in TS {
                let res = maslov_residuals(&d, t).unwrap();
                assert!(res.fhat_max() <= 1e-8, "{name} {res:?}");
            }
        }
    }
}

#[test]
fn cones_are_maslovian() {
    for r in [0.5, 1.0, 2.0, 3.0] {
        let c = chart("cone", &[("r", r)]);
        for (u, v) in [(0.7, 0.2), (1.3, 1.5), (1.9, 3.0)] {
            let d = pd_at(&c, u, v);
            for t in TS {
                let res = maslov_residuals(&d, t).unwrap();
                assert!(res.fhat_max() <= 1e-9, "r={r} {res:?}");
            }
        }
    }
}

#[test]
fn ellipsoid_is_not_maslovian() {
    let c = chart("ellipsoid", &[]);
    let d = principal_frame(&c, ChartPoint::new(0.9, 0.6)).unwrap();
    let res = maslov_residuals(&d, 1.0).unwrap();
    assert!(res.fhat_max() > 1e-3, "{res:?}");
}

#[test]
fn f12_is_generically_nonzero() {
    let c = chart("graph", &[]);
    let d = principal_frame(&c, ChartPoint::new(0.3, -0.4)).unwrap();
    let res = maslov_residuals(&d, 0.7).unwrap();
    assert!(res.f[0].abs() > 1e-6, "{res:?}");
}

#[test]
fn vanishing_h_is_reported() {
    let d = pd_at(&chart("plane", &[]), 0.0, 0.0);
    assert!(matches!(maslov_residuals(&d, 1.0), Err(Error::VanishingH { .. })));
    let cat = pd_at(&chart("catenoid", &[]), 0.2, 1.0);
    assert!(maslov_data(&cat, 0.5).residuals.is_none());
}

#[test]
fn normal_flip_leaves_magnitudes_unchanged() {
    let c = chart("torus", &[]);
    let flipped = c.clone().with_flipped_normal();
    let d = pd_at(&c, 0.4, 1.3);
    let v = flipped.domain().v[0] + flipped.domain().v[1] - 1.3;
    let e = pd_at(&flipped, 0.4, v);
    assert!((e.normal + d.normal).norm() < 1e-12);
    for t in TS {
        let rd = maslov_residuals(&d, t).unwrap();
        let re = maslov_residuals(&e, t).unwrap();
        assert_relative_eq!(
            mean_curvature_closed(&d, t).norm(),
            mean_curvature_closed(&e, t).norm(),
            max_relative = 1e-10
        );
        let scale = rd.f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((rd.f[0].abs() - re.f[0].abs()).abs() <= 1e-9 * scale);
        assert!((rd.f[1].abs() - re.f[2].abs()).abs() <= 1e-9 * scale);
        assert!((rd.f[2].abs() - re.f[1].abs()).abs() <= 1e-9 * scale);
    }
}

#[test]
fn closed_h_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in crate::surface::CATALOG_NAMES {
        let c = chart(name, &[]);
        let je = JetEvaluator::new(&c);
        let dom = c.domain();
        for _ in 0..40 {
            let p = ChartPoint::new(rng.gen_range(dom.u[0]..dom.u[1]), rng.gen_range(dom.v[0]..dom.v[1]));
            let t = rng.gen_range(-2.0..2.0);
            let d = pd_at(&c, p.u, p.v);
            let hc = mean_curvature_closed(&d, t);
            let ho = mean_curvature_oracle(&je, BundlePoint { p, t }).unwrap();
            assert!((hc - ho).norm() <= 1e-6 * (1.0 + hc.norm()), "{name}");
        }
    }
}

#[test]
fn dual_path_residuals_agree() {
    let cone = chart("cone", &[("r", 2.0)]);
    let je = JetEvaluator::new(&cone);
    for (u, v, t) in [(0.8, 0.3, 0.5), (1.5, 2.0, -1.0), (1.1, 4.0, 2.0)] {
        let d = pd_at(&cone, u, v);
        let o = maslov_residual_oracle(&je, BundlePoint { p: d.point, t }, &frames(&d, t)).unwrap();
        let cl = maslov_residuals(&d, t).unwrap();
        for k in 0..3 {
            assert!((o.f[k] - cl.f[k]).abs() <= 1e-5);
        }
    }
    let torus = chart("torus", &[]);
    let je = JetEvaluator::new(&torus);
    let d = pd_at(&torus, 0.4, 1.0);
    for t in [0.5, 1.0] {
        let o = maslov_residual_oracle(&je, BundlePoint { p: d.point, t }, &frames(&d, t)).unwrap();
        let cl = maslov_residuals(&d, t).unwrap();
        assert!(cl.f[1].abs() > 1e-3);
        for k in 0..3 {
            let tol = if cl.f[k].abs() > 1e-8 { 1e-4 * cl.f[k].abs() } else { 1e-5 };
            assert!((o.f[k] - cl.f[k]).abs() <= tol, "{k} {:?} {:?}", o.f, cl.f);
        }
    }
}

#[test]
fn remark_residual_on_model_surfaces() {
    for (name, params) in [
        ("sphere", vec![]),
        ("cylinder", vec![]),
        ("cone", vec![("r", 1.0)]),
        ("cone", vec![("r", 3.0)]),
    ] {
        let c = chart(name, &params);
        for (u, v) in [(0.7, 0.4), (1.3, 0.9)] {
            let d = pd_at(&c, u, v);
            for t in TS {
                let r = ajh_h_residual(&c, &d, t, ZeroH::Reject).unwrap();
                assert!(r <= 1e-5, "{name} {r}");
            }
        }
    }
    let plane = chart("plane", &[]);
    let d = pd_at(&plane, 0.1, 0.1);
    assert!(matches!(ajh_h_residual(&plane, &d, 1.0, ZeroH::Reject), Err(Error::VanishingH { .. })));
    assert_eq!(ajh_h_residual(&plane, &d, 1.0, ZeroH::Allow).unwrap(), 0.0);
    let ell = chart("ellipsoid", &[]);
    let d = pd_at(&ell, 0.9, 0.6);
    assert!(ajh_h_residual(&ell, &d, 1.0, ZeroH::Reject).unwrap() > 1e-3);
}

#[test]
fn hamiltonian_stationarity() {
    let sphere = chart("sphere", &[]);
    let cat = chart("catenoid", &[]);
    let cone1 = chart("cone", &[("r", 1.0)]);
    for c in [&sphere, &cat, &cone1] {
        for (u, v) in [(0.7, 0.4), (0.6, 2.0)] {
            let d = pd_at(c, u, v);
            for t in TS {
                let r = hamiltonian_residual(c, &d, t).unwrap();
                assert!(r <= 1e-5, "{} {r}", c.name());
            }
        }
    }
    let cone2 = chart("cone", &[("r", 2.0)]);
    let d = pd_at(&cone2, 0.7, 0.4);
    let worst = TS.iter().map(|&t| hamiltonian_residual(&cone2, &d, t).unwrap()).fold(0.0, f64::max);
    assert!(worst >= 1e-2, "{worst}");
}

#[test]
fn identity_examples() {
    let x = IdentityInputs { a: 1.0, b: 2.0, e1a: 3.0, e1b: 5.0, ..Default::default() };
    assert_eq!(identity_coeffs_closed(&x).f1, -144.0);
    let y = IdentityInputs { a: 1.0, b: 2.0, e2a: 7.0, e2b: -7.0, ..Default::default() };
    assert_eq!(closed_f3_g3(&y).unwrap().1, -756.0);
    let z = IdentityInputs { a: 1.5, b: -1.5, e1a: 0.3, e1b: -0.3, e2a: 0.2, e2b: -0.2 };
    let cz = identity_coeffs_closed(&z);
    assert_eq!([cz.f1.abs(), cz.g1.abs(), cz.f3.unwrap().abs(), cz.g3.unwrap().abs()], [0.0; 4]);
    assert!(matches!(closed_f3_g3(&x), Err(Error::ConstraintViolated { .. })));
}

#[test]
fn isoparametric_inputs_extract_to_zero() {
    let x = IdentityInputs { a: 0.7, b: -1.3, ..Default::default() };
    let c = identity_coeffs(&x, &DEFAULT_T_SAMPLES).unwrap();
    assert_eq!(c.extracted_f, [0.0; 5]);
    assert_eq!(c.extracted_g, [0.0; 5]);
}

#[test]
fn extracted_coefficients_match_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..300 {
        let mut v = [0.0; 6];
        for x in v.iter_mut() {
            *x = rng.gen_range(-2.0..2.0);
        }
        let x = IdentityInputs::from_array(v);
        let c = identity_coeffs(&x, &DEFAULT_T_SAMPLES).unwrap();
        assert!(c.extracted_f.iter().chain(&c.extracted_g).all(|v| v.is_finite()));
        assert!(relative_error(c.extracted_f[0], c.f1) <= 1e-7);
        assert!(relative_error(c.extracted_g[0], c.g1) <= 1e-7);
        let y = x.constrained();
        let c = identity_coeffs(&y, &DEFAULT_T_SAMPLES).unwrap();
        assert!(relative_error(c.extracted_f[1], c.f3.unwrap()) <= 1e-7);
        assert!(relative_error(c.extracted_g[1], c.g3.unwrap()) <= 1e-7);
    }
}

#[test]
fn ill_conditioned_samples_are_rejected() {
    let x = IdentityInputs { a: 1.0, b: 0.5, e1a: 1.0, ..Default::default() };
    let tight = [1e-3, 2e-3, 3e-3, 4e-3, 5e-3];
    assert!(matches!(identity_coeffs_extracted(&x, &tight), Err(Error::IllConditioned { .. })));
    let dup = [0.1, 0.2, 0.2, 0.4, 0.5];
    assert!(matches!(identity_coeffs_extracted(&x, &dup), Err(Error::InvalidParams(_))));
}

#[test]
fn residuals_factor_through_phi_and_psi() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let d = synthetic(&mut rng);
        let x = IdentityInputs { a: d.a, b: d.b, e1a: d.e1a, e1b: d.e1b, e2a: d.e2a, e2b: d.e2b };
        for t in TS {
            let f = residuals_from_parts(&jhh_tangent(&d, t), &jh_inner(&d, t), 1.0, 1.0).f;
            let [phi1, phi2, psi1, psi2] = phi_psi(&x, t);
            let sa = (1.0 + t * t * d.a * d.a).sqrt();
            let sb = (1.0 + t * t * d.b * d.b).sqrt();
            let lhs13 = sa * f[1];
            let rhs13 = phi1 * t * t * t + phi2 * t;
            let lhs23 = sb * f[2];
            let rhs23 = psi1 * t * t * t + psi2 * t;
            assert!((lhs13 - rhs13).abs() <= 1e-10 * (1.0 + rhs13.abs()), "{lhs13} {rhs13}");
            assert!((lhs23 - rhs23).abs() <= 1e-10 * (1.0 + rhs23.abs()), "{lhs23} {rhs23}");
        }
    }
}

#[test]
fn cell_grid_avoids_poles() {
    let c = chart("sphere", &[]);
    assert!(c.grid(4, 4).iter().all(|p| p.u > 0.15 && p.u < PI - 0.15));
}
