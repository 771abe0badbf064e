use super::*;
use crate::plane::{to_pseudopolar, Branch, CausalSign};
use crate::samples::{null_jets, numeric_curvature};
use approx::assert_abs_diff_eq;

fn guard(n: usize) -> usize {
    ((0.02 * n as f64).round() as usize).max(2)
}

fn worst_speed(samples: &CurveSamples) -> f64 {
    let jets = null_jets(samples, 5).unwrap();
    let g = guard(jets.len());
    let e = samples.epsilon().value();
    jets[g..jets.len() - g]
        .iter()
        .map(|j| (j.speed_sq() - e).abs())
        .fold(0.0, f64::max)
}

#[test]
fn geodesic_at_zero_angle_is_the_y_axis() {
    let d = FamilyDescriptor::new(FamilyId::Geodesic, CausalSign::Spacelike);
    let s = linspace(-1.0, 1.0, 21);
    let out = evaluate_family(&d, &s).unwrap();
    for (p, &si) in out.points().iter().zip(&s) {
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, si, epsilon = 1e-15);
    }
}

#[test]
fn sturm_minus_one_minus_branch() {
    let d = FamilyDescriptor::new(FamilyId::SturmExtended, CausalSign::Spacelike)
        .with("mu", -1.0)
        .with_branch(Branch::Minus);
    let s = linspace(-2.0, 2.0, 41);
    let out = evaluate_family(&d, &s).unwrap();
    for (p, &si) in out.points().iter().zip(&s) {
        let q = to_pseudopolar(*p);
        assert_abs_diff_eq!(q.rho, si.cosh() + 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.nu, si - (0.5 * si).tanh(), epsilon = 1e-12);
    }
}

#[test]
fn elastic_under_tension_u_formula() {
    for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
        let c = 1.7;
        let d = FamilyDescriptor::new(FamilyId::Elastic, eps).with("c", c);
        let s = linspace(-0.5, 0.5, 11);
        let out = evaluate_family(&d, &s).unwrap();
        let r = c.sqrt();
        for (&(u, v), &si) in out.uv().iter().zip(&s) {
            let e = eps.value();
            assert_abs_diff_eq!(u, -(e / c) * (si / 2.0 + (2.0 * r * si).sin() / (4.0 * r)), epsilon = 1e-14);
            assert_abs_diff_eq!(v, -r * (r * si).tan(), epsilon = 1e-14);
        }
    }
}

#[test]
fn intrinsic_equations() {
    let el = intrinsic_equation(&FamilyDescriptor::new(FamilyId::Elastic, CausalSign::Spacelike).with("c", 0.0))
        .unwrap();
    assert_abs_diff_eq!(el.eval(0.5), 4.0, epsilon = 1e-15);
    let gr = intrinsic_equation(&FamilyDescriptor::new(FamilyId::GrimReaper, CausalSign::Timelike)).unwrap();
    assert_abs_diff_eq!(gr.eval(4.0), 0.25, epsilon = 1e-15);
    assert_eq!(gr.domain.lo, 0.0);
    let mu = 0.3;
    let st = intrinsic_equation(
        &FamilyDescriptor::new(FamilyId::SturmExtended, CausalSign::Spacelike)
            .with("mu", mu)
            .with_branch(Branch::Minus),
    )
    .unwrap();
    for s in [-1.0, 0.0, 2.5] {
        assert_abs_diff_eq!(st.eval(s), 2.0 + mu / (f64::cosh(s) - mu), epsilon = 1e-14);
    }
    let en = intrinsic_equation(&FamilyDescriptor::new(FamilyId::Enneper, CausalSign::Spacelike)).unwrap();
    assert_abs_diff_eq!(en.eval(2.0), 0.25, epsilon = 1e-15);
}

#[test]
fn pseudopolar_only_families() {
    for id in [FamilyId::Sinusoidal, FamilyId::EnneperC, FamilyId::Norwich] {
        let r = intrinsic_equation(&FamilyDescriptor::new(id, CausalSign::Spacelike));
        assert!(matches!(r, Err(Error::PseudopolarOnly(_))), "{id}");
    }
}

#[test]
fn every_reference_instance_is_unit_speed() {
    let all = reference_instances();
    assert!(all.len() >= 20);
    for d in &all {
        let out = sample_family(d, 512, None).unwrap();
        let r = worst_speed(&out);
        assert!(r < 1e-6, "{:?}: speed residual {r:e} range {:?}", d, (out.s()[0], out.s()[out.len()-1]));
    }
}

#[test]
fn numeric_curvature_matches_attached_law() {
    for d in reference_instances() {
        let out = sample_family(&d, 512, None).unwrap();
        let kn = numeric_curvature(&out).unwrap();
        let k = out.kappa().unwrap();
        let g = guard(kn.len());
        for i in g..kn.len() - g {
            let tol = 1e-5 * (1.0 + k[i].abs());
            assert!((kn[i] - k[i]).abs() < tol, "{:?} at s = {}: {} vs {}", d, out.s()[i], kn[i], k[i]);
        }
    }
}

#[test]
fn attached_momentum_is_consistent() {
    for d in reference_instances() {
        let cf = closed_form(&d).unwrap();
        let out = sample_family(&d, 64, None).unwrap();
        let xs: Vec<f64> = match d.id.variable() {
            Variable::Rho => out.rho(),
            Variable::V => out.v(),
        };
        let probe: Vec<f64> = xs.iter().copied().filter(|&x| x.abs() > 1e-3).collect();
        let (r, at) = cf.momentum.consistency_residual(d.epsilon, &probe);
        assert!(r < 1e-6, "{:?}: {r:e} at {at}", d);
    }
}

#[test]
fn norwich_radius_of_curvature_is_pseudodistance() {
    for br in [Branch::Plus, Branch::Minus] {
        let d = FamilyDescriptor::new(FamilyId::Norwich, CausalSign::Spacelike)
            .with("c", 1.5)
            .with_branch(br);
        let out = sample_family(&d, 512, None).unwrap();
        let kn = numeric_curvature(&out).unwrap();
        let rho = out.rho();
        let g = guard(kn.len());
        for i in g..kn.len() - g {
            assert!((kn[i] * rho[i] - 1.0).abs() < 1e-6, "{br:?} at s = {}", out.s()[i]);
        }
    }
}

#[test]
fn norwich_arc_length_from_quadrature_matches_closed_form() {
    let d = FamilyDescriptor::new(FamilyId::Norwich, CausalSign::Timelike);
    let t = linspace(-0.8, 0.8, 33);
    let out = evaluate_family(&d, &t).unwrap();
    for (&s, &ti) in out.s().iter().zip(out.aux().unwrap()) {
        assert_abs_diff_eq!(s, 0.5 * (ti - ti.powi(3) / 3.0), epsilon = 1e-13);
    }
    let d = FamilyDescriptor::new(FamilyId::Norwich, CausalSign::Spacelike);
    let cf = closed_form(&d).unwrap();
    let (lo, hi) = cf.default_range;
    let out = evaluate_family(&d, &linspace(lo, hi, 33)).unwrap();
    for (&s, &ti) in out.s().iter().zip(out.aux().unwrap()) {
        assert_abs_diff_eq!(s, cf.closed_arc_length(ti).unwrap(), epsilon = 1e-12);
    }
}

#[test]
fn norwich_is_dilation_covariant() {
    let base = FamilyDescriptor::new(FamilyId::Norwich, CausalSign::Spacelike);
    let t = linspace(0.8, 2.0, 17);
    let one = evaluate_family(&base, &t).unwrap();
    let three = evaluate_family(&base.clone().with("c", 3.0), &t).unwrap();
    let scaled = one.dilate(3.0);
    for i in 0..t.len() {
        assert_abs_diff_eq!(three.s()[i], scaled.s()[i], epsilon = 1e-12);
        assert_abs_diff_eq!(three.points()[i].x, scaled.points()[i].x, epsilon = 1e-12);
        assert_abs_diff_eq!(three.points()[i].y, scaled.points()[i].y, epsilon = 1e-12);
    }
}

#[test]
fn sinusoidal_samples_satisfy_their_relation() {
    for d in reference_instances().into_iter().filter(|d| d.id == FamilyId::Sinusoidal) {
        let (n, lam) = (d.param("n").unwrap(), d.param("lambda").unwrap());
        let rel = sinusoidal_relation(n, lam, if d.sigma() > 0.0 { Branch::Plus } else { Branch::Minus });
        let out = sample_family(&d, 200, None).unwrap();
        for p in out.points() {
            let q = to_pseudopolar(*p);
            let r = rel(q.rho, q.nu);
            assert!(r.abs() < 1e-8, "{:?}: {r:e}", d);
        }
    }
}

#[test]
fn sinusoidal_relation_examples() {
    // ρ² = sinh 2ν
    let f = sinusoidal_relation(2.0, 3.0, Branch::Plus);
    let nu: f64 = 0.4;
    assert_abs_diff_eq!(f((2.0 * nu).sinh().sqrt(), nu), 0.0, epsilon = 1e-14);
    // ρ² = 1/cosh 2ν
    let f = sinusoidal_relation(-2.0, 1.0, Branch::Minus);
    assert_abs_diff_eq!(f((1.0 / (2.0 * nu).cosh()).sqrt(), nu), 0.0, epsilon = 1e-14);
    // √ρ = sinh(ν/2)
    let f = sinusoidal_relation(0.5, 1.5, Branch::Plus);
    assert_abs_diff_eq!(f((0.5 * nu).sinh().powi(2), nu), 0.0, epsilon = 1e-14);
}

#[test]
fn enneper_spacelike_is_the_cubic_graph() {
    let d = FamilyDescriptor::new(FamilyId::Enneper, CausalSign::Spacelike);
    let out = sample_family(&d, 512, None).unwrap();
    for &(u, v) in out.uv() {
        assert!((u - v.powi(3) / 3.0).abs() <= 1e-9 * (1.0 + u.abs()));
    }
}

#[test]
fn elastic_equation_and_energy_with_exact_jets() {
    for c in [0.0, 1.0, -1.0, 2.5] {
        for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
            let d = FamilyDescriptor::new(FamilyId::Elastic, eps).with("c", c);
            let (sigma, energy) = elastic_constants(&d).unwrap();
            if c != 0.0 {
                assert_eq!(energy, sigma * sigma / 4.0);
            }
            let out = sample_family(&d, 512, None).unwrap();
            let k = out.kappa().unwrap();
            let (kd, kdd) = out.kappa_derivatives().unwrap();
            for i in 0..k.len() {
                let eq = 2.0 * kdd[i] - k[i].powi(3) - sigma * k[i];
                let en = kd[i] * kd[i] - k[i].powi(4) / 4.0 - sigma * k[i] * k[i] / 2.0 - energy;
                let scale = 1.0 + k[i].abs().powi(4);
                assert!(eq.abs() < 1e-9 * scale, "c = {c}: {eq:e}");
                assert!(en.abs() < 1e-9 * scale, "c = {c}: {en:e}");
            }
        }
    }
}

#[test]
fn elastic_prescaling_gives_linear_law() {
    let (a, b) = (4.0, 1.0);
    let d = FamilyDescriptor::new(FamilyId::Elastic, CausalSign::Spacelike)
        .with("c", 2.0)
        .with("a", a)
        .with("b", b);
    let out = sample_family(&d, 512, None).unwrap();
    let kn = numeric_curvature(&out).unwrap();
    let v = out.v();
    for i in 10..kn.len() - 10 {
        assert!((kn[i] - (a * v[i] + b)).abs() < 1e-6 * (1.0 + kn[i].abs()));
    }
}

#[test]
fn geodesic_composes_with_orthochrone() {
    let s = linspace(-1.0, 1.0, 11);
    let a = evaluate_family(&FamilyDescriptor::new(FamilyId::Geodesic, CausalSign::Spacelike).with("phi0", 0.3), &s)
        .unwrap();
    let b = evaluate_family(&FamilyDescriptor::new(FamilyId::Geodesic, CausalSign::Spacelike).with("phi0", 0.8), &s)
        .unwrap();
    let r = a.orthochrone(0.5);
    for (p, q) in r.points().iter().zip(b.points()) {
        assert_abs_diff_eq!(p.x, q.x, epsilon = 1e-14);
        assert_abs_diff_eq!(p.y, q.y, epsilon = 1e-14);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let bad = [
        FamilyDescriptor::new(FamilyId::SturmExtended, CausalSign::Spacelike).with("mu", 0.0),
        FamilyDescriptor::new(FamilyId::Sinusoidal, CausalSign::Spacelike).with("n", -1.0),
        FamilyDescriptor::new(FamilyId::Norwich, CausalSign::Spacelike).with("c", -1.0),
        FamilyDescriptor::new(FamilyId::ExpC, CausalSign::Spacelike).with("c", 0.0),
        FamilyDescriptor::new(FamilyId::Geodesic, CausalSign::Spacelike).with("k0", 1.0),
        FamilyDescriptor::new(FamilyId::Geodesic, CausalSign::Spacelike).with("phi0", f64::NAN),
    ];
    for d in bad {
        assert!(matches!(closed_form(&d), Err(Error::InvalidParameter { .. })), "{:?}", d);
    }
}

#[test]
fn out_of_domain_parameter() {
    let d = FamilyDescriptor::new(FamilyId::Norwich, CausalSign::Spacelike).with_branch(Branch::Minus);
    assert!(matches!(evaluate_family(&d, &[0.0, 1.2]), Err(Error::OutOfDomain { .. })));
    let d = FamilyDescriptor::new(FamilyId::SturmExtended, CausalSign::Spacelike)
        .with("mu", 2.0)
        .with_branch(Branch::Minus);
    // needs s > arccosh 2
    assert!(evaluate_family(&d, &[1.0, 2.0]).is_err());
    assert!(evaluate_family(&d, &[1.5, 2.0]).is_ok());
}

#[test]
fn registry_round_trips_names() {
    for id in FamilyId::ALL {
        assert_eq!(id.name().parse::<FamilyId>().unwrap(), id);
        assert!(!id.params().is_empty());
    }
    assert!("spiral".parse::<FamilyId>().is_err());
}
