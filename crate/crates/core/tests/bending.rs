mod common;

use knotbend::bending::{bend, bending_residual, field_from_recipe, isometry_defect, BendingField, FieldRecipe};
use knotbend::expr::parse;
use knotbend::variation::{deformed_magnitudes, delta_curvature, delta_torsion, fd_variation, loglog_slope, Quantity, Scheme};
use nalgebra::Vector3;
use proptest::prelude::*;

use common::{bundled, curve, decomposed, knot, rigid};

fn frenet(p: &str, q: &str) -> FieldRecipe {
    FieldRecipe::frenet(parse(p).unwrap(), parse(q).unwrap())
}

#[test]
fn bundled_fields_are_bending_fields() {
    for name in ["trefoil", "figure_eight"] {
        let (c, f) = bundled(name, 512);
        let r = bending_residual(&c, &f);
        assert!(r <= 1e-10, "{name}: {r:e}");
    }
}

#[test]
fn trefoil_length_change_is_second_order() {
    let (c, f) = bundled("trefoil", 512);
    let ratios: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&e| isometry_defect(&c, &f, e).unwrap().length_change / (e * e))
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(lo > 0.0 && (hi - lo) / lo <= 0.01, "{ratios:?}");
}

#[test]
fn line_elements_never_shrink() {
    for name in ["trefoil", "figure_eight"] {
        let (c, f) = bundled(name, 512);
        let d = isometry_defect(&c, &f, 0.1).unwrap();
        assert!(d.min_increment() >= -1e-12, "{name}: {:e}", d.min_increment());
    }
}

#[test]
fn length_has_no_first_variation() {
    let (c, f) = bundled("trefoil", 512);
    let r = fd_variation(Quantity::Length, &c, &f, &[1e-2, 1e-3, 1e-4], Scheme::Forward).unwrap();
    assert!(r.increment_slope() >= 1.95, "{}", r.increment_slope());
    let ds = fd_variation(Quantity::LineElement, &c, &f, &[1e-2, 1e-3, 1e-4], Scheme::Forward).unwrap();
    assert!(ds.increment_slope() >= 1.95, "{}", ds.increment_slope());
}

#[test]
fn squared_line_element_change_is_second_order() {
    let (c, f) = bundled("figure_eight", 256);
    let eps = [1e-4, 1e-3, 1e-2];
    let base = c.arc_weights();
    let gaps: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let b = bend(&c, &f, e).unwrap().arc_weights();
            b.iter().zip(&base).map(|(x, y)| (x * x - y * y).abs()).fold(0.0, f64::max)
        })
        .collect();
    let slope = loglog_slope(&eps, &gaps);
    assert!((slope - 2.0).abs() <= 0.05, "{slope}");
}

#[test]
fn zero_step_changes_nothing() {
    let (c, f) = bundled("trefoil", 256);
    let d = isometry_defect(&c, &f, 0.0).unwrap();
    assert_eq!(d.length_change, 0.0);
    assert_eq!(d.max_second_order_gap, 0.0);
}

#[test]
fn deformed_curvature_is_accurate_to_second_order() {
    let (c, f) = bundled("trefoil", 512);
    let gap = |e: f64| {
        let approx = deformed_magnitudes(&c, &f, e).unwrap();
        let exact = bend(&c, &f, e).unwrap();
        let k = (0..c.len()).map(|i| (approx.k[i] - exact.curvature(i)).abs()).fold(0.0, f64::max);
        let unit = approx.n1.iter().map(|n| (n.norm_squared() - 1.0).abs()).fold(0.0, f64::max);
        (k, unit)
    };
    let (k2, u2) = gap(1e-2);
    let (k3, u3) = gap(1e-3);
    assert!(k2 / k3 > 80.0, "{k2:e} {k3:e}");
    assert!(u2 / u3 > 80.0, "{u2:e} {u3:e}");
}

#[test]
fn pure_normal_field_on_circle() {
    let c = curve("cos(u)", "sin(u)", "0", 256);
    let f = field_from_recipe(&c, &frenet("1", "0")).unwrap();
    assert!(bending_residual(&c, &f) <= 1e-15);
}

#[test]
fn scaling_is_not_a_bending() {
    let c = curve("cos(u)", "sin(u)", "0", 256);
    let x = parse("cos(u)").unwrap();
    let y = parse("sin(u)").unwrap();
    let z = parse("0").unwrap();
    let f = BendingField::from_expressions(&c, [&x, &y, &z]).unwrap();
    assert!((bending_residual(&c, &f) - 1.0).abs() < 1e-12);
}

#[test]
fn bent_family_at_mesh_steps() {
    let (c, f) = bundled("trefoil", 512);
    let l = c.length();
    for e in [0.3, 0.6] {
        let b = bend(&c, &f, e).unwrap();
        assert!(b.length() > l);
        // the open field leaves a gap of ε|z(L) − z(0)|
        assert!((b.closure_gap() - e * f.closure_defect()).abs() < 1e-9);
    }
}

fn unit(v: [f64; 3]) -> Vector3<f64> {
    let v = Vector3::from(v);
    if v.norm() < 1e-3 {
        Vector3::z()
    } else {
        v.normalize()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fields_depend_linearly_on_the_recipe(a in -2.0f64..2.0, b in -2.0f64..2.0, m in 1u32..5) {
        let c = curve("sin(u)+2*cos(2*u)", "cos(u)-2*cos(2*u)", "-sin(3*u)", 256);
        let f1 = field_from_recipe(&c, &frenet(&format!("cos({m}*u)"), "0")).unwrap();
        let f2 = field_from_recipe(&c, &frenet("0", &format!("sin({m}*u)"))).unwrap();
        let mixed = field_from_recipe(&c, &frenet(&format!("{a}*cos({m}*u)"), &format!("{b}*sin({m}*u)"))).unwrap();
        let combo = f1.combine(a, &f2, b);
        for i in 0..c.len() {
            prop_assert!((mixed.value(i) - combo.value(i)).norm() <= 1e-12 * (1.0 + combo.value(i).norm()));
        }
    }

    #[test]
    fn rigid_motions_are_bendings_that_keep_k_and_tau(
        axis in prop::array::uniform3(-1.0f64..1.0),
        shift in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let spec = knot("figure_eight");
        let c = knotbend::curve::sample_curve(&spec.curve, 256).unwrap();
        let rot = rigid(&c, BendingField::rotation(&c, unit(axis)));
        let tr = rigid(&c, BendingField::translation(&c, Vector3::from(shift)));
        prop_assert!(bending_residual(&c, &rot) <= 1e-12);
        for f in [&rot, &tr] {
            let dk = delta_curvature(&c, f).unwrap();
            let dt = delta_torsion(&c, f).unwrap();
            prop_assert!(dk.iter().chain(&dt).all(|v| v.abs() <= 1e-6));
        }
    }
}

#[test]
fn decomposed_field_agrees_with_components() {
    let (c, f) = bundled("figure_eight", 256);
    let comps = f.components().unwrap();
    for (i, s) in c.samples().iter().enumerate().step_by(17) {
        let z = f.value(i);
        let comp = &comps[i];
        let fr = &s.frame;
        assert!((z.dot(&fr.t) - comp.tangential.value()).abs() < 1e-12);
        assert!((z.dot(&fr.n1) - comp.normal.value()).abs() < 1e-12);
        assert!((z.dot(&fr.n2) - comp.binormal.value()).abs() < 1e-12);
    }
}

#[test]
fn zero_integrand_is_a_translation() {
    let c = curve("cos(u)", "sin(u)", "0", 128);
    let z0 = Vector3::new(0.0, 0.0, 1.0);
    let f = decomposed(&c, &frenet("0", "0").with_offset(z0));
    for (i, comp) in f.components().unwrap().iter().enumerate() {
        assert_eq!(f.value(i), z0);
        assert!(comp.tangential.value().abs() < 1e-15 && comp.normal.value().abs() < 1e-15);
        assert!((comp.binormal.value() - 1.0).abs() < 1e-15);
    }
}
