//! Möbius energy of the circle at increasing resolution, and the first
//! variation on the figure-eight with its finite-difference check.

use knotbend::bending::{decompose_field, field_from_recipe};
use knotbend::curve::sample_curve;
use knotbend::energy::{mobius, mobius_variation};
use knotbend::knotfile::read_knot_spec;
use knotbend::variation::{fd_variation, Quantity, Scheme};

fn load(name: &str, n: usize) -> (knotbend::knotfile::KnotSpec, knotbend::curve::SampledCurve) {
    let path = format!("{}/examples/{name}.knot", env!("CARGO_MANIFEST_DIR"));
    let spec = read_knot_spec(path.as_ref()).unwrap();
    let curve = sample_curve(&spec.curve, n).unwrap();
    (spec, curve)
}

fn main() {
    // the error falls like N⁻², so one Richardson step recovers 4
    let (_, c1) = load("circle", 256);
    let (_, c2) = load("circle", 512);
    let (e1, e2) = (mobius(&c1).unwrap().value, mobius(&c2).unwrap().value);
    println!("circle: E(256) = {e1:.8}  E(512) = {e2:.8}  extrapolated {:.8}", (4.0 * e2 - e1) / 3.0);

    let (spec, curve) = load("figure_eight", 512);
    let field = decompose_field(&curve, &field_from_recipe(&curve, spec.field.as_ref().unwrap()).unwrap()).unwrap();
    println!("figure-eight: E = {:.8}", mobius(&curve).unwrap().value);
    let v = mobius_variation(&curve, &field).unwrap();
    println!("  dE = {:.3e}  (swap defect {:.1e})", v.value, v.swap_defect.unwrap());
    let r = fd_variation(Quantity::Mobius, &curve, &field, &[1e-2, 1e-3, 1e-4], Scheme::Forward).unwrap();
    println!("  FD discrepancy {:?}, slope {:.3}", r.discrepancy, r.slope());
}
