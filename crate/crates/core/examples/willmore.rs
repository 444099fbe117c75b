//! Willmore energy ½∮k² ds and its first variation, computed directly and in
//! the integrated-by-parts form with its boundary term.

use knotbend::bending::{decompose_field, field_from_recipe};
use knotbend::curve::sample_curve;
use knotbend::energy::{willmore, willmore_variation_direct, willmore_variation_theorem};
use knotbend::knotfile::read_knot_spec;

fn main() {
    for name in ["circle", "figure_eight", "trefoil"] {
        let path = format!("{}/examples/{name}.knot", env!("CARGO_MANIFEST_DIR"));
        let spec = read_knot_spec(path.as_ref()).unwrap();
        let curve = sample_curve(&spec.curve, 1024).unwrap();
        let w = willmore(&curve).unwrap();
        println!("{name}: W = {:.10} (N/2 grid differs by {:.1e})", w.value, w.refinement_delta);
        let Some(recipe) = &spec.field else { continue };
        let field = decompose_field(&curve, &field_from_recipe(&curve, recipe).unwrap()).unwrap();
        let direct = willmore_variation_direct(&curve, &field).unwrap();
        let theorem = willmore_variation_theorem(&curve, &field).unwrap();
        println!(
            "  dW = {:.10}  by parts: {:.10} = {:.10} (interior) + {:.10} (boundary)",
            direct.value,
            theorem.value,
            theorem.interior.unwrap(),
            theorem.boundary.unwrap()
        );
    }
}
