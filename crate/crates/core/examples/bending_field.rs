//! Build the bending field of the figure-eight from p, q and check the
//! defining condition ṙ·ż = 0, the closure and the tangential component.

use knotbend::bending::{bending_residual, decompose_field, field_from_recipe, isometry_defect};
use knotbend::curve::sample_curve;
use knotbend::knotfile::read_knot_spec;

fn main() {
    for name in ["figure_eight", "trefoil"] {
        let path = format!("{}/examples/{name}.knot", env!("CARGO_MANIFEST_DIR"));
        let spec = read_knot_spec(path.as_ref()).unwrap();
        let curve = sample_curve(&spec.curve, 512).unwrap();
        let raw = field_from_recipe(&curve, spec.field.as_ref().unwrap()).unwrap();
        let field = decompose_field(&curve, &raw).unwrap();
        let check = field.decomposition_check().unwrap();
        println!("{name}");
        println!("  max |r'.z'| / (|r'||z'|) = {:.3e}", bending_residual(&curve, &field));
        println!("  closure defect |z(L)-z(0)| = {:.6}", field.closure_defect());
        println!("  closed family: {}", field.is_closed_family(&curve));
        println!("  z' - k z1 residual {:.3e} (tolerance {:.3e})", check.residual, check.tolerance);
        // the length change is second order in ε
        for eps in [0.1, 0.01, 0.001] {
            let d = isometry_defect(&curve, &field, eps).unwrap();
            println!("  eps={eps:<6} L_eps - L = {:.6e}", d.length_change);
        }
    }
}
