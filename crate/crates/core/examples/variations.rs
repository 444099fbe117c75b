//! First variations of curvature and torsion, compared with central
//! differences on the recomputed bent curves.

use knotbend::bending::{decompose_field, field_from_recipe};
use knotbend::curve::sample_curve;
use knotbend::knotfile::read_knot_spec;
use knotbend::variation::{fd_variation, Quantity, Scheme};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/figure_eight.knot");
    let spec = read_knot_spec(path.as_ref()).unwrap();
    let curve = sample_curve(&spec.curve, 512).unwrap();
    let field = decompose_field(&curve, &field_from_recipe(&curve, spec.field.as_ref().unwrap()).unwrap()).unwrap();
    let steps = [1e-2, 1e-3, 1e-4];
    for q in [
        Quantity::Curvature,
        Quantity::Torsion,
        Quantity::Tangent,
        Quantity::PrincipalNormal,
        Quantity::Binormal,
    ] {
        let r = fd_variation(q, &curve, &field, &steps, Scheme::Central).unwrap();
        println!(
            "{:>3}: max|delta| {:.4e}  discrepancy {:?}  slope {:.3}",
            q.name(),
            r.max_analytic(),
            r.discrepancy.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>(),
            r.slope()
        );
    }
}
