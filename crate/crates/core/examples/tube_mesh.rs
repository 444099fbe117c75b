//! Sweep a tube around the figure-eight and write it as OBJ.

use knotbend::curve::sample_curve;
use knotbend::knotfile::read_knot_spec;
use knotbend::mesh::{max_tube_radius, tube_mesh, write_obj_file};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/figure_eight.knot");
    let spec = read_knot_spec(path.as_ref()).unwrap();
    let curve = sample_curve(&spec.curve, 512).unwrap();
    let limit = max_tube_radius(&curve);
    let radius = 0.25f64.min(0.9 * limit);
    let mesh = tube_mesh(&curve, radius, 256, 24).unwrap();
    println!(
        "radius {radius:.4} (limit {limit:.4}): {} vertices, {} quads, Euler characteristic {}",
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.euler_characteristic()
    );
    let out = std::env::temp_dir().join("figure_eight_tube.obj");
    write_obj_file(&mesh, &out).unwrap();
    println!("wrote {}", out.display());
}
