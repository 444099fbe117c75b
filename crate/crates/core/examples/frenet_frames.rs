//! Sample the trefoil and print its Frenet frame, curvature and torsion at a
//! few points.

use knotbend::curve::sample_curve;
use knotbend::knotfile::read_knot_spec;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/trefoil.knot");
    let spec = read_knot_spec(path.as_ref()).unwrap();
    let curve = sample_curve(&spec.curve, 512).unwrap();
    println!("length {:.10}", curve.length());
    for i in (0..curve.len()).step_by(64) {
        let s = curve.sample(i);
        let f = &s.frame;
        println!(
            "u={:.4}  k={:9.5}  tau={:9.5}  t=({:+.4},{:+.4},{:+.4})  n1=({:+.4},{:+.4},{:+.4})",
            s.u, s.curvature, s.torsion, f.t.x, f.t.y, f.t.z, f.n1.x, f.n1.y, f.n1.z
        );
    }
    let (lo, hi) = (0..curve.len())
        .map(|i| curve.curvature(i))
        .fold((f64::INFINITY, 0.0f64), |(a, b), k| (a.min(k), b.max(k)));
    println!("curvature in [{lo:.5}, {hi:.5}]");
}
