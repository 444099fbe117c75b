#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use knotbend::bending::{close_family, decompose_field, field_from_recipe, BendingField, FieldRecipe};
use knotbend::curve::{sample_curve, CurveDefinition, SampledCurve};
use knotbend::knotfile::{read_knot_spec, KnotSpec};

pub fn knot_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(format!("{name}.knot"))
}

pub fn knot(name: &str) -> KnotSpec {
    read_knot_spec(&knot_path(name)).unwrap()
}

pub fn curve(x: &str, y: &str, z: &str, n: usize) -> SampledCurve {
    sample_curve(&CurveDefinition::parse(x, y, z, 2.0 * PI).unwrap(), n).unwrap()
}

pub fn decomposed(curve: &SampledCurve, recipe: &FieldRecipe) -> BendingField {
    let raw = field_from_recipe(curve, recipe).unwrap();
    decompose_field(curve, &raw).unwrap()
}

pub fn rigid(curve: &SampledCurve, field: BendingField) -> BendingField {
    decompose_field(curve, &field).unwrap()
}

/// A bundled knot with its field, sampled at `n`.
pub fn bundled(name: &str, n: usize) -> (SampledCurve, BendingField) {
    let spec = knot(name);
    let c = sample_curve(&spec.curve, n).unwrap();
    let f = decomposed(&c, spec.field.as_ref().unwrap());
    (c, f)
}

/// The trefoil with its field corrected so that the family closes.
pub fn closed_trefoil(n: usize) -> (SampledCurve, BendingField) {
    let spec = knot("trefoil");
    let c = sample_curve(&spec.curve, n).unwrap();
    let recipe = close_family(&c, spec.field.as_ref().unwrap()).unwrap();
    let f = decomposed(&c, &recipe);
    (c, f)
}

/// Source text and expected prefix tree.
pub const GOLDEN: [(&str, &str); 30] = [
    ("sin(u)+2*cos(2*u)", "(+ (sin u) (* 2 (cos (* 2 u))))"),
    ("cos(u) - 2*cos(2*u)", "(- (cos u) (* 2 (cos (* 2 u))))"),
    ("-sin(3*u)", "(neg (sin (* 3 u)))"),
    ("(2 + cos(2*u)) * cos(3*u)", "(* (+ 2 (cos (* 2 u))) (cos (* 3 u)))"),
    ("sin(4*u)", "(sin (* 4 u))"),
    ("u", "u"),
    ("pi", "pi"),
    ("e", "e"),
    ("3.5", "3.5"),
    ("u+1", "(+ u 1)"),
    ("u-1-2", "(- (- u 1) 2)"),
    ("u*2/3", "(/ (* u 2) 3)"),
    ("u/2*3", "(* (/ u 2) 3)"),
    ("2+3*u", "(+ 2 (* 3 u))"),
    ("(2+3)*u", "(* (+ 2 3) u)"),
    ("u^2^3", "(^ u (^ 2 3))"),
    ("-u^2", "(neg (^ u 2))"),
    ("(-u)^2", "(^ (neg u) 2)"),
    ("-2*u", "(* (neg 2) u)"),
    ("--u", "(neg (neg u))"),
    ("exp(-u^2/2)", "(exp (/ (neg (^ u 2)) 2))"),
    ("log(1+u^2)", "(log (+ 1 (^ u 2)))"),
    ("sqrt(u*u + 1)", "(sqrt (+ (* u u) 1))"),
    ("abs(sin(u))", "(abs (sin u))"),
    ("tan(u/4)", "(tan (/ u 4))"),
    ("2*pi*u", "(* (* 2 pi) u)"),
    ("e^u", "(^ e u)"),
    ("1.5e3*u", "(* 1500 u)"),
    ("sin(cos(tan(u)))", "(sin (cos (tan u)))"),
    ("  u  *  ( 1 - u ) ^ -1 ", "(* u (^ (- 1 u) (neg 1)))"),
];

/// Central difference with step `h`.
pub fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Richardson-extrapolated central difference, error O(h⁴).
pub fn central4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let f = &f;
    (4.0 * central(f, x, h / 2.0) - central(f, x, h)) / 3.0
}

/// Largest residual of the three Frenet equations, with `d/ds` taken as
/// central differences of the sampled frame along a uniform parameter grid.
pub fn frenet_residual(curve: &SampledCurve) -> f64 {
    let n = curve.len();
    let h = curve.step();
    let mut worst = 0.0f64;
    for i in 0..n {
        let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
        let (a, b, f) = (curve.frenet_frame(prev), curve.frenet_frame(next), curve.frenet_frame(i));
        let scale = 1.0 / (2.0 * h * curve.sample(i).speed);
        let (k, tau) = (curve.curvature(i), curve.torsion(i));
        let dt = (b.t - a.t) * scale;
        let dn1 = (b.n1 - a.n1) * scale;
        let dn2 = (b.n2 - a.n2) * scale;
        worst = worst
            .max((dt - f.n1 * k).norm())
            .max((dn1 + f.t * k - f.n2 * tau).norm())
            .max((dn2 + f.n1 * tau).norm());
    }
    worst
}
