//! Sampled parametric curves and their Frenet apparatus.
//!
//! Positions and parameter derivatives come from symbolic differentiation of
//! the component expressions; every sample carries the Taylor jet of `r` about
//! its parameter value, from which frames, curvature, torsion and arc-length
//! derivatives are read off exactly.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::expr::{EvalError, Expr, ParseError};
use crate::jet::{Jet, VJet, ORDER};
use crate::quadrature::{self, QuadratureError};

/// Below this, `‖ṙ‖` or `‖ṙ × r̈‖` is treated as zero.
pub const BIREGULARITY_FLOOR: f64 = 1e-9;
/// `‖r(0) − r(period)‖` at or below this counts as closed.
pub const CLOSURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("curve is not biregular at sample {index} (value {value:e})")]
    NonBiregular { index: usize, value: f64 },
    #[error("curvature vanishes at sample {index} (‖ṙ×r̈‖ = {value:e})")]
    CurvatureVanishes { index: usize, value: f64 },
    #[error("evaluation failed at sample {index}: {source}")]
    Domain {
        index: usize,
        #[source]
        source: EvalError,
    },
    #[error("sample count must be even and at least 32, got {0}")]
    SampleCount(usize),
    #[error("period must be positive and finite, got {0}")]
    Period(f64),
    #[error("curve has no symbolic definition to resample from")]
    NotResamplable,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A closed parametric curve `u ↦ (x(u), y(u), z(u))`, `u ∈ [0, period)`.
#[derive(Debug, Clone)]
pub struct CurveDefinition {
    pub x: Expr,
    pub y: Expr,
    pub z: Expr,
    pub period: f64,
}

impl CurveDefinition {
    pub fn new(x: Expr, y: Expr, z: Expr, period: f64) -> Self {
        CurveDefinition { x, y, z, period }
    }

    /// Convenience constructor from source strings.
    pub fn parse(x: &str, y: &str, z: &str, period: f64) -> Result<Self, ParseError> {
        Ok(CurveDefinition::new(x.parse()?, y.parse()?, z.parse()?, period))
    }
}

/// A curve definition together with its symbolic derivatives up to [`ORDER`].
#[derive(Debug)]
pub struct SymbolicCurve {
    definition: CurveDefinition,
    derivatives: [Vec<Expr>; 3],
}

impl SymbolicCurve {
    pub fn new(definition: CurveDefinition) -> Self {
        let derivatives = [
            definition.x.derivatives(ORDER),
            definition.y.derivatives(ORDER),
            definition.z.derivatives(ORDER),
        ];
        SymbolicCurve {
            definition,
            derivatives,
        }
    }

    pub fn definition(&self) -> &CurveDefinition {
        &self.definition
    }

    pub fn period(&self) -> f64 {
        self.definition.period
    }

    /// Taylor jet of `r` about `u`.
    pub fn jet_at(&self, u: f64) -> Result<VJet, EvalError> {
        let mut comps = [Jet::ZERO; 3];
        for (c, table) in self.derivatives.iter().enumerate() {
            let mut values = [0.0; ORDER + 1];
            for (k, e) in table.iter().enumerate() {
                values[k] = e.evaluate(u)?;
            }
            comps[c] = Jet::from_derivatives(&values);
        }
        Ok(VJet(comps))
    }

    pub fn position(&self, u: f64) -> Result<Vector3<f64>, EvalError> {
        Ok(Vector3::new(
            self.definition.x.evaluate(u)?,
            self.definition.y.evaluate(u)?,
            self.definition.z.evaluate(u)?,
        ))
    }
}

/// Unit tangent, principal normal and binormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t: Vector3<f64>,
    pub n1: Vector3<f64>,
    pub n2: Vector3<f64>,
}

/// Frenet frame from the first two parameter derivatives.
///
/// `n₁ = ((ṙ·ṙ) r̈ − (ṙ·r̈) ṙ) / (‖ṙ‖ ‖ṙ×r̈‖)`, `n₂ = ṙ×r̈ / ‖ṙ×r̈‖`.
pub fn frenet_frame_from(d1: &Vector3<f64>, d2: &Vector3<f64>) -> Result<Frame, GeometryError> {
    let speed = d1.norm();
    let b = d1.cross(d2);
    let bn = b.norm();
    if speed < BIREGULARITY_FLOOR || bn < BIREGULARITY_FLOOR {
        return Err(GeometryError::CurvatureVanishes {
            index: 0,
            value: bn.min(speed),
        });
    }
    let n1 = (d2 * d1.dot(d1) - d1 * d1.dot(d2)) / (speed * bn);
    Ok(Frame {
        t: d1 / speed,
        n1,
        n2: b / bn,
    })
}

/// Frame, curvature, torsion and speed as jets in the curve parameter.
///
/// With `r` known to order `m`, the tangent and speed are valid to `m − 1`,
/// normals and curvature to `m − 2`, torsion to `m − 3`.
#[derive(Debug, Clone, Copy)]
pub struct FrameJets {
    pub speed: Jet,
    pub t: VJet,
    pub n1: VJet,
    pub n2: VJet,
    pub curvature: Jet,
    pub torsion: Jet,
}

impl FrameJets {
    pub fn from_position(r: &VJet) -> FrameJets {
        let d1 = r.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let speed = d1.norm();
        let b = d1.cross(&d2);
        let b_sq = b.dot(&b);
        let b_norm = b_sq.sqrt();
        let t = d1.scale(&speed.recip());
        let n2 = b.scale(&b_norm.recip());
        let n1 = n2.cross(&t);
        let curvature = b_norm * (speed * speed * speed).recip();
        let torsion = b.dot(&d3) * b_sq.recip();
        FrameJets {
            speed,
            t,
            n1,
            n2,
            curvature,
            torsion,
        }
    }
}

/// Reparameterisation `w(s)` (parameter offset as a series in arc length)
/// about a sample whose speed jet is `speed`.
pub fn arclength_inverse(speed: &Jet) -> Jet {
    speed.integral(0.0).revert()
}

/// How the samples are spaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    /// Uniform in the curve parameter `u`.
    Parameter,
    /// Uniform in arc length.
    ArcLength,
    /// Material points of a bent curve, uniform in the grid of the curve it was bent from.
    Material,
}

#[derive(Debug, Clone)]
pub struct Sample {
    /// Curve parameter of the sample.
    pub u: f64,
    /// Taylor jet of the position about `u`.
    pub jet: VJet,
    pub speed: f64,
    pub curvature: f64,
    pub torsion: f64,
    pub frame: Frame,
}

impl Sample {
    pub fn position(&self) -> Vector3<f64> {
        self.jet.value()
    }

    /// `k`-th derivative of the position with respect to `u`.
    pub fn derivative(&self, k: usize) -> Vector3<f64> {
        self.jet.d(k)
    }
}

/// A closed curve sampled on a uniform grid `ξ_i = i·step`, `i = 0..N`.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    source: Option<Arc<SymbolicCurve>>,
    period: f64,
    spacing: Spacing,
    step: f64,
    samples: Vec<Sample>,
    du_dxi: Vec<f64>,
    end_jet: VJet,
    sigma: Vec<f64>,
}

pub(crate) struct CurveParts {
    pub source: Option<Arc<SymbolicCurve>>,
    pub period: f64,
    pub spacing: Spacing,
    pub step: f64,
    pub params: Vec<f64>,
    pub jets: Vec<VJet>,
    pub du_dxi: Vec<f64>,
    /// Jet at `params[0] + period`.
    pub end_jet: VJet,
}

fn check_count(n: usize) -> Result<(), GeometryError> {
    if n < 32 || !n.is_multiple_of(2) {
        return Err(GeometryError::SampleCount(n));
    }
    Ok(())
}

fn speed_triple(jet: &VJet) -> [f64; 3] {
    let v = jet.derivative().norm();
    [v.d(0), v.d(1), v.d(2)]
}

/// Samples `def` at `n` uniform parameter values.
pub fn sample_curve(def: &CurveDefinition, n: usize) -> Result<SampledCurve, GeometryError> {
    check_count(n)?;
    if !(def.period.is_finite() && def.period > 0.0) {
        return Err(GeometryError::Period(def.period));
    }
    let source = Arc::new(SymbolicCurve::new(def.clone()));
    let step = def.period / n as f64;
    let params: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let jets = params
        .iter()
        .enumerate()
        .map(|(index, &u)| source.jet_at(u).map_err(|source| GeometryError::Domain { index, source }))
        .collect::<Result<Vec<_>, _>>()?;
    let end_jet = source
        .jet_at(def.period)
        .map_err(|source| GeometryError::Domain { index: 0, source })?;
    SampledCurve::assemble(CurveParts {
        source: Some(source),
        period: def.period,
        spacing: Spacing::Parameter,
        step,
        params,
        jets,
        du_dxi: vec![1.0; n],
        end_jet,
    })
}

/// Cumulative arc length at the samples and at `u₀ + period`.
///
/// Panels wider than the uniform parameter step are split using the symbolic
/// source when there is one, so grids that are coarse in `u` (arc-length
/// grids through slow, tightly curved stretches) keep full accuracy.
fn arc_length_table(parts: &CurveParts) -> Result<Vec<f64>, GeometryError> {
    let n = parts.params.len();
    let mut nodes: Vec<f64> = parts.params.clone();
    nodes.push(parts.params[0] + parts.period);
    let mut triples: Vec<[f64; 3]> = parts.jets.iter().map(speed_triple).collect();
    triples.push(speed_triple(&parts.end_jet));
    let Some(source) = &parts.source else {
        return Ok(quadrature::cumulative_hermite(&nodes, &triples, 0.0)?);
    };
    let fine = parts.period / n as f64;
    let mut sigma = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    sigma.push(acc);
    for i in 0..n {
        let (a, b) = (nodes[i], nodes[i + 1]);
        if b <= a {
            return Err(QuadratureError::NotIncreasing { index: i + 1 }.into());
        }
        let pieces = ((b - a) / fine - 1e-6).ceil().max(1.0) as usize;
        let mut left = triples[i];
        for k in 1..=pieces {
            let right = if k == pieces {
                triples[i + 1]
            } else {
                let u = a + (b - a) * k as f64 / pieces as f64;
                let jet = source
                    .jet_at(u)
                    .map_err(|source| GeometryError::Domain { index: i, source })?;
                speed_triple(&jet)
            };
            acc += quadrature::hermite_panel((b - a) / pieces as f64, &left, &right);
            left = right;
        }
        sigma.push(acc);
    }
    Ok(sigma)
}

impl SampledCurve {
    pub(crate) fn assemble(parts: CurveParts) -> Result<SampledCurve, GeometryError> {
        let mut samples = Vec::with_capacity(parts.jets.len());
        for (index, (&u, jet)) in parts.params.iter().zip(&parts.jets).enumerate() {
            let d1 = jet.d(1);
            let d2 = jet.d(2);
            let d3 = jet.d(3);
            let speed = d1.norm();
            let b = d1.cross(&d2);
            let bn = b.norm();
            if speed < BIREGULARITY_FLOOR || bn < BIREGULARITY_FLOOR {
                return Err(GeometryError::NonBiregular {
                    index,
                    value: speed.min(bn),
                });
            }
            let frame = frenet_frame_from(&d1, &d2).map_err(|_| GeometryError::NonBiregular { index, value: bn })?;
            samples.push(Sample {
                u,
                jet: *jet,
                speed,
                curvature: bn / (speed * speed * speed),
                torsion: b.dot(&d3) / (bn * bn),
                frame,
            });
        }
        let sigma = arc_length_table(&parts)?;
        Ok(SampledCurve {
            source: parts.source,
            period: parts.period,
            spacing: parts.spacing,
            step: parts.step,
            samples,
            du_dxi: parts.du_dxi,
            end_jet: parts.end_jet,
            sigma,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Sample {
        &self.samples[i]
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Grid step in the sampling coordinate (parameter, or arc length).
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn source(&self) -> Option<&Arc<SymbolicCurve>> {
        self.source.as_ref()
    }

    /// Parameter values of the samples.
    pub fn params(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.u).collect()
    }

    /// `du/dξ` at each sample.
    pub fn du_dxi(&self) -> &[f64] {
        &self.du_dxi
    }

    /// Position jet at `u_0 + period`.
    pub fn end_jet(&self) -> &VJet {
        &self.end_jet
    }

    /// `dσ/dξ` at each sample; quadrature weight per unit grid step.
    pub fn arc_weights(&self) -> Vec<f64> {
        self.samples.iter().zip(&self.du_dxi).map(|(s, d)| s.speed * d).collect()
    }

    /// Cumulative arc length at each sample, with the total length appended.
    pub fn arc_length_table(&self) -> &[f64] {
        &self.sigma
    }

    pub fn length(&self) -> f64 {
        self.sigma[self.samples.len()]
    }

    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.samples.iter().map(Sample::position).collect()
    }

    /// `‖r(u_0 + period) − r(u_0)‖`.
    pub fn closure_gap(&self) -> f64 {
        (self.end_jet.value() - self.samples[0].position()).norm()
    }

    pub fn is_closed(&self) -> bool {
        self.closure_gap() <= CLOSURE_TOLERANCE
    }

    /// `k = ‖ṙ×r̈‖ / ‖ṙ‖³`.
    pub fn curvature(&self, i: usize) -> f64 {
        self.samples[i].curvature
    }

    /// `τ = (ṙ×r̈)·r⃛ / ‖ṙ×r̈‖²`.
    pub fn torsion(&self, i: usize) -> f64 {
        self.samples[i].torsion
    }

    pub fn frenet_frame(&self, i: usize) -> Frame {
        self.samples[i].frame
    }

    /// Length of the shorter arc joining samples `i` and `j`.
    pub fn arc_distance(&self, i: usize, j: usize) -> f64 {
        let d = (self.sigma[i] - self.sigma[j]).abs();
        d.min(self.length() - d).max(0.0)
    }

    /// Frame and scalar jets about sample `i`, in the curve parameter.
    pub fn frame_jets(&self, i: usize) -> FrameJets {
        FrameJets::from_position(&self.samples[i].jet)
    }

    /// Arc-length series `w(s)` about sample `i`.
    pub fn arclength_inverse(&self, i: usize) -> Jet {
        arclength_inverse(&self.samples[i].jet.derivative().norm())
    }

    /// Largest departure of the samples from uniform arc-length spacing,
    /// relative to the grid step.
    pub fn arclength_spacing_defect(&self) -> f64 {
        let n = self.samples.len();
        let h = self.length() / n as f64;
        self.sigma
            .iter()
            .enumerate()
            .map(|(i, s)| (s - i as f64 * h).abs() / h)
            .fold(0.0, f64::max)
    }

    /// Resamples at `m` points equally spaced in arc length.
    ///
    /// A monotone cubic through the arc-length table gives the starting
    /// parameter for each target; Newton steps on the exact arc-length
    /// integral then place it.
    pub fn resample_by_arclength(&self, m: usize) -> Result<SampledCurve, GeometryError> {
        check_count(m)?;
        let source = self.source.clone().ok_or(GeometryError::NotResamplable)?;
        let n = self.samples.len();
        let length = self.length();
        let mut nodes: Vec<f64> = self.params();
        nodes.push(self.samples[0].u + self.period);
        let guess = MonotoneCubic::new(&self.sigma, &nodes);

        let mut params = Vec::with_capacity(m);
        let mut jets = Vec::with_capacity(m);
        let mut node = 0usize;
        for j in 0..m {
            let target = length * j as f64 / m as f64;
            while node + 1 < n && self.sigma[node + 1] <= target {
                node += 1;
            }
            let (lo, hi) = (nodes[node], nodes[node + 1]);
            let left = speed_triple(&self.samples[node].jet);
            let base = self.sigma[node];
            let mut u = guess.eval(target).clamp(lo, hi);
            let mut jet = source
                .jet_at(u)
                .map_err(|source| GeometryError::Domain { index: j, source })?;
            let (mut a, mut b) = (lo, hi);
            for _ in 0..12 {
                let right = speed_triple(&jet);
                let f = base + quadrature::hermite_panel(u - lo, &left, &right) - target;
                if f == 0.0 {
                    break;
                }
                if f > 0.0 {
                    b = u;
                } else {
                    a = u;
                }
                let mut next = u - f / right[0];
                if !(next >= a && next <= b) {
                    next = 0.5 * (a + b);
                }
                let done = (next - u).abs() <= 1e-15 * (1.0 + u.abs());
                u = next;
                jet = source
                    .jet_at(u)
                    .map_err(|source| GeometryError::Domain { index: j, source })?;
                if done {
                    break;
                }
            }
            params.push(u);
            jets.push(jet);
        }
        let du_dxi = jets.iter().map(|j| 1.0 / j.d(1).norm()).collect();
        let end_jet = source
            .jet_at(params[0] + self.period)
            .map_err(|source| GeometryError::Domain { index: 0, source })?;
        SampledCurve::assemble(CurveParts {
            source: Some(source),
            period: self.period,
            spacing: Spacing::ArcLength,
            step: length / m as f64,
            params,
            jets,
            du_dxi,
            end_jet,
        })
    }
}

/// Fritsch–Carlson monotone piecewise cubic through `(x_i, y_i)`.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` must be strictly increasing and `ys` non-decreasing.
    pub fn new(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            slopes[i] = if a * b <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean keeps each piece monotone
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                (w1 + w2) / (w1 / a + w2 / b)
            };
        }
        MonotoneCubic {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            slopes,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}
