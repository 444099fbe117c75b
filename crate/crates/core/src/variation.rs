//! First variations of the Frenet apparatus under an infinitesimal bending,
//! and finite-difference oracles for them.
//!
//! All primes are arc-length derivatives. They are read off the component
//! jets filled in by [`decompose_field`](crate::bending::decompose_field), so
//! the curve may be sampled on any grid.

use nalgebra::Vector3;

use crate::bending::{bend, BendError, BendingField, FieldComponents};
use crate::curve::{GeometryError, SampledCurve};
use crate::energy::{self, EnergyError};
use crate::jet::Jet;

#[derive(Debug, thiserror::Error)]
pub enum VariationError {
    #[error(transparent)]
    Bend(#[from] BendError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Energy(#[from] Box<EnergyError>),
    #[error("field has not been decomposed along the Frenet frame")]
    NotDecomposed,
    #[error("field fails z' - k z1 = 0: residual {residual:e} exceeds {tolerance:e}")]
    NotBending { residual: f64, tolerance: f64 },
    #[error("need at least one positive step, got {0:?}")]
    Steps(Vec<f64>),
}

impl From<EnergyError> for VariationError {
    fn from(e: EnergyError) -> Self {
        VariationError::Energy(Box::new(e))
    }
}

/// Per-sample first variations of the frame, curvature and torsion.
#[derive(Debug, Clone, Default)]
pub struct FrameVariation {
    pub dt: Vec<Vector3<f64>>,
    pub dn1: Vec<Vector3<f64>>,
    pub dn2: Vec<Vector3<f64>>,
    pub dk: Vec<f64>,
    pub dtau: Vec<f64>,
}

/// First-order magnitudes `A + ε δA` of the bent curve, per sample.
#[derive(Debug, Clone, Default)]
pub struct DeformedMagnitudes {
    pub k: Vec<f64>,
    pub tau: Vec<f64>,
    pub t: Vec<Vector3<f64>>,
    pub n1: Vec<Vector3<f64>>,
    pub n2: Vec<Vector3<f64>>,
}

pub(crate) fn checked_components(field: &BendingField) -> Result<&[FieldComponents], VariationError> {
    let comps = field.components().ok_or(VariationError::NotDecomposed)?;
    let check = field.decomposition_check().ok_or(VariationError::NotDecomposed)?;
    if !check.passed() {
        return Err(VariationError::NotBending {
            residual: check.residual,
            tolerance: check.tolerance,
        });
    }
    Ok(comps)
}

/// `(1/k)(2τz₁′ + τ′z₁ + z₂″ − τ²z₂)` as a jet in arc length.
fn normal_bracket(c: &FieldComponents) -> Jet {
    let (k, tau, z1, z2) = (c.curvature, c.torsion, c.normal, c.binormal);
    let inner = z1.derivative() * tau * 2.0 + tau.derivative() * z1 + z2.derivative().derivative()
        - tau.square() * z2;
    inner * k.recip()
}

pub(crate) fn dk_at(c: &FieldComponents) -> f64 {
    let (k, tau, z, z1, z2) = (c.curvature, c.torsion, c.tangential, c.normal, c.binormal);
    let (kv, tv) = (k.value(), tau.value());
    k.d(1) * z.value() + z1.d(2) + (kv * kv - tv * tv) * z1.value() - 2.0 * tv * z2.d(1) - tau.d(1) * z2.value()
}

fn dtau_at(c: &FieldComponents) -> f64 {
    let (k, tau, z, z1, z2) = (c.curvature, c.torsion, c.tangential, c.normal, c.binormal);
    z.value() * tau.d(1) + k.value() * (z2.d(1) + 2.0 * tau.value() * z1.value()) + normal_bracket(c).d(1)
}

/// `δt = (z₁′ − τz₂ + kz) n₁ + (z₂′ + τz₁) n₂` per sample.
pub fn delta_tangent(curve: &SampledCurve, field: &BendingField) -> Result<Vec<Vector3<f64>>, VariationError> {
    Ok(frame_variation(curve, field)?.dt)
}

/// `δk = k′z + z₁″ + (k² − τ²)z₁ − 2τz₂′ − τ′z₂` per sample.
pub fn delta_curvature(_curve: &SampledCurve, field: &BendingField) -> Result<Vec<f64>, VariationError> {
    Ok(checked_components(field)?.iter().map(dk_at).collect())
}

/// `δτ = zτ′ + k(z₂′ + 2τz₁) + [(1/k)(2τz₁′ + τ′z₁ + z₂″ − τ²z₂)]′` per sample.
pub fn delta_torsion(_curve: &SampledCurve, field: &BendingField) -> Result<Vec<f64>, VariationError> {
    Ok(checked_components(field)?.iter().map(dtau_at).collect())
}

/// `(δn₁, δn₂)` per sample.
pub fn delta_normals(
    curve: &SampledCurve,
    field: &BendingField,
) -> Result<(Vec<Vector3<f64>>, Vec<Vector3<f64>>), VariationError> {
    let v = frame_variation(curve, field)?;
    Ok((v.dn1, v.dn2))
}

/// All five variations in one pass.
pub fn frame_variation(curve: &SampledCurve, field: &BendingField) -> Result<FrameVariation, VariationError> {
    let comps = checked_components(field)?;
    let mut out = FrameVariation::default();
    for (i, c) in comps.iter().enumerate() {
        let frame = curve.frenet_frame(i);
        let (k, tau) = (c.curvature.value(), c.torsion.value());
        let (z, z1, z2) = (c.tangential.value(), c.normal.value(), c.binormal.value());
        let (dz1, dz2) = (c.normal.d(1), c.binormal.d(1));
        // kτz + z₂″ − τ²z₂ + 2τz₁′ + τ′z₁, over k
        let twist = tau * z + normal_bracket(c).value();
        out.dt.push(frame.n1 * (dz1 - tau * z2 + k * z) + frame.n2 * (dz2 + tau * z1));
        out.dn1.push(-frame.t * (k * z + dz1 - tau * z2) + frame.n2 * twist);
        out.dn2.push(-frame.t * (dz2 + tau * z1) - frame.n1 * twist);
        out.dk.push(dk_at(c));
        out.dtau.push(dtau_at(c));
    }
    Ok(out)
}

/// `k + εδk`, `τ + εδτ`, `t + εδt`, `n₁ + εδn₁`, `n₂ + εδn₂`.
pub fn deformed_magnitudes(
    curve: &SampledCurve,
    field: &BendingField,
    eps: f64,
) -> Result<DeformedMagnitudes, VariationError> {
    let v = frame_variation(curve, field)?;
    let mut out = DeformedMagnitudes::default();
    for (i, s) in curve.samples().iter().enumerate() {
        out.k.push(s.curvature + eps * v.dk[i]);
        out.tau.push(s.torsion + eps * v.dtau[i]);
        out.t.push(s.frame.t + v.dt[i] * eps);
        out.n1.push(s.frame.n1 + v.dn1[i] * eps);
        out.n2.push(s.frame.n2 + v.dn2[i] * eps);
    }
    Ok(out)
}

/// Quantities the finite-difference oracle can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Curvature,
    Torsion,
    Tangent,
    PrincipalNormal,
    Binormal,
    /// Per-sample line element `ds = ‖ṙ‖ du`.
    LineElement,
    /// Total length.
    Length,
    /// Willmore energy over one period.
    Willmore,
    Mobius,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Curvature => "k",
            Quantity::Torsion => "tau",
            Quantity::Tangent => "t",
            Quantity::PrincipalNormal => "n1",
            Quantity::Binormal => "n2",
            Quantity::LineElement => "ds",
            Quantity::Length => "length",
            Quantity::Willmore => "willmore",
            Quantity::Mobius => "mobius",
        }
    }
}

/// How the oracle differences the bent family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// `(A(ε) − A(0)) / ε`
    Forward,
    /// `(A(ε) − A(−ε)) / 2ε`
    Central,
}

/// Analytic variation against finite differences on recomputed bent curves.
#[derive(Debug, Clone)]
pub struct VariationReport {
    pub quantity: Quantity,
    pub scheme: Scheme,
    pub eps: Vec<f64>,
    /// Analytic `δA`, flattened (three entries per sample for vectors).
    pub analytic: Vec<f64>,
    /// Difference quotient at each step.
    pub oracle: Vec<Vec<f64>>,
    /// `max |oracle − analytic|` at each step.
    pub discrepancy: Vec<f64>,
    /// `max |A(ε) − A(0)|` at each step.
    pub increment: Vec<f64>,
}

impl VariationReport {
    /// Least-squares slope of `log discrepancy` against `log ε`.
    pub fn slope(&self) -> f64 {
        loglog_slope(&self.eps, &self.discrepancy)
    }

    /// Least-squares slope of `log increment` against `log ε`.
    pub fn increment_slope(&self) -> f64 {
        loglog_slope(&self.eps, &self.increment)
    }

    pub fn max_analytic(&self) -> f64 {
        self.analytic.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Slope of the least-squares line through `(log x, log y)`, skipping
/// non-positive entries. NaN with fewer than two usable points.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn flatten(v: &[Vector3<f64>]) -> Vec<f64> {
    v.iter().flat_map(|x| [x.x, x.y, x.z]).collect()
}

/// Values of `q` on a curve.
pub fn measure(quantity: Quantity, curve: &SampledCurve) -> Result<Vec<f64>, VariationError> {
    let n = curve.len();
    Ok(match quantity {
        Quantity::Curvature => (0..n).map(|i| curve.curvature(i)).collect(),
        Quantity::Torsion => (0..n).map(|i| curve.torsion(i)).collect(),
        Quantity::Tangent => flatten(&(0..n).map(|i| curve.frenet_frame(i).t).collect::<Vec<_>>()),
        Quantity::PrincipalNormal => flatten(&(0..n).map(|i| curve.frenet_frame(i).n1).collect::<Vec<_>>()),
        Quantity::Binormal => flatten(&(0..n).map(|i| curve.frenet_frame(i).n2).collect::<Vec<_>>()),
        Quantity::LineElement => curve.arc_weights().iter().map(|w| w * curve.step()).collect(),
        Quantity::Length => vec![curve.length()],
        Quantity::Willmore => vec![energy::willmore_over_period(curve)],
        Quantity::Mobius => vec![energy::mobius(curve)?.value],
    })
}

/// Analytic first variation of `q`.
pub fn analytic_variation(
    quantity: Quantity,
    curve: &SampledCurve,
    field: &BendingField,
) -> Result<Vec<f64>, VariationError> {
    Ok(match quantity {
        Quantity::Curvature => delta_curvature(curve, field)?,
        Quantity::Torsion => delta_torsion(curve, field)?,
        Quantity::Tangent => flatten(&frame_variation(curve, field)?.dt),
        Quantity::PrincipalNormal => flatten(&frame_variation(curve, field)?.dn1),
        Quantity::Binormal => flatten(&frame_variation(curve, field)?.dn2),
        Quantity::LineElement => vec![0.0; curve.len()],
        Quantity::Length => vec![0.0],
        Quantity::Willmore => vec![energy::willmore_variation_direct(curve, field)?.value],
        Quantity::Mobius => vec![energy::mobius_variation(curve, field)?.value],
    })
}

/// Compares the analytic variation with difference quotients of `q` on the
/// fully recomputed curves `r ± εz`.
pub fn fd_variation(
    quantity: Quantity,
    curve: &SampledCurve,
    field: &BendingField,
    eps: &[f64],
    scheme: Scheme,
) -> Result<VariationReport, VariationError> {
    if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(VariationError::Steps(eps.to_vec()));
    }
    let analytic = analytic_variation(quantity, curve, field)?;
    let base = measure(quantity, curve)?;
    let mut report = VariationReport {
        quantity,
        scheme,
        eps: eps.to_vec(),
        analytic,
        oracle: Vec::with_capacity(eps.len()),
        discrepancy: Vec::with_capacity(eps.len()),
        increment: Vec::with_capacity(eps.len()),
    };
    for &e in eps {
        let plus = measure(quantity, &bend(curve, field, e)?)?;
        let quotient: Vec<f64> = match scheme {
            Scheme::Forward => plus.iter().zip(&base).map(|(a, b)| (a - b) / e).collect(),
            Scheme::Central => {
                let minus = measure(quantity, &bend(curve, field, -e)?)?;
                plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * e)).collect()
            }
        };
        let disc = quotient
            .iter()
            .zip(&report.analytic)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let inc = plus.iter().zip(&base).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        report.oracle.push(quotient);
        report.discrepancy.push(disc);
        report.increment.push(inc);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::bending::{decompose_field, field_from_pq, FieldRecipe};
    use crate::curve::{sample_curve, CurveDefinition};
    use crate::expr::parse;

    fn curve(x: &str, y: &str, z: &str, n: usize) -> SampledCurve {
        sample_curve(&CurveDefinition::parse(x, y, z, 2.0 * PI).unwrap(), n).unwrap()
    }

    fn pq(c: &SampledCurve, p: &str, q: &str) -> BendingField {
        let f = field_from_pq(c, &FieldRecipe::frenet(parse(p).unwrap(), parse(q).unwrap())).unwrap();
        decompose_field(c, &f).unwrap()
    }

    #[test]
    fn zero_field_has_zero_variations() {
        let c = curve("cos(u)", "sin(u)", "0.2*sin(2*u)", 64);
        let v = frame_variation(&c, &pq(&c, "0", "0")).unwrap();
        assert!(v.dk.iter().chain(&v.dtau).all(|x| x.abs() < 1e-12));
        assert!(v.dt.iter().chain(&v.dn1).chain(&v.dn2).all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn rotation_field_rotates_the_frame() {
        let c = curve("2*cos(u)", "sin(u)", "0.3*sin(3*u)", 128);
        let a = Vector3::new(0.2, -0.5, 0.7);
        let f = decompose_field(&c, &BendingField::rotation(&c, a)).unwrap();
        let v = frame_variation(&c, &f).unwrap();
        for i in 0..c.len() {
            let fr = c.frenet_frame(i);
            assert!((v.dt[i] - a.cross(&fr.t)).norm() < 1e-9);
            assert!((v.dn1[i] - a.cross(&fr.n1)).norm() < 1e-9);
            assert!((v.dn2[i] - a.cross(&fr.n2)).norm() < 1e-9);
            assert!(v.dk[i].abs() < 1e-8 && v.dtau[i].abs() < 1e-8);
        }
    }

    #[test]
    fn variations_keep_orthonormality_to_first_order() {
        let c = curve("2*cos(u)", "sin(u)", "0.3*sin(3*u)", 64);
        let v = frame_variation(&c, &pq(&c, "cos(2*u)", "sin(u)")).unwrap();
        for i in 0..c.len() {
            let fr = c.frenet_frame(i);
            assert!(v.dt[i].dot(&fr.t).abs() < 1e-10);
            assert!(v.dn1[i].dot(&fr.n1).abs() < 1e-10);
            assert!(v.dn2[i].dot(&fr.n2).abs() < 1e-10);
            assert!((fr.n2.dot(&v.dn1[i]) + fr.n1.dot(&v.dn2[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn refuses_undecomposed_fields() {
        let c = curve("cos(u)", "sin(u)", "0", 64);
        let f = field_from_pq(&c, &FieldRecipe::frenet(parse("1").unwrap(), parse("0").unwrap())).unwrap();
        assert!(matches!(delta_curvature(&c, &f), Err(VariationError::NotDecomposed)));
    }

    #[test]
    fn slope_of_exact_power_law() {
        let x = [1e-2, 1e-3, 1e-4];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v).collect();
        assert!((loglog_slope(&x, &y) - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&x, &[0.0, 0.0, 1.0]).is_nan());
    }
}
