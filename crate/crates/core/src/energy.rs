//! Willmore and Möbius energies of closed curves and their first variations.
//!
//! Integrals `∮ · ds` are periodic trapezoid sums over the sample grid with
//! weights `ds/dξ · step`, so arc-length grids and parameter grids both work.
//! Double sums run one row per task and are reduced in a fixed pairwise order,
//! which keeps results bit-identical for any thread count.

use rayon::prelude::*;

use crate::bending::{BendingField, FieldComponents};
use crate::curve::{SampledCurve, CLOSURE_TOLERANCE};
use crate::quadrature::pairwise_sum;
use crate::variation::{self, VariationError};

/// Chords shorter than this between points more than `L/32` apart along the
/// curve abort the Möbius sums.
pub const MIN_CHORD: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum EnergyError {
    #[error("curve is not closed: |r(0) - r(period)| = {gap:e}")]
    NotClosed { gap: f64 },
    #[error("near self-intersection between samples {i} and {j}: chord {chord:e}")]
    NearSelfIntersection { i: usize, j: usize, chord: f64 },
    #[error("bending field does not close up (defect {defect:e}); the double integral diverges on the seam")]
    FieldNotClosed { defect: f64 },
    #[error(transparent)]
    Variation(#[from] VariationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    Willmore,
    Mobius,
}

impl EnergyKind {
    pub fn name(self) -> &'static str {
        match self {
            EnergyKind::Willmore => "willmore",
            EnergyKind::Mobius => "mobius",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnergyValue {
    pub kind: EnergyKind,
    pub value: f64,
    pub samples: usize,
    /// `|E_N − E_{N/2}|`, the latter from every other sample.
    pub refinement_delta: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct EnergyVariation {
    pub kind: EnergyKind,
    pub value: f64,
    /// Willmore theorem form: the integral of the Euler–Lagrange terms.
    pub interior: Option<f64>,
    /// Willmore theorem form: `[½k²z − k′z₁ + kz₁′ − 2kτz₂]` over one period.
    pub boundary: Option<f64>,
    /// Möbius: `max |F(i,j) − F(j,i)|` over the grid.
    pub swap_defect: Option<f64>,
}

fn require_closed(curve: &SampledCurve) -> Result<(), EnergyError> {
    let gap = curve.closure_gap();
    if gap > CLOSURE_TOLERANCE {
        return Err(EnergyError::NotClosed { gap });
    }
    Ok(())
}

fn weights(curve: &SampledCurve) -> Vec<f64> {
    curve.arc_weights().iter().map(|w| w * curve.step()).collect()
}

fn half_willmore(curve: &SampledCurve, w: &[f64], stride: usize) -> f64 {
    let terms: Vec<f64> = (0..curve.len())
        .step_by(stride)
        .map(|i| curve.curvature(i).powi(2) * w[i] * stride as f64)
        .collect();
    0.5 * pairwise_sum(&terms)
}

/// `W = ½∮k² ds` of a closed curve.
pub fn willmore(curve: &SampledCurve) -> Result<EnergyValue, EnergyError> {
    require_closed(curve)?;
    let w = weights(curve);
    let value = half_willmore(curve, &w, 1);
    Ok(EnergyValue {
        kind: EnergyKind::Willmore,
        value,
        samples: curve.len(),
        refinement_delta: (value - half_willmore(curve, &w, 2)).abs(),
    })
}

/// `½∫k² ds` over one parameter period, without a closure check.
///
/// Bent families that do not close are measured this way.
pub fn willmore_over_period(curve: &SampledCurve) -> f64 {
    half_willmore(curve, &weights(curve), 1)
}

/// `δW = ∮ k δk ds`.
pub fn willmore_variation_direct(curve: &SampledCurve, field: &BendingField) -> Result<EnergyVariation, EnergyError> {
    let dk = variation::delta_curvature(curve, field)?;
    let w = weights(curve);
    let terms: Vec<f64> = (0..curve.len()).map(|i| curve.curvature(i) * dk[i] * w[i]).collect();
    Ok(EnergyVariation {
        kind: EnergyKind::Willmore,
        value: pairwise_sum(&terms),
        interior: None,
        boundary: None,
        swap_defect: None,
    })
}

fn euler_lagrange(c: &FieldComponents) -> f64 {
    let (k, tau, z1, z2) = (c.curvature, c.torsion, c.normal, c.binormal);
    let (kv, tv) = (k.value(), tau.value());
    (k.d(2) + 0.5 * kv * kv * kv - kv * tv * tv) * z1.value() + (2.0 * k.d(1) * tv + kv * tau.d(1)) * z2.value()
}

fn boundary_integrand(c: &FieldComponents) -> f64 {
    let (k, tau) = (c.curvature.value(), c.torsion.value());
    0.5 * k * k * c.tangential.value() - c.curvature.d(1) * c.normal.value() + k * c.normal.d(1)
        - 2.0 * k * tau * c.binormal.value()
}

/// `δW = ∮[(k″ + ½k³ − kτ²)z₁ + (2k′τ + kτ′)z₂] ds + [½k²z − k′z₁ + kz₁′ − 2kτz₂]`.
///
/// The bracket vanishes when the family closes. For open families it is
/// evaluated with the components at `u₀ + period`, and the interior sum
/// spreads the jump of its integrand over the two end weights.
pub fn willmore_variation_theorem(curve: &SampledCurve, field: &BendingField) -> Result<EnergyVariation, EnergyError> {
    let comps = variation::checked_components(field)?;
    let end = field.end_components().ok_or(VariationError::NotDecomposed)?;
    let w = weights(curve);
    let mut terms: Vec<f64> = comps.iter().zip(&w).map(|(c, w)| euler_lagrange(c) * w).collect();
    terms.push(0.5 * (euler_lagrange(end) - euler_lagrange(&comps[0])) * w[0]);
    let interior = pairwise_sum(&terms);
    let boundary = boundary_integrand(end) - boundary_integrand(&comps[0]);
    Ok(EnergyVariation {
        kind: EnergyKind::Willmore,
        value: interior + boundary,
        interior: Some(interior),
        boundary: Some(boundary),
        swap_defect: None,
    })
}

struct Row {
    sum: f64,
    swap: f64,
    clash: Option<(usize, f64)>,
}

/// Sums `F(i, j) w_i w_j` over the grid (or every `stride`-th sample), one
/// row per task. `diag(i)` supplies `F(i, i)`; `off(i, j)` the rest.
fn double_sum(
    curve: &SampledCurve,
    w: &[f64],
    stride: usize,
    diag: impl Fn(usize) -> f64 + Sync,
    off: impl Fn(usize, usize) -> f64 + Sync,
    with_swap: bool,
) -> Result<(f64, f64), EnergyError> {
    let n = curve.len();
    // pairs sitting exactly at L/32 count as adjacent, whatever the rounding
    let near = curve.length() / 32.0 * (1.0 + 1e-9);
    let pos = curve.positions();
    let idx: Vec<usize> = (0..n).step_by(stride).collect();
    let scale = (stride * stride) as f64;
    let rows: Vec<Row> = idx
        .par_iter()
        .map(|&i| {
            let mut terms = Vec::with_capacity(idx.len());
            let mut swap: f64 = 0.0;
            let mut clash = None;
            for &j in &idx {
                if i == j {
                    terms.push(diag(i) * w[i] * w[i] * scale);
                    continue;
                }
                if clash.is_none() && curve.arc_distance(i, j) > near {
                    let chord = (pos[i] - pos[j]).norm();
                    if chord < MIN_CHORD {
                        clash = Some((j, chord));
                    }
                }
                let f = off(i, j);
                if with_swap {
                    swap = swap.max((f - off(j, i)).abs());
                }
                terms.push(f * w[i] * w[j] * scale);
            }
            Row {
                sum: pairwise_sum(&terms),
                swap,
                clash,
            }
        })
        .collect();
    if let Some((i, (j, chord))) = idx.iter().zip(&rows).find_map(|(i, r)| r.clash.map(|c| (*i, c))) {
        return Err(EnergyError::NearSelfIntersection { i, j, chord });
    }
    let sums: Vec<f64> = rows.iter().map(|r| r.sum).collect();
    let swap = rows.iter().map(|r| r.swap).fold(0.0, f64::max);
    Ok((pairwise_sum(&sums), swap))
}

/// `E = ∬ (1/‖r(s) − r(t)‖² − 1/l(s,t)²) ds dt` with `l` the shorter arc.
///
/// The diagonal uses the limit `k²/12`.
pub fn mobius(curve: &SampledCurve) -> Result<EnergyValue, EnergyError> {
    require_closed(curve)?;
    let w = weights(curve);
    let pos = curve.positions();
    let k: Vec<f64> = (0..curve.len()).map(|i| curve.curvature(i)).collect();
    let diag = |i: usize| k[i] * k[i] / 12.0;
    let off = |i: usize, j: usize| {
        let l = curve.arc_distance(i, j);
        1.0 / (pos[i] - pos[j]).norm_squared() - 1.0 / (l * l)
    };
    let (value, _) = double_sum(curve, &w, 1, diag, off, false)?;
    let (coarse, _) = double_sum(curve, &w, 2, diag, off, false)?;
    Ok(EnergyValue {
        kind: EnergyKind::Mobius,
        value,
        samples: curve.len(),
        refinement_delta: (value - coarse).abs(),
    })
}

/// Integrand of the Möbius variation at `(s_i, s_j)`:
/// `2 (r(t) − r(s))·(z(s) − z(t)) / ‖r(s) − r(t)‖⁴` with `s = s_i`, `t = s_j`.
///
/// On the diagonal this is the continuous extension `k δk / 6`, which needs a
/// decomposed field (NaN otherwise).
pub fn mobius_variation_integrand(curve: &SampledCurve, field: &BendingField, i: usize, j: usize) -> f64 {
    if i == j {
        return variation::checked_components(field)
            .map(|c| curve.curvature(i) * variation::dk_at(&c[i]) / 6.0)
            .unwrap_or(f64::NAN);
    }
    let (rs, rt) = (curve.sample(i).position(), curve.sample(j).position());
    let d = rt - rs;
    let r2 = d.norm_squared();
    2.0 * d.dot(&(field.value(i) - field.value(j))) / (r2 * r2)
}

/// `δE = 2∬ (r(t) − r(s))·(z(s) − z(t)) / ‖r(s) − r(t)‖⁴ ds dt`.
///
/// The diagonal uses `k δk / 6`, the variation of the energy's own diagonal
/// limit, so the sum is the exact derivative of the discrete energy.
pub fn mobius_variation(curve: &SampledCurve, field: &BendingField) -> Result<EnergyVariation, EnergyError> {
    require_closed(curve)?;
    let defect = field.closure_defect();
    if defect > 1e-6 * curve.length() {
        return Err(EnergyError::FieldNotClosed { defect });
    }
    let dk = variation::delta_curvature(curve, field)?;
    let w = weights(curve);
    let k: Vec<f64> = (0..curve.len()).map(|i| curve.curvature(i)).collect();
    let (value, swap) = double_sum(
        curve,
        &w,
        1,
        |i| k[i] * dk[i] / 6.0,
        |i, j| mobius_variation_integrand(curve, field, i, j),
        true,
    )?;
    Ok(EnergyVariation {
        kind: EnergyKind::Mobius,
        value,
        interior: None,
        boundary: None,
        swap_defect: Some(swap),
    })
}
