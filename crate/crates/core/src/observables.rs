//! Scattering observables: phase shifts by the compact integral formula
//! and by asymptotic matching, the zero-energy coefficients a and b with
//! their effective range, low-k fits of the effective range formula, and
//! the Levinson bookkeeping (subtracted phase, barred coefficients).

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RadialGrid};
use crate::potential::PotentialSpec;
use crate::quadrature::{hermite_eval, log_tail_integral, Sample};
use crate::radial::{
    bound_states, check_inputs, free_coefficients, solve_regular, solve_zero_pair, RadialSolution,
};
use crate::scans::{truncation_scan, ConvergenceScan, ScanQuantity};
use crate::solver::Propagator;
use crate::special::{double_factorial_odd, riccati_bessel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMethod {
    IntegralFormula,
    AsymptoticMatching,
}

/// Branch-resolved delta_l over a momentum grid.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseShiftCurve {
    pub ell: u32,
    pub k_values: Vec<f64>,
    pub delta: Vec<f64>,
    pub method: PhaseMethod,
}

/// A finite observable, or a divergence demonstrated (where possible) by
/// truncation-scan evidence.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ObservableValue {
    Finite { value: f64 },
    Divergent { reason: String, evidence: Option<ConvergenceScan> },
}

impl ObservableValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            ObservableValue::Finite { value } => Some(*value),
            ObservableValue::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ObservableValue::Divergent { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    DirectIntegral,
    LowKFit,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EffectiveRangeDiagnostics {
    /// a from the limit form R - phi0/phi0' (direct method only).
    pub a_limit_form: Option<f64>,
    /// Relative spread between the integral and limit forms of a.
    pub a_consistency: Option<f64>,
    /// Weighted rms residual of the effective-range fit.
    pub fit_residual: Option<f64>,
    /// Condition number of the (column-scaled) normal matrix.
    pub fit_condition: Option<f64>,
    pub fit_points_used: Option<usize>,
    /// Largest |c4 k^4 / c2 k^2| inside the selected fit window.
    pub k4_fraction: Option<f64>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveRangeResult {
    pub ell: u32,
    pub method: MethodTag,
    pub a: ObservableValue,
    pub b: ObservableValue,
    pub r_eff: ObservableValue,
    pub diagnostics: EffectiveRangeDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatteringLengthReport {
    pub ell: u32,
    pub a: ObservableValue,
    /// The limit form R - phi0/phi0' (tail-corrected), when a is finite.
    pub limit_form: Option<f64>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevinsonReport {
    pub n: usize,
    pub delta_at_kmin: f64,
    pub residual: f64,
    pub near_resonance: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BarredCoefficients {
    pub a_bar: f64,
    pub b_bar: f64,
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("momentum k = {k} must be finite and > 0")));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// phase shifts
// ---------------------------------------------------------------------

/// First-order correction for the neglected tail beyond `r_from`: the
/// solution out there is a free wave of phase `delta`, so the missing
/// piece of the phase integral is -(1/k) int V (cos d u + sin d v)^2 dr.
/// The oscillatory stretch up to ~20 wavelengths is resolved explicitly;
/// beyond it the squared wave averages to 1/2.
fn born_tail(pot: &PotentialSpec, k: f64, ell: u32, delta: f64, r_from: f64) -> f64 {
    if pot.is_zero_beyond(r_from) {
        return 0.0;
    }
    let (sd, cd) = delta.sin_cos();
    let r1 = (20.0 / k).max(r_from * 1.000001);
    let resolved = log_tail_integral(
        |r| {
            let rb = riccati_bessel(ell, k * r).expect("ell and x validated");
            let psi = cd * rb.u + sd * rb.v;
            pot.value(r) * psi * psi
        },
        r_from,
        r1 / r_from,
        2000,
    );
    let averaged = 0.5 * pot.sign_constant_beyond() * pot.tail_abs_moment(r1, 0);
    -(resolved + averaged) / k
}

fn integral_delta(pot: &PotentialSpec, sol: &RadialSolution) -> f64 {
    let (k, ell) = (sol.k(), sol.ell());
    let prop = Propagator::new(pot, ell, k * k);
    let q = |r: f64, hint: f64| prop.q(r, hint);
    let f = |s: Sample| {
        // scale-invariant, but raw samples can sit at ~1e200 between
        // rescalings; normalize pointwise so the squares stay in range
        let m = s.phi.abs().max(s.phi_prime.abs());
        if m == 0.0 {
            return 0.0;
        }
        let (p, dp) = (s.phi / m, s.phi_prime / m);
        let rb = riccati_bessel(ell, k * s.r).expect("ell and x validated");
        let wu = k * rb.u_prime * p - rb.u * dp;
        let wv = k * rb.v_prime * p - rb.v * dp;
        pot.value_hinted(s.r, s.hint) * p * p / (wu * wu + wv * wv)
    };
    let raw = -k * sol.quad().integrate(&q, f, 0, sol.grid().len() - 1);
    raw + born_tail(pot, k, ell, raw, sol.grid().r_max())
}

/// delta_l(k) by the compact integral formula, exact and branch-free for
/// V >= 0. The integrand is scale-invariant in phi, so the normalization
/// (and any rescaling history) drops out.
pub fn phase_shift_integral(
    pot: &PotentialSpec,
    k: f64,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<f64> {
    check_inputs(pot, ell)?;
    check_k(k)?;
    if !pot.is_nonnegative() {
        return Err(Error::Precondition(
            "the integral formula requires V >= 0; use phase_shift_matching for attractive \
             potentials"
                .into(),
        ));
    }
    let sol = solve_regular(pot, k, ell, grid)?;
    Ok(integral_delta(pot, &sol))
}

/// Principal matching angle theta = atan2(num, -den) in (-pi, pi], which
/// equals delta mod 2pi for the positive-amplitude representative. Falls
/// back to radii a quarter wavelength inward if the pair degenerates.
fn theta_of(pot: &PotentialSpec, sol: &RadialSolution) -> Result<f64> {
    let grid = sol.grid();
    let k = sol.k();
    let n = grid.len();
    let rng = pot.characteristic_range();
    for attempt in 0..4u32 {
        let r_target = grid.r_max() - attempt as f64 * PI / (2.0 * k);
        if attempt > 0 && r_target <= rng {
            break;
        }
        let i = if attempt == 0 { n - 1 } else { grid.index_at_or_after(r_target) };
        let r = grid.nodes()[i];
        let rb = riccati_bessel(sol.ell(), k * r)?;
        let (phi, dphi) = (sol.phi()[i], sol.phi_prime()[i]);
        let num = k * rb.u_prime * phi - rb.u * dphi;
        let den = k * rb.v_prime * phi - rb.v * dphi;
        if num != 0.0 || den != 0.0 {
            return Ok(num.atan2(-den));
        }
    }
    Err(Error::Numeric(format!(
        "matching amplitude vanished near R_max for k = {k}; no usable radius"
    )))
}

fn theta_at(pot: &PotentialSpec, ell: u32, k: f64, grid: &Arc<RadialGrid>) -> Result<f64> {
    let sol = solve_regular(pot, k, ell, grid)?;
    theta_of(pot, &sol)
}

/// Matching deltas for all requested momenta at once, absolute branch
/// resolved by a 2pi unwrap that walks a coarse auxiliary ladder down
/// from a high-k anchor where delta ~ 0.
fn matching_curve(
    pot: &PotentialSpec,
    ell: u32,
    k_values: &[f64],
    grid: &Arc<RadialGrid>,
) -> Result<Vec<f64>> {
    check_inputs(pot, ell)?;
    for &k in k_values {
        check_k(k)?;
    }
    if k_values.is_empty() {
        return Ok(Vec::new());
    }
    if pot.tail_abs_moment(0.0, 0) == 0.0 {
        // free potential: skip the unwrap machinery, delta is exactly 0
        return Ok(vec![0.0; k_values.len()]);
    }
    let tail = pot.tail_abs_moment(grid.r_max(), 1);
    if tail >= 1e-4 {
        return Err(Error::Precondition(format!(
            "matching needs R_max beyond the potential range: first tail moment {tail:.3e} at \
             R_max = {}; extend to >= {:.3}",
            grid.r_max(),
            pot.required_radius(1e-4, 1)
        )));
    }
    let range = pot.characteristic_range().max(1e-3);
    let k_hi = k_values.iter().cloned().fold(0.0f64, f64::max);
    let k_lo = k_values.iter().cloned().fold(f64::INFINITY, f64::min);

    // full-precision principal angles at the requested momenta
    let theta_req: Result<Vec<f64>> =
        k_values.par_iter().map(|&k| theta_at(pot, ell, k, grid)).collect();
    let theta_req = theta_req?;

    // anchor high enough that the Born estimate of |delta| is small there
    let mut anchor = (50.0 / range).max(2.0 * k_hi);
    while pot.tail_abs_moment(0.0, 0) / anchor > 0.5 {
        anchor *= 2.0;
        if anchor > 1e6 {
            return Err(Error::Precondition(
                "matching branch resolution infeasible for this potential strength; \
                 use the integral formula"
                    .into(),
            ));
        }
    }
    let lad_rmax = pot.required_radius(1e-5, 1).max(2.0 * range + 1.0);
    let lgrid = RadialGrid::build(
        pot,
        &GridSpec::new(lad_rmax).with_k_max(anchor).with_phase_tolerance(1e-4),
    )?;
    let theta_anchor = theta_at(pot, ell, anchor, &lgrid)?;
    if theta_anchor.abs() > 1.2 {
        return Err(Error::Numeric(format!(
            "branch anchor failed: |delta({anchor})| = {:.3} not small",
            theta_anchor.abs()
        )));
    }

    // ladder points, descending: linear spacing where the hard-sphere
    // bound |d delta/dk| <~ 2 range dominates, geometric below
    let mut lad_ks = Vec::new();
    let mut k = anchor;
    while k > k_lo {
        let step = (0.15 * k).min(PI / (8.0 * range));
        k -= step;
        if k <= k_lo {
            break;
        }
        lad_ks.push(k);
        if lad_ks.len() > 50_000 {
            return Err(Error::Numeric("branch ladder exceeded 50000 points".into()));
        }
    }
    let lad_thetas: Result<Vec<f64>> =
        lad_ks.par_iter().map(|&k| theta_at(pot, ell, k, &lgrid)).collect();
    let lad_thetas = lad_thetas?;

    // (k, theta, index into k_values if requested)
    let mut pts: Vec<(f64, f64, Option<usize>)> = vec![(anchor, theta_anchor, None)];
    pts.extend(lad_ks.iter().zip(&lad_thetas).map(|(&k, &t)| (k, t, None)));
    pts.extend(k_values.iter().zip(&theta_req).enumerate().map(|(i, (&k, &t))| (k, t, Some(i))));
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut out = vec![0.0; k_values.len()];
    for round in 0.. {
        let mut gaps: Vec<(f64, f64)> = Vec::new();
        let mut prev = pts[0].1;
        let mut deltas = Vec::with_capacity(pts.len());
        deltas.push(prev);
        for w in pts.windows(2) {
            let (k_hi_pt, _, _) = w[0];
            let (k_lo_pt, theta, _) = w[1];
            let cand = theta + 2.0 * PI * ((prev - theta) / (2.0 * PI)).round();
            if (cand - prev).abs() > 1.5 && k_hi_pt > k_lo_pt * 1.0000001 {
                gaps.push((k_lo_pt, k_hi_pt));
            }
            deltas.push(cand);
            prev = cand;
        }
        if gaps.is_empty() {
            for (p, d) in pts.iter().zip(&deltas) {
                if let Some(i) = p.2 {
                    out[i] = *d;
                }
            }
            break;
        }
        if round > 24 || pts.len() > 100_000 {
            return Err(Error::Numeric(
                "branch resolution did not stabilize; phase moves too fast in k".into(),
            ));
        }
        let new_ks: Vec<f64> = gaps.iter().map(|(lo, hi)| (lo * hi).sqrt()).collect();
        let new_thetas: Result<Vec<f64>> =
            new_ks.par_iter().map(|&k| theta_at(pot, ell, k, &lgrid)).collect();
        pts.extend(new_ks.iter().zip(new_thetas?.iter()).map(|(&k, &t)| (k, t, None)));
        pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    }

    Ok(k_values
        .iter()
        .zip(&out)
        .map(|(&k, &d)| d + born_tail(pot, k, ell, d, grid.r_max()))
        .collect())
}

/// delta_l(k) by asymptotic matching at R_max: tan delta from the
/// Riccati-Bessel decomposition of phi, absolute branch by continuity
/// from a high-k anchor. Works for attractive potentials.
pub fn phase_shift_matching(
    pot: &PotentialSpec,
    k: f64,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<f64> {
    Ok(matching_curve(pot, ell, &[k], grid)?[0])
}

/// delta_l over a momentum grid, output aligned with the input order.
/// Momentum points are computed concurrently; ordering is deterministic.
pub fn phase_shift_curve(
    pot: &PotentialSpec,
    ell: u32,
    k_values: &[f64],
    grid: &Arc<RadialGrid>,
    method: PhaseMethod,
) -> Result<PhaseShiftCurve> {
    let delta = match method {
        PhaseMethod::IntegralFormula => {
            check_inputs(pot, ell)?;
            if !pot.is_nonnegative() {
                return Err(Error::Precondition(
                    "the integral formula requires V >= 0; use asymptotic matching".into(),
                ));
            }
            let d: Result<Vec<f64>> = k_values
                .par_iter()
                .map(|&k| {
                    check_k(k)?;
                    let sol = solve_regular(pot, k, ell, grid)?;
                    Ok(integral_delta(pot, &sol))
                })
                .collect();
            d?
        }
        PhaseMethod::AsymptoticMatching => matching_curve(pot, ell, k_values, grid)?,
    };
    Ok(PhaseShiftCurve { ell, k_values: k_values.to_vec(), delta, method })
}

// ---------------------------------------------------------------------
// zero-energy coefficients
// ---------------------------------------------------------------------

/// Cumulative integrals of the zero-energy coefficient integrands at
/// every grid node (true values; the integrands are scale-invariant).
pub(crate) struct ZeroEnergyCumulatives {
    pub a: Vec<f64>,
    pub b: Option<Vec<f64>>,
}

/// Eq. (19) generalized: a_l(R) = int_0^R V [phi r^{l+1} / ((2l-1)!!
/// (l phi + r phi'))]^2 dr, the k->0 limit of the integral formula.
fn cumulative_a(pot: &PotentialSpec, sol: &RadialSolution) -> Vec<f64> {
    let ell = sol.ell();
    let l = ell as f64;
    let li = ell as i32;
    let dfac = double_factorial_odd(ell as i64);
    let prop = Propagator::new(pot, ell, 0.0);
    let q = |r: f64, hint: f64| prop.q(r, hint);
    sol.quad().cumulative(
        &q,
        |s: Sample| {
            let w = s.phi * s.r.powi(li + 1) / (dfac * (l * s.phi + s.r * s.phi_prime));
            pot.value_hinted(s.r, s.hint) * w * w
        },
        0,
    )
}

/// Eq. (25): b(R) with the running I = int phi0^2 advanced in lockstep
/// and co-rescaled with phi0, so the integrand stays scale-invariant
/// through forbidden regions. Returns (cumulative b, I at the last node
/// in last-node scale) for the tail correction.
fn cumulative_b0(pot: &PotentialSpec, sol: &RadialSolution) -> (Vec<f64>, f64) {
    let nodes = sol.grid().nodes();
    let n = nodes.len();
    let prop = Propagator::new(pot, 0, 0.0);
    let (phi, dphi, ls) = (sol.phi(), sol.phi_prime(), sol.log_scale());
    let g = |r: f64, hint: f64, p: f64, dp: f64, i_val: f64| {
        pot.value_hinted(r, hint) * (p * p * p * p - 2.0 * p * dp * i_val) / (dp * dp * dp * dp)
    };
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    let mut i_run = 0.0;
    // extra damping on top of the solver's log-scale: the integrand is
    // scale-invariant, but phi^4 and I*phi*phi' overflow long before the
    // solver's own rescale threshold trips
    let mut damp = 1.0;
    for i in 0..n - 1 {
        let (ra, rb) = (nodes[i], nodes[i + 1]);
        let h = rb - ra;
        let rm = 0.5 * (ra + rb);
        let fr = (ls[i] - ls[i + 1]).exp();
        // multiply the (possibly huge) solution value by fr before damp:
        // fr * damp alone can underflow to zero
        let (mut ya, mut da) = (phi[i] * fr * damp, dphi[i] * fr * damp);
        let (mut yb, mut db) = (phi[i + 1] * damp, dphi[i + 1] * damp);
        // sequential products: fr*fr and s*s themselves can over/underflow
        // even when the rescaled i_run is representable
        i_run = i_run * fr * fr;
        let m = ya.abs().max(yb.abs()).max(da.abs().max(db.abs()) * rb.max(1.0));
        if m.is_finite() && m > 0.0 && !(1e-20..=1e20).contains(&m) {
            let mut s = 1.0 / m;
            if !s.is_finite() {
                s = 1e300;
            }
            ya *= s;
            da *= s;
            yb *= s;
            db *= s;
            i_run = i_run * s * s;
            damp *= s;
        }
        let (y4, _) = hermite_eval(h, ya, da, yb, db, 0.25);
        let (ym, _) = hermite_eval(h, ya, da, yb, db, 0.5);
        let (y34, _) = hermite_eval(h, ya, da, yb, db, 0.75);
        let dm = 0.5 * (da + db) + 0.125 * h * (prop.q(ra, rm) * ya - prop.q(rb, rm) * yb);
        let i_mid = i_run + h / 12.0 * (ya * ya + 4.0 * y4 * y4 + ym * ym);
        let i_end = i_mid + h / 12.0 * (ym * ym + 4.0 * y34 * y34 + yb * yb);
        acc += h / 6.0 * (g(ra, rm, ya, da, i_run) + 4.0 * g(rm, rm, ym, dm, i_mid)
            + g(rb, rm, yb, db, i_end));
        i_run = i_end;
        out[i + 1] = acc;
    }
    (out, i_run / (damp * damp))
}

/// b_l(R) for l >= 1 from the k^2 term of the integral formula: with
/// phi1 = d phi/d k^2 at k = 0 and P = l phi0 + r phi0', the integrand is
/// 2 V phi0 (phi1 P + phi0 Dt) r^{2l+2} / ((2l-1)!!^2 P^3) where Dt is
/// r^{l+1} times the k^2-derivative of the Neumann-side Wronskian. The
/// (u-side)^2 term enters only at O(k^{4l+2}) and is dropped; that is why
/// this path is reserved for l >= 1 (l = 0 has Eq. (25)).
fn cumulative_b_ell(
    pot: &PotentialSpec,
    phi0: &RadialSolution,
    phi1: &RadialSolution,
) -> Vec<f64> {
    let ell = phi0.ell();
    let l = ell as f64;
    let li = ell as i32;
    let dfac = double_factorial_odd(ell as i64);
    let prop = Propagator::new(pot, ell, 0.0);
    let nodes = phi0.grid().nodes();
    let n = nodes.len();
    let g = |r: f64, hint: f64, p: f64, dp: f64, z: f64, dz: f64| {
        let big_p = l * p + r * dp;
        let dt = ((2.0 - l) * r * r * p - r * r * r * dp) / (2.0 * (2.0 * l - 1.0))
            - l * z
            - r * dz;
        let v = pot.value_hinted(r, hint);
        v * 2.0 * p * (z * big_p + p * dt) * r.powi(2 * li + 2) / (dfac * dfac * big_p.powi(3))
    };
    let (y, dy, ls) = (phi0.phi(), phi0.phi_prime(), phi0.log_scale());
    let (z, dz) = (phi1.phi(), phi1.phi_prime());
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    // same extra damping as cumulative_b0: cubic products of phi0, phi1
    // overflow well below the solver's rescale threshold
    let mut damp = 1.0;
    for i in 0..n - 1 {
        let (ra, rb) = (nodes[i], nodes[i + 1]);
        let h = rb - ra;
        let rm = 0.5 * (ra + rb);
        let fr = (ls[i] - ls[i + 1]).exp();
        let (mut ya, mut da) = (y[i] * fr * damp, dy[i] * fr * damp);
        let (mut yb, mut db) = (y[i + 1] * damp, dy[i + 1] * damp);
        let (mut za, mut dza) = (z[i] * fr * damp, dz[i] * fr * damp);
        let (mut zb, mut dzb) = (z[i + 1] * damp, dz[i + 1] * damp);
        let m = ya
            .abs()
            .max(yb.abs())
            .max(za.abs().max(zb.abs()))
            .max((da.abs().max(db.abs()).max(dza.abs().max(dzb.abs()))) * rb.max(1.0));
        if m.is_finite() && m > 0.0 && !(1e-20..=1e20).contains(&m) {
            let s = 1.0 / m;
            ya *= s;
            da *= s;
            yb *= s;
            db *= s;
            za *= s;
            dza *= s;
            zb *= s;
            dzb *= s;
            damp *= s;
        }
        let (qa, qb) = (prop.q(ra, rm), prop.q(rb, rm));
        let ym = 0.5 * (ya + yb) + 0.125 * h * (da - db);
        let dym = 0.5 * (da + db) + 0.125 * h * (qa * ya - qb * yb);
        let zm = 0.5 * (za + zb) + 0.125 * h * (dza - dzb);
        // z'' = q z - y
        let dzm = 0.5 * (dza + dzb) + 0.125 * h * ((qa * za - ya) - (qb * zb - yb));
        acc += h / 6.0
            * (g(ra, rm, ya, da, za, dza) + 4.0 * g(rm, rm, ym, dym, zm, dzm)
                + g(rb, rm, yb, db, zb, dzb));
        // delta = -a k^{2l+1} - (that integral) k^{2l+3}, so b = -integral
        out[i + 1] = -acc;
    }
    out
}

pub(crate) fn zero_energy_cumulatives(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
    want_b: bool,
) -> Result<ZeroEnergyCumulatives> {
    if want_b && ell >= 1 {
        let (phi0, phi1) = solve_zero_pair(pot, ell, grid)?;
        let a = cumulative_a(pot, &phi0);
        let b = cumulative_b_ell(pot, &phi0, &phi1);
        Ok(ZeroEnergyCumulatives { a, b: Some(b) })
    } else {
        let phi0 = solve_regular(pot, 0.0, ell, grid)?;
        let a = cumulative_a(pot, &phi0);
        let b = want_b.then(|| cumulative_b0(pot, &phi0).0);
        Ok(ZeroEnergyCumulatives { a, b })
    }
}

/// Tail of the a_l integrand beyond R_max, with phi0 continued by its
/// free decomposition at the endpoint.
fn a_tail(pot: &PotentialSpec, sol: &RadialSolution) -> f64 {
    let r = sol.grid().r_max();
    if pot.is_zero_beyond(r) {
        return 0.0;
    }
    let ell = sol.ell();
    let l = ell as f64;
    let li = ell as i32;
    let dfac = double_factorial_odd(ell as i64);
    let (c1, c2) = free_coefficients(sol);
    log_tail_integral(
        |t| {
            let p = c1 * t.powi(li + 1) + c2 * t.powi(-li);
            let dp = c1 * (l + 1.0) * t.powi(li) - c2 * l * t.powi(-li - 1);
            let w = p * t.powi(li + 1) / (dfac * (l * p + t * dp));
            pot.value(t) * w * w
        },
        r,
        1e8,
        2000,
    )
}

/// Tail of the Eq. (25) integrand: phi0 continued linearly, the running
/// I continued in closed form.
fn b0_tail(pot: &PotentialSpec, sol: &RadialSolution, i_end: f64) -> f64 {
    let r = sol.grid().r_max();
    if pot.is_zero_beyond(r) {
        return 0.0;
    }
    let n = sol.grid().len();
    let (phi, dphi) = (sol.phi()[n - 1], sol.phi_prime()[n - 1]);
    let (c1, c0) = (dphi, phi - r * dphi);
    log_tail_integral(
        |t| {
            let p = c1 * t + c0;
            let i_t = i_end
                + c1 * c1 * (t * t * t - r * r * r) / 3.0
                + c1 * c0 * (t * t - r * r)
                + c0 * c0 * (t - r);
            pot.value(t) * (p * p * p * p - 2.0 * p * c1 * i_t) / (c1 * c1 * c1 * c1)
        },
        r,
        1e8,
        2000,
    )
}

/// Free-decomposition coefficients at R_max, first-order corrected for
/// the tail of V beyond the grid (via the Volterra kernel).
fn free_coefficients_corrected(pot: &PotentialSpec, sol: &RadialSolution) -> (f64, f64) {
    let (mut c1, mut c2) = free_coefficients(sol);
    let r = sol.grid().r_max();
    if pot.is_zero_beyond(r) {
        return (c1, c2);
    }
    let ell = sol.ell();
    let l = ell as f64;
    let li = ell as i32;
    let (c1_0, c2_0) = (c1, c2);
    let ext = |t: f64| c1_0 * t.powi(li + 1) + c2_0 * t.powi(-li);
    c1 += log_tail_integral(|t| t.powi(-li) * pot.value(t) * ext(t), r, 1e8, 2000)
        / (2.0 * l + 1.0);
    c2 -= log_tail_integral(|t| t.powi(li + 1) * pot.value(t) * ext(t), r, 1e8, 2000)
        / (2.0 * l + 1.0);
    (c1, c2)
}

fn require_nonnegative(pot: &PotentialSpec, what: &str) -> Result<()> {
    if !pot.is_nonnegative() {
        return Err(Error::Precondition(format!(
            "{what} requires V >= 0; attractive potentials go through low_k_expansion"
        )));
    }
    Ok(())
}

fn divergence_evidence(
    pot: &PotentialSpec,
    quantity: ScanQuantity,
    ell: u32,
) -> Option<ConvergenceScan> {
    if !pot.is_nonnegative() {
        return None;
    }
    truncation_scan(pot, quantity, ell, &crate::scans::default_cutoffs()).ok()
}

/// Scattering length at arbitrary l by the direct integral, checked
/// against the limit form from the free decomposition at R_max.
pub fn scattering_length_ell(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<ScatteringLengthReport> {
    check_inputs(pot, ell)?;
    require_nonnegative(pot, "scattering_length")?;
    let l = ell as f64;
    match pot.moment_in_l1(2.0 * l + 2.0) {
        Some(false) => {
            return Ok(ScatteringLengthReport {
                ell,
                a: ObservableValue::Divergent {
                    reason: format!("r^{} V(r) is not integrable (Theorem 1/4)", 2 * ell + 2),
                    evidence: divergence_evidence(pot, ScanQuantity::A, ell),
                },
                limit_form: None,
                warning: None,
            });
        }
        None => {
            return Err(Error::Indeterminate(
                "tail class undeclared; run truncation_scan to classify a".into(),
            ));
        }
        Some(true) => {}
    }
    let sol = solve_regular(pot, 0.0, ell, grid)?;
    let a_int = *cumulative_a(pot, &sol).last().unwrap() + a_tail(pot, &sol);
    let (c1, c2) = free_coefficients_corrected(pot, &sol);
    let r = grid.r_max();
    if c1.abs() * r.powi(2 * ell as i32 + 1) < 1e-9 * c2.abs() {
        return Err(Error::Resonance(
            "zero-energy resonance: the growing coefficient of phi0 vanishes, a diverges".into(),
        ));
    }
    let a_lim = -(c2 / c1) / (double_factorial_odd(ell as i64) * double_factorial_odd(ell as i64 + 1));
    let rel = (a_int - a_lim).abs() / a_int.abs().max(a_lim.abs()).max(1e-300);
    if rel > 1e-3 {
        return Err(Error::Consistency(format!(
            "scattering length forms disagree: integral {a_int:.12e} vs limit {a_lim:.12e} \
             (relative {rel:.3e})"
        )));
    }
    let warning = (rel > 1e-6)
        .then(|| format!("integral and limit forms of a agree only to {rel:.3e} relative"));
    Ok(ScatteringLengthReport {
        ell,
        a: ObservableValue::Finite { value: a_int },
        limit_form: Some(a_lim),
        warning,
    })
}

/// a_0 by Eq. (19), cross-checked against the limit form R - phi0/phi0'.
pub fn scattering_length(
    pot: &PotentialSpec,
    grid: &Arc<RadialGrid>,
) -> Result<ScatteringLengthReport> {
    scattering_length_ell(pot, 0, grid)
}

/// The k^3 coefficient of Eq. (21) via Eq. (25), l = 0.
pub fn b_coefficient(pot: &PotentialSpec, grid: &Arc<RadialGrid>) -> Result<ObservableValue> {
    check_inputs(pot, 0)?;
    require_nonnegative(pot, "b_coefficient")?;
    match pot.moment_in_l1(2.0) {
        Some(false) => {
            return Err(Error::Precondition(
                "b_coefficient needs a finite scattering length (r^2 V in L1)".into(),
            ))
        }
        None => {
            return Err(Error::Indeterminate(
                "tail class undeclared; run truncation_scan to classify b".into(),
            ))
        }
        Some(true) => {}
    }
    if pot.moment_in_l1(4.0) == Some(false) {
        return Ok(ObservableValue::Divergent {
            reason: "r^4 V(r) is not integrable (Theorem 1')".into(),
            evidence: divergence_evidence(pot, ScanQuantity::REff, 0),
        });
    }
    let sol = solve_regular(pot, 0.0, 0, grid)?;
    let (cum, i_end) = cumulative_b0(pot, &sol);
    Ok(ObservableValue::Finite { value: *cum.last().unwrap() + b0_tail(pot, &sol, i_end) })
}

/// Eq. (22): r_0 = (2/3) a - 2b/a^2.
pub fn effective_range(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("effective_range needs finite inputs, got a={a}, b={b}")));
    }
    if a == 0.0 {
        return Err(Error::Domain(
            "effective_range: a = 0; Eq. (22) divides by a, fit the k^2 slope directly".into(),
        ));
    }
    Ok(2.0 / 3.0 * a - 2.0 * b / (a * a))
}

/// Direct-integral effective range assembly at any l: a from the Eq. (19)
/// family, b from Eq. (25) (l = 0) or the k^2 term of the integral
/// formula (l >= 1), r from Eq. (22) or r_l = -2 b_l / a_l^2.
pub fn effective_range_direct(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<EffectiveRangeResult> {
    check_inputs(pot, ell)?;
    require_nonnegative(pot, "effective_range_direct")?;
    let rep = scattering_length_ell(pot, ell, grid)?;
    let mut diagnostics = EffectiveRangeDiagnostics {
        a_limit_form: rep.limit_form,
        warning: rep.warning.clone(),
        ..Default::default()
    };
    if let Some(lim) = rep.limit_form {
        if let Some(a) = rep.a.finite() {
            diagnostics.a_consistency =
                Some((a - lim).abs() / a.abs().max(lim.abs()).max(1e-300));
        }
    }
    let a = match rep.a.finite() {
        Some(a) => a,
        None => {
            let implied = |what: &str| ObservableValue::Divergent {
                reason: format!("{what} undefined: a already diverges"),
                evidence: None,
            };
            return Ok(EffectiveRangeResult {
                ell,
                method: MethodTag::DirectIntegral,
                a: rep.a,
                b: implied("b"),
                r_eff: implied("r_eff"),
                diagnostics,
            });
        }
    };
    let l = ell as f64;
    let b = if ell == 0 {
        b_coefficient(pot, grid)?
    } else if pot.moment_in_l1(2.0 * l + 4.0) == Some(false) {
        ObservableValue::Divergent {
            reason: format!("r^{} V(r) is not integrable (Theorem 4)", 2 * ell + 4),
            evidence: divergence_evidence(pot, ScanQuantity::REff, ell),
        }
    } else {
        let (phi0, phi1) = solve_zero_pair(pot, ell, grid)?;
        ObservableValue::Finite { value: *cumulative_b_ell(pot, &phi0, &phi1).last().unwrap() }
    };
    let r_eff = match b.finite() {
        Some(bv) => {
            let r = if ell == 0 { effective_range(a, bv)? } else { -2.0 * bv / (a * a) };
            ObservableValue::Finite { value: r }
        }
        None => ObservableValue::Divergent {
            reason: "r_eff diverges with b (they are equivalent given finite a)".into(),
            evidence: match &b {
                ObservableValue::Divergent { evidence, .. } => evidence.clone(),
                _ => None,
            },
        },
    };
    Ok(EffectiveRangeResult {
        ell,
        method: MethodTag::DirectIntegral,
        a: ObservableValue::Finite { value: a },
        b,
        r_eff,
        diagnostics,
    })
}

// ---------------------------------------------------------------------
// low-k fit
// ---------------------------------------------------------------------

/// Gaussian elimination with partial pivoting for the tiny normal systems.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col] == 0.0 {
            return Err(Error::Numeric("singular normal matrix in the fit".into()));
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for c in col..n {
                m[row][c] -= f * m[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| m[row][c] * x[c]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    Ok(x)
}

/// Weighted polynomial-in-k^2 fit: y = sum_j c_j (k/k_scale)^{2j}.
/// Returns coefficients in unscaled k.
fn fit_even_poly(ks: &[f64], ys: &[f64], ws: &[f64], order: usize, k_scale: f64) -> Result<Vec<f64>> {
    let n = order + 1;
    let mut m = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for ((&k, &y), &w) in ks.iter().zip(ys).zip(ws) {
        let x = (k / k_scale).powi(2);
        let mut basis = vec![1.0; n];
        for j in 1..n {
            basis[j] = basis[j - 1] * x;
        }
        for i in 0..n {
            rhs[i] += w * basis[i] * y;
            for j in 0..n {
                m[i][j] += w * basis[i] * basis[j];
            }
        }
    }
    let mut c = solve_dense(m, rhs)?;
    for (j, cj) in c.iter_mut().enumerate() {
        *cj /= k_scale.powi(2 * j as i32);
    }
    Ok(c)
}

/// Condition number of the column-scaled 2x2 normal matrix of {1, k^2}.
fn fit_condition(ks: &[f64], ws: &[f64]) -> f64 {
    let (mut s00, mut s02, mut s22) = (0.0, 0.0, 0.0);
    for (&k, &w) in ks.iter().zip(ws) {
        let x = k * k;
        s00 += w;
        s02 += w * x;
        s22 += w * x * x;
    }
    let off = s02 / (s00 * s22).sqrt();
    // eigenvalues of [[1, off], [off, 1]]
    (1.0 + off.abs()) / (1.0 - off.abs()).max(1e-300)
}

/// Eq. (33) fit: weighted least squares of k^{2l+1} cot delta against
/// {1, k^2}, with the window chosen so the omitted k^4 term (estimated by
/// a 3-parameter pilot fit) stays below 0.1% of the k^2 term. The nπ of
/// Eq. (21) drops out of cot delta identically, so no Levinson shift is
/// needed before fitting.
pub fn low_k_expansion(
    pot: &PotentialSpec,
    ell: u32,
    k_grid: &[f64],
    grid: &Arc<RadialGrid>,
) -> Result<EffectiveRangeResult> {
    check_inputs(pot, ell)?;
    for &k in k_grid {
        check_k(k)?;
    }
    if k_grid.len() < 4 {
        return Err(Error::Precondition(format!(
            "low_k_expansion needs at least 4 momenta, got {}",
            k_grid.len()
        )));
    }
    let l = ell as f64;
    let a_class = pot.moment_in_l1(2.0 * l + 2.0);
    let r_class = pot.moment_in_l1(2.0 * l + 4.0);
    if a_class == Some(false) {
        let evidence = divergence_evidence(pot, ScanQuantity::A, ell);
        let divergent = |reason: &str, ev: Option<ConvergenceScan>| ObservableValue::Divergent {
            reason: reason.to_string(),
            evidence: ev,
        };
        return Ok(EffectiveRangeResult {
            ell,
            method: MethodTag::LowKFit,
            a: divergent(
                &format!("r^{} V(r) is not integrable (Theorem 1/4)", 2 * ell + 2),
                evidence,
            ),
            b: divergent("b undefined: a already diverges", None),
            r_eff: divergent("r_eff undefined: a already diverges", None),
            diagnostics: EffectiveRangeDiagnostics::default(),
        });
    }

    let curve = if pot.is_nonnegative() {
        phase_shift_curve(pot, ell, k_grid, grid, PhaseMethod::IntegralFormula)?
    } else {
        phase_shift_curve(pot, ell, k_grid, grid, PhaseMethod::AsymptoticMatching)?
    };

    // y = k^{2l+1} cot delta; points where cot is singular are dropped
    let mut pts: Vec<(f64, f64, f64)> = Vec::new(); // (k, y, weight)
    for (&k, &d) in k_grid.iter().zip(&curve.delta) {
        let (sd, cd) = d.sin_cos();
        if sd.abs() < 1e-12 {
            continue;
        }
        let kp = k.powi(2 * ell as i32 + 1);
        let y = kp * cd / sd;
        // variance of y under a fixed absolute phase error is
        // (k^{2l+1}/sin^2 d)^2; weight by its inverse
        let w = (sd * sd / kp).powi(2);
        pts.push((k, y, w));
    }
    if pts.len() < 4 {
        return Err(Error::Precondition(
            "cot delta singular on most of the k grid; fewer than 4 usable points remain".into(),
        ));
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let ks: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let ws: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let k_scale = *ks.last().unwrap();

    // pilot fit with a k^4 term to pick the unbiased window
    let pilot = fit_even_poly(&ks, &ys, &ws, 2, k_scale)?;
    let (c2p, c4p) = (pilot[1], pilot[2]);
    let keep: Vec<usize> = (0..ks.len())
        .filter(|&i| {
            c4p == 0.0 || c2p == 0.0 || (c4p * ks[i].powi(4)).abs() <= 1e-3 * (c2p * ks[i] * ks[i]).abs()
        })
        .collect();
    let keep = if keep.len() >= 4 { keep } else { (0..4.min(ks.len())).collect() };
    let fks: Vec<f64> = keep.iter().map(|&i| ks[i]).collect();
    let fys: Vec<f64> = keep.iter().map(|&i| ys[i]).collect();
    let fws: Vec<f64> = keep.iter().map(|&i| ws[i]).collect();

    let c = fit_even_poly(&fks, &fys, &fws, 1, k_scale)?;
    let (c0, c2) = (c[0], c[1]);
    if c0 == 0.0 {
        return Err(Error::Numeric("fitted intercept vanished; a is unresolvable".into()));
    }
    let a = -1.0 / c0;
    let r = 2.0 * c2;
    let b = if ell == 0 { (2.0 / 3.0 * a - r) * a * a / 2.0 } else { -r * a * a / 2.0 };

    let wsum: f64 = fws.iter().sum();
    let rms = (fks
        .iter()
        .zip(&fys)
        .zip(&fws)
        .map(|((&k, &y), &w)| w * (y - (c0 + c2 * k * k)).powi(2))
        .sum::<f64>()
        / wsum)
        .sqrt();
    let k4_fraction = fks
        .iter()
        .map(|&k| {
            if c2 == 0.0 {
                0.0
            } else {
                (c4p * k.powi(4) / (c2 * k * k)).abs()
            }
        })
        .fold(0.0f64, f64::max);
    let diagnostics = EffectiveRangeDiagnostics {
        fit_residual: Some(rms),
        fit_condition: Some(fit_condition(&fks, &fws)),
        fit_points_used: Some(fks.len()),
        k4_fraction: Some(k4_fraction),
        ..Default::default()
    };

    let (b_val, r_val) = if r_class == Some(false) {
        let ev = divergence_evidence(pot, ScanQuantity::REff, ell);
        (
            ObservableValue::Divergent {
                reason: format!("r^{} V(r) is not integrable (Theorem 1'/4)", 2 * ell + 4),
                evidence: ev.clone(),
            },
            ObservableValue::Divergent {
                reason: "r_eff diverges with b (equivalent given finite a)".into(),
                evidence: ev,
            },
        )
    } else {
        (ObservableValue::Finite { value: b }, ObservableValue::Finite { value: r })
    };
    Ok(EffectiveRangeResult {
        ell,
        method: MethodTag::LowKFit,
        a: ObservableValue::Finite { value: a },
        b: b_val,
        r_eff: r_val,
        diagnostics,
    })
}

// ---------------------------------------------------------------------
// Levinson bookkeeping
// ---------------------------------------------------------------------

/// Levinson check: n from the bound-state spectrum against delta(k_min)
/// from matching. Residual should be O(k_min) away from resonances.
pub fn levinson(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
    k_min: f64,
) -> Result<LevinsonReport> {
    check_inputs(pot, ell)?;
    check_k(k_min)?;
    let phi0 = solve_regular(pot, 0.0, ell, grid)?;
    let (c1, c2) = free_coefficients(&phi0);
    let r = grid.r_max();
    let grow = c1.abs() * r.powi(ell as i32 + 1);
    let margin = grow / (grow + c2.abs() * r.powi(-(ell as i32)));
    if margin < 1e-9 {
        return Err(Error::Resonance(
            "zero-energy resonance: phi0 loses its growing component, a0 = infinity and the \
             Levinson count shifts by 1/2"
                .into(),
        ));
    }
    let n = bound_states(pot, ell, grid)?.gammas.len();
    let delta = phase_shift_matching(pot, k_min, ell, grid)?;
    Ok(LevinsonReport {
        n,
        delta_at_kmin: delta,
        residual: (delta - n as f64 * PI).abs(),
        near_resonance: margin < 1e-4,
    })
}

/// Eq. (26): delta_bar(k) = delta(k) - 2 sum_j arctan(gamma_j / k).
pub fn subtracted_phase(curve: &PhaseShiftCurve, gammas: &[f64]) -> PhaseShiftCurve {
    let delta = curve
        .k_values
        .iter()
        .zip(&curve.delta)
        .map(|(&k, &d)| d - 2.0 * gammas.iter().map(|g| (g / k).atan()).sum::<f64>())
        .collect();
    PhaseShiftCurve {
        ell: curve.ell,
        k_values: curve.k_values.clone(),
        delta,
        method: curve.method,
    }
}

/// Eq. (30): coefficients of the subtracted expansion.
pub fn barred_coefficients(a: f64, b: f64, gammas: &[f64]) -> Result<BarredCoefficients> {
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0)) {
        return Err(Error::Domain(format!(
            "barred_coefficients: gamma = {g} must be > 0 (gamma -> 0 sends a to infinity)"
        )));
    }
    let s1: f64 = gammas.iter().map(|g| 1.0 / g).sum();
    let s3: f64 = gammas.iter().map(|g| 1.0 / (g * g * g)).sum();
    Ok(BarredCoefficients { a_bar: a - 2.0 * s1, b_bar: b - 2.0 * s3 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_for(pot: &PotentialSpec, k_max: f64) -> Arc<RadialGrid> {
        RadialGrid::build(pot, &GridSpec::recommended(pot, k_max).unwrap()).unwrap()
    }

    /// Square-barrier delta_0 closed form for kR inside the first branch.
    fn barrier_delta(v0: f64, radius: f64, k: f64) -> f64 {
        let e = k * k;
        if e < v0 {
            let kap = (v0 - e).sqrt();
            ((k / kap) * (kap * radius).tanh()).atan() - k * radius
        } else {
            let kt = (e - v0).sqrt();
            ((k / kt) * (kt * radius).tan()).atan() - k * radius
        }
    }

    #[test]
    fn free_potential_has_zero_phase() {
        let pot = PotentialSpec::SquareBarrier { height: 0.0, radius: 1.0 };
        let grid = grid_for(&pot, 2.0);
        for ell in [0u32, 1, 2] {
            let d = phase_shift_integral(&pot, 1.0, ell, &grid).unwrap();
            assert!(d.abs() < 1e-12, "ell={ell}: {d}");
            let d = phase_shift_matching(&pot, 1.0, ell, &grid).unwrap();
            assert!(d.abs() < 1e-10, "ell={ell}: {d}");
        }
    }

    #[test]
    fn barrier_phase_closed_form_and_methods_agree() {
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = grid_for(&pot, 1.5);
        let oracle = barrier_delta(4.0, 1.0, 1.0);
        let di = phase_shift_integral(&pot, 1.0, 0, &grid).unwrap();
        assert!((di - oracle).abs() < 1e-8, "integral {di} vs oracle {oracle}");
        let dm = phase_shift_matching(&pot, 1.0, 0, &grid).unwrap();
        assert!((di - dm).abs() < 1e-7, "integral {di} vs matching {dm}");
    }

    #[test]
    fn phase_sign_law_for_repulsive() {
        let pot = PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 6.0 };
        let grid = grid_for(&pot, 10.0);
        let ks: Vec<f64> = (0..12).map(|i| 0.01 * 10f64.powf(i as f64 / 4.0)).collect();
        let curve =
            phase_shift_curve(&pot, 1, &ks, &grid, PhaseMethod::IntegralFormula).unwrap();
        for (k, d) in curve.k_values.iter().zip(&curve.delta) {
            assert!(*d <= 0.0, "k={k}: delta={d}");
        }
    }

    #[test]
    fn integral_requires_nonnegative() {
        let pot = PotentialSpec::SquareWell { depth: 5.0, radius: 1.0 };
        let grid = grid_for(&pot, 2.0);
        assert!(matches!(
            phase_shift_integral(&pot, 1.0, 0, &grid),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn barrier_scattering_length_closed_form() {
        // a0 = R - tanh(kappa R)/kappa, kappa = 2
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = grid_for(&pot, 0.0);
        let rep = scattering_length(&pot, &grid).unwrap();
        let oracle = 1.0 - 2.0f64.tanh() / 2.0;
        let a = rep.a.finite().unwrap();
        assert!((a - oracle).abs() < 1e-8, "a {a} vs {oracle}");
        let lim = rep.limit_form.unwrap();
        assert!((lim - oracle).abs() < 1e-8, "limit {lim} vs {oracle}");
        assert!(rep.warning.is_none(), "{:?}", rep.warning);
        assert!((oracle - 0.517986).abs() < 1e-6);
    }

    #[test]
    fn divergent_scattering_length_carries_evidence() {
        let pot = PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 2.5 };
        let grid = RadialGrid::build(&pot, &GridSpec::new(50.0)).unwrap();
        let rep = scattering_length(&pot, &grid).unwrap();
        match rep.a {
            ObservableValue::Divergent { evidence: Some(scan), .. } => {
                assert!((scan.growth_exponent - 0.5).abs() < 0.1);
            }
            other => panic!("expected divergent with evidence, got {other:?}"),
        }
    }

    #[test]
    fn free_zero_coefficients() {
        let pot = PotentialSpec::SquareBarrier { height: 0.0, radius: 1.0 };
        let grid = grid_for(&pot, 0.0);
        assert_eq!(scattering_length(&pot, &grid).unwrap().a.finite(), Some(0.0));
        assert_eq!(b_coefficient(&pot, &grid).unwrap().finite(), Some(0.0));
    }

    #[test]
    fn hard_sphere_limit_effective_range() {
        // V0 -> inf: a -> R = 1, b -> 0, r0 -> 2/3
        let pot = PotentialSpec::SquareBarrier { height: 1e8, radius: 1.0 };
        let grid = grid_for(&pot, 0.0);
        let a = scattering_length(&pot, &grid).unwrap().a.finite().unwrap();
        assert!((a - 1.0).abs() < 2e-4, "a {a}");
        let b = b_coefficient(&pot, &grid).unwrap().finite().unwrap();
        let r0 = effective_range(a, b).unwrap();
        assert!((r0 - 2.0 / 3.0).abs() < 1e-2, "r0 {r0}, b {b}");
    }

    #[test]
    fn effective_range_formula_values() {
        assert!((effective_range(1.0, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((effective_range(1.0, 1.0).unwrap() + 4.0 / 3.0).abs() < 1e-15);
        assert!(matches!(effective_range(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn low_k_fit_matches_direct_for_barrier() {
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = grid_for(&pot, 0.5);
        let ks: Vec<f64> = (0..16).map(|i| 0.01 * (0.4f64 / 0.01).powf(i as f64 / 15.0)).collect();
        let fit = low_k_expansion(&pot, 0, &ks, &grid).unwrap();
        let a_fit = fit.a.finite().unwrap();
        let a_direct = scattering_length(&pot, &grid).unwrap().a.finite().unwrap();
        assert!(
            (a_fit - a_direct).abs() < 1e-4 * a_direct.abs(),
            "fit {a_fit} vs direct {a_direct}"
        );
        // Eq. (22) closure
        let b = b_coefficient(&pot, &grid).unwrap().finite().unwrap();
        let r_direct = effective_range(a_direct, b).unwrap();
        let r_fit = fit.r_eff.finite().unwrap();
        assert!(
            (r_fit - r_direct).abs() < 1e-3 * r_direct.abs(),
            "fit {r_fit} vs direct {r_direct}"
        );
    }

    #[test]
    fn low_k_fit_well_closed_form() {
        // a0 = R - tan(sqrt(V0) R)/sqrt(V0)
        let pot = PotentialSpec::SquareWell { depth: 5.0, radius: 1.0 };
        let grid = grid_for(&pot, 0.5);
        let ks: Vec<f64> = (0..16).map(|i| 0.01 * (0.4f64 / 0.01).powf(i as f64 / 15.0)).collect();
        let fit = low_k_expansion(&pot, 0, &ks, &grid).unwrap();
        let a = fit.a.finite().unwrap();
        let oracle = 1.0 - 5.0f64.sqrt().tan() / 5.0f64.sqrt();
        assert!((a - oracle).abs() < 2e-3 * oracle.abs(), "a {a} vs {oracle}");
        let res = fit.diagnostics.fit_residual.unwrap();
        assert!(res < 1e-5, "residual {res}");
    }

    #[test]
    fn b_ell_consistent_with_phase_expansion() {
        // delta_1(k) = -a k^3 + b k^5 + O(k^7): check the predicted delta
        // against the integral formula at small k
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = grid_for(&pot, 0.5);
        let res = effective_range_direct(&pot, 1, &grid).unwrap();
        let a = res.a.finite().unwrap();
        let b = res.b.finite().unwrap();
        let mut errs = Vec::new();
        for &k in &[0.2, 0.1] {
            let d = phase_shift_integral(&pot, k, 1, &grid).unwrap();
            let model = -a * k.powi(3) + b * k.powi(5);
            errs.push((d - model).abs());
        }
        // the residual is O(k^7): halving k must shrink it ~128x
        assert!(errs[1] < errs[0] / 60.0, "errs {errs:?}");
        assert!(errs[0] < 1e-3 * (a * 0.2f64.powi(3)).abs(), "errs {errs:?}");
    }

    #[test]
    fn levinson_counts() {
        let cases = [
            (PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 }, 0usize),
            (PotentialSpec::SquareWell { depth: 5.0, radius: 1.0 }, 1),
            (PotentialSpec::SquareWell { depth: 30.0, radius: 1.0 }, 2),
        ];
        for (pot, n) in &cases {
            let grid = grid_for(pot, 1.0);
            let rep = levinson(pot, 0, &grid, 1e-3).unwrap();
            assert_eq!(rep.n, *n, "{pot:?}");
            assert!(rep.residual < 0.05, "{pot:?}: residual {}", rep.residual);
            assert!(!rep.near_resonance);
        }
    }

    #[test]
    fn subtracted_phase_pointwise() {
        let curve = PhaseShiftCurve {
            ell: 0,
            k_values: vec![1.0, 2.0],
            delta: vec![1.0, 0.5],
            method: PhaseMethod::AsymptoticMatching,
        };
        let sub = subtracted_phase(&curve, &[]);
        assert_eq!(sub.delta, curve.delta);
        let sub = subtracted_phase(&curve, &[1.0]);
        assert!((sub.delta[0] - (1.0 - PI / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn barred_coefficients_paper_values() {
        let bc = barred_coefficients(3.0, 1.0, &[1.0]).unwrap();
        assert_eq!((bc.a_bar, bc.b_bar), (1.0, -1.0));
        let bc = barred_coefficients(3.0, 0.0, &[2.0]).unwrap();
        assert_eq!(bc.a_bar, 2.0);
        assert!(matches!(barred_coefficients(1.0, 1.0, &[0.0]), Err(Error::Domain(_))));
    }
}
