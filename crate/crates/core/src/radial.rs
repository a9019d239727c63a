//! Radial Schrödinger solutions at positive and zero energy: the regular
//! solution, the Hille pair (phi0, chi0), node counting, and the
//! bound-state spectrum.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RadialGrid};
use crate::potential::PotentialSpec;
use crate::quadrature::{hermite_eval, log_tail_integral, SolutionQuad};
use crate::solver::Propagator;
use crate::special::{double_factorial_odd, riccati_k_log_derivative, ELL_MAX};

/// How a solution is pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// phi ~ r^{l+1}/(2l+1)!! near the origin (phi'(0) = 1 at l = 0).
    RegularOrigin,
    /// Zero energy only: r^l phi -> 1 as r -> infinity.
    BoundedInfinity,
    /// Zero energy only: r^{-l-1} phi -> 1 as r -> infinity. This is the
    /// growing Hille solution whose Wronskian with the bounded one is
    /// exactly 2l + 1.
    AsymptoticGrowing,
}

/// A sampled solution of the reduced radial equation. True values are
/// phi[i] * exp(log_scale[i]); the scale factors are nonzero only after
/// passage through a strongly forbidden region.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    grid: Arc<RadialGrid>,
    k: f64,
    ell: u32,
    phi: Vec<f64>,
    phi_prime: Vec<f64>,
    log_scale: Vec<f64>,
    normalization: Normalization,
}

impl RadialSolution {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_prime(&self) -> &[f64] {
        &self.phi_prime
    }

    pub fn log_scale(&self) -> &[f64] {
        &self.log_scale
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub(crate) fn from_parts(
        grid: Arc<RadialGrid>,
        k: f64,
        ell: u32,
        samples: crate::solver::Samples,
        normalization: Normalization,
    ) -> Self {
        RadialSolution {
            grid,
            k,
            ell,
            phi: samples.phi,
            phi_prime: samples.phi_prime,
            log_scale: samples.log_scale,
            normalization,
        }
    }

    pub(crate) fn quad(&self) -> SolutionQuad<'_> {
        SolutionQuad {
            nodes: self.grid.nodes(),
            phi: &self.phi,
            phi_prime: &self.phi_prime,
            log_scale: &self.log_scale,
        }
    }
}

/// Binding momenta gamma_j (energies -gamma_j^2), descending, together
/// with the node count of the zero-energy regular solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateSpectrum {
    pub gammas: Vec<f64>,
    pub node_count: usize,
}

/// Zero-energy slope diagnostics: phi0'(R_max) together with the two
/// integrals that the literature offers as its closed form. They disagree
/// analytically (differentiating the Volterra equation gives the
/// 1 + int V phi0 form); both are reported, neither is asserted.
#[derive(Debug, Clone, Copy)]
pub struct ZeroEnergyReport {
    pub phi_prime_at_rmax: f64,
    /// int_0^Rmax V(t) phi0(t) dt
    pub integral_v_phi: f64,
    /// int_0^Rmax t V(t) phi0(t) dt
    pub integral_r_v_phi: f64,
}

/// Grid-median of a'b - ab' with its maximum deviation across nodes.
#[derive(Debug, Clone, Copy)]
pub struct WronskianReport {
    pub median: f64,
    pub max_deviation: f64,
}

pub(crate) fn check_inputs(pot: &PotentialSpec, ell: u32) -> Result<()> {
    pot.validate()?;
    if ell > ELL_MAX {
        return Err(Error::Domain(format!("ell = {ell} exceeds supported maximum {ELL_MAX}")));
    }
    Ok(())
}

/// Series start for the regular solution at small r: two-term expansion
/// phi = r^{l+1}/(2l+1)!! (1 + c1 r^2), c1 = (V(r0) - E)/(4l+6).
pub(crate) fn regular_start(pot: &PotentialSpec, ell: u32, energy: f64, r0: f64) -> (f64, f64) {
    let dfac = double_factorial_odd(ell as i64 + 1);
    let l = ell as f64;
    let c1 = (pot.value(r0) - energy) / (4.0 * l + 6.0);
    let rp = r0.powi(ell as i32);
    let y = rp * r0 * (1.0 + c1 * r0 * r0) / dfac;
    let dy = (rp * (l + 1.0) + (l + 3.0) * c1 * rp * r0 * r0) / dfac;
    (y, dy)
}

/// Regular solution at momentum k >= 0, integrated outward from the series
/// start at r_min.
pub fn solve_regular(
    pot: &PotentialSpec,
    k: f64,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<RadialSolution> {
    check_inputs(pot, ell)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("solve_regular: k = {k} must be >= 0")));
    }
    let prop = Propagator::new(pot, ell, k * k);
    let (y0, dy0) = regular_start(pot, ell, k * k, grid.r_min());
    let s = prop.outward(grid, 0, grid.len() - 1, y0, dy0)?;
    Ok(RadialSolution {
        grid: Arc::clone(grid),
        k,
        ell,
        phi: s.phi,
        phi_prime: s.phi_prime,
        log_scale: s.log_scale,
        normalization: Normalization::RegularOrigin,
    })
}

/// Zero-energy regular solution phi0 together with its derivative with
/// respect to k^2 at k = 0 (phi1'' = q phi1 - phi0, phi1 ~ the k^2 term
/// of the origin series), sharing one rescaling history so that ratios
/// of the pair stay meaningful through forbidden regions.
pub(crate) fn solve_zero_pair(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<(RadialSolution, RadialSolution)> {
    check_inputs(pot, ell)?;
    let prop = Propagator::new(pot, ell, 0.0);
    let r0 = grid.r_min();
    let (y0, dy0) = regular_start(pot, ell, 0.0, r0);
    let l = ell as f64;
    let denom = (4.0 * l + 6.0) * double_factorial_odd(ell as i64 + 1);
    let z0 = -r0.powi(ell as i32 + 3) / denom;
    let dz0 = -(l + 3.0) * r0.powi(ell as i32 + 2) / denom;
    let (sy, sz) = prop.outward_pair(grid, y0, dy0, z0, dz0)?;
    Ok((
        RadialSolution::from_parts(Arc::clone(grid), 0.0, ell, sy, Normalization::RegularOrigin),
        RadialSolution::from_parts(Arc::clone(grid), 0.0, ell, sz, Normalization::RegularOrigin),
    ))
}

/// Zero-energy regular solution via fixed-point iteration of the Volterra
/// equation with kernel (r^{l+1} t^{-l} - r^{-l} t^{l+1})/(2l+1), seeded by
/// the free solution r^{l+1}/(2l+1)!!.
pub fn solve_zero_regular_volterra(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<RadialSolution> {
    check_inputs(pot, ell)?;
    let nodes = grid.nodes();
    let n = nodes.len();
    let dfac = double_factorial_odd(ell as i64 + 1);
    let l = ell as f64;
    let li = ell as i32;

    let free_phi = |r: f64| r.powi(li + 1) / dfac;
    let free_dphi = |r: f64| (l + 1.0) * r.powi(li) / dfac;

    let mut phi: Vec<f64> = nodes.iter().map(|&r| free_phi(r)).collect();
    let mut dphi: Vec<f64> = nodes.iter().map(|&r| free_dphi(r)).collect();
    let mut new_phi = vec![0.0; n];
    let mut new_dphi = vec![0.0; n];

    let max_iter = 200;
    let mut converged = false;
    for _ in 0..max_iter {
        // running moments A = int t^{-l} V phi dt, B = int t^{l+1} V phi dt
        let mut a_mom = 0.0f64;
        let mut b_mom = 0.0f64;
        new_phi[0] = free_phi(nodes[0]);
        new_dphi[0] = free_dphi(nodes[0]);
        for i in 0..n - 1 {
            let (ra, rb) = (nodes[i], nodes[i + 1]);
            let h = rb - ra;
            let rm = 0.5 * (ra + rb);
            let (pm, _) = hermite_eval(h, phi[i], dphi[i], phi[i + 1], dphi[i + 1], 0.5);
            let (va, vm, vb) = (
                pot.value_hinted(ra, rm),
                pot.value_hinted(rm, rm),
                pot.value_hinted(rb, rm),
            );
            let ga = |r: f64, v: f64, p: f64| r.powi(-li) * v * p;
            let gb = |r: f64, v: f64, p: f64| r.powi(li + 1) * v * p;
            a_mom += h / 6.0
                * (ga(ra, va, phi[i]) + 4.0 * ga(rm, vm, pm) + ga(rb, vb, phi[i + 1]));
            b_mom += h / 6.0
                * (gb(ra, va, phi[i]) + 4.0 * gb(rm, vm, pm) + gb(rb, vb, phi[i + 1]));
            let r = rb;
            new_phi[i + 1] =
                free_phi(r) + (r.powi(li + 1) * a_mom - r.powi(-li) * b_mom) / (2.0 * l + 1.0);
            new_dphi[i + 1] = free_dphi(r)
                + ((l + 1.0) * r.powi(li) * a_mom + l * r.powi(-li - 1) * b_mom)
                    / (2.0 * l + 1.0);
        }
        if new_phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(
                "volterra iteration overflowed; use the ODE path for this potential".into(),
            ));
        }
        let diff = phi
            .iter()
            .zip(new_phi.iter())
            .map(|(o, n)| (o - n).abs() / (1.0 + o.abs()))
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut phi, &mut new_phi);
        std::mem::swap(&mut dphi, &mut new_dphi);
        if diff < 1e-12 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Iteration(format!(
            "volterra fixed point did not converge in {max_iter} sweeps"
        )));
    }
    Ok(RadialSolution {
        grid: Arc::clone(grid),
        k: 0.0,
        ell,
        phi,
        phi_prime: dphi,
        log_scale: vec![0.0; n],
        normalization: Normalization::RegularOrigin,
    })
}

/// Growing Hille solution at zero energy, normalized to its own tail:
/// r^{-l-1} phi0 -> 1 as r -> infinity. Computed by rescaling the regular
/// solution with the coefficient of its r^{l+1} asymptote.
pub fn solve_zero_growing(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<RadialSolution> {
    let mut sol = solve_regular(pot, 0.0, ell, grid)?;
    let c = growing_coefficient(&sol)?;
    let n = grid.len();
    let sign = c.signum();
    let c_log = c.abs().ln() + sol.log_scale[n - 1];
    for i in 0..n {
        sol.phi[i] *= sign;
        sol.phi_prime[i] *= sign;
        sol.log_scale[i] -= c_log;
    }
    sol.normalization = Normalization::AsymptoticGrowing;
    Ok(sol)
}

/// Coefficient of r^{l+1} in the free decomposition of a zero-energy
/// solution at R_max, in the scale of the last node. Near zero this flags
/// a zero-energy resonance (l = 0) or bound state (l >= 1).
pub(crate) fn growing_coefficient(sol: &RadialSolution) -> Result<f64> {
    let n = sol.grid.len();
    let r = sol.grid.r_max();
    let l = sol.ell as f64;
    let li = sol.ell as i32;
    let c = (r.powi(-li) * sol.phi_prime[n - 1] + l * r.powi(-li - 1) * sol.phi[n - 1])
        / (2.0 * l + 1.0);
    if c == 0.0 || !c.is_finite() {
        return Err(Error::Resonance(format!(
            "zero-energy solution has vanishing r^{} coefficient",
            sol.ell + 1
        )));
    }
    Ok(c)
}

/// Free-solution decomposition phi = c1 r^{l+1} + c2 r^{-l} at R_max,
/// both coefficients in the scale of the last node.
pub(crate) fn free_coefficients(sol: &RadialSolution) -> (f64, f64) {
    let n = sol.grid.len();
    let r = sol.grid.r_max();
    let l = sol.ell as f64;
    let li = sol.ell as i32;
    let (phi, dphi) = (sol.phi[n - 1], sol.phi_prime[n - 1]);
    let c1 = (r.powi(-li) * dphi + l * r.powi(-li - 1) * phi) / (2.0 * l + 1.0);
    let c2 = r.powi(li + 1) * ((l + 1.0) * phi / r - dphi) / (2.0 * l + 1.0);
    (c1, c2)
}

/// How far out the chi0 tail must be negligible before backward
/// integration starts.
const CHI_TAIL_TOL: f64 = 1e-10;

/// Zero-energy solution bounded at infinity (r^l chi0 -> 1), integrated
/// backward from R_max with a first-order tail-corrected start.
pub fn solve_zero_bounded(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<RadialSolution> {
    check_inputs(pot, ell)?;
    let r_max = grid.r_max();
    let tail = pot.tail_abs_moment(r_max, 1);
    if tail >= CHI_TAIL_TOL {
        let needed = pot.required_radius(CHI_TAIL_TOL, 1);
        return Err(Error::Precondition(format!(
            "chi0: tail moment {tail:.3e} at R_max = {r_max} exceeds {CHI_TAIL_TOL:.0e}; \
             extend the grid to R_max >= {needed:.3}"
        )));
    }
    let l = ell as f64;
    let li = ell as i32;
    // first Born correction from the backward Volterra kernel
    // g(R, t) = (t^{l+1} R^{-l} - t^{-l} R^{l+1}) / (2l+1), t >= R
    let chi = r_max.powi(-li)
        + log_tail_integral(
            |t| {
                let g = (t.powi(li + 1) * r_max.powi(-li) - t.powi(-li) * r_max.powi(li + 1))
                    / (2.0 * l + 1.0);
                g * pot.value(t) * t.powi(-li)
            },
            r_max,
            1e8,
            2000,
        );
    let dchi = -l * r_max.powi(-li - 1)
        + log_tail_integral(
            |t| {
                let dg = (-l * r_max.powi(-li - 1) * t.powi(li + 1)
                    - (l + 1.0) * r_max.powi(li) * t.powi(-li))
                    / (2.0 * l + 1.0);
                dg * pot.value(t) * t.powi(-li)
            },
            r_max,
            1e8,
            2000,
        );
    let prop = Propagator::new(pot, ell, 0.0);
    let s = prop.inward(grid, grid.len() - 1, 0, chi, dchi)?;
    Ok(RadialSolution {
        grid: Arc::clone(grid),
        k: 0.0,
        ell,
        phi: s.phi,
        phi_prime: s.phi_prime,
        log_scale: s.log_scale,
        normalization: Normalization::BoundedInfinity,
    })
}

/// Node-wise Wronskian a'b - ab' summarized by its median and maximum
/// deviation. For (phi0, chi0) the exact value is 2l + 1.
pub fn wronskian(a: &RadialSolution, b: &RadialSolution) -> Result<WronskianReport> {
    if !Arc::ptr_eq(&a.grid, &b.grid) && a.grid.nodes() != b.grid.nodes() {
        return Err(Error::Contract("wronskian: solutions on different grids".into()));
    }
    if a.ell != b.ell || a.k != b.k {
        return Err(Error::Contract(format!(
            "wronskian: mismatched quantum numbers (l {} vs {}, k {} vs {})",
            a.ell, b.ell, a.k, b.k
        )));
    }
    let n = a.grid.len();
    let mut w: Vec<f64> = (0..n)
        .map(|i| {
            let scale = (a.log_scale[i] + b.log_scale[i]).exp();
            (a.phi_prime[i] * b.phi[i] - a.phi[i] * b.phi_prime[i]) * scale
        })
        .collect();
    let mut sorted = w.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let median = sorted[n / 2];
    let max_dev = w.iter().map(|x| (x - median).abs()).fold(0.0f64, f64::max);
    w.clear();
    Ok(WronskianReport { median, max_deviation: max_dev })
}

/// Number of strict sign changes of phi on (r_min, R_max). Crossings are
/// only counted between samples that stand clear of the numerical noise
/// floor.
pub fn count_nodes(sol: &RadialSolution) -> usize {
    let mut peak = 0.0f64;
    let mut last_sign = 0i8;
    let mut count = 0;
    for &v in &sol.phi {
        peak = peak.max(v.abs());
        if v.abs() <= 1e-12 * peak {
            continue;
        }
        let s = if v > 0.0 { 1i8 } else { -1i8 };
        if last_sign != 0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}

/// Slope diagnostics of a zero-energy regular solution (see
/// [`ZeroEnergyReport`]). Requires a solution that never needed rescaling.
pub fn zero_energy_report(pot: &PotentialSpec, sol: &RadialSolution) -> Result<ZeroEnergyReport> {
    if sol.k != 0.0 || sol.normalization != Normalization::RegularOrigin {
        return Err(Error::Contract("zero_energy_report: needs the regular phi0".into()));
    }
    if sol.log_scale.iter().any(|&s| s != 0.0) {
        return Err(Error::Numeric(
            "zero_energy_report: solution was rescaled; the slope integrals overflow".into(),
        ));
    }
    let n = sol.grid.len();
    let prop = Propagator::new(pot, sol.ell, 0.0);
    let q = |r: f64, hint: f64| prop.q(r, hint);
    let sq = sol.quad();
    let iv = sq.integrate(&q, |s| pot.value_hinted(s.r, s.hint) * s.phi, 0, n - 1);
    let irv = sq.integrate(&q, |s| s.r * pot.value_hinted(s.r, s.hint) * s.phi, 0, n - 1);
    Ok(ZeroEnergyReport {
        phi_prime_at_rmax: sol.phi_prime[n - 1],
        integral_v_phi: iv,
        integral_r_v_phi: irv,
    })
}

/// Finds all bound states at angular momentum `ell` by matching the
/// outward regular solution at energy -gamma^2 against the inward decaying
/// solution; the bracket count is validated against the nodal theorem.
pub fn bound_states(
    pot: &PotentialSpec,
    ell: u32,
    grid: &Arc<RadialGrid>,
) -> Result<BoundStateSpectrum> {
    check_inputs(pot, ell)?;
    let phi0 = solve_regular(pot, 0.0, ell, grid)?;
    let n_expected = count_nodes(&phi0);
    if pot.is_nonnegative() {
        if n_expected != 0 {
            return Err(Error::Consistency(
                "nonnegative potential with a nodal zero-energy solution".into(),
            ));
        }
        return Ok(BoundStateSpectrum { gammas: Vec::new(), node_count: 0 });
    }
    let v_min = grid.nodes().iter().map(|&r| pot.value(r)).fold(0.0f64, f64::min);
    if v_min >= 0.0 || n_expected == 0 {
        if n_expected != 0 {
            return Err(Error::Consistency("nodes present but no attractive region".into()));
        }
        return Ok(BoundStateSpectrum { gammas: Vec::new(), node_count: 0 });
    }
    let gamma_max = (-v_min).sqrt();

    // dedicated grid: fine enough for both the oscillatory interior and
    // the exponential exterior, with the matching radius as a node
    let r_match = pot.characteristic_range();
    let r_start = pot.required_radius(1e-12, 1).max(1.5 * r_match + 2.0);
    let sgrid = RadialGrid::build(
        pot,
        &GridSpec::new(r_start)
            .with_k_max(gamma_max)
            .with_phase_tolerance(1e-10)
            .with_extra_nodes(vec![r_match]),
    )?;
    let i_match = sgrid
        .index_of(r_match)
        .unwrap_or_else(|| sgrid.index_at_or_after(r_match).min(sgrid.len() - 2));
    let last = sgrid.len() - 1;
    let r_seed = sgrid.r_max();

    let mismatch = |gamma: f64| -> Result<f64> {
        let energy = -gamma * gamma;
        let prop = Propagator::new(pot, ell, energy);
        let (y0, dy0) = regular_start(pot, ell, energy, sgrid.r_min());
        let out = prop.outward(&sgrid, 0, i_match, y0, dy0)?;
        let ld = gamma * riccati_k_log_derivative(ell, gamma * r_seed);
        let inn = prop.inward(&sgrid, last, i_match, 1.0, ld)?;
        let a = out.phi_prime[i_match] * inn.phi[i_match];
        let b = out.phi[i_match] * inn.phi_prime[i_match];
        Ok((a - b) / (a.abs() + b.abs() + 1e-300))
    };

    let scan = |n_pts: usize, g_lo: f64| -> Result<Vec<(f64, f64)>> {
        let g_hi = gamma_max * (1.0 - 1e-9);
        let mut brackets = Vec::new();
        let mut prev_g = g_hi;
        let mut prev_n = mismatch(g_hi)?;
        for j in 1..=n_pts {
            let g = g_hi + (g_lo - g_hi) * j as f64 / n_pts as f64;
            let nv = mismatch(g)?;
            if prev_n == 0.0 || (prev_n < 0.0) != (nv < 0.0) {
                brackets.push((g, prev_g));
            }
            prev_g = g;
            prev_n = nv;
        }
        Ok(brackets)
    };

    let mut brackets = scan(80, 1e-4 * gamma_max)?;
    if brackets.len() != n_expected {
        brackets = scan(400, 1e-7 * gamma_max)?;
    }
    if brackets.len() != n_expected {
        return Err(Error::Consistency(format!(
            "bound_states: found {} sign brackets but the nodal theorem predicts {}",
            brackets.len(),
            n_expected
        )));
    }

    let mut gammas = Vec::with_capacity(brackets.len());
    for (mut lo, mut hi) in brackets {
        let mut f_lo = mismatch(lo)?;
        for _ in 0..200 {
            if hi - lo <= 1e-13 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = mismatch(mid)?;
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (f_mid < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        gammas.push(0.5 * (lo + hi));
    }
    gammas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(BoundStateSpectrum { gammas, node_count: n_expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_for(pot: &PotentialSpec, r_max: f64, k_max: f64) -> Arc<RadialGrid> {
        RadialGrid::build(pot, &GridSpec::new(r_max).with_k_max(k_max)).unwrap()
    }

    #[test]
    fn free_regular_solutions() {
        let pot = PotentialSpec::SquareBarrier { height: 0.0, radius: 1.0 };
        let grid = grid_for(&pot, 10.0, 1.0);
        let sol = solve_regular(&pot, 1.0, 0, &grid).unwrap();
        // phi = sin(kr)/k with phi'(0) = 1
        let i = grid.index_at_or_after(std::f64::consts::FRAC_PI_2);
        let r = grid.nodes()[i];
        assert!((sol.phi()[i] - r.sin()).abs() < 1e-9);

        let z = solve_regular(&pot, 0.0, 0, &grid).unwrap();
        for j in (0..grid.len()).step_by(53) {
            assert!((z.phi()[j] - grid.nodes()[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn barrier_phi0_closed_form() {
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = grid_for(&pot, 5.0, 0.0);
        let sol = solve_regular(&pot, 0.0, 0, &grid).unwrap();
        let i = grid.index_of(1.0).unwrap();
        let expect = 2.0f64.sinh() / 2.0; // 1.813430...
        assert!((sol.phi()[i] - expect).abs() < 1e-8 * expect, "{}", sol.phi()[i]);
        assert!((expect - 1.813430).abs() < 1e-6);
    }

    #[test]
    fn volterra_matches_ode() {
        let pots = [
            PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 },
            PotentialSpec::SquareWell { depth: 5.0, radius: 1.0 },
            PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 6.0 },
            PotentialSpec::ExponentialTail { amplitude: 2.0, rate: 1.5 },
        ];
        for pot in &pots {
            for ell in [0u32, 1, 2] {
                let grid = grid_for(pot, 15.0, 0.0);
                let ode = solve_regular(pot, 0.0, ell, &grid).unwrap();
                let vol = solve_zero_regular_volterra(pot, ell, &grid).unwrap();
                let sup = ode
                    .phi()
                    .iter()
                    .zip(vol.phi().iter())
                    .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
                    .fold(0.0f64, f64::max);
                assert!(sup < 1e-8, "{pot:?} ell={ell}: sup diff {sup}");
            }
        }
    }

    #[test]
    fn free_volterra_needs_no_iterations() {
        let pot = PotentialSpec::SquareBarrier { height: 0.0, radius: 1.0 };
        let grid = grid_for(&pot, 5.0, 0.0);
        let sol = solve_zero_regular_volterra(&pot, 0, &grid).unwrap();
        for j in (0..grid.len()).step_by(29) {
            assert_eq!(sol.phi()[j], grid.nodes()[j]);
        }
    }

    #[test]
    fn chi0_closed_form_and_free() {
        let pot = PotentialSpec::SquareBarrier { height: 0.0, radius: 1.0 };
        let grid = grid_for(&pot, 10.0, 0.0);
        let chi = solve_zero_bounded(&pot, 0, &grid).unwrap();
        for j in (0..grid.len()).step_by(41) {
            assert!((chi.phi()[j] - 1.0).abs() < 1e-12);
        }

        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = grid_for(&pot, 10.0, 0.0);
        let chi = solve_zero_bounded(&pot, 0, &grid).unwrap();
        let i = grid.index_at_or_after(0.25);
        let r = grid.nodes()[i];
        let expect = (2.0 * (1.0 - r)).cosh();
        assert!((chi.phi()[i] - expect).abs() < 1e-8 * expect);
        let j = grid.index_at_or_after(1e-7);
        assert!((chi.phi()[j] - 2.0f64.cosh()).abs() < 1e-6);
        assert!((2.0f64.cosh() - 3.762196).abs() < 1e-6);
    }

    #[test]
    fn chi0_precondition_reports_radius() {
        let pot = PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 6.0 };
        let grid = grid_for(&pot, 20.0, 0.0);
        match solve_zero_bounded(&pot, 0, &grid) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("R_max"), "{msg}"),
            other => panic!("expected precondition error, got {other:?}"),
        }
    }

    #[test]
    fn wronskian_examples() {
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = grid_for(&pot, 10.0, 0.0);
        let phi0 = solve_zero_growing(&pot, 0, &grid).unwrap();
        let chi0 = solve_zero_bounded(&pot, 0, &grid).unwrap();
        let w = wronskian(&phi0, &chi0).unwrap();
        assert!((w.median - 1.0).abs() < 1e-8, "median {}", w.median);
        assert!(w.max_deviation < 1e-7, "max dev {}", w.max_deviation);

        // for the regular (origin-normalized) solution, the Wronskian is
        // instead phi0'(infinity): cosh 2 for this barrier
        let reg = solve_regular(&pot, 0.0, 0, &grid).unwrap();
        let w = wronskian(&reg, &chi0).unwrap();
        assert!((w.median - 2.0f64.cosh()).abs() < 1e-8, "median {}", w.median);

        // l = 1 power tail: W = 3
        let pot = PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 5.0 };
        let r_max = pot.required_radius(1e-10, 1).max(20.0);
        let grid = grid_for(&pot, r_max, 0.0);
        let phi0 = solve_zero_growing(&pot, 1, &grid).unwrap();
        let chi0 = solve_zero_bounded(&pot, 1, &grid).unwrap();
        let w = wronskian(&phi0, &chi0).unwrap();
        assert!((w.median - 3.0).abs() < 1e-7, "median {}", w.median);
        assert!(w.max_deviation < 1e-7 * 3.0, "max dev {}", w.max_deviation);
    }

    #[test]
    fn wronskian_contract() {
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let g1 = grid_for(&pot, 10.0, 0.0);
        let g2 = grid_for(&pot, 12.0, 0.0);
        let a = solve_regular(&pot, 0.0, 0, &g1).unwrap();
        let b = solve_regular(&pot, 0.0, 0, &g2).unwrap();
        assert!(matches!(wronskian(&a, &b), Err(Error::Contract(_))));
        let c = solve_regular(&pot, 0.0, 1, &g1).unwrap();
        assert!(matches!(wronskian(&a, &c), Err(Error::Contract(_))));
    }

    #[test]
    fn node_counts_for_wells() {
        let cases = [
            (PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 }, 0usize),
            (PotentialSpec::SquareWell { depth: 5.0, radius: 1.0 }, 1),
            (PotentialSpec::SquareWell { depth: 30.0, radius: 1.0 }, 2),
            // just below the first threshold pi^2/4 ~ 2.467
            (PotentialSpec::SquareWell { depth: 2.4, radius: 1.0 }, 0),
        ];
        for (pot, n) in &cases {
            let grid = grid_for(pot, 30.0, 0.0);
            let sol = solve_regular(pot, 0.0, 0, &grid).unwrap();
            assert_eq!(count_nodes(&sol), *n, "{pot:?}");
        }
    }

    #[test]
    fn bound_state_well_matches_transcendental() {
        // gamma solves sqrt(5 - g^2) cot sqrt(5 - g^2) = -g
        let pot = PotentialSpec::SquareWell { depth: 5.0, radius: 1.0 };
        let grid = grid_for(&pot, 30.0, 0.0);
        let spec = bound_states(&pot, 0, &grid).unwrap();
        assert_eq!(spec.node_count, 1);
        assert_eq!(spec.gammas.len(), 1);
        let g = spec.gammas[0];
        let f = |g: f64| {
            let kappa = (5.0 - g * g).sqrt();
            kappa / kappa.tan() + g
        };
        // bisect the oracle independently; f is increasing on the bracket
        let (mut lo, mut hi) = (0.9, 1.1);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((g - oracle).abs() < 1e-9 * oracle, "gamma {g} vs oracle {oracle}");
    }

    #[test]
    fn bound_state_counts() {
        let cases = [
            (PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 }, 0usize),
            (PotentialSpec::SquareWell { depth: 2.4, radius: 1.0 }, 0),
            (PotentialSpec::SquareWell { depth: 30.0, radius: 1.0 }, 2),
        ];
        for (pot, n) in &cases {
            let grid = grid_for(pot, 30.0, 0.0);
            let spec = bound_states(pot, 0, &grid).unwrap();
            assert_eq!(spec.gammas.len(), *n, "{pot:?}");
            assert_eq!(spec.node_count, *n, "{pot:?}");
        }
    }

    #[test]
    fn zero_energy_report_power_tail() {
        let pot = PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 4.0 };
        let grid = grid_for(&pot, 200.0, 0.0);
        let sol = solve_regular(&pot, 0.0, 0, &grid).unwrap();
        let rep = zero_energy_report(&pot, &sol).unwrap();
        // differentiating the Volterra equation: phi0'(inf) = 1 + int V phi0
        assert!(
            (rep.phi_prime_at_rmax - (1.0 + rep.integral_v_phi)).abs() < 1e-6,
            "{} vs {}",
            rep.phi_prime_at_rmax,
            1.0 + rep.integral_v_phi
        );
        // and the slope approaches a finite constant under grid doubling
        let grid2 = grid_for(&pot, 400.0, 0.0);
        let sol2 = solve_regular(&pot, 0.0, 0, &grid2).unwrap();
        let rep2 = zero_energy_report(&pot, &sol2).unwrap();
        assert!((rep2.phi_prime_at_rmax - rep.phi_prime_at_rmax).abs() < 1e-3);
    }
}
