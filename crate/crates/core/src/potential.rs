//! Central potential models V(r) with analytic tail metadata.
//!
//! Every accepted spec satisfies r V(r) in L1(0, inf), which is the
//! admissibility condition for a well-defined phase shift. Tail decay is
//! declared analytically per variant so integrability questions are
//! decided exactly rather than estimated numerically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A central potential model. All variants keep a constant sign beyond
/// some finite radius and satisfy r V(r) in L1 once validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// V = height for r < radius, 0 beyond. height > 0.
    SquareBarrier { height: f64, radius: f64 },
    /// V = -depth for r < radius, 0 beyond. depth > 0.
    SquareWell { depth: f64, radius: f64 },
    /// V(r) = amplitude * (core + r)^(-s), core > 0, s > 2.
    PowerTail {
        amplitude: f64,
        core: f64,
        #[serde(alias = "s")]
        exponent_s: f64,
    },
    /// V(r) = amplitude * exp(-rate * r), rate > 0.
    ExponentialTail { amplitude: f64, rate: f64 },
    /// Linear interpolation between (nodes, values); beyond the last node
    /// the declared tail power extrapolates, or the support is compact.
    Tabulated {
        nodes: Vec<f64>,
        values: Vec<f64>,
        tail_exponent: Option<f64>,
    },
    /// Agrees with `inner` on [0, cutoff_radius], identically 0 beyond.
    TruncatedAt {
        inner: Box<PotentialSpec>,
        cutoff_radius: f64,
    },
}

/// Analytic finiteness prediction for the scattering length and the
/// effective range at a given angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finiteness {
    pub a_finite: bool,
    pub r_finite: bool,
}

impl PotentialSpec {
    /// Checks the variant invariants, in particular r V(r) in L1(0, inf).
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::SquareBarrier { height, radius } => {
                // height 0 is the conventional way to spell the free potential
                if *height < 0.0 || !height.is_finite() {
                    return Err(Error::InvalidConfig("square barrier: height must be >= 0".into()));
                }
                if *radius <= 0.0 || !radius.is_finite() {
                    return Err(Error::InvalidConfig("square barrier: radius must be > 0".into()));
                }
            }
            PotentialSpec::SquareWell { depth, radius } => {
                if *depth < 0.0 || !depth.is_finite() {
                    return Err(Error::InvalidConfig("square well: depth must be >= 0".into()));
                }
                if *radius <= 0.0 || !radius.is_finite() {
                    return Err(Error::InvalidConfig("square well: radius must be > 0".into()));
                }
            }
            PotentialSpec::PowerTail { amplitude, core, exponent_s } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidConfig("power tail: amplitude must be finite".into()));
                }
                if *core <= 0.0 || !core.is_finite() {
                    return Err(Error::InvalidConfig("power tail: core must be > 0".into()));
                }
                if *exponent_s <= 2.0 || !exponent_s.is_finite() {
                    return Err(Error::InvalidConfig(
                        "power tail: exponent s must be > 2 so that r V(r) is integrable".into(),
                    ));
                }
            }
            PotentialSpec::ExponentialTail { amplitude, rate } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidConfig("exponential tail: amplitude must be finite".into()));
                }
                if *rate <= 0.0 || !rate.is_finite() {
                    return Err(Error::InvalidConfig("exponential tail: rate must be > 0".into()));
                }
            }
            PotentialSpec::Tabulated { nodes, values, tail_exponent } => {
                if nodes.len() != values.len() || nodes.len() < 2 {
                    return Err(Error::InvalidConfig(
                        "tabulated: need >= 2 nodes and matching value count".into(),
                    ));
                }
                if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] < 0.0 {
                    return Err(Error::InvalidConfig("tabulated: nodes must be ascending and >= 0".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidConfig("tabulated: values must be finite".into()));
                }
                match tail_exponent {
                    Some(s) if *s <= 2.0 => {
                        return Err(Error::InvalidConfig("tabulated: tail_exponent must be > 2".into()));
                    }
                    Some(_) => {}
                    None => {
                        // compact support is the only admissible alternative
                        if *values.last().unwrap() != 0.0 {
                            return Err(Error::InvalidConfig(
                                "tabulated: needs tail_exponent > 2 or compact support (last value 0)"
                                    .into(),
                            ));
                        }
                    }
                }
            }
            PotentialSpec::TruncatedAt { inner, cutoff_radius } => {
                if *cutoff_radius <= 0.0 || !cutoff_radius.is_finite() {
                    return Err(Error::InvalidConfig("truncated: cutoff radius must be > 0".into()));
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// V(r). Errors on r < 0.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::Domain(format!("potential evaluated at r = {r}")));
        }
        Ok(self.value(r))
    }

    /// V(r) without the domain check; r must be >= 0.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            PotentialSpec::SquareBarrier { height, radius } => {
                if r < *radius {
                    *height
                } else {
                    0.0
                }
            }
            PotentialSpec::SquareWell { depth, radius } => {
                if r < *radius {
                    -*depth
                } else {
                    0.0
                }
            }
            PotentialSpec::PowerTail { amplitude, core, exponent_s } => {
                amplitude * (core + r).powf(-exponent_s)
            }
            PotentialSpec::ExponentialTail { amplitude, rate } => amplitude * (-rate * r).exp(),
            PotentialSpec::Tabulated { nodes, values, tail_exponent } => {
                tabulated_value(nodes, values, *tail_exponent, r)
            }
            PotentialSpec::TruncatedAt { inner, cutoff_radius } => {
                if r <= *cutoff_radius {
                    inner.value(r)
                } else {
                    0.0
                }
            }
        }
    }

    /// V(r) evaluated as if r belonged to the same smooth piece as `hint`.
    ///
    /// Solvers integrate segment by segment between breakpoints; hinted
    /// evaluation keeps one-sided limits consistent when a step endpoint
    /// lands exactly on a discontinuity.
    pub fn value_hinted(&self, r: f64, hint: f64) -> f64 {
        match self {
            PotentialSpec::SquareBarrier { height, radius } => {
                if hint < *radius {
                    *height
                } else {
                    0.0
                }
            }
            PotentialSpec::SquareWell { depth, radius } => {
                if hint < *radius {
                    -*depth
                } else {
                    0.0
                }
            }
            PotentialSpec::TruncatedAt { inner, cutoff_radius } => {
                if hint < *cutoff_radius {
                    inner.value_hinted(r, hint)
                } else {
                    0.0
                }
            }
            PotentialSpec::Tabulated { .. } => self.value(r),
            _ => self.value(r),
        }
    }

    /// Radii where V has a jump or kink; solvers align grid nodes here.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            PotentialSpec::SquareBarrier { radius, .. }
            | PotentialSpec::SquareWell { radius, .. } => vec![*radius],
            PotentialSpec::PowerTail { .. } | PotentialSpec::ExponentialTail { .. } => vec![],
            PotentialSpec::Tabulated { nodes, .. } => nodes.clone(),
            PotentialSpec::TruncatedAt { inner, cutoff_radius } => {
                let mut b: Vec<f64> = inner
                    .breakpoints()
                    .into_iter()
                    .filter(|&x| x < *cutoff_radius)
                    .collect();
                b.push(*cutoff_radius);
                b
            }
        }
    }

    /// True when V vanishes identically on [lo, inf). Lets solvers switch
    /// to the exact free propagator.
    pub fn is_zero_beyond(&self, lo: f64) -> bool {
        match self {
            PotentialSpec::SquareBarrier { height, radius } => *height == 0.0 || lo >= *radius,
            PotentialSpec::SquareWell { depth, radius } => *depth == 0.0 || lo >= *radius,
            PotentialSpec::PowerTail { amplitude, .. } => *amplitude == 0.0,
            PotentialSpec::ExponentialTail { amplitude, .. } => *amplitude == 0.0,
            PotentialSpec::Tabulated { nodes, values, tail_exponent } => {
                let n = nodes.len();
                if lo < nodes[n - 1] {
                    return false;
                }
                match tail_exponent {
                    Some(_) => values[n - 1] == 0.0,
                    None => values[n - 1] == 0.0,
                }
            }
            PotentialSpec::TruncatedAt { inner, cutoff_radius } => {
                lo >= *cutoff_radius || inner.is_zero_beyond(lo)
            }
        }
    }

    /// True when V(r) >= 0 for all r. The phase-shift integral formula
    /// requires this.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            PotentialSpec::SquareBarrier { .. } => true,
            PotentialSpec::SquareWell { .. } => false,
            PotentialSpec::PowerTail { amplitude, .. } => *amplitude >= 0.0,
            PotentialSpec::ExponentialTail { amplitude, .. } => *amplitude >= 0.0,
            PotentialSpec::Tabulated { values, .. } => values.iter().all(|&v| v >= 0.0),
            PotentialSpec::TruncatedAt { inner, .. } => inner.is_nonnegative(),
        }
    }

    /// A radius R such that V does not change sign on (R, inf).
    pub fn sign_constant_beyond(&self) -> f64 {
        match self {
            PotentialSpec::SquareBarrier { radius, .. }
            | PotentialSpec::SquareWell { radius, .. } => *radius,
            PotentialSpec::PowerTail { .. } | PotentialSpec::ExponentialTail { .. } => 0.0,
            PotentialSpec::Tabulated { nodes, .. } => *nodes.last().unwrap(),
            PotentialSpec::TruncatedAt { cutoff_radius, .. } => *cutoff_radius,
        }
    }

    /// A length scale characterizing the extent of the potential; used to
    /// size momentum grids and high-k anchors.
    pub fn characteristic_range(&self) -> f64 {
        match self {
            PotentialSpec::SquareBarrier { radius, .. }
            | PotentialSpec::SquareWell { radius, .. } => *radius,
            PotentialSpec::PowerTail { core, .. } => *core,
            PotentialSpec::ExponentialTail { rate, .. } => 1.0 / rate,
            PotentialSpec::Tabulated { nodes, .. } => *nodes.last().unwrap(),
            PotentialSpec::TruncatedAt { inner, cutoff_radius } => {
                inner.characteristic_range().min(*cutoff_radius)
            }
        }
    }

    /// Whether r^p V(r) is in L1(0, inf), decided analytically from the
    /// declared tail. p must lie in 1..=6.
    pub fn integrability_class(&self, p: u32) -> Result<bool> {
        if !(1..=6).contains(&p) {
            return Err(Error::Precondition(format!("integrability_class: p = {p} outside 1..=6")));
        }
        match self {
            PotentialSpec::SquareBarrier { .. }
            | PotentialSpec::SquareWell { .. }
            | PotentialSpec::ExponentialTail { .. }
            | PotentialSpec::TruncatedAt { .. } => Ok(true),
            PotentialSpec::PowerTail { exponent_s, .. } => Ok(*exponent_s > p as f64 + 1.0),
            PotentialSpec::Tabulated { values, tail_exponent, .. } => match tail_exponent {
                Some(s) => Ok(*s > p as f64 + 1.0),
                None if *values.last().unwrap() == 0.0 => Ok(true),
                None => Err(Error::Indeterminate(
                    "tabulated potential without tail metadata: use a truncation scan".into(),
                )),
            },
        }
    }

    /// Uncapped analytic version of [`integrability_class`] for internal
    /// use at arbitrary moment order; None when the tail is undeclared.
    pub(crate) fn moment_in_l1(&self, p: f64) -> Option<bool> {
        match self {
            PotentialSpec::SquareBarrier { .. }
            | PotentialSpec::SquareWell { .. }
            | PotentialSpec::ExponentialTail { .. }
            | PotentialSpec::TruncatedAt { .. } => Some(true),
            PotentialSpec::PowerTail { exponent_s, .. } => Some(*exponent_s > p + 1.0),
            PotentialSpec::Tabulated { values, tail_exponent, .. } => match tail_exponent {
                Some(s) => Some(*s > p + 1.0),
                None if *values.last().unwrap() == 0.0 => Some(true),
                None => None,
            },
        }
    }

    /// Predicted finiteness of a_ell and r_ell from the tail class:
    /// a_ell finite iff r^(2l+2) V in L1, r_ell finite iff r^(2l+4) V in L1.
    pub fn predict_finiteness(&self, ell: u32) -> Result<Finiteness> {
        Ok(Finiteness {
            a_finite: self.integrability_class(2 * ell + 2)?,
            r_finite: self.integrability_class(2 * ell + 4)?,
        })
    }

    /// Analytic tail moment integral(R, inf) t^p |V(t)| dt for p in {0, 1}.
    pub fn tail_abs_moment(&self, r_from: f64, p: u32) -> f64 {
        assert!(p <= 1, "tail_abs_moment supports p in {{0, 1}}");
        let r_from = r_from.max(0.0);
        match self {
            PotentialSpec::SquareBarrier { height, radius } => {
                piece_moment(height.abs(), r_from, *radius, p)
            }
            PotentialSpec::SquareWell { depth, radius } => {
                piece_moment(depth.abs(), r_from, *radius, p)
            }
            PotentialSpec::PowerTail { amplitude, core, exponent_s } => {
                power_tail_moment(amplitude.abs(), *core, *exponent_s, r_from, p)
            }
            PotentialSpec::ExponentialTail { amplitude, rate } => {
                let a = amplitude.abs();
                let e = (-rate * r_from).exp();
                match p {
                    0 => a * e / rate,
                    _ => a * e * (r_from / rate + 1.0 / (rate * rate)),
                }
            }
            PotentialSpec::Tabulated { nodes, values, tail_exponent } => {
                tabulated_tail_moment(nodes, values, *tail_exponent, r_from, p)
            }
            PotentialSpec::TruncatedAt { inner, cutoff_radius } => {
                if r_from >= *cutoff_radius {
                    0.0
                } else {
                    inner.tail_abs_moment(r_from, p) - inner.tail_abs_moment(*cutoff_radius, p)
                }
            }
        }
    }

    /// Smallest radius R with tail_abs_moment(R, p) < tol.
    pub fn required_radius(&self, tol: f64, p: u32) -> f64 {
        if self.tail_abs_moment(0.0, p) < tol {
            return 0.0;
        }
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while self.tail_abs_moment(hi, p) >= tol {
            hi *= 2.0;
            if hi > 1e12 {
                return hi;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.tail_abs_moment(mid, p) < tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

fn piece_moment(amp: f64, from: f64, to: f64, p: u32) -> f64 {
    if from >= to {
        return 0.0;
    }
    match p {
        0 => amp * (to - from),
        _ => amp * 0.5 * (to * to - from * from),
    }
}

fn power_tail_moment(amp: f64, core: f64, s: f64, from: f64, p: u32) -> f64 {
    let x = core + from;
    match p {
        // int_R^inf (c+t)^(-s) dt = X^(1-s)/(s-1)
        0 => amp * x.powf(1.0 - s) / (s - 1.0),
        // int_R^inf t (c+t)^(-s) dt with u = c+t
        _ => amp * (x.powf(2.0 - s) / (s - 2.0) - core * x.powf(1.0 - s) / (s - 1.0)),
    }
}

fn tabulated_value(nodes: &[f64], values: &[f64], tail_exponent: Option<f64>, r: f64) -> f64 {
    let n = nodes.len();
    if r <= nodes[0] {
        return values[0];
    }
    if r >= nodes[n - 1] {
        let v_last = values[n - 1];
        return match tail_exponent {
            Some(s) if v_last != 0.0 => v_last * (r / nodes[n - 1]).powf(-s),
            _ => 0.0,
        };
    }
    let i = match nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
        Ok(i) => return values[i],
        Err(i) => i,
    };
    let (r0, r1) = (nodes[i - 1], nodes[i]);
    let t = (r - r0) / (r1 - r0);
    values[i - 1] * (1.0 - t) + values[i] * t
}

fn tabulated_tail_moment(
    nodes: &[f64],
    values: &[f64],
    tail_exponent: Option<f64>,
    from: f64,
    p: u32,
) -> f64 {
    let n = nodes.len();
    let mut total = 0.0;
    // piecewise-linear part
    for i in 1..n {
        let (r0, r1) = (nodes[i - 1], nodes[i]);
        if r1 <= from {
            continue;
        }
        let lo = from.max(r0);
        // |V| on the segment: split at a sign change of the linear interpolant
        let (v0, v1) = (values[i - 1], values[i]);
        let seg = |a: f64, b: f64| -> f64 {
            // integral of t^p |v(t)| with v linear; v has constant sign here
            let va = tabulated_value(nodes, values, tail_exponent, a).abs();
            let vb = tabulated_value(nodes, values, tail_exponent, b).abs();
            match p {
                // exact for linear integrand
                0 => 0.5 * (va + vb) * (b - a),
                // t*|v(t)| is quadratic; Simpson is exact
                _ => {
                    let m = 0.5 * (a + b);
                    let vm = tabulated_value(nodes, values, tail_exponent, m).abs();
                    (b - a) / 6.0 * (a * va + 4.0 * m * vm + b * vb)
                }
            }
        };
        if v0 * v1 < 0.0 {
            let rz = r0 + (r1 - r0) * v0 / (v0 - v1);
            if lo < rz {
                total += seg(lo, rz);
                total += seg(rz, r1);
            } else {
                total += seg(lo, r1);
            }
        } else {
            total += seg(lo, r1);
        }
    }
    // declared power tail beyond the last node
    let v_last = values[n - 1];
    if let Some(s) = tail_exponent {
        if v_last != 0.0 {
            let r_last = nodes[n - 1];
            let start = from.max(r_last);
            let amp = v_last.abs() * r_last.powf(s);
            // |V(t)| = amp * t^(-s) beyond r_last
            total += match p {
                0 => amp * start.powf(1.0 - s) / (s - 1.0),
                _ => amp * start.powf(2.0 - s) / (s - 2.0),
            };
        }
    }
    total
}
