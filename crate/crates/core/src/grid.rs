//! Radial grids: geometric refinement near the origin, step growth
//! controlled by potential stiffness and by the phase accuracy needed at
//! the highest momentum the grid must support.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

/// Construction parameters for a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Innermost radius; must be > 0 (the centrifugal term is singular at 0).
    pub r_min: f64,
    /// Outermost radius.
    pub r_max: f64,
    /// Highest momentum that solutions on this grid must resolve; 0 for
    /// zero-energy work.
    pub k_max: f64,
    /// Density of the geometric refinement near the origin.
    pub points_per_decade: u32,
    /// Absolute cap on the step size.
    pub max_step: f64,
    /// Target accumulated phase error for oscillatory solutions at k_max.
    pub phase_tolerance: f64,
    /// Radii that must appear exactly as grid nodes (truncation cutoffs,
    /// matching radii), in addition to the potential's own breakpoints.
    pub extra_nodes: Vec<f64>,
}

impl GridSpec {
    pub fn new(r_max: f64) -> Self {
        GridSpec {
            r_min: 1e-8,
            r_max,
            k_max: 0.0,
            points_per_decade: 512,
            max_step: 2.0,
            phase_tolerance: 1e-9,
            extra_nodes: Vec::new(),
        }
    }

    pub fn with_k_max(mut self, k_max: f64) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_extra_nodes(mut self, nodes: Vec<f64>) -> Self {
        self.extra_nodes = nodes;
        self
    }

    pub fn with_phase_tolerance(mut self, tol: f64) -> Self {
        self.phase_tolerance = tol;
        self
    }

    /// A spec sized for observables on `pot` up to momentum `k_max`: R_max
    /// from the first-moment tail criterion at 1e-7 (the residual beyond
    /// that is absorbed by first-order tail corrections), never closer in
    /// than twice the characteristic range, and capped at 1e4 so slowly
    /// decaying tails (which the corrections and divergence markers
    /// handle) do not demand astronomical grids.
    pub fn recommended(pot: &PotentialSpec, k_max: f64) -> Result<GridSpec> {
        pot.validate()?;
        let r_tail = pot.required_radius(1e-7, 1).min(1e4);
        let r_max = r_tail.max(2.0 * pot.characteristic_range() + 5.0);
        Ok(GridSpec::new(r_max).with_k_max(k_max))
    }
}

/// Strictly ascending radii from r_min to r_max, aligned with every
/// discontinuity of the potential it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    /// Builds a grid adapted to `pot` per the spec's step policy.
    pub fn build(pot: &PotentialSpec, spec: &GridSpec) -> Result<Arc<RadialGrid>> {
        if !(spec.r_min > 0.0) || !(spec.r_max > spec.r_min) {
            return Err(Error::InvalidConfig(format!(
                "grid: need 0 < r_min < r_max (got {} .. {})",
                spec.r_min, spec.r_max
            )));
        }
        if spec.points_per_decade < 64 {
            return Err(Error::InvalidConfig("grid: points_per_decade must be >= 64".into()));
        }
        let alpha = std::f64::consts::LN_10 / spec.points_per_decade as f64;

        // step cap from the accumulated RK4 phase-error model at k_max
        let h_osc = if spec.k_max > 0.0 {
            let k = spec.k_max;
            let budget = spec.phase_tolerance * 120.0 / (spec.r_max * k.powi(5));
            budget.powf(0.25).min(0.35 / k)
        } else {
            f64::INFINITY
        };

        let mut marks: Vec<f64> = pot
            .breakpoints()
            .into_iter()
            .chain(spec.extra_nodes.iter().copied())
            .filter(|&x| x > spec.r_min && x < spec.r_max)
            .collect();
        marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        marks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        marks.push(spec.r_max);

        let mut nodes = Vec::with_capacity(4096);
        nodes.push(spec.r_min);
        let mut r = spec.r_min;
        let mut mark_idx = 0usize;
        while r < spec.r_max {
            let v = pot.value(r).abs();
            let mut h = (alpha * r).min(spec.max_step).min(h_osc);
            if v > 1.0 {
                h = h.min(0.3 / v.sqrt());
            }
            let mut next = r + h;
            while mark_idx < marks.len() && marks[mark_idx] <= r + 1e-15 * r.abs().max(1.0) {
                mark_idx += 1;
            }
            if mark_idx < marks.len() && next >= marks[mark_idx] - 1e-15 * marks[mark_idx] {
                next = marks[mark_idx];
                mark_idx += 1;
            }
            if next > spec.r_max {
                next = spec.r_max;
            }
            nodes.push(next);
            r = next;
            if nodes.len() > 8_000_000 {
                return Err(Error::InvalidConfig(
                    "grid: node budget exceeded; relax phase_tolerance or shrink r_max".into(),
                ));
            }
        }
        Ok(Arc::new(RadialGrid { nodes }))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Index of the first node >= r.
    pub fn index_at_or_after(&self, r: f64) -> usize {
        self.nodes.partition_point(|&x| x < r)
    }

    /// Index of the node equal to r (within rounding), if present.
    pub fn index_of(&self, r: f64) -> Option<usize> {
        let i = self.index_at_or_after(r * (1.0 - 1e-12));
        if i < self.nodes.len() && (self.nodes[i] - r).abs() <= 1e-10 * r.abs().max(1.0) {
            Some(i)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascending_and_aligned() {
        let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
        let grid = RadialGrid::build(&pot, &GridSpec::new(10.0)).unwrap();
        let nodes = grid.nodes();
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(nodes[0], 1e-8);
        assert_eq!(*nodes.last().unwrap(), 10.0);
        assert!(grid.index_of(1.0).is_some(), "barrier edge must be a node");
    }

    #[test]
    fn origin_density() {
        let pot = PotentialSpec::SquareBarrier { height: 1.0, radius: 1.0 };
        let grid = RadialGrid::build(&pot, &GridSpec::new(10.0)).unwrap();
        // at least 64 nodes in [1e-6, 1e-5]
        let lo = grid.index_at_or_after(1e-6);
        let hi = grid.index_at_or_after(1e-5);
        assert!(hi - lo >= 64, "{} nodes per decade", hi - lo);
    }

    #[test]
    fn stiff_region_is_refined() {
        let pot = PotentialSpec::SquareBarrier { height: 1e8, radius: 1.0 };
        let grid = RadialGrid::build(&pot, &GridSpec::new(3.0)).unwrap();
        let i = grid.index_at_or_after(0.5);
        let h = grid.nodes()[i + 1] - grid.nodes()[i];
        assert!(h <= 0.3 / 1e4, "step {h} too large inside the barrier");
    }

    #[test]
    fn extra_nodes_present() {
        let pot = PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 4.0 };
        let spec = GridSpec::new(100.0).with_extra_nodes(vec![10.0, 20.0, 40.0]);
        let grid = RadialGrid::build(&pot, &spec).unwrap();
        for r in [10.0, 20.0, 40.0] {
            assert!(grid.index_of(r).is_some(), "missing cutoff node {r}");
        }
    }
}
