//! Quadrature over solver output: composite Simpson per grid interval with
//! midpoints reconstructed by cubic Hermite interpolation (second
//! derivatives come for free from the ODE, y'' = q y), plus log-spaced
//! Simpson for improper tail integrals.

/// Cubic Hermite evaluation on [0, 1]: values and first derivatives of y at
/// the endpoints, queried at fraction t. Returns (y, y').
pub(crate) fn hermite_eval(h: f64, ya: f64, da: f64, yb: f64, db: f64, t: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let y = h00 * ya + h10 * h * da + h01 * yb + h11 * h * db;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -d00;
    let d11 = 3.0 * t2 - 2.0 * t;
    let dy = (d00 * ya + d01 * yb) / h + d10 * da + d11 * db;
    (y, dy)
}

/// Point sample handed to integrand closures: radius plus (possibly
/// rescaled) wavefunction value and derivative, and the midpoint of the
/// enclosing interval as a side hint for discontinuous potentials.
/// Integrands must be invariant under common rescaling of
/// (phi, phi_prime).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub r: f64,
    pub hint: f64,
    pub phi: f64,
    pub phi_prime: f64,
}

/// Borrowed view of a sampled solution together with the q(r) of its ODE,
/// used to build O(h^4) midpoints for Simpson weights.
pub(crate) struct SolutionQuad<'a> {
    pub nodes: &'a [f64],
    pub phi: &'a [f64],
    pub phi_prime: &'a [f64],
    pub log_scale: &'a [f64],
}

impl<'a> SolutionQuad<'a> {
    /// Endpoint data of interval i, both ends brought to the scale of
    /// node i+1. Returns (h, ya, da, yb, db).
    fn interval(&self, i: usize) -> (f64, f64, f64, f64, f64) {
        let h = self.nodes[i + 1] - self.nodes[i];
        let rescale = (self.log_scale[i] - self.log_scale[i + 1]).exp();
        (h, self.phi[i] * rescale, self.phi_prime[i] * rescale, self.phi[i + 1], self.phi_prime[i + 1])
    }

    /// Midpoint sample of interval i (scale of node i+1), O(h^4) accurate;
    /// the derivative midpoint uses y'' = q y at the endpoints. q takes
    /// (r, hint) so discontinuities resolve to the interval's side.
    pub fn midpoint(&self, i: usize, q: &dyn Fn(f64, f64) -> f64) -> Sample {
        let (h, ya, da, yb, db) = self.interval(i);
        let (ra, rb) = (self.nodes[i], self.nodes[i + 1]);
        let rm = 0.5 * (ra + rb);
        let phi_m = 0.5 * (ya + yb) + 0.125 * h * (da - db);
        let dda = q(ra, rm) * ya;
        let ddb = q(rb, rm) * yb;
        let dphi_m = 0.5 * (da + db) + 0.125 * h * (dda - ddb);
        Sample { r: rm, hint: rm, phi: phi_m, phi_prime: dphi_m }
    }

    /// Simpson integral of f over node range [i_lo, i_hi]. f must be
    /// scale-invariant in (phi, phi_prime).
    pub fn integrate<F: Fn(Sample) -> f64>(
        &self,
        q: &dyn Fn(f64, f64) -> f64,
        f: F,
        i_lo: usize,
        i_hi: usize,
    ) -> f64 {
        let mut acc = 0.0;
        for i in i_lo..i_hi {
            let (h, ya, da, yb, db) = self.interval(i);
            let rm = 0.5 * (self.nodes[i] + self.nodes[i + 1]);
            let fa = f(Sample { r: self.nodes[i], hint: rm, phi: ya, phi_prime: da });
            let fm = f(self.midpoint(i, q));
            let fb = f(Sample { r: self.nodes[i + 1], hint: rm, phi: yb, phi_prime: db });
            acc += h / 6.0 * (fa + 4.0 * fm + fb);
        }
        acc
    }

    /// Cumulative Simpson integral of f at every node; entries before i_lo
    /// are zero.
    pub fn cumulative<F: Fn(Sample) -> f64>(
        &self,
        q: &dyn Fn(f64, f64) -> f64,
        f: F,
        i_lo: usize,
    ) -> Vec<f64> {
        let n = self.nodes.len();
        let mut out = vec![0.0; n];
        let mut acc = 0.0;
        for i in i_lo..n - 1 {
            let (h, ya, da, yb, db) = self.interval(i);
            let rm = 0.5 * (self.nodes[i] + self.nodes[i + 1]);
            let fa = f(Sample { r: self.nodes[i], hint: rm, phi: ya, phi_prime: da });
            let fm = f(self.midpoint(i, q));
            let fb = f(Sample { r: self.nodes[i + 1], hint: rm, phi: yb, phi_prime: db });
            acc += h / 6.0 * (fa + 4.0 * fm + fb);
            out[i + 1] = acc;
        }
        out
    }
}

/// Simpson in log space for tail integrals: integral of f(r) dr over
/// [r0, r0 * span], with n (even) subintervals in t = ln r.
pub(crate) fn log_tail_integral<F: Fn(f64) -> f64>(f: F, r0: f64, span: f64, n: usize) -> f64 {
    debug_assert!(n % 2 == 0 && n >= 2);
    let t0 = r0.ln();
    let t1 = (r0 * span).ln();
    let dt = (t1 - t0) / n as f64;
    let g = |t: f64| {
        let r = t.exp();
        f(r) * r
    };
    let mut acc = g(t0) + g(t1);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(t0 + j as f64 * dt);
    }
    acc * dt / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_is_exact_on_cubics() {
        // y = t^3 - 2t + 1 on [0, 2]
        let y = |x: f64| x * x * x - 2.0 * x + 1.0;
        let dy = |x: f64| 3.0 * x * x - 2.0;
        let h = 2.0;
        for &t in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            let (v, d) = hermite_eval(h, y(0.0), dy(0.0), y(2.0), dy(2.0), t);
            assert!((v - y(h * t)).abs() < 1e-12);
            assert!((d - dy(h * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn simpson_on_sine_samples() {
        // phi = sin r, q = -1; integral of phi^2 over [0, pi] = pi/2
        let n = 200;
        let nodes: Vec<f64> = (0..=n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect();
        let phi: Vec<f64> = nodes.iter().map(|r| r.sin()).collect();
        let dphi: Vec<f64> = nodes.iter().map(|r| r.cos()).collect();
        let logs = vec![0.0; nodes.len()];
        let sq = SolutionQuad { nodes: &nodes, phi: &phi, phi_prime: &dphi, log_scale: &logs };
        let q = |_r: f64, _h: f64| -1.0;
        let val = sq.integrate(&q, |s| s.phi * s.phi, 0, n);
        // O(h^4): h = pi/200 gives ~1e-9 headroom
        assert!((val - std::f64::consts::FRAC_PI_2).abs() < 5e-9, "{val}");
        let cum = sq.cumulative(&q, |s| s.phi * s.phi, 0);
        assert!((cum[n] - val).abs() < 1e-14);
        // cumulative at pi/2: pi/4
        assert!((cum[n / 2] - std::f64::consts::FRAC_PI_4).abs() < 5e-9);
    }

    #[test]
    fn log_tail_power_law() {
        // integral of r^-4 from 10 to infinity = 1/3000; span 1e8 captures it
        let v = log_tail_integral(|r| r.powi(-4), 10.0, 1e8, 2000);
        assert!((v - 1.0 / 3000.0).abs() < 1e-8 / 3000.0, "{v}");
    }
}
