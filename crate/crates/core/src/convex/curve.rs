//! Antiderivatives generated by monotone curves t ↦ (α₁(t), …, α_N(t)) in ℝᴺ:
//! f_i(x) = ∫₀ˣ Σ_{k≠i} α_k(α_i⁻¹(t)) dt.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly increasing map ℝ → ℝ with α(0) = 0, tabulated and linearly
/// interpolated between nodes. Undefined outside the tabulated range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneTable {
    ts: Vec<f64>,
    vals: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(ts: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        let t = Self { ts, vals };
        t.validate()?;
        Ok(t)
    }

    /// Tabulates `alpha` on the given nodes.
    pub fn sample(ts: Vec<f64>, alpha: impl Fn(f64) -> f64) -> Result<Self> {
        let vals = ts.iter().map(|&t| alpha(t)).collect();
        Self::new(ts, vals)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ts.len() < 2 || self.ts.len() != self.vals.len() {
            return Err(Error::Config("a table needs at least two (t, value) rows of equal length".into()));
        }
        if self.ts.iter().chain(&self.vals).any(|v| !v.is_finite()) {
            return Err(Error::Config("table entries must be finite".into()));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.ts) || !increasing(&self.vals) {
            return Err(Error::Config("table must be strictly increasing".into()));
        }
        match self.eval(0.0) {
            Some(v) if v.abs() <= 1e-12 => Ok(()),
            Some(v) => Err(Error::Config(format!("alpha(0) = {v}, expected 0"))),
            None => Err(Error::Config("table range must contain t = 0".into())),
        }
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.ts[0], *self.ts.last().unwrap())
    }

    pub fn value_range(&self) -> (f64, f64) {
        (self.vals[0], *self.vals.last().unwrap())
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        interpolate(&self.ts, &self.vals, t)
    }

    /// α⁻¹(y), by bisection over the table then linear inversion on the segment.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        interpolate(&self.vals, &self.ts, y)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let (lo, hi) = (xs[0], *xs.last()?);
    if !(lo..=hi).contains(&x) {
        return None;
    }
    // first index with xs[k] >= x
    let k = xs.partition_point(|&v| v < x);
    if k == 0 {
        return Some(ys[0]);
    }
    if xs[k] == x {
        return Some(ys[k]);
    }
    let w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    Some(ys[k - 1] + w * (ys[k] - ys[k - 1]))
}

/// f_i for the `own` curve component.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveAntiderivative {
    alphas: Vec<MonotoneTable>,
    own: usize,
    /// Sorted x-locations where the integrand may kink, including 0.
    knots: Vec<f64>,
    /// ∫₀^{knots[k]} f′ for every knot.
    cumulative: Vec<f64>,
    domain: (f64, f64),
}

const SIMPSON_TOL: f64 = 1e-10;
const MAX_HALVINGS: u32 = 20;

impl CurveAntiderivative {
    pub fn new(alphas: Vec<MonotoneTable>, own: usize) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::Config("need at least two curve components".into()));
        }
        if own >= alphas.len() {
            return Err(Error::Index { index: own, len: alphas.len() });
        }
        for a in &alphas {
            a.validate()?;
        }
        // Common parameter range on which every α_k is tabulated.
        let t_lo = alphas.iter().map(|a| a.t_range().0).fold(f64::NEG_INFINITY, f64::max);
        let t_hi = alphas.iter().map(|a| a.t_range().1).fold(f64::INFINITY, f64::min);
        let own_tab = &alphas[own];
        let domain = (own_tab.eval(t_lo).unwrap(), own_tab.eval(t_hi).unwrap());

        let mut ts: Vec<f64> = alphas
            .iter()
            .flat_map(|a| a.ts.iter().copied())
            .filter(|&t| t >= t_lo && t <= t_hi)
            .chain([0.0, t_lo, t_hi])
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        let knots: Vec<f64> = ts.iter().map(|&t| own_tab.eval(t).unwrap()).collect();

        let mut f = Self { alphas, own, knots, cumulative: Vec::new(), domain };
        let zero = f.knots.iter().position(|&x| x == 0.0).expect("0 is a knot");
        let mut cumulative = vec![0.0; f.knots.len()];
        for k in (zero + 1)..f.knots.len() {
            cumulative[k] = cumulative[k - 1] + f.integrate(f.knots[k - 1], f.knots[k]);
        }
        for k in (0..zero).rev() {
            cumulative[k] = cumulative[k + 1] - f.integrate(f.knots[k], f.knots[k + 1]);
        }
        f.cumulative = cumulative;
        Ok(f)
    }

    pub fn alphas(&self) -> &[MonotoneTable] {
        &self.alphas
    }

    pub fn own_index(&self) -> usize {
        self.own
    }

    /// Interval of x on which f is known.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// f′(x) = Σ_{k≠i} α_k(α_i⁻¹(x)).
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let t = self.param_of(x)?;
        Ok(self
            .alphas
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != self.own)
            .map(|(_, a)| a.eval(t).expect("t lies in the common range"))
            .sum())
    }

    fn param_of(&self, x: f64) -> Result<f64> {
        if !(self.domain.0..=self.domain.1).contains(&x) {
            return Err(Error::Domain(format!(
                "x = {x} outside tabulated domain [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        self.alphas[self.own]
            .inverse(x)
            .ok_or_else(|| Error::Domain(format!("cannot invert at {x}")))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.param_of(x)?;
        // nearest knot at or below x (knots are sorted and span the domain)
        let k = self.knots.partition_point(|&v| v <= x).saturating_sub(1);
        Ok(self.cumulative[k] + self.integrate(self.knots[k], x))
    }

    /// Composite Simpson on [a, b] (a ≤ b), halving the panel width until two
    /// successive estimates agree to within 1e-10.
    fn integrate(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let g = |x: f64| self.derivative(x.clamp(self.domain.0, self.domain.1)).unwrap_or(0.0);
        let mut panels = 2usize;
        let mut prev = simpson(&g, a, b, panels);
        for _ in 0..MAX_HALVINGS {
            panels *= 2;
            let next = simpson(&g, a, b, panels);
            if (next - prev).abs() < SIMPSON_TOL {
                return next;
            }
            prev = next;
        }
        prev
    }

    /// Solves x + f′(x) = s by bisection.
    pub fn prox(&self, s: f64) -> Result<f64> {
        let phi = |x: f64| -> Result<f64> { Ok(x + self.derivative(x)? - s) };
        let (mut lo, mut hi) = self.domain;
        if phi(lo)? > 0.0 || phi(hi)? < 0.0 {
            return Err(Error::Domain(format!("prox bracket fails for s = {s}")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if phi(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = g(a) + g(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + k as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(slope: f64) -> MonotoneTable {
        MonotoneTable::sample((-20..=20).map(|k| k as f64 * 0.25).collect(), |t| slope * t).unwrap()
    }

    #[test]
    fn table_validation() {
        assert!(MonotoneTable::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(MonotoneTable::new(vec![1.0, 2.0], vec![1.0, 2.0]).is_err());
        assert!(MonotoneTable::new(vec![-1.0, 1.0], vec![-1.0, 2.0]).is_err());
        let t = MonotoneTable::new(vec![-1.0, 0.0, 2.0], vec![-3.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.eval(1.0), Some(0.5));
        assert_eq!(t.inverse(0.5), Some(1.0));
        assert_eq!(t.eval(2.5), None);
    }

    #[test]
    fn two_component_line() {
        // α = (t, 2t): f₁(x) = x², f₂(x) = x²/4
        let alphas = vec![linear(1.0), linear(2.0)];
        let f1 = CurveAntiderivative::new(alphas.clone(), 0).unwrap();
        let f2 = CurveAntiderivative::new(alphas, 1).unwrap();
        for &x in &[-3.3, -1.0, 0.0, 0.4, 2.75] {
            assert!((f1.eval(x).unwrap() - x * x).abs() < 1e-12);
            assert!((f2.eval(x).unwrap() - x * x / 4.0).abs() < 1e-12);
            assert!((f1.derivative(x).unwrap() - 2.0 * x).abs() < 1e-12);
        }
        // prox of x² at s: x + 2x = s
        assert!((f1.prox(3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(f1.eval(6.0).is_err());
        assert!(f1.prox(100.0).is_err());
    }
}
