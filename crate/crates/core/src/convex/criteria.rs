//! Envelope, prox-partition and subdifferential criteria for splitting tuples.

use super::conjugation::conjugate_sampled;
use super::{ConvexFn, SplittingTuple};
use crate::error::{Error, Result};
use crate::gamma::{GammaBody, GammaSet};
use crate::grid::Grid;
use crate::linalg::Vector;
use crate::report::{CheckReport, SlackTracker, Verdict, Witness};
use crate::space::{half_sq, sum_map};

/// Relative tolerance for deciding s ∈ S(Γ).
const RANGE_TOL: f64 = 1e-9;

/// One probe of the envelope criterion: (s, Σ e_{f_i*}(s), q(s)).
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRow {
    pub s: Vector,
    pub sum: f64,
    pub q: f64,
}

#[derive(Debug, Clone)]
pub struct EnvelopeCheck {
    pub report: CheckReport,
    pub rows: Vec<EnvelopeRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Membership {
    On,
    Off,
    Unknown,
}

fn membership(gamma: Option<&GammaSet>, s: &Vector) -> Membership {
    let Some(gamma) = gamma else { return Membership::Unknown };
    let scale = 1.0 + s.norm();
    match gamma.body() {
        GammaBody::Finite(pts) => {
            if pts.iter().any(|x| (sum_map(x) - s).norm() <= RANGE_TOL * scale) {
                Membership::On
            } else {
                // a finite sample does not certify the complement
                Membership::Unknown
            }
        }
        GammaBody::Linear(_) => {
            let t = gamma.sum_matrix().expect("linear body");
            let svd = t.clone().svd(true, true);
            let cut = RANGE_TOL * svd.singular_values.max().max(1.0);
            match svd.solve(s, cut) {
                Ok(v) if (&t * &v - s).norm() <= RANGE_TOL * scale => Membership::On,
                Ok(_) => Membership::Off,
                Err(_) => Membership::Unknown,
            }
        }
    }
}

/// Σ e_{f_i*}(s) ≤ q(s) at every probe, with e_{f*} = q − e_f. Given Γ, also
/// equality at probes in S(Γ) and strict inequality at probes certified off it.
/// All comparisons use tol·(1 + ‖s‖²).
pub fn check_envelope_criterion(
    tuple: &SplittingTuple,
    probes: &[Vector],
    gamma: Option<&GammaSet>,
    tol: f64,
) -> Result<EnvelopeCheck> {
    if probes.is_empty() {
        return Err(Error::EmptySample("no probe points".into()));
    }
    if let Some(g) = gamma {
        if g.config().n != tuple.len() || g.config().d != tuple.dim() {
            return Err(Error::Config("Γ and tuple disagree on N or d".into()));
        }
    }
    let mut ineq = SlackTracker::new();
    let mut rows = Vec::with_capacity(probes.len());
    let (mut eq_worst, mut off_min) = (0.0f64, f64::INFINITY);
    let (mut on_count, mut off_count) = (0usize, 0usize);
    let mut bad: Option<Witness> = None;
    for s in probes {
        let mut sum = 0.0;
        for f in tuple.funcs() {
            sum += f.conjugate_envelope(s)?;
        }
        let q = half_sq(s);
        let scale = 1.0 + s.norm_squared();
        let slack = (q - sum) / scale;
        ineq.observe(slack, || Witness::Probe { point: s.iter().copied().collect(), residual: slack });
        match membership(gamma, s) {
            Membership::On => {
                on_count += 1;
                if slack.abs() > eq_worst {
                    eq_worst = slack.abs();
                    if eq_worst > tol && bad.is_none() {
                        bad = Some(Witness::Probe { point: s.iter().copied().collect(), residual: slack });
                    }
                }
            }
            Membership::Off => {
                off_count += 1;
                if slack < off_min {
                    off_min = slack;
                    if slack <= tol && bad.is_none() {
                        bad = Some(Witness::Probe { point: s.iter().copied().collect(), residual: slack });
                    }
                }
            }
            Membership::Unknown => {}
        }
        rows.push(EnvelopeRow { s: s.clone(), sum, q });
    }
    let ineq_fail = ineq.violated(tol);
    let fail = ineq_fail || eq_worst > tol || off_min <= tol;
    let mut report = CheckReport::new("envelope", if fail { Verdict::Fail } else { Verdict::Pass }, ineq.min);
    report.witness = if ineq_fail { ineq.witness } else { bad };
    let mut report = report
        .with_metric("tested", probes.len() as f64)
        .with_metric("min_scaled_slack", ineq.min)
        .with_metric("probes_on_sum", on_count as f64)
        .with_metric("probes_off_sum", off_count as f64);
    if on_count > 0 {
        report = report.with_metric("max_scaled_equality_residual", eq_worst);
    }
    if off_count > 0 {
        report = report.with_metric("min_scaled_off_slack", off_min);
    }
    if tuple.funcs().iter().any(ConvexFn::prox_is_approximate) {
        report = report.with_note("grid entries use a node-restricted prox");
    }
    Ok(EnvelopeCheck { report, rows })
}

/// ‖Σ prox_{f_i}(s) − s‖ ≤ tol·(1 + ‖s‖) at every probe.
pub fn check_prox_partition(tuple: &SplittingTuple, probes: &[Vector], tol: f64) -> Result<CheckReport> {
    if probes.is_empty() {
        return Err(Error::EmptySample("no probe points".into()));
    }
    let mut t = SlackTracker::new();
    let mut raw: f64 = 0.0;
    for s in probes {
        let mut total = Vector::zeros(s.len());
        for f in tuple.funcs() {
            total += f.prox(s)?;
        }
        let residual = (total - s).norm();
        raw = raw.max(residual);
        let scaled = residual / (1.0 + s.norm());
        t.observe(-scaled, || Witness::Probe { point: s.iter().copied().collect(), residual });
    }
    let mut report = t.into_report("prox_partition", tol).with_metric("max_residual", raw);
    if tuple.funcs().iter().any(ConvexFn::prox_is_approximate) {
        report = report.with_note("grid entries use a node-restricted prox");
    }
    Ok(report)
}

/// Probe directions for the subgradient inequality: ±e_k, ±½e_k, ±2e_k and
/// the two main diagonals.
fn default_offsets(d: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    for k in 0..d {
        for scale in [1.0, -1.0, 0.5, -0.5, 2.0, -2.0] {
            let mut e = Vector::zeros(d);
            e[k] = scale;
            out.push(e);
        }
    }
    if d > 1 {
        out.push(Vector::from_element(d, 1.0));
        out.push(Vector::from_element(d, -1.0));
    }
    out
}

/// Σ_{i≠i0} x_i ∈ ∂f_{i0}(x_{i0}) at every materialized point of Γ. Smooth
/// entries compare gradients; the others test the subgradient inequality at
/// x_{i0} + offset for each offset.
pub fn check_subdiff_identity(
    tuple: &SplittingTuple,
    gamma: &GammaSet,
    sample: Option<&Grid>,
    tol: f64,
    offsets: Option<&[Vector]>,
) -> Result<CheckReport> {
    let cfg = gamma.config();
    if cfg.n != tuple.len() || cfg.d != tuple.dim() {
        return Err(Error::Config("Γ and tuple disagree on N or d".into()));
    }
    let pts = gamma.materialize(sample)?;
    let owned;
    let offsets = match offsets {
        Some(o) => o,
        None => {
            owned = default_offsets(cfg.d);
            &owned
        }
    };
    let mut t = SlackTracker::new();
    let (mut grad_worst, mut sub_min) = (0.0f64, f64::INFINITY);
    for x in &pts {
        let total = sum_map(x);
        for (i, f) in tuple.funcs().iter().enumerate() {
            let xi = x.block(i);
            let target = &total - xi;
            let witness = |slack: f64| Witness::Node { point: x.to_rows(), slack };
            match f.gradient(xi) {
                Some(g) => {
                    let residual = (g? - &target).norm();
                    grad_worst = grad_worst.max(residual);
                    t.observe(-residual, || witness(-residual));
                }
                None => {
                    let fx = f.eval(xi)?;
                    if !fx.is_finite() {
                        t.observe(f64::NEG_INFINITY, || witness(f64::NEG_INFINITY));
                        continue;
                    }
                    for off in offsets {
                        let y = xi + off;
                        let slack = f.eval(&y)? - fx - target.dot(off);
                        sub_min = sub_min.min(slack);
                        t.observe(slack, || witness(slack));
                    }
                }
            }
        }
    }
    let mut report = t.into_report("subdiff_identity", tol).with_metric("points", pts.len() as f64);
    report = report.with_metric("max_gradient_residual", grad_worst);
    if sub_min.is_finite() {
        report = report.with_metric("min_subgradient_slack", sub_min);
    }
    Ok(report)
}

/// With f = (g ⊕ h)^c on the first grid, checks e_{f*} + e_{g*} + e_{h*} = q
/// at the probes within tol (default 3·h, h the largest grid step). e_{f*} is
/// q minus the node-restricted inf-convolution of f with q. Essential
/// smoothness of g and h is not verified.
pub fn three_marginal_smooth_check(
    g: &ConvexFn,
    h: &ConvexFn,
    grids: &[Grid],
    probes: Option<&[Vector]>,
    tol: Option<f64>,
) -> Result<CheckReport> {
    const GRID_CONSTANT: f64 = 3.0;
    if grids.len() != 3 {
        return Err(Error::Config(format!("three grids are needed, got {}", grids.len())));
    }
    let d = g.dim();
    if h.dim() != d || grids.iter().any(|gr| gr.dim() != d) {
        return Err(Error::Config("dimensions of g, h and the grids differ".into()));
    }
    if grids.iter().any(|gr| gr.steps.iter().any(|&s| s < 3)) {
        return Ok(CheckReport::inconclusive("three_marginal_smooth", "grid too coarse: fewer than 3 nodes on an axis")
            .with_note("essential smoothness assumed by caller"));
    }
    let step = grids.iter().map(Grid::max_step).fold(0.0, f64::max);
    let tol = tol.unwrap_or(GRID_CONSTANT * step);
    let sampled = vec![g.sample(&grids[0])?, g.sample(&grids[1])?, h.sample(&grids[2])?];
    let f = conjugate_sampled(&sampled, 0)?;
    let owned: Vec<Vector>;
    let probes = match probes {
        Some(p) => p,
        None => {
            owned = (0..grids[0].len()).filter(|&k| !grids[0].is_boundary(k)).map(|k| grids[0].node(k)).collect();
            &owned
        }
    };
    if probes.is_empty() {
        return Err(Error::EmptySample("no probe points".into()));
    }
    let mut t = SlackTracker::new();
    let mut worst: f64 = 0.0;
    for s in probes {
        let (_, ef) = f.prox_with_value(s)?;
        let q = half_sq(s);
        let total = (q - ef) + g.conjugate_envelope(s)? + h.conjugate_envelope(s)?;
        let residual = (total - q).abs();
        worst = worst.max(residual);
        t.observe(-residual, || Witness::Probe { point: s.iter().copied().collect(), residual });
    }
    Ok(t.into_report("three_marginal_smooth", tol)
        .with_metric("max_residual", worst)
        .with_metric("tol_grid", tol)
        .with_metric("grid_constant", GRID_CONSTANT)
        .with_note("essential smoothness assumed by caller"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{vector, Matrix};
    use crate::space::{MultiPoint, SpaceConfig};

    fn scalar_family() -> SplittingTuple {
        SplittingTuple::new(vec![
            ConvexFn::scaled_q(1, 3.0).unwrap(),
            ConvexFn::scaled_q(1, 3.0).unwrap(),
            ConvexFn::scaled_q(1, 1.0).unwrap(),
        ])
        .unwrap()
    }

    fn scalar_gamma() -> GammaSet {
        let t = |v: f64| Matrix::from_element(1, 1, v);
        GammaSet::linear(SpaceConfig::new(3, 1).unwrap(), vec![t(1.0), t(1.0), t(2.0)]).unwrap()
    }

    fn probes() -> Vec<Vector> {
        (-5..=5).map(|k| vector(&[k as f64 * 0.7])).collect()
    }

    #[test]
    fn scalar_family_partition_and_envelope() {
        let t = scalar_family();
        assert!(check_prox_partition(&t, &probes(), 1e-12).unwrap().passed());
        let e = check_envelope_criterion(&t, &probes(), Some(&scalar_gamma()), 1e-12).unwrap();
        assert!(e.report.passed(), "{:?}", e.report);
        assert_eq!(e.report.metric("probes_on_sum"), Some(11.0));
    }

    #[test]
    fn missing_mass_fails_partition() {
        let zero = ConvexFn::quadratic(Matrix::zeros(1, 1)).unwrap();
        let t = SplittingTuple::new(vec![ConvexFn::scaled_q(1, 1.0).unwrap(), ConvexFn::scaled_q(1, 1.0).unwrap(), zero])
            .unwrap();
        assert!(check_prox_partition(&t, &probes(), 1e-9).unwrap().failed());
    }

    #[test]
    fn oversteep_tuple_is_strict_off_origin() {
        let t = SplittingTuple::new(vec![ConvexFn::scaled_q(1, 3.0).unwrap(); 3]).unwrap();
        let e = check_envelope_criterion(&t, &probes(), None, 1e-12).unwrap();
        assert!(e.report.passed());
        for row in &e.rows {
            if row.s[0] != 0.0 {
                // Σ = 3·q·(1 − 3/4)
                assert!((row.sum - 0.75 * row.q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn subdiff_on_scalar_family() {
        let g = Grid::cube(1, -2.0, 2.0, 5).unwrap();
        let r = check_subdiff_identity(&scalar_family(), &scalar_gamma(), Some(&g), 1e-12, None).unwrap();
        assert!(r.passed(), "{r:?}");
        let off = GammaSet::finite(SpaceConfig::new(3, 1).unwrap(), vec![MultiPoint::scalars(&[1.0, 1.0, 1.0]).unwrap()])
            .unwrap();
        assert!(check_subdiff_identity(&scalar_family(), &off, None, 1e-9, None).unwrap().failed());
    }

    #[test]
    fn smooth_three_marginal_doubled_q() {
        let g = ConvexFn::scaled_q(1, 2.0).unwrap();
        let grid = Grid::cube(1, -3.0, 3.0, 61).unwrap();
        let r = three_marginal_smooth_check(&g, &g, &vec![grid; 3], None, None).unwrap();
        assert!(r.passed(), "{r:?}");
        let coarse = Grid::cube(1, -3.0, 3.0, 2).unwrap();
        let r = three_marginal_smooth_check(&g, &g, &vec![coarse; 3], None, None).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }
}
