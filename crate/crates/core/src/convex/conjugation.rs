//! c-conjugation for the classical cost, the relaxation sweep, and splitting
//! inequality checks on product grids.

use rayon::prelude::*;

use super::{ConvexFn, GridFn, SplittingTuple};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::Vector;
use crate::report::{SlackTracker, Verdict, Witness, DEFAULT_TOL};
use crate::space::{cost_eval, MultiPoint};
use crate::CheckReport;

/// Decodes a flat product index, last factor fastest.
fn decode(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        idx[k] = flat % sizes[k];
        flat /= sizes[k];
    }
    idx
}

fn product_size(sizes: impl IntoIterator<Item = usize>) -> u128 {
    sizes.into_iter().fold(1u128, |acc, s| acc.saturating_mul(s as u128))
}

fn check_grids(tuple: &SplittingTuple, grids: &[Grid]) -> Result<()> {
    if grids.len() != tuple.len() {
        return Err(Error::Config(format!("{} grids given for {} functions", grids.len(), tuple.len())));
    }
    for (i, g) in grids.iter().enumerate() {
        g.validate()?;
        if g.dim() != tuple.dim() {
            return Err(Error::Config(format!("grid {} has dimension {}, expected {}", i + 1, g.dim(), tuple.dim())));
        }
    }
    Ok(())
}

fn sample_all(funcs: &[ConvexFn], grids: &[Grid]) -> Result<Vec<GridFn>> {
    funcs.iter().zip(grids).map(|(f, g)| f.sample(g)).collect()
}

/// x ↦ max over the product of the other grids of c(x₁, …, x_N) − Σ_{i≠i0} f_i(x_i),
/// as a grid function on `grids[i0]`.
pub fn c_conjugate(tuple: &SplittingTuple, i0: usize, grids: &[Grid]) -> Result<GridFn> {
    check_grids(tuple, grids)?;
    if i0 >= tuple.len() {
        return Err(Error::Index { index: i0, len: tuple.len() });
    }
    let sampled = sample_all(tuple.funcs(), grids)?;
    conjugate_sampled(&sampled, i0)
}

/// Same as [`c_conjugate`] on pre-sampled entries; entry `i0` is ignored.
pub(crate) fn conjugate_sampled(sampled: &[GridFn], i0: usize) -> Result<GridFn> {
    let target = sampled[i0].grid().clone();
    if target.is_empty() {
        return Err(Error::Config("empty target grid".into()));
    }
    let others: Vec<&GridFn> = sampled.iter().enumerate().filter(|&(i, _)| i != i0).map(|(_, f)| f).collect();
    let sizes: Vec<usize> = others.iter().map(|f| f.grid().len()).collect();
    let combos = product_size(sizes.iter().copied());
    Grid::guard(combos)?;
    Grid::guard(combos.saturating_mul(target.node_count()) / 100)?;
    let nodes: Vec<Vec<Vector>> = others.iter().map(|f| f.grid().nodes()).collect();

    // c − Σ f splits into ⟨x_{i0}, Σ others⟩ plus a part free of x_{i0}.
    let table: Vec<(Vector, f64)> = (0..combos as usize)
        .filter_map(|flat| {
            let idx = decode(flat, &sizes);
            let mut penalty = 0.0;
            for (k, &j) in idx.iter().enumerate() {
                penalty += others[k].values()[j];
            }
            if !penalty.is_finite() {
                return None;
            }
            let pts: Vec<&Vector> = idx.iter().enumerate().map(|(k, &j)| &nodes[k][j]).collect();
            let mut pair = 0.0;
            for a in 0..pts.len() {
                for b in (a + 1)..pts.len() {
                    pair += pts[a].dot(pts[b]);
                }
            }
            let sum = pts.iter().fold(Vector::zeros(target.dim()), |acc, p| acc + *p);
            Some((sum, pair - penalty))
        })
        .collect();

    let values: Vec<f64> = (0..target.len())
        .into_par_iter()
        .map(|k| {
            let x = target.node(k);
            let best = table.iter().map(|(s, base)| x.dot(s) + base).fold(f64::NEG_INFINITY, f64::max);
            if best.is_finite() {
                best
            } else {
                f64::INFINITY
            }
        })
        .collect();
    GridFn::new(target, values)
}

/// Output of [`relax_to_c_conjugate`].
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub tuple: SplittingTuple,
    /// Max per-node change of each pass, over all nodes.
    pub pass_changes: Vec<f64>,
    /// Max per-node change of each pass, over interior nodes only.
    pub interior_changes: Vec<f64>,
    pub last_pass_change: f64,
}

fn max_change(old: &GridFn, new: &GridFn, interior_only: bool) -> f64 {
    let g = old.grid();
    let mut worst: f64 = 0.0;
    for (k, (a, b)) in old.values().iter().zip(new.values()).enumerate() {
        if interior_only && g.is_boundary(k) {
            continue;
        }
        let d = match (a.is_finite(), b.is_finite()) {
            (true, true) => (a - b).abs(),
            (false, false) => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(d);
    }
    worst
}

/// Repeated sweep f_{i0} := (⊕_{i≠i0} f_i)^c for i0 = 1, …, N, each update
/// using the newest entries. Requires c ≤ ⊕f_i on the product grid.
pub fn relax_to_c_conjugate(tuple: &SplittingTuple, grids: &[Grid], passes: usize) -> Result<Relaxation> {
    check_grids(tuple, grids)?;
    if passes == 0 {
        return Err(Error::Config("at least one pass is required".into()));
    }
    let pre = check_splitting_inequality(tuple, &SplittingDomain::Grids(grids.to_vec()), &[], DEFAULT_TOL)?;
    if pre.failed() {
        let at = match &pre.witness {
            Some(Witness::Node { point, slack }) => format!(" at {point:?} (slack {slack:e})"),
            _ => String::new(),
        };
        return Err(Error::Precondition(format!("c exceeds the separable sum{at}")));
    }
    let mut current = sample_all(tuple.funcs(), grids)?;
    let mut pass_changes = Vec::with_capacity(passes);
    let mut interior_changes = Vec::with_capacity(passes);
    for _ in 0..passes {
        let (mut all, mut inner) = (0.0f64, 0.0f64);
        for i0 in 0..current.len() {
            let next = conjugate_sampled(&current, i0)?;
            all = all.max(max_change(&current[i0], &next, false));
            inner = inner.max(max_change(&current[i0], &next, true));
            current[i0] = next;
        }
        pass_changes.push(all);
        interior_changes.push(inner);
    }
    let last_pass_change = *pass_changes.last().unwrap();
    let tuple = SplittingTuple::new(current.into_iter().map(ConvexFn::Grid).collect())?;
    Ok(Relaxation { tuple, pass_changes, interior_changes, last_pass_change })
}

/// Where to test c ≤ ⊕f_i.
#[derive(Debug, Clone, PartialEq)]
pub enum SplittingDomain {
    /// The product of one grid per marginal.
    Grids(Vec<Grid>),
    Points(Vec<MultiPoint>),
}

impl SplittingDomain {
    pub fn len(&self) -> u128 {
        match self {
            SplittingDomain::Grids(g) => product_size(g.iter().map(Grid::len)),
            SplittingDomain::Points(p) => p.len() as u128,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The k-th point, product order with the last marginal fastest.
    pub fn point(&self, k: usize) -> MultiPoint {
        match self {
            SplittingDomain::Grids(grids) => {
                let sizes: Vec<usize> = grids.iter().map(Grid::len).collect();
                let idx = decode(k, &sizes);
                MultiPoint::new(idx.iter().zip(grids).map(|(&j, g)| g.node(j)).collect()).expect("grids share d")
            }
            SplittingDomain::Points(p) => p[k].clone(),
        }
    }

    pub fn points(&self) -> Result<Vec<MultiPoint>> {
        Grid::guard(self.len())?;
        Ok((0..self.len() as usize).map(|k| self.point(k)).collect())
    }
}

/// ⊕f_i(x) − c(x); +∞ outside the domain of some f_i.
pub fn splitting_slack(tuple: &SplittingTuple, x: &MultiPoint) -> Result<f64> {
    if x.blocks().len() != tuple.len() {
        return Err(Error::Config(format!("point has {} blocks, tuple has {}", x.blocks().len(), tuple.len())));
    }
    let mut sum = 0.0;
    for (f, b) in tuple.funcs().iter().zip(x.blocks()) {
        sum += f.eval(b)?;
    }
    if sum.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(sum - cost_eval(x))
}

/// ⊕f_i − c at every point of the domain, in domain order.
pub fn splitting_slacks(tuple: &SplittingTuple, domain: &SplittingDomain) -> Result<Vec<f64>> {
    let n = domain.len();
    Grid::guard(n)?;
    match domain {
        SplittingDomain::Grids(grids) => {
            check_grids(tuple, grids)?;
            let sampled = sample_all(tuple.funcs(), grids)?;
            let sizes: Vec<usize> = grids.iter().map(Grid::len).collect();
            let nodes: Vec<Vec<Vector>> = grids.iter().map(Grid::nodes).collect();
            Ok((0..n as usize)
                .into_par_iter()
                .map(|k| {
                    let idx = decode(k, &sizes);
                    let sum: f64 = idx.iter().enumerate().map(|(i, &j)| sampled[i].values()[j]).sum();
                    if sum.is_infinite() {
                        return f64::INFINITY;
                    }
                    let mut c = 0.0;
                    for a in 0..idx.len() {
                        for b in (a + 1)..idx.len() {
                            c += nodes[a][idx[a]].dot(&nodes[b][idx[b]]);
                        }
                    }
                    sum - c
                })
                .collect())
        }
        SplittingDomain::Points(points) => points.par_iter().map(|x| splitting_slack(tuple, x)).collect(),
    }
}

/// c ≤ ⊕f_i + tol over `domain`, and |⊕f_i − c| ≤ tol on `gamma_points`.
pub fn check_splitting_inequality(
    tuple: &SplittingTuple,
    domain: &SplittingDomain,
    gamma_points: &[MultiPoint],
    tol: f64,
) -> Result<CheckReport> {
    let slacks = splitting_slacks(tuple, domain)?;
    let mut off = SlackTracker::new();
    for (k, &s) in slacks.iter().enumerate() {
        off.observe(s, || Witness::Node { point: domain.point(k).to_rows(), slack: s });
    }
    let on_slacks = splitting_slacks(tuple, &SplittingDomain::Points(gamma_points.to_vec()))?;
    let mut on_worst = 0.0f64;
    let mut on_witness = None;
    for (x, &s) in gamma_points.iter().zip(&on_slacks) {
        // NaN-aware: a non-number counts as the worst residual
        if !(s.abs() <= on_worst) {
            on_worst = if s.is_nan() { f64::INFINITY } else { s.abs() };
            on_witness = Some(Witness::Node { point: x.to_rows(), slack: s });
        }
    }
    let ineq_fail = off.violated(tol);
    let eq_fail = on_worst > tol;
    let tested = off.count;
    let min_off = off.min;
    let margin = if gamma_points.is_empty() { min_off } else { min_off.min(-on_worst) };
    let mut report =
        CheckReport::new("splitting", if ineq_fail || eq_fail { Verdict::Fail } else { Verdict::Pass }, margin);
    report.witness = if ineq_fail {
        off.witness
    } else if eq_fail {
        on_witness
    } else {
        None
    };
    Ok(report
        .with_metric("tested", tested as f64)
        .with_metric("min_slack", min_off)
        .with_metric("gamma_points", gamma_points.len() as f64)
        .with_metric("max_abs_slack_on_gamma", if gamma_points.is_empty() { f64::NAN } else { on_worst }))
}

/// Nodes of the product grid where |⊕f_i − c| ≤ tol.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub points: Vec<MultiPoint>,
    pub tol: f64,
    /// Lipschitz scale used for the default tolerance.
    pub lipschitz: f64,
}

/// Default tolerance is 5·h·L with h the largest grid step and L the largest
/// gradient bound of the entries over their grid boxes.
pub fn splitting_set_extract(
    tuple: &SplittingTuple,
    grids: &[Grid],
    tol: Option<f64>,
    lipschitz: Option<f64>,
) -> Result<Extraction> {
    check_grids(tuple, grids)?;
    let lipschitz = match lipschitz {
        Some(l) => l,
        None => {
            let mut l: f64 = 0.0;
            for (f, g) in tuple.funcs().iter().zip(grids) {
                l = l.max(f.lipschitz_on(g)?);
            }
            l
        }
    };
    let h = grids.iter().map(Grid::max_step).fold(0.0, f64::max);
    let tol = tol.unwrap_or(5.0 * h * lipschitz);
    let domain = SplittingDomain::Grids(grids.to_vec());
    let slacks = splitting_slacks(tuple, &domain)?;
    if let Some((k, s)) = slacks.iter().enumerate().find(|&(_, &s)| s.is_nan() || s < -tol) {
        return Err(Error::Precondition(format!(
            "c exceeds the separable sum at {:?} (slack {s:e})",
            domain.point(k).to_rows()
        )));
    }
    let points = slacks.iter().enumerate().filter(|&(_, &s)| s <= tol).map(|(k, _)| domain.point(k)).collect();
    Ok(Extraction { points, tol, lipschitz })
}
