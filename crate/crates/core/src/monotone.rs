//! c-monotonicity, cyclic monotonicity, resolvents and maximality.
//!
//! Every check works on a materialized point list. Finite sets are used
//! as-is; linear parameterizations are evaluated on a caller-supplied
//! parameter grid. Slacks are absolute: a check passes when every tested
//! inequality holds up to `tol`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gamma::{GammaBody, GammaSet, IndexSubset};
use crate::grid::Grid;
use crate::linalg::{is_invertible, min_sym_eigenvalue, singular_range, Matrix, Vector};
use crate::report::{CheckReport, Mode, SlackTracker, Verdict, Witness};
use crate::space::{sum_map, MultiPoint};

/// Default number of inequalities an exhaustive cyclic sweep may evaluate.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
/// Default seed for randomized sweeps.
pub const DEFAULT_SEED: u64 = 2019;
/// Two sums S(x) closer than this are treated as the same resolvent input.
pub const SUM_COINCIDENCE: f64 = 1e-12;

/// A sampled graph {(u, v)} of a set-valued map on H.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPairs {
    pub pairs: Vec<(Vector, Vector)>,
    pub label: String,
}

impl GraphPairs {
    pub fn new(label: impl Into<String>, pairs: Vec<(Vector, Vector)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySample("graph has no pairs".into()));
        }
        let d = pairs[0].0.len();
        if pairs.iter().any(|(u, v)| u.len() != d || v.len() != d) {
            return Err(Error::Config("graph pairs must share one dimension".into()));
        }
        Ok(Self { pairs, label: label.into() })
    }

    /// Samples of a linear map: pairs (x, A x).
    pub fn of_linear_map(label: impl Into<String>, a: &Matrix, inputs: &[Vector]) -> Result<Self> {
        Self::new(label, inputs.iter().map(|x| (x.clone(), a * x)).collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// gra A_K = {(Σ_{i∈K} x_i, Σ_{i∉K} x_i) | x ∈ Γ}.
pub fn extract_ak_graph(gamma: &GammaSet, k: &IndexSubset, sample: Option<&Grid>) -> Result<GraphPairs> {
    let n = gamma.config().n;
    let members = k.members().to_vec();
    if members.iter().any(|&i| i >= n) || members.len() >= n {
        return Err(Error::Subset(format!("K = {:?} is not a proper subset of {n} marginals", k.labels())));
    }
    let rest = k.complement();
    let pts = gamma.materialize(sample)?;
    GraphPairs::new(
        format!("A_{:?}", k.labels()),
        pts.iter()
            .map(|p| (p.partial_sum(members.iter().copied()), p.partial_sum(rest.iter().copied())))
            .collect(),
    )
}

/// pass iff ⟨u − u′, v − v′⟩ ≥ −tol over all unordered pairs.
pub fn check_graph_monotone(g: &GraphPairs, tol: f64) -> CheckReport {
    let mut t = SlackTracker::new();
    for a in 0..g.pairs.len() {
        for b in (a + 1)..g.pairs.len() {
            let (u, v) = &g.pairs[a];
            let (u2, v2) = &g.pairs[b];
            let value = (u - u2).dot(&(v - v2));
            t.observe(value, || Witness::GraphPair { first: a, second: b, value });
        }
    }
    t.into_report("graph_monotone", tol).with_note(format!("graph {}", g.label))
}

/// ‖Tx − Ty‖² + ‖(x − Tx) − (y − Ty)‖² ≤ ‖x − y‖² on pairs (x, Tx).
pub fn check_firmly_nonexpansive(samples: &GraphPairs, tol: f64) -> CheckReport {
    let mut t = SlackTracker::new();
    for a in 0..samples.pairs.len() {
        for b in (a + 1)..samples.pairs.len() {
            let slack = fne_slack(&samples.pairs[a], &samples.pairs[b]);
            t.observe(slack, || Witness::GraphPair { first: a, second: b, value: slack });
        }
    }
    t.into_report("firmly_nonexpansive", tol)
        .with_note(format!("samples {}", samples.label))
}

pub(crate) fn fne_slack((x, tx): &(Vector, Vector), (y, ty): &(Vector, Vector)) -> f64 {
    let dx = x - y;
    let dt = tx - ty;
    let dr = &dx - &dt;
    dx.norm_squared() - dt.norm_squared() - dr.norm_squared()
}

/// ⟨Σ_K z, Σ_{I∖K} z⟩ for z = x − y, over all point pairs and every proper K
/// containing the first marginal. This is the n = 2 cyclic condition.
pub fn check_pairwise_c_monotone(gamma: &GammaSet, sample: Option<&Grid>, tol: f64) -> Result<CheckReport> {
    let pts = gamma.materialize(sample)?;
    Ok(pairwise_on_points(gamma, &pts, tol))
}

fn pairwise_on_points(gamma: &GammaSet, pts: &[MultiPoint], tol: f64) -> CheckReport {
    let n = gamma.config().n;
    let subsets = IndexSubset::proper_containing_first(n);
    let complements: Vec<Vec<usize>> = subsets.iter().map(IndexSubset::complement).collect();
    let mut t = SlackTracker::new();
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            let z = pts[a].sub(&pts[b]).expect("points share a config");
            for (k, rest) in subsets.iter().zip(&complements) {
                let value = z
                    .partial_sum(k.members().iter().copied())
                    .dot(&z.partial_sum(rest.iter().copied()));
                t.observe(value, || Witness::PointPair { first: a, second: b, subset: k.labels(), value });
            }
        }
    }
    let mut report = t.into_report("pairwise_c_monotone", tol);
    report.metrics.insert("points".into(), pts.len() as f64);
    if let GammaBody::Linear(ts) = gamma.body() {
        // Exact test for linear sets: ⟨T_K z, T_{I∖K} z⟩ ≥ 0 for all z iff the
        // symmetric part of T_Kᵀ T_{I∖K} is positive semidefinite.
        let lam = subsets
            .iter()
            .zip(&complements)
            .map(|(k, rest)| {
                let tk = sum_of(ts, k.members());
                let tr = sum_of(ts, rest);
                min_sym_eigenvalue(&(tk.transpose() * tr))
            })
            .fold(f64::INFINITY, f64::min);
        report.metrics.insert("min_form_eigenvalue".into(), lam);
        if report.passed() && lam < -tol {
            report
                .notes
                .push("the parameter sample missed a violating direction; refine the grid".into());
        }
    }
    report
}

fn sum_of(ts: &[Matrix], idx: &[usize]) -> Matrix {
    let d = ts[0].nrows();
    idx.iter().fold(Matrix::zeros(d, d), |acc, &i| acc + &ts[i])
}

/// Options for the n-c-cyclic sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclicOptions {
    pub order: usize,
    pub tol: f64,
    pub budget: u64,
    pub seed: u64,
}

impl Default for CyclicOptions {
    fn default() -> Self {
        Self { order: 2, tol: crate::report::DEFAULT_TOL, budget: DEFAULT_BUDGET, seed: DEFAULT_SEED }
    }
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Pairwise inner products ⟨x_a^p, x_b^q⟩ for marginals a < b.
struct Gram {
    m: usize,
    n: usize,
    table: Vec<f64>,
}

impl Gram {
    fn new(pts: &[MultiPoint]) -> Self {
        let m = pts.len();
        let n = pts[0].blocks().len();
        let mut table = vec![0.0; n * n * m * m];
        for a in 0..n {
            for b in (a + 1)..n {
                for p in 0..m {
                    for q in 0..m {
                        table[((a * n + b) * m + p) * m + q] = pts[p].block(a).dot(pts[q].block(b));
                    }
                }
            }
        }
        Self { m, n, table }
    }

    #[inline]
    fn get(&self, a: usize, b: usize, p: usize, q: usize) -> f64 {
        self.table[((a * self.n + b) * self.m + p) * self.m + q]
    }

    /// Σ_j c(x_1^{t[σ_1(j)]}, …, x_N^{t[σ_N(j)]}).
    fn permuted_cost(&self, tuple: &[usize], sigmas: &[&[usize]]) -> f64 {
        let mut total = 0.0;
        for j in 0..tuple.len() {
            for a in 0..self.n {
                for b in (a + 1)..self.n {
                    total += self.get(a, b, tuple[sigmas[a][j]], tuple[sigmas[b][j]]);
                }
            }
        }
        total
    }

    fn identity_cost(&self, tuple: &[usize]) -> f64 {
        let mut total = 0.0;
        for &p in tuple {
            for a in 0..self.n {
                for b in (a + 1)..self.n {
                    total += self.get(a, b, p, p);
                }
            }
        }
        total
    }
}

/// Number of inequalities an exhaustive sweep with σ₁ = id evaluates.
pub fn cyclic_workload(points: usize, order: usize, marginals: usize) -> u128 {
    let fact: u128 = (1..=order as u128).product();
    (points as u128)
        .checked_pow(order as u32)
        .and_then(|t| fact.checked_pow(marginals as u32 - 1).and_then(|f| t.checked_mul(f)))
        .unwrap_or(u128::MAX)
}

/// n-c-cyclic monotonicity: for every n-tuple from Γ (with repetition) and
/// every permutation tuple with σ₁ = id,
/// Σ_j c(x_1^{σ₁(j)}, …, x_N^{σ_N(j)}) ≤ Σ_j c(x^j).
/// Runs exhaustively when the workload fits the budget; otherwise samples
/// `budget` random inequalities and can only fail or be inconclusive.
pub fn check_n_c_cyclic(gamma: &GammaSet, sample: Option<&Grid>, opts: &CyclicOptions) -> Result<CheckReport> {
    if opts.budget == 0 {
        return Err(Error::Budget);
    }
    if opts.order < 2 {
        return Err(Error::Config("cyclic order must be at least 2".into()));
    }
    let pts = gamma.materialize(sample)?;
    if pts.is_empty() {
        return Err(Error::EmptySample("no points to test".into()));
    }
    Ok(cyclic_on_points(&pts, opts))
}

fn cyclic_on_points(pts: &[MultiPoint], opts: &CyclicOptions) -> CheckReport {
    let n_marg = pts[0].blocks().len();
    let m = pts.len();
    let order = opts.order;
    let perms = permutations(order);
    let gram = Gram::new(pts);
    let workload = cyclic_workload(m, order, n_marg);
    let check = format!("c_cyclic_{order}");

    if workload <= opts.budget as u128 {
        let per_tuple = perms.len().pow(n_marg as u32 - 1);
        let tuples = m.pow(order as u32);
        // (slack, flat index) minimized with ties broken by the lower index,
        // so the witness does not depend on the thread schedule.
        let best = (0..tuples)
            .into_par_iter()
            .map(|ti| {
                let tuple = decode(ti, m, order);
                let base = gram.identity_cost(&tuple);
                let mut local = (f64::INFINITY, usize::MAX);
                for pi in 0..per_tuple {
                    let sig = decode(pi, perms.len(), n_marg - 1);
                    let sigmas: Vec<&[usize]> = std::iter::once(perms[0].as_slice())
                        .chain(sig.iter().map(|&s| perms[s].as_slice()))
                        .collect();
                    let slack = base - gram.permuted_cost(&tuple, &sigmas);
                    if slack < local.0 {
                        local = (slack, ti * per_tuple + pi);
                    }
                }
                local
            })
            .reduce(|| (f64::INFINITY, usize::MAX), pick_min);
        let fail = best.0 < -opts.tol;
        let mut r = CheckReport::new(check, if fail { Verdict::Fail } else { Verdict::Pass }, best.0);
        r.mode = Some(Mode::Exhaustive);
        r.metrics.insert("tested".into(), (tuples * per_tuple) as f64);
        if fail {
            let (ti, pi) = (best.1 / per_tuple, best.1 % per_tuple);
            let sig = decode(pi, perms.len(), n_marg - 1);
            r.witness = Some(Witness::Cycle {
                points: decode(ti, m, order),
                permutations: std::iter::once(perms[0].clone())
                    .chain(sig.iter().map(|&s| perms[s].clone()))
                    .collect(),
                slack: best.0,
            });
        }
        r
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut t = SlackTracker::new();
        let identity: Vec<usize> = (0..order).collect();
        for _ in 0..opts.budget {
            let tuple: Vec<usize> = (0..order).map(|_| rng.gen_range(0..m)).collect();
            let mut owned: Vec<Vec<usize>> = vec![identity.clone()];
            for _ in 1..n_marg {
                let mut p = identity.clone();
                p.shuffle(&mut rng);
                owned.push(p);
            }
            let sigmas: Vec<&[usize]> = owned.iter().map(Vec::as_slice).collect();
            let slack = gram.identity_cost(&tuple) - gram.permuted_cost(&tuple, &sigmas);
            t.observe(slack, || Witness::Cycle { points: tuple.clone(), permutations: owned.clone(), slack });
        }
        let mut r = t.into_report(&check, opts.tol);
        if r.verdict == Verdict::Pass {
            r.verdict = Verdict::Inconclusive;
            r.notes.push("randomized sweep found no violation".into());
        }
        r.mode = Some(Mode::Randomized);
        r.seed = Some(opts.seed);
        r.metrics.insert("workload".into(), workload as f64);
        r
    }
}

fn pick_min(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Mixed-radix digits of `flat`, most significant first.
fn decode(mut flat: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = flat % radix;
        flat /= radix;
    }
    out
}

/// Sampled graph of J_{A_i}: pairs (S(x), x_i). Fails when two points share
/// S(x) but differ in block i, which rules out c-monotonicity.
pub fn resolvent_samples(gamma: &GammaSet, i: usize, sample: Option<&Grid>, tol: f64) -> Result<GraphPairs> {
    gamma.config().check_index(i)?;
    let pts = gamma.materialize(sample)?;
    resolvent_on_points(&pts, i, tol)
}

fn resolvent_on_points(pts: &[MultiPoint], i: usize, tol: f64) -> Result<GraphPairs> {
    let sums: Vec<Vector> = pts.iter().map(sum_map).collect();
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            if (&sums[a] - &sums[b]).norm() <= SUM_COINCIDENCE
                && (pts[a].block(i) - pts[b].block(i)).norm() > tol
            {
                return Err(Error::IllDefinedResolvent { index: i + 1, first: a, second: b });
            }
        }
    }
    GraphPairs::new(
        format!("J_A{}", i + 1),
        sums.into_iter().zip(pts).map(|(s, p)| (s, p.block(i).clone())).collect(),
    )
}

/// Σ_i J_{A_i}(s) = s on the samples, and every partial sum
/// J_{A_K} = Σ_{i∈K} J_{A_i} firmly nonexpansive.
pub fn check_partition_identity(gamma: &GammaSet, sample: Option<&Grid>, tol: f64) -> Result<CheckReport> {
    let pts = gamma.materialize(sample)?;
    let n = gamma.config().n;
    let resolvents = (0..n).map(|i| resolvent_on_points(&pts, i, tol)).collect::<Result<Vec<_>>>()?;

    let mut partition_residual: f64 = 0.0;
    let mut worst_probe = None;
    for (k, p) in pts.iter().enumerate() {
        let s = &resolvents[0].pairs[k].0;
        let total = resolvents.iter().fold(Vector::zeros(s.len()), |acc, r| acc + &r.pairs[k].1);
        let res = (&total - s).norm() / (1.0 + s.norm());
        if res > partition_residual {
            partition_residual = res;
            worst_probe = Some((s.clone(), res));
        }
        debug_assert_eq!(p.blocks().len(), n);
    }

    let mut t = SlackTracker::new();
    for k in IndexSubset::proper_containing_first(n) {
        let samples: Vec<(Vector, Vector)> = pts
            .iter()
            .map(|p| (sum_map(p), p.partial_sum(k.members().iter().copied())))
            .collect();
        for a in 0..samples.len() {
            for b in (a + 1)..samples.len() {
                let slack = fne_slack(&samples[a], &samples[b]);
                t.observe(slack, || Witness::PointPair { first: a, second: b, subset: k.labels(), value: slack });
            }
        }
    }
    let mut r = t.into_report("partition_identity", tol);
    r.metrics.insert("partition_residual".into(), partition_residual);
    if partition_residual > tol {
        r.verdict = Verdict::Fail;
        if let Some((s, residual)) = worst_probe {
            r.witness = Some(Witness::Probe { point: s.iter().copied().collect(), residual });
        }
    }
    Ok(r)
}

/// Outcome of the sum-map surjectivity test, with preimages of the targets.
#[derive(Debug, Clone)]
pub struct Surjectivity {
    pub report: CheckReport,
    pub preimages: Vec<MultiPoint>,
}

/// S(Γ) = H. For a linear Γ this holds iff T = Σ T_i is invertible, decided
/// by σ_min(T) > tol·σ_max(T). Finite sets are never surjective onto H and
/// only get coverage statistics.
pub fn check_sum_surjective(gamma: &GammaSet, targets: &[Vector], tol: f64) -> Result<Surjectivity> {
    let cfg = gamma.config();
    if let Some(bad) = targets.iter().find(|s| s.len() != cfg.d) {
        return Err(Error::Config(format!("target has dimension {}, expected {}", bad.len(), cfg.d)));
    }
    match gamma.body() {
        GammaBody::Finite(pts) => {
            let sums: Vec<Vector> = pts.iter().map(sum_map).collect();
            let hit = targets
                .iter()
                .filter(|s| sums.iter().any(|x| (x - *s).norm() <= tol * (1.0 + s.norm())))
                .count();
            let report = CheckReport::inconclusive("sum_surjective", "a finite set cannot cover H")
                .with_metric("distinct_sums", distinct_count(&sums) as f64)
                .with_metric("targets_hit", hit as f64)
                .with_metric("targets", targets.len() as f64);
            Ok(Surjectivity { report, preimages: Vec::new() })
        }
        GammaBody::Linear(_) => {
            let t = gamma.sum_matrix().expect("linear body");
            let (lo, hi) = singular_range(&t);
            let invertible = is_invertible(&t, tol);
            let verdict = if invertible { Verdict::Pass } else { Verdict::Fail };
            let mut report = CheckReport::new("sum_surjective", verdict, lo - tol * hi)
                .with_metric("sigma_min", lo)
                .with_metric("sigma_max", hi);
            let mut preimages = Vec::new();
            if invertible {
                let lu = t.clone().lu();
                for s in targets {
                    let v = lu.solve(s).ok_or_else(|| Error::Domain("singular sum matrix".into()))?;
                    preimages.push(gamma.point_at(&v)?);
                }
            } else {
                report.notes.push("Σ T_i is singular".into());
            }
            Ok(Surjectivity { report, preimages })
        }
    }
}

fn distinct_count(v: &[Vector]) -> usize {
    let mut kept: Vec<&Vector> = Vec::new();
    for x in v {
        if !kept.iter().any(|y| (x - *y).norm() <= SUM_COINCIDENCE) {
            kept.push(x);
        }
    }
    kept.len()
}

/// Maximality classifier. Requires c-monotonicity on the materialized sample.
/// A linear Γ is certified maximal when S(Γ) = H, or when some T_i is
/// invertible so that Γ is the graph of a continuous (linear) map over the
/// i-th marginal. Finite data never certifies maximality.
pub fn classify_maximality(gamma: &GammaSet, sample: Option<&Grid>, tol: f64) -> Result<CheckReport> {
    let mono = check_pairwise_c_monotone(gamma, sample, tol)?;
    if mono.failed() {
        let mut r = CheckReport::new("maximality", Verdict::Fail, mono.margin)
            .with_note("Γ is not c-monotone on the sample");
        r.witness = mono.witness;
        return Ok(r);
    }
    match gamma.body() {
        GammaBody::Finite(_) => Ok(CheckReport::inconclusive(
            "maximality",
            "maximality cannot be decided from finitely many points",
        )),
        GammaBody::Linear(ts) => {
            let mut routes = Vec::new();
            let t = gamma.sum_matrix().expect("linear body");
            if is_invertible(&t, tol) {
                routes.push("sum map S(Γ) = H".to_string());
            }
            if let Some(i) = ts.iter().position(|ti| is_invertible(ti, tol)) {
                routes.push(format!("continuous graph over marginal {}", i + 1));
            }
            if routes.is_empty() {
                return Ok(CheckReport::inconclusive(
                    "maximality",
                    "neither S(Γ) = H nor a continuous graph structure could be certified",
                ));
            }
            let mut r = CheckReport::new("maximality", Verdict::Pass, mono.margin);
            r.notes = routes.into_iter().map(|s| format!("certified by: {s}")).collect();
            Ok(r)
        }
    }
}

/// Per-pair monotonicity of the two-marginal projections Γ_{i,j}.
#[derive(Debug, Clone)]
pub struct ProjectionReport {
    pub report: CheckReport,
    /// ((i, j) 1-based, verdict of Γ_{i,j}).
    pub pairs: Vec<((usize, usize), CheckReport)>,
    pub c_monotone: CheckReport,
}

/// Monotonicity of every Γ_{i,j}. If all of them are monotone then Γ must be
/// c-monotone; a disagreement is reported as an error.
pub fn check_two_marginal_projections(
    gamma: &GammaSet,
    sample: Option<&Grid>,
    tol: f64,
) -> Result<ProjectionReport> {
    let pts = gamma.materialize(sample)?;
    let n = gamma.config().n;
    let mut pairs = Vec::new();
    let mut t = SlackTracker::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let g = GraphPairs::new(
                format!("Gamma_{},{}", i + 1, j + 1),
                pts.iter().map(|p| (p.block(i).clone(), p.block(j).clone())).collect(),
            )?;
            let r = check_graph_monotone(&g, tol);
            let value = r.margin;
            let (first, second) = match r.witness {
                Some(Witness::GraphPair { first, second, .. }) => (first, second),
                _ => (0, 0),
            };
            t.observe(value, || Witness::Projection { marginals: [i + 1, j + 1], first, second, value });
            pairs.push(((i + 1, j + 1), r));
        }
    }
    let c_monotone = pairwise_on_points(gamma, &pts, tol);
    let mut report = t.into_report("two_marginal_projections", tol);
    let monotone_pairs = pairs.iter().filter(|(_, r)| r.passed()).count();
    report.metrics.insert("monotone_pairs".into(), monotone_pairs as f64);
    report.metrics.insert("pairs".into(), pairs.len() as f64);
    if report.passed() && c_monotone.failed() {
        return Err(Error::Consistency(
            "all two-marginal projections are monotone but Γ is not c-monotone".into(),
        ));
    }
    Ok(ProjectionReport { report, pairs, c_monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rotation, vector};
    use crate::space::SpaceConfig;
    use std::f64::consts::PI;

    fn scalar_pairs(p: &[(f64, f64)]) -> GraphPairs {
        GraphPairs::new("t", p.iter().map(|&(u, v)| (vector(&[u]), vector(&[v]))).collect()).unwrap()
    }

    fn diagonal(n: usize, vs: &[f64]) -> GammaSet {
        let pts = vs.iter().map(|&v| MultiPoint::scalars(&vec![v; n]).unwrap()).collect();
        GammaSet::finite(SpaceConfig::new(n, 1).unwrap(), pts).unwrap()
    }

    #[test]
    fn graph_monotone_examples() {
        let r = check_graph_monotone(&scalar_pairs(&[(0.0, 0.0), (1.0, 1.0)]), 1e-9);
        assert!(r.passed());
        assert_eq!(r.margin, 1.0);

        let r = check_graph_monotone(&scalar_pairs(&[(0.0, 0.0), (1.0, -1.0)]), 1e-9);
        assert!(r.failed());
        assert_eq!(r.witness, Some(Witness::GraphPair { first: 0, second: 1, value: -1.0 }));
    }

    #[test]
    fn rotated_partial_sum_not_monotone() {
        let a = rotation(-2.0 * PI / 3.0);
        let g = GraphPairs::of_linear_map("A_12", &a, &[vector(&[1.0, 0.0]), vector(&[0.0, 0.0])]).unwrap();
        let r = check_graph_monotone(&g, 1e-9);
        assert!(r.failed());
        assert!((r.margin + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ak_graph_of_point() {
        let g = GammaSet::finite(
            SpaceConfig::new(3, 1).unwrap(),
            vec![MultiPoint::scalars(&[1.0, 2.0, 3.0]).unwrap()],
        )
        .unwrap();
        let k = IndexSubset::new(3, [0]).unwrap();
        let pairs = extract_ak_graph(&g, &k, None).unwrap();
        assert_eq!(pairs.pairs, vec![(vector(&[1.0]), vector(&[5.0]))]);

        let d = diagonal(2, &[1.5]);
        let k = IndexSubset::new(2, [0]).unwrap();
        assert_eq!(extract_ak_graph(&d, &k, None).unwrap().pairs, vec![(vector(&[1.5]), vector(&[1.5]))]);
    }

    #[test]
    fn diagonal_is_c_monotone_and_resolvents_are_scaled_identity() {
        let d = diagonal(3, &[-1.0, 0.5, 2.0, 3.0]);
        assert!(check_pairwise_c_monotone(&d, None, 1e-9).unwrap().passed());
        let j = resolvent_samples(&d, 1, None, 1e-9).unwrap();
        for (s, x) in &j.pairs {
            assert!((s[0] / 3.0 - x[0]).abs() < 1e-15);
        }
        assert!(check_partition_identity(&d, None, 1e-9).unwrap().passed());
        let pr = check_two_marginal_projections(&d, None, 1e-9).unwrap();
        assert!(pr.report.passed());
    }

    #[test]
    fn clash_in_resolvent() {
        let g = GammaSet::finite(
            SpaceConfig::new(2, 1).unwrap(),
            vec![MultiPoint::scalars(&[0.0, 0.0]).unwrap(), MultiPoint::scalars(&[0.7, -0.7]).unwrap()],
        )
        .unwrap();
        assert_eq!(
            resolvent_samples(&g, 0, None, 1e-9),
            Err(Error::IllDefinedResolvent { index: 1, first: 0, second: 1 })
        );
        assert!(check_partition_identity(&g, None, 1e-9).is_err());
    }

    #[test]
    fn firmly_nonexpansive_examples() {
        let inputs = [vector(&[1.0, 0.0]), vector(&[0.0, 0.0])];
        let id = GraphPairs::of_linear_map("id", &Matrix::identity(2, 2), &inputs).unwrap();
        let r = check_firmly_nonexpansive(&id, 1e-12);
        assert!(r.passed());
        assert_eq!(r.margin, 0.0);

        let half = GraphPairs::of_linear_map("half", &(rotation(PI / 3.0) * 0.5), &inputs).unwrap();
        assert!(check_firmly_nonexpansive(&half, 1e-9).passed());

        let full = GraphPairs::of_linear_map("full", &rotation(PI / 3.0), &inputs).unwrap();
        let r = check_firmly_nonexpansive(&full, 1e-9);
        assert!(r.failed());
        assert!((r.margin + 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_cyclic_is_equality() {
        let g = diagonal(3, &[2.0]);
        for order in 2..5 {
            let r = check_n_c_cyclic(&g, None, &CyclicOptions { order, ..Default::default() }).unwrap();
            assert!(r.passed());
            assert_eq!(r.margin, 0.0);
        }
    }

    #[test]
    fn zero_budget_rejected() {
        let g = diagonal(2, &[1.0]);
        assert_eq!(
            check_n_c_cyclic(&g, None, &CyclicOptions { budget: 0, ..Default::default() }),
            Err(Error::Budget)
        );
    }

    #[test]
    fn permutation_listing() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn surjectivity_of_singular_sum() {
        let cfg = SpaceConfig::new(3, 2).unwrap();
        let t1 = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let z = Matrix::zeros(2, 2);
        let g = GammaSet::linear(cfg, vec![t1, z.clone(), z]).unwrap();
        let s = check_sum_surjective(&g, &[vector(&[1.0, 1.0])], 1e-9).unwrap();
        assert!(s.report.failed());
        assert!(s.preimages.is_empty());

        let f = diagonal(2, &[1.0]);
        let s = check_sum_surjective(&f, &[vector(&[2.0])], 1e-9).unwrap();
        assert_eq!(s.report.verdict, Verdict::Inconclusive);
        assert_eq!(s.report.metric("targets_hit"), Some(1.0));
    }

    #[test]
    fn finite_maximality_inconclusive() {
        let r = classify_maximality(&diagonal(3, &[0.0, 1.0]), None, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }
}
