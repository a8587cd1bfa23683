//! Ready-made instances with the verdicts every check should reproduce.

use std::f64::consts::PI;

use rand::Rng;

use crate::convex::{
    check_envelope_criterion, check_prox_partition, check_splitting_inequality, check_subdiff_identity, ConvexFn,
    CurveAntiderivative, MonotoneTable, SplittingDomain, SplittingTuple,
};
use crate::error::{Error, Result};
use crate::gamma::{GammaSet, IndexSubset};
use crate::grid::Grid;
use crate::linalg::{min_sym_eigenvalue, rotation, Matrix, Vector};
use crate::monotone::{
    check_firmly_nonexpansive, check_n_c_cyclic, check_pairwise_c_monotone, check_partition_identity,
    check_two_marginal_projections, classify_maximality, resolvent_samples, CyclicOptions, GraphPairs,
};
use crate::report::{CheckReport, SlackTracker, Verdict, Witness, DEFAULT_TOL};
use crate::space::{MultiPoint, SpaceConfig};

/// Commutator tolerance for quadratic families.
const COMMUTE_TOL: f64 = 1e-10;
/// Largest product grid used for a splitting sweep inside a case.
const SPLITTING_NODES: u128 = 100_000;

/// A check to run on a case, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseCheck {
    PairwiseCMonotone,
    Maximality,
    Cyclic { order: usize, budget: u64 },
    PartitionIdentity,
    /// Σ_i J_{A_i}(s) = s on the samples.
    ResolventSum,
    /// Every J_{A_i} is firmly nonexpansive on the samples.
    ResolventsFirm,
    /// J_{A_i}(s) equals the given matrix times s entrywise.
    ResolventMatrices(Vec<Matrix>),
    /// s ↦ Σ_{i∈K} J_{A_i}(s) is firmly nonexpansive (K 0-based).
    PartialSumFirm(Vec<usize>),
    /// Monotonicity of every Γ_{i,j}, on its own sample grid.
    Projections(Option<Grid>),
    ProxPartition,
    Envelope,
    Splitting,
    SubdiffIdentity,
}

impl CaseCheck {
    pub fn name(&self) -> String {
        match self {
            CaseCheck::PairwiseCMonotone => "pairwise_c_monotone".into(),
            CaseCheck::Maximality => "maximality".into(),
            CaseCheck::Cyclic { order, .. } => format!("cyclic_{order}"),
            CaseCheck::PartitionIdentity => "partition_identity".into(),
            CaseCheck::ResolventSum => "resolvent_sum".into(),
            CaseCheck::ResolventsFirm => "resolvents_firmly_nonexpansive".into(),
            CaseCheck::ResolventMatrices(_) => "resolvent_matrices".into(),
            CaseCheck::PartialSumFirm(k) => {
                let labels: Vec<String> = k.iter().map(|i| (i + 1).to_string()).collect();
                format!("partial_sum_firm_{}", labels.join("_"))
            }
            CaseCheck::Projections(_) => "two_marginal_projections".into(),
            CaseCheck::ProxPartition => "prox_partition".into(),
            CaseCheck::Envelope => "envelope".into(),
            CaseCheck::Splitting => "splitting".into(),
            CaseCheck::SubdiffIdentity => "subdiff_identity".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GalleryCase {
    pub id: String,
    pub title: String,
    pub gamma: GammaSet,
    pub tuple: Option<SplittingTuple>,
    pub expected: Vec<(CaseCheck, Verdict)>,
    /// Parameter grid for linear Γ; ignored for finite Γ.
    pub sample: Option<Grid>,
    /// Probe points in H for envelope and prox checks.
    pub probes: Vec<Vector>,
    /// Where the splitting inequality is swept.
    pub splitting_domain: Option<SplittingDomain>,
}

impl GalleryCase {
    fn new(id: &str, title: &str, gamma: GammaSet) -> Self {
        let d = gamma.config().d;
        let sample = (!gamma.is_finite()).then(|| default_sample(d));
        Self {
            id: id.into(),
            title: title.into(),
            gamma,
            tuple: None,
            expected: Vec::new(),
            sample,
            probes: default_probes(d),
            splitting_domain: None,
        }
    }

    fn expect(mut self, check: CaseCheck, verdict: Verdict) -> Self {
        self.expected.push((check, verdict));
        self
    }

    pub fn gamma_points(&self) -> Result<Vec<MultiPoint>> {
        self.gamma.materialize(self.sample.as_ref())
    }
}

/// [−2, 2]ᵈ with 5 nodes per axis.
pub fn default_sample(d: usize) -> Grid {
    Grid::cube(d, -2.0, 2.0, 5).expect("valid grid")
}

fn default_probes(d: usize) -> Vec<Vector> {
    Grid::cube(d, -2.5, 2.5, 6).expect("valid grid").nodes()
}

/// Result of running one expected check.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub check: String,
    pub expected: Verdict,
    pub report: CheckReport,
}

impl Outcome {
    pub fn matches(&self) -> bool {
        self.report.verdict == self.expected
    }
}

/// Runs every expected check of the case at the default tolerance.
pub fn run_case(case: &GalleryCase) -> Result<Vec<Outcome>> {
    run_case_with_tol(case, DEFAULT_TOL)
}

pub fn run_case_with_tol(case: &GalleryCase, tol: f64) -> Result<Vec<Outcome>> {
    case.expected
        .iter()
        .map(|(check, expected)| {
            Ok(Outcome { check: check.name(), expected: *expected, report: run_check(case, check, tol)? })
        })
        .collect()
}

fn need_tuple(case: &GalleryCase) -> Result<&SplittingTuple> {
    case.tuple.as_ref().ok_or_else(|| Error::Config(format!("case {} has no tuple", case.id)))
}

pub fn run_check(case: &GalleryCase, check: &CaseCheck, tol: f64) -> Result<CheckReport> {
    let gamma = &case.gamma;
    let sample = case.sample.as_ref();
    let n = gamma.config().n;
    Ok(match check {
        CaseCheck::PairwiseCMonotone => check_pairwise_c_monotone(gamma, sample, tol)?,
        CaseCheck::Maximality => classify_maximality(gamma, sample, tol)?,
        CaseCheck::Cyclic { order, budget } => {
            let opts = CyclicOptions { order: *order, tol, budget: *budget, ..CyclicOptions::default() };
            check_n_c_cyclic(gamma, sample, &opts)?
        }
        CaseCheck::PartitionIdentity => check_partition_identity(gamma, sample, tol)?,
        CaseCheck::ResolventSum => {
            let rs = (0..n).map(|i| resolvent_samples(gamma, i, sample, tol)).collect::<Result<Vec<_>>>()?;
            let mut t = SlackTracker::new();
            for k in 0..rs[0].len() {
                let s = &rs[0].pairs[k].0;
                let total = rs.iter().fold(Vector::zeros(s.len()), |acc, r| acc + &r.pairs[k].1);
                let residual = (total - s).norm();
                t.observe(-residual, || Witness::Probe { point: s.iter().copied().collect(), residual });
            }
            t.into_report("resolvent_sum", tol)
        }
        CaseCheck::ResolventsFirm => {
            let mut worst: Option<CheckReport> = None;
            for i in 0..n {
                let r = check_firmly_nonexpansive(&resolvent_samples(gamma, i, sample, tol)?, tol);
                if worst.as_ref().is_none_or(|w| r.margin < w.margin) {
                    worst = Some(r);
                }
            }
            let mut r = worst.expect("at least two marginals");
            r.check = "resolvents_firmly_nonexpansive".into();
            r
        }
        CaseCheck::ResolventMatrices(mats) => {
            let mut t = SlackTracker::new();
            for (i, m) in mats.iter().enumerate() {
                for (s, x) in resolvent_samples(gamma, i, sample, tol)?.pairs {
                    let residual = (m * &s - x).amax();
                    t.observe(-residual, || Witness::Probe { point: s.iter().copied().collect(), residual });
                }
            }
            t.into_report("resolvent_matrices", tol)
        }
        CaseCheck::PartialSumFirm(k) => {
            let subset = IndexSubset::new(n, k.iter().copied())?;
            let pts = case.gamma_points()?;
            let pairs = pts
                .iter()
                .map(|p| (crate::space::sum_map(p), p.partial_sum(subset.members().iter().copied())))
                .collect();
            let mut r = check_firmly_nonexpansive(&GraphPairs::new(check.name(), pairs)?, tol);
            r.check = check.name();
            r
        }
        CaseCheck::Projections(grid) => check_two_marginal_projections(gamma, grid.as_ref().or(sample), tol)?.report,
        CaseCheck::ProxPartition => check_prox_partition(need_tuple(case)?, &case.probes, tol)?,
        CaseCheck::Envelope => check_envelope_criterion(need_tuple(case)?, &case.probes, Some(gamma), tol)?.report,
        CaseCheck::Splitting => {
            let domain = case
                .splitting_domain
                .clone()
                .ok_or_else(|| Error::Config(format!("case {} has no splitting domain", case.id)))?;
            check_splitting_inequality(need_tuple(case)?, &domain, &case.gamma_points()?, tol)?
        }
        CaseCheck::SubdiffIdentity => check_subdiff_identity(need_tuple(case)?, gamma, sample, tol, None)?,
    })
}

/// Γ = {(Q₁v, …, Q_N v)} with q_{M_i}, M_i = (Σ_{k≠i} Q_k) Q_i⁻¹, for
/// symmetric positive definite, pairwise commuting Q_i.
pub fn make_quadratic_family(qs: &[Matrix]) -> Result<GalleryCase> {
    if qs.len() < 2 {
        return Err(Error::Config("a family needs at least two matrices".into()));
    }
    let d = qs[0].nrows();
    for (i, q) in qs.iter().enumerate() {
        if q.nrows() != d || q.ncols() != d {
            return Err(Error::Config(format!("matrix {} is not {d}×{d}", i + 1)));
        }
        if crate::linalg::asymmetry(q) > COMMUTE_TOL || min_sym_eigenvalue(q) <= 0.0 {
            return Err(Error::Config(format!("matrix {} is not symmetric positive definite", i + 1)));
        }
    }
    for i in 0..qs.len() {
        for j in (i + 1)..qs.len() {
            let norm = (&qs[i] * &qs[j] - &qs[j] * &qs[i]).norm();
            if norm > COMMUTE_TOL {
                return Err(Error::NonCommuting { i: i + 1, j: j + 1, norm });
            }
        }
    }
    let total = qs.iter().fold(Matrix::zeros(d, d), |acc, q| acc + q);
    let funcs = qs
        .iter()
        .map(|q| {
            let inv = q.clone().try_inverse().ok_or_else(|| Error::Domain("singular matrix".into()))?;
            let m = (&total - q) * inv;
            ConvexFn::quadratic((&m + m.transpose()) * 0.5)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = qs.len();
    let gamma = GammaSet::linear(SpaceConfig::new(n, d)?, qs.to_vec())?;
    let mut case = GalleryCase::new("quadratic-family", "commuting quadratic family", gamma);
    case.tuple = Some(SplittingTuple::new(funcs)?);
    let box_grid = default_sample(d);
    if (box_grid.len() as u128).pow(n as u32) <= SPLITTING_NODES {
        case.splitting_domain = Some(SplittingDomain::Grids(vec![box_grid; n]));
    }
    let mut case = case
        .expect(CaseCheck::PairwiseCMonotone, Verdict::Pass)
        .expect(CaseCheck::Maximality, Verdict::Pass)
        .expect(CaseCheck::ProxPartition, Verdict::Pass)
        .expect(CaseCheck::Envelope, Verdict::Pass)
        .expect(CaseCheck::SubdiffIdentity, Verdict::Pass);
    if case.splitting_domain.is_some() {
        case = case.expect(CaseCheck::Splitting, Verdict::Pass);
    }
    Ok(case)
}

/// Q_i = U D_i Uᵀ with one random orthogonal U and positive diagonals D_i
/// with entries in [0.5, 3].
pub fn random_commuting_family(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Matrix> {
    let raw = Matrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let u = raw.qr().q();
    (0..n)
        .map(|_| {
            let diag = Vector::from_fn(d, |_, _| rng.gen_range(0.5..3.0));
            let q = &u * Matrix::from_diagonal(&diag) * u.transpose();
            (&q + q.transpose()) * 0.5
        })
        .collect()
}

/// Γ = {(α₁(t), …, α_N(t))} at the given parameters, with the antiderivative
/// tuple generated by the curve.
pub fn make_curve_family(alphas: Vec<MonotoneTable>, ts: &[f64]) -> Result<GalleryCase> {
    let n = alphas.len();
    let funcs = (0..n)
        .map(|i| CurveAntiderivative::new(alphas.clone(), i).map(ConvexFn::Curve))
        .collect::<Result<Vec<_>>>()?;
    let points = ts
        .iter()
        .map(|&t| {
            let vals = alphas
                .iter()
                .map(|a| a.eval(t).ok_or_else(|| Error::Domain(format!("t = {t} outside a table"))))
                .collect::<Result<Vec<_>>>()?;
            MultiPoint::scalars(&vals)
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma = GammaSet::finite(SpaceConfig::new(n, 1)?, points)?;
    let grids = funcs
        .iter()
        .map(|f| match f {
            ConvexFn::Curve(c) => Grid::new(vec![c.domain().0], vec![c.domain().1], vec![9]),
            _ => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut case = GalleryCase::new("curve-family", "monotone curve", gamma);
    // probes stay where every prox bracket is valid
    case.probes = (-4..=4).map(|k| Vector::from_element(1, k as f64 * 0.25)).collect();
    case.tuple = Some(SplittingTuple::new(funcs)?);
    case.splitting_domain = Some(if 9u128.pow(n as u32) <= SPLITTING_NODES {
        SplittingDomain::Grids(grids)
    } else {
        SplittingDomain::Points(case.gamma_points()?)
    });
    Ok(case
        .expect(CaseCheck::Splitting, Verdict::Pass)
        .expect(CaseCheck::SubdiffIdentity, Verdict::Pass)
        .expect(CaseCheck::PairwiseCMonotone, Verdict::Pass))
}

/// Matrices (T₁, T₂, T₃) with Γ = {(T₁v, T₂v, T₃v)}, v = (s, t), spanned by
/// ((1,0),(2,2),(0,7)) and ((0,0),(−1,−1),(1,−5)).
pub fn restricted_quadratic_matrices() -> Vec<Matrix> {
    vec![
        Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        Matrix::from_row_slice(2, 2, &[2.0, -1.0, 2.0, -1.0]),
        Matrix::from_row_slice(2, 2, &[0.0, 1.0, 7.0, -5.0]),
    ]
}

/// (ι_{ℝ×{0}} + q_{diag(2,0)}, ι_{diagonal} + 2q, q_{M₃}) with M₃ = (1/7)[[8,3],[3,2]].
pub fn restricted_quadratic_tuple() -> SplittingTuple {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let f1 = ConvexFn::subspace(
        Matrix::from_row_slice(2, 1, &[1.0, 0.0]),
        Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]),
    );
    let f2 = ConvexFn::subspace(Matrix::from_row_slice(2, 1, &[r, r]), Matrix::identity(2, 2) * 2.0);
    let f3 = ConvexFn::quadratic(Matrix::from_row_slice(2, 2, &[8.0, 3.0, 3.0, 2.0]) / 7.0);
    SplittingTuple::new(vec![f1.unwrap(), f2.unwrap(), f3.unwrap()]).expect("valid tuple")
}

/// Three marginals in ℝ² whose two-marginal projections are all non-monotone.
pub fn make_restricted_quadratics() -> GalleryCase {
    let gamma = GammaSet::linear(SpaceConfig::new(3, 2).unwrap(), restricted_quadratic_matrices()).unwrap();
    let mut case = GalleryCase::new("restricted-quadratics", "restricted quadratics in the plane", gamma);
    case.tuple = Some(restricted_quadratic_tuple());
    case.splitting_domain = Some(SplittingDomain::Grids(vec![default_sample(2); 3]));
    // Γ_{2,3} is non-monotone only for parameter ratios in (1/2, 4/7)
    let fine = Grid::cube(2, -2.0, 2.0, 11).unwrap();
    case.expect(CaseCheck::Projections(Some(fine)), Verdict::Fail)
        .expect(CaseCheck::PairwiseCMonotone, Verdict::Pass)
        .expect(CaseCheck::Maximality, Verdict::Pass)
        .expect(CaseCheck::Splitting, Verdict::Pass)
}

/// Γ = {(x₁, x₂, ρ₃, …, ρ_N) | (x₁, x₂) in the graph}. The graph must be monotone.
pub fn make_trivial_embedding(graph: &GraphPairs, n: usize, shifts: Option<&[Vector]>) -> Result<GalleryCase> {
    if n < 2 {
        return Err(Error::Config("need at least two marginals".into()));
    }
    let mono = crate::monotone::check_graph_monotone(graph, DEFAULT_TOL);
    if mono.failed() {
        return Err(Error::Precondition("the embedded graph is not monotone".into()));
    }
    let d = graph.pairs.first().map(|p| p.0.len()).ok_or_else(|| Error::EmptySample("empty graph".into()))?;
    let rho: Vec<Vector> = match shifts {
        Some(s) if s.len() == n - 2 => s.to_vec(),
        Some(s) => return Err(Error::Config(format!("expected {} shifts, got {}", n - 2, s.len()))),
        None => vec![Vector::zeros(d); n - 2],
    };
    let points = graph
        .pairs
        .iter()
        .map(|(x, y)| {
            let mut blocks = vec![x.clone(), y.clone()];
            blocks.extend(rho.iter().cloned());
            MultiPoint::new(blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma = GammaSet::finite(SpaceConfig::new(n, d)?, points)?;
    Ok(GalleryCase::new("embedding", "embedded monotone graph", gamma)
        .expect(CaseCheck::PairwiseCMonotone, Verdict::Pass)
        .expect(CaseCheck::Maximality, Verdict::Inconclusive))
}

/// T₁ = I, T₂ = T₃ = (√3/2) R_{−π/2}: c-monotone but not 3-c-cyclically monotone.
pub fn make_rotation_tripod() -> GalleryCase {
    let r = rotation(-PI / 2.0) * (3f64.sqrt() / 2.0);
    let gamma = GammaSet::linear(SpaceConfig::new(3, 2).unwrap(), vec![Matrix::identity(2, 2), r.clone(), r]).unwrap();
    let j1 = rotation(PI / 3.0) * 0.5;
    let j23 = rotation(-PI / 6.0) * (3f64.sqrt() / 4.0);
    GalleryCase::new("rotation-tripod", "rotation tripod", gamma)
        .expect(CaseCheck::PairwiseCMonotone, Verdict::Pass)
        .expect(CaseCheck::Maximality, Verdict::Pass)
        .expect(CaseCheck::Cyclic { order: 3, budget: crate::monotone::DEFAULT_BUDGET }, Verdict::Fail)
        .expect(CaseCheck::ResolventMatrices(vec![j1, j23.clone(), j23]), Verdict::Pass)
        .expect(CaseCheck::PartitionIdentity, Verdict::Pass)
        .expect(CaseCheck::Projections(None), Verdict::Pass)
}

/// N = 2n, T_i = αR_θ for i ≤ n and αR_{−θ} otherwise, α = 1/(2n cos θ).
/// Each T_i is firmly nonexpansive and Σ T_i = I, yet Γ is not c-monotone.
pub fn make_partition_counterexample(n: usize, theta: f64) -> Result<GalleryCase> {
    if n < 1 {
        return Err(Error::Config("n must be positive".into()));
    }
    let upper = (1.0 / (2.0 * n as f64).sqrt()).acos();
    if !(theta > PI / 4.0 && theta <= upper + 1e-15) {
        return Err(Error::Config(format!("theta must lie in (π/4, {upper}]")));
    }
    let alpha = 1.0 / (2.0 * n as f64 * theta.cos());
    let mats: Vec<Matrix> =
        (0..2 * n).map(|i| rotation(if i < n { theta } else { -theta }) * alpha).collect();
    let gamma = GammaSet::linear(SpaceConfig::new(2 * n, 2)?, mats)?;
    Ok(GalleryCase::new("partition-counterexample", "resolvent partition without c-monotonicity", gamma)
        .expect(CaseCheck::ResolventsFirm, Verdict::Pass)
        .expect(CaseCheck::ResolventSum, Verdict::Pass)
        .expect(CaseCheck::PartialSumFirm((0..n).collect()), Verdict::Fail)
        .expect(CaseCheck::PairwiseCMonotone, Verdict::Fail))
}

fn linear_table(slope: f64) -> MonotoneTable {
    MonotoneTable::sample((-40..=40).map(|k| k as f64 * 0.1).collect(), |t| slope * t).expect("valid table")
}

fn cubic_table() -> MonotoneTable {
    MonotoneTable::sample((-40..=40).map(|k| k as f64 * 0.05).collect(), |t| t * t * t).expect("valid table")
}

fn vec2(x: f64, y: f64) -> Vector {
    Vector::from_vec(vec![x, y])
}

/// Canonical ids with their short aliases.
pub const CASES: &[(&str, &str, &str)] = &[
    ("quadratic-scalar", "ex5.1", "scalar quadratic family Q = (1, 1, 2)"),
    ("identity-family", "cor5.2", "Q_i = I: tuple (N−1)(q, …, q) and Γ the diagonal"),
    ("curve-line", "ex5.3", "curve α = (t, 2t)"),
    ("curve-cubic", "ex5.3-cubic", "curve α = (t, t³)"),
    ("restricted-quadratics", "ex5.4", "restricted quadratics in the plane"),
    ("embedded-identity", "ex5.5", "identity graph embedded in four marginals"),
    ("embedded-rotation", "ex5.5-rotation", "quarter-turn graph embedded in four marginals"),
    ("embedded-shifted", "ex5.5-shifted", "identity graph embedded with constant shifts"),
    ("rotation-tripod", "ex5.6", "rotation tripod"),
    ("partition-counterexample", "ex5.7", "resolvent partition without c-monotonicity (n = 2, θ = π/3)"),
];

/// Looks up a case by id or alias.
pub fn case_by_id(id: &str) -> Result<GalleryCase> {
    let (canonical, _, title) = CASES
        .iter()
        .find(|(c, a, _)| *c == id || *a == id)
        .ok_or_else(|| Error::Config(format!("unknown gallery case {id}")))?;
    let scalar = |v: f64| Matrix::from_element(1, 1, v);
    let mut case = match *canonical {
        "quadratic-scalar" => make_quadratic_family(&[scalar(1.0), scalar(1.0), scalar(2.0)])?,
        "identity-family" => make_quadratic_family(&vec![scalar(1.0); 3])?,
        "curve-line" => make_curve_family(
            vec![linear_table(1.0), linear_table(2.0)],
            &(-8..=8).map(|k| k as f64 * 0.25).collect::<Vec<_>>(),
        )?,
        "curve-cubic" => make_curve_family(
            vec![linear_table(1.0), cubic_table()],
            &(-8..=8).map(|k| k as f64 * 0.2).collect::<Vec<_>>(),
        )?,
        "restricted-quadratics" => make_restricted_quadratics(),
        "embedded-identity" | "embedded-shifted" => {
            let g = GraphPairs::new(
                "Id",
                vec![(Vector::from_element(1, 0.0), Vector::from_element(1, 0.0)), (Vector::from_element(1, 1.0), Vector::from_element(1, 1.0))],
            )?;
            let shifts = [Vector::from_element(1, 0.5), Vector::from_element(1, -2.0)];
            let shifts = (*canonical == "embedded-shifted").then_some(&shifts[..]);
            make_trivial_embedding(&g, 4, shifts)?.expect(CaseCheck::Cyclic { order: 3, budget: 1_000_000 }, Verdict::Pass)
        }
        "embedded-rotation" => {
            let quarter = rotation(PI / 2.0);
            let xs: Vec<Vector> = std::iter::once(vec2(0.0, 0.0))
                .chain((0..3).map(|k| rotation(2.0 * PI * k as f64 / 3.0) * vec2(1.0, 0.0)))
                .collect();
            let g = GraphPairs::of_linear_map("R_quarter", &quarter, &xs)?;
            make_trivial_embedding(&g, 4, None)?.expect(CaseCheck::Cyclic { order: 3, budget: 1_000_000 }, Verdict::Fail)
        }
        "rotation-tripod" => make_rotation_tripod(),
        "partition-counterexample" => make_partition_counterexample(2, PI / 3.0)?,
        _ => unreachable!("every listed case is built"),
    };
    case.id = canonical.to_string();
    case.title = title.to_string();
    Ok(case)
}
