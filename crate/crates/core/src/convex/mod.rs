//! Convex-function catalog with prox, Moreau envelopes and conjugates, plus
//! the multi-marginal machinery built on them.

mod conjugation;
mod criteria;
mod curve;
mod gridfn;

pub use conjugation::{
    c_conjugate, check_splitting_inequality, relax_to_c_conjugate, splitting_set_extract, splitting_slack,
    splitting_slacks,
    Extraction, Relaxation, SplittingDomain,
};
pub use criteria::{
    check_envelope_criterion, check_prox_partition, check_subdiff_identity, three_marginal_smooth_check,
    EnvelopeCheck, EnvelopeRow,
};
pub use curve::{CurveAntiderivative, MonotoneTable};
pub use gridfn::{legendre_direct, legendre_hull_1d, GridConjugate, GridFn};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{asymmetry, matrix_from_rows, matrix_to_rows, min_sym_eigenvalue, Matrix, Vector};
use crate::space::half_sq;

/// Symmetry and PSD tolerance for quadratic forms.
const FORM_TOL: f64 = 1e-12;
/// Orthonormality tolerance for subspace bases.
const BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFn {
    /// q_M(x) = ½⟨x, Mx⟩ with M symmetric positive semidefinite.
    Quadratic(Matrix),
    /// ι_{range B} + q_M with B (d×k) having orthonormal columns.
    SubspaceQuadratic { basis: Matrix, m: Matrix },
    /// Known only at lattice nodes, +∞ elsewhere.
    Grid(GridFn),
    /// Antiderivative generated by a monotone curve (d = 1).
    Curve(CurveAntiderivative),
}

impl ConvexFn {
    pub fn quadratic(m: Matrix) -> Result<Self> {
        check_form(&m)?;
        Ok(ConvexFn::Quadratic(m))
    }

    /// c·q on ℝᵈ.
    pub fn scaled_q(d: usize, c: f64) -> Result<Self> {
        Self::quadratic(Matrix::identity(d, d) * c)
    }

    pub fn subspace(basis: Matrix, m: Matrix) -> Result<Self> {
        if !m.is_square() || m.nrows() != basis.nrows() {
            return Err(Error::Config("subspace quadratic: matrix must be d×d with d = basis rows".into()));
        }
        if asymmetry(&m) > FORM_TOL {
            return Err(Error::Config("subspace quadratic: matrix is not symmetric".into()));
        }
        let k = basis.ncols();
        let gram = basis.transpose() * &basis;
        if (&gram - Matrix::identity(k, k)).amax() > BASIS_TOL {
            return Err(Error::Config("subspace quadratic: basis columns are not orthonormal".into()));
        }
        if k > 0 && min_sym_eigenvalue(&(basis.transpose() * &m * &basis)) < -FORM_TOL {
            return Err(Error::Config("subspace quadratic: not convex on the subspace".into()));
        }
        Ok(ConvexFn::SubspaceQuadratic { basis, m })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexFn::Quadratic(m) => m.nrows(),
            ConvexFn::SubspaceQuadratic { basis, .. } => basis.nrows(),
            ConvexFn::Grid(g) => g.grid().dim(),
            ConvexFn::Curve(_) => 1,
        }
    }

    pub fn is_proper(&self) -> bool {
        match self {
            ConvexFn::Grid(g) => g.is_proper(),
            _ => true,
        }
    }

    /// True when prox is a grid search rather than an exact solve.
    pub fn prox_is_approximate(&self) -> bool {
        matches!(self, ConvexFn::Grid(_))
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        self.check_arg(x)?;
        Ok(match self {
            ConvexFn::Quadratic(m) => 0.5 * x.dot(&(m * x)),
            ConvexFn::SubspaceQuadratic { basis, m } => {
                let proj = basis * (basis.transpose() * x);
                if (x - proj).norm() <= BASIS_TOL * (1.0 + x.norm()) {
                    0.5 * x.dot(&(m * x))
                } else {
                    f64::INFINITY
                }
            }
            ConvexFn::Grid(g) => g.eval(x),
            ConvexFn::Curve(c) => c.eval(x[0])?,
        })
    }

    /// ∇f(x) where f is differentiable in the classical sense.
    pub fn gradient(&self, x: &Vector) -> Option<Result<Vector>> {
        if let Err(e) = self.check_arg(x) {
            return Some(Err(e));
        }
        match self {
            ConvexFn::Quadratic(m) => Some(Ok(m * x)),
            ConvexFn::Curve(c) => Some(c.derivative(x[0]).map(|v| Vector::from_element(1, v))),
            _ => None,
        }
    }

    /// prox_f(s) = argmin_y f(y) + ½‖y − s‖².
    pub fn prox(&self, s: &Vector) -> Result<Vector> {
        self.check_arg(s)?;
        match self {
            ConvexFn::Quadratic(m) => {
                let a = Matrix::identity(m.nrows(), m.nrows()) + m;
                a.cholesky()
                    .map(|c| c.solve(s))
                    .ok_or_else(|| Error::Domain("I + M is not positive definite".into()))
            }
            ConvexFn::SubspaceQuadratic { basis, m } => {
                if basis.ncols() == 0 {
                    return Ok(Vector::zeros(s.len()));
                }
                let d = m.nrows();
                let reduced = basis.transpose() * (Matrix::identity(d, d) + m) * basis;
                let coeff = reduced
                    .cholesky()
                    .map(|c| c.solve(&(basis.transpose() * s)))
                    .ok_or_else(|| Error::Domain("reduced system is not positive definite".into()))?;
                Ok(basis * coeff)
            }
            ConvexFn::Grid(g) => g.prox_with_value(s).map(|(p, _)| p),
            ConvexFn::Curve(c) => c.prox(s[0]).map(|v| Vector::from_element(1, v)),
        }
    }

    /// e_f(s) = f(p) + ½‖s − p‖² with p = prox_f(s).
    pub fn moreau_envelope(&self, s: &Vector) -> Result<f64> {
        match self {
            ConvexFn::Grid(g) => {
                self.check_arg(s)?;
                g.prox_with_value(s).map(|(_, v)| v)
            }
            ConvexFn::SubspaceQuadratic { m, .. } => {
                // p lies in range B by construction; skip the membership test
                let p = self.prox(s)?;
                Ok(0.5 * p.dot(&(m * &p)) + half_sq(&(s - &p)))
            }
            _ => {
                let p = self.prox(s)?;
                Ok(self.eval(&p)? + half_sq(&(s - &p)))
            }
        }
    }

    /// e_{f*}(s) = q(s) − e_f(s).
    pub fn conjugate_envelope(&self, s: &Vector) -> Result<f64> {
        Ok(half_sq(s) - self.moreau_envelope(s)?)
    }

    /// Values at every node of `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<GridFn> {
        if grid.dim() != self.dim() {
            return Err(Error::Config(format!(
                "grid dimension {} does not match function dimension {}",
                grid.dim(),
                self.dim()
            )));
        }
        if let ConvexFn::Grid(g) = self {
            if g.grid() == grid {
                return Ok(g.clone());
            }
        }
        Grid::guard(grid.node_count())?;
        let values = grid.nodes().iter().map(|x| self.eval(x)).collect::<Result<Vec<_>>>()?;
        GridFn::new(grid.clone(), values)
    }

    /// Gradient magnitude bound over the box of `grid`.
    pub(crate) fn lipschitz_on(&self, grid: &Grid) -> Result<f64> {
        match self {
            ConvexFn::Quadratic(m) | ConvexFn::SubspaceQuadratic { m, .. } => {
                let corner = (0..grid.dim())
                    .map(|k| grid.lo[k].abs().max(grid.hi[k].abs()).powi(2))
                    .sum::<f64>()
                    .sqrt();
                Ok(m.norm() * corner)
            }
            ConvexFn::Grid(g) if g.grid() == grid => Ok(g.slope_bound()),
            _ => Ok(self.sample(grid)?.slope_bound()),
        }
    }

    fn check_arg(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Config(format!(
                "argument has dimension {}, function expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

fn check_form(m: &Matrix) -> Result<()> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Config("quadratic form needs a nonempty square matrix".into()));
    }
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Config("quadratic form has non-finite entries".into()));
    }
    if asymmetry(m) > FORM_TOL {
        return Err(Error::Config("quadratic form is not symmetric".into()));
    }
    if min_sym_eigenvalue(m) < -FORM_TOL {
        return Err(Error::Config("quadratic form is not positive semidefinite".into()));
    }
    Ok(())
}

/// How to conjugate.
#[derive(Debug, Clone, PartialEq)]
pub enum ConjugateMethod {
    /// q_M ↦ q_{M⁻¹}; only for positive definite quadratics.
    ClosedForm,
    /// Discrete transform. `primal` is needed unless f is already a grid
    /// function; `dual` defaults to the primal lattice.
    Grid { primal: Option<Grid>, dual: Option<Grid> },
}

/// A conjugate together with the dual nodes flagged as possibly unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugate {
    pub func: ConvexFn,
    pub boundary_nodes: Vec<usize>,
}

/// f*(u) = sup_x ⟨u, x⟩ − f(x).
pub fn fenchel_conjugate(f: &ConvexFn, method: &ConjugateMethod) -> Result<Conjugate> {
    match method {
        ConjugateMethod::ClosedForm => match f {
            ConvexFn::Quadratic(m) => {
                let inv = m
                    .clone()
                    .cholesky()
                    .map(|c| c.inverse())
                    .ok_or_else(|| Error::Unsupported("closed-form conjugate needs M positive definite".into()))?;
                // symmetrize away rounding
                let inv = (&inv + inv.transpose()) * 0.5;
                Ok(Conjugate { func: ConvexFn::Quadratic(inv), boundary_nodes: Vec::new() })
            }
            _ => Err(Error::Unsupported("no closed-form conjugate for this function".into())),
        },
        ConjugateMethod::Grid { primal, dual } => {
            let sampled = match (f, primal) {
                (_, Some(p)) => f.sample(p)?,
                (ConvexFn::Grid(g), None) => g.clone(),
                (_, None) => return Err(Error::Config("grid conjugation needs a primal grid".into())),
            };
            let dual = dual.clone().unwrap_or_else(|| sampled.grid().clone());
            let conj = if sampled.grid().dim() == 1 {
                legendre_hull_1d(&sampled, &dual)?
            } else {
                legendre_direct(&sampled, &dual)?
            };
            Ok(Conjugate { func: ConvexFn::Grid(conj.func), boundary_nodes: conj.boundary_nodes })
        }
    }
}

/// An N-tuple of convex functions over one marginal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingTuple {
    funcs: Vec<ConvexFn>,
}

impl SplittingTuple {
    pub fn new(funcs: Vec<ConvexFn>) -> Result<Self> {
        if funcs.len() < 2 {
            return Err(Error::Config("a tuple needs at least 2 functions".into()));
        }
        let d = funcs[0].dim();
        if let Some(k) = funcs.iter().position(|f| f.dim() != d) {
            return Err(Error::Config(format!("function {k} has dimension {}, expected {d}", funcs[k].dim())));
        }
        if let Some(k) = funcs.iter().position(|f| !f.is_proper()) {
            return Err(Error::Config(format!("function {k} is +inf everywhere")));
        }
        Ok(Self { funcs })
    }

    pub fn funcs(&self) -> &[ConvexFn] {
        &self.funcs
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.funcs[0].dim()
    }

    pub fn get(&self, i: usize) -> &ConvexFn {
        &self.funcs[i]
    }
}

// ---- JSON ----

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FnJson {
    Quadratic {
        matrix: Vec<Vec<f64>>,
    },
    SubspaceQuadratic {
        basis: Vec<Vec<f64>>,
        matrix: Vec<Vec<f64>>,
    },
    Grid {
        grid: Grid,
        /// `null` encodes +∞.
        values: Vec<Option<f64>>,
    },
    Curve {
        alphas: Vec<MonotoneTable>,
        own_index: usize,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleJson {
    functions: Vec<serde_json::Value>,
}

fn parse_err(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse { path: path.to_string(), message: e.to_string() }
}

impl ConvexFn {
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        Self::from_json_at(value, "$")
    }

    fn from_json_at(value: serde_json::Value, path: &str) -> Result<Self> {
        let raw: FnJson = serde_json::from_value(value).map_err(|e| parse_err(path, e))?;
        let rows = |r: &[Vec<f64>], field: &str| {
            matrix_from_rows(r).ok_or_else(|| parse_err(&format!("{path}.{field}"), "ragged rows"))
        };
        match raw {
            FnJson::Quadratic { matrix } => {
                ConvexFn::quadratic(rows(&matrix, "matrix")?).map_err(|e| parse_err(&format!("{path}.matrix"), e))
            }
            FnJson::SubspaceQuadratic { basis, matrix } => {
                let b = if basis.iter().all(Vec::is_empty) {
                    Matrix::zeros(basis.len(), 0)
                } else {
                    rows(&basis, "basis")?
                };
                ConvexFn::subspace(b, rows(&matrix, "matrix")?).map_err(|e| parse_err(path, e))
            }
            FnJson::Grid { grid, values } => {
                grid.validate().map_err(|e| parse_err(&format!("{path}.grid"), e))?;
                let vals = values.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
                Ok(ConvexFn::Grid(GridFn::new(grid, vals).map_err(|e| parse_err(&format!("{path}.values"), e))?))
            }
            FnJson::Curve { alphas, own_index } => {
                for (k, a) in alphas.iter().enumerate() {
                    a.validate().map_err(|e| parse_err(&format!("{path}.alphas[{k}]"), e))?;
                }
                if own_index == 0 {
                    return Err(parse_err(&format!("{path}.own_index"), "indices are 1-based"));
                }
                Ok(ConvexFn::Curve(
                    CurveAntiderivative::new(alphas, own_index - 1)
                        .map_err(|e| parse_err(&format!("{path}.own_index"), e))?,
                ))
            }
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = match self {
            ConvexFn::Quadratic(m) => FnJson::Quadratic { matrix: matrix_to_rows(m) },
            ConvexFn::SubspaceQuadratic { basis, m } => FnJson::SubspaceQuadratic {
                basis: if basis.ncols() == 0 { vec![Vec::new(); basis.nrows()] } else { matrix_to_rows(basis) },
                matrix: matrix_to_rows(m),
            },
            ConvexFn::Grid(g) => FnJson::Grid {
                grid: g.grid().clone(),
                values: g.values().iter().map(|v| v.is_finite().then_some(*v)).collect(),
            },
            ConvexFn::Curve(c) => FnJson::Curve { alphas: c.alphas().to_vec(), own_index: c.own_index() + 1 },
        };
        serde_json::to_value(raw).expect("function serializes")
    }
}

impl SplittingTuple {
    /// `{"functions": [<function>, …]}`.
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let raw: TupleJson = serde_json::from_value(value).map_err(|e| parse_err("$", e))?;
        let funcs = raw
            .functions
            .into_iter()
            .enumerate()
            .map(|(k, v)| ConvexFn::from_json_at(v, &format!("$.functions[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        SplittingTuple::new(funcs).map_err(|e| parse_err("$.functions", e))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(text).map_err(|e| parse_err("$", e))?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({ "functions": self.funcs.iter().map(ConvexFn::to_json_value).collect::<Vec<_>>() })
    }
}
