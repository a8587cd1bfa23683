//! Multi-marginal relations Γ ⊆ X: finite point lists and linear
//! parameterizations v ↦ (T₁v, …, T_Nv), plus their marginal projections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{all_finite, matrix_from_rows, matrix_to_rows, Matrix, Vector};
use crate::space::{MultiPoint, SpaceConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum GammaBody {
    /// Ordered, exact-duplicate-free list of points.
    Finite(Vec<MultiPoint>),
    /// {(T₁v, …, T_Nv) | v ∈ ℝᵈ}, one d×d matrix per marginal.
    Linear(Vec<Matrix>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    config: SpaceConfig,
    body: GammaBody,
}

/// A marginal projection: either sampled blocks or the parameterizing matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    Points(Vec<Vector>),
    Matrix(Matrix),
}

impl GammaSet {
    /// Builds a finite set, dropping exact (bitwise) duplicates while keeping
    /// first occurrences in order.
    pub fn finite(config: SpaceConfig, points: Vec<MultiPoint>) -> Result<Self> {
        config.validate()?;
        if points.is_empty() {
            return Err(Error::EmptySample("a finite set needs at least one point".into()));
        }
        let mut kept: Vec<MultiPoint> = Vec::with_capacity(points.len());
        for (k, p) in points.into_iter().enumerate() {
            if p.config() != config {
                return Err(Error::Config(format!(
                    "point {k} has shape {:?}, expected {:?}",
                    p.config(),
                    config
                )));
            }
            if !kept.iter().any(|q| q.bits_eq(&p)) {
                kept.push(p);
            }
        }
        Ok(Self { config, body: GammaBody::Finite(kept) })
    }

    pub fn linear(config: SpaceConfig, matrices: Vec<Matrix>) -> Result<Self> {
        config.validate()?;
        if matrices.len() != config.n {
            return Err(Error::Config(format!(
                "expected {} parameterizing matrices, got {}",
                config.n,
                matrices.len()
            )));
        }
        for (k, t) in matrices.iter().enumerate() {
            if t.nrows() != config.d || t.ncols() != config.d {
                return Err(Error::Config(format!(
                    "matrix {k} is {}x{}, expected {}x{}",
                    t.nrows(),
                    t.ncols(),
                    config.d,
                    config.d
                )));
            }
            if !all_finite(t) {
                return Err(Error::Config(format!("matrix {k} has non-finite entries")));
            }
        }
        Ok(Self { config, body: GammaBody::Linear(matrices) })
    }

    pub fn config(&self) -> SpaceConfig {
        self.config
    }

    pub fn body(&self) -> &GammaBody {
        &self.body
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.body, GammaBody::Finite(_))
    }

    /// T = Σ T_i for linear parameterizations.
    pub fn sum_matrix(&self) -> Option<Matrix> {
        match &self.body {
            GammaBody::Linear(ts) => {
                Some(ts.iter().fold(Matrix::zeros(self.config.d, self.config.d), |acc, t| acc + t))
            }
            GammaBody::Finite(_) => None,
        }
    }

    /// The point of a linear parameterization at parameter `v`.
    pub fn point_at(&self, v: &Vector) -> Result<MultiPoint> {
        match &self.body {
            GammaBody::Linear(ts) => {
                if v.len() != self.config.d {
                    return Err(Error::Config(format!(
                        "parameter has dimension {}, expected {}",
                        v.len(),
                        self.config.d
                    )));
                }
                MultiPoint::new(ts.iter().map(|t| t * v).collect())
            }
            GammaBody::Finite(_) => Err(Error::Unsupported("finite sets have no parameterization".into())),
        }
    }

    /// Concrete points: the stored list, or the parameterization evaluated on
    /// every node of `sample` (required for linear bodies).
    pub fn materialize(&self, sample: Option<&Grid>) -> Result<Vec<MultiPoint>> {
        match &self.body {
            GammaBody::Finite(pts) => Ok(pts.clone()),
            GammaBody::Linear(_) => {
                let grid = sample.ok_or_else(|| {
                    Error::EmptySample("a linear parameterization needs a parameter grid".into())
                })?;
                if grid.dim() != self.config.d {
                    return Err(Error::Config(format!(
                        "parameter grid has dimension {}, expected {}",
                        grid.dim(),
                        self.config.d
                    )));
                }
                Grid::guard(grid.node_count())?;
                grid.nodes().iter().map(|v| self.point_at(v)).collect()
            }
        }
    }

    /// Γ_i = P_i(Γ).
    pub fn project_marginal(&self, i: usize) -> Result<Marginal> {
        self.config.check_index(i)?;
        Ok(match &self.body {
            GammaBody::Finite(pts) => Marginal::Points(pts.iter().map(|p| p.block(i).clone()).collect()),
            GammaBody::Linear(ts) => Marginal::Matrix(ts[i].clone()),
        })
    }

    /// Γ_{i,j} = P_{i,j}(Γ) on the materialized points.
    pub fn project_pair(&self, i: usize, j: usize, sample: Option<&Grid>) -> Result<Vec<(Vector, Vector)>> {
        self.config.check_index(i)?;
        self.config.check_index(j)?;
        if i >= j {
            return Err(Error::IndexOrder { i, j });
        }
        Ok(self
            .materialize(sample)?
            .iter()
            .map(|p| (p.block(i).clone(), p.block(j).clone()))
            .collect())
    }

    /// Γ + x for finite sets.
    pub fn shift(&self, x: &MultiPoint) -> Result<GammaSet> {
        match &self.body {
            GammaBody::Finite(pts) => {
                if x.config() != self.config {
                    return Err(Error::Config("shift vector lives in a different space".into()));
                }
                let moved = pts.iter().map(|p| p.add(x)).collect::<Result<Vec<_>>>()?;
                GammaSet::finite(self.config, moved)
            }
            GammaBody::Linear(_) => Err(Error::Unsupported("shifting a linear parameterization".into())),
        }
    }
}

/// A selector ∅ ≠ K ⊊ {0, …, N−1} (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSubset {
    members: Vec<usize>,
    n: usize,
}

impl IndexSubset {
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::Subset("K must be nonempty".into()));
        }
        if members.len() >= n {
            return Err(Error::Subset("K must be a proper subset".into()));
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= n) {
            return Err(Error::Index { index: bad, len: n });
        }
        Ok(Self { members, n })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| !self.contains(i)).collect()
    }

    /// All proper nonempty K that contain index 0. K and its complement give
    /// the same monotonicity test, so this halves the sweep.
    pub fn proper_containing_first(n: usize) -> Vec<IndexSubset> {
        let full: u64 = (1u64 << n) - 1;
        (1..full)
            .filter(|mask| mask & 1 == 1)
            .map(|mask| IndexSubset {
                members: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
                n,
            })
            .collect()
    }

    /// 1-based labels, as used in reports.
    pub fn labels(&self) -> Vec<usize> {
        self.members.iter().map(|i| i + 1).collect()
    }
}

// ---- JSON instance format ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaJson {
    config: SpaceConfig,
    body: BodyJson,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum BodyJson {
    Finite { points: Vec<Vec<Vec<f64>>> },
    Linear { matrices: Vec<Vec<Vec<f64>>> },
}

impl GammaSet {
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let raw: GammaJson = serde_json::from_value(value).map_err(|e| Error::Parse {
            path: "$".into(),
            message: e.to_string(),
        })?;
        raw.config.validate().map_err(|e| Error::Parse {
            path: "$.config".into(),
            message: e.to_string(),
        })?;
        match raw.body {
            BodyJson::Finite { points } => {
                let pts = points
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        check_shape(p, raw.config.n, raw.config.d, &format!("$.body.points[{k}]"))?;
                        MultiPoint::from_rows(p).map_err(|e| Error::Parse {
                            path: format!("$.body.points[{k}]"),
                            message: e.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                GammaSet::finite(raw.config, pts).map_err(|e| Error::Parse {
                    path: "$.body.points".into(),
                    message: e.to_string(),
                })
            }
            BodyJson::Linear { matrices } => {
                if matrices.len() != raw.config.n {
                    return Err(Error::Parse {
                        path: "$.body.matrices".into(),
                        message: format!("expected {} matrices, got {}", raw.config.n, matrices.len()),
                    });
                }
                let ms = matrices
                    .iter()
                    .enumerate()
                    .map(|(k, rows)| {
                        let path = format!("$.body.matrices[{k}]");
                        check_shape(rows, raw.config.d, raw.config.d, &path)?;
                        matrix_from_rows(rows).ok_or(Error::Parse { path, message: "ragged rows".into() })
                    })
                    .collect::<Result<Vec<_>>>()?;
                GammaSet::linear(raw.config, ms).map_err(|e| Error::Parse {
                    path: "$.body.matrices".into(),
                    message: e.to_string(),
                })
            }
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "$".into(),
            message: e.to_string(),
        })?;
        Self::from_json_value(value)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let body = match &self.body {
            GammaBody::Finite(pts) => BodyJson::Finite { points: pts.iter().map(MultiPoint::to_rows).collect() },
            GammaBody::Linear(ts) => BodyJson::Linear { matrices: ts.iter().map(matrix_to_rows).collect() },
        };
        serde_json::to_value(GammaJson { config: self.config, body }).expect("gamma serializes")
    }
}

fn check_shape(rows: &[Vec<f64>], nrows: usize, ncols: usize, path: &str) -> Result<()> {
    if rows.len() != nrows {
        return Err(Error::Parse {
            path: path.to_string(),
            message: format!("expected {nrows} rows, got {}", rows.len()),
        });
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Parse {
                path: format!("{path}[{r}]"),
                message: format!("expected {ncols} entries, got {}", row.len()),
            });
        }
    }
    Ok(())
}
