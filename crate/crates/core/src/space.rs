//! Product space X = (ℝᵈ)ᴺ, its points, the classical multi-marginal cost and
//! the diagonal geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Number of marginals `n` (at least 2) and the shared marginal dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
}

impl SpaceConfig {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        let cfg = Self { n, d };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("need at least 2 marginals, got {}", self.n)));
        }
        if self.d < 1 {
            return Err(Error::Config("marginal dimension must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::Index { index: i, len: self.n })
        } else {
            Ok(())
        }
    }
}

/// One element x = (x₁, …, x_N) of X.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoint {
    blocks: Vec<Vector>,
}

impl MultiPoint {
    /// Builds a point from its blocks; all blocks must share one dimension and
    /// hold finite entries.
    pub fn new(blocks: Vec<Vector>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::Config(format!("need at least 2 blocks, got {}", blocks.len())));
        }
        let d = blocks[0].len();
        if d == 0 {
            return Err(Error::Config("blocks must be nonempty".into()));
        }
        if let Some(k) = blocks.iter().position(|b| b.len() != d) {
            return Err(Error::Config(format!(
                "block {k} has dimension {} but block 0 has {d}",
                blocks[k].len()
            )));
        }
        if blocks.iter().any(|b| b.iter().any(|v| !v.is_finite())) {
            return Err(Error::Config("non-finite coordinate".into()));
        }
        Ok(Self { blocks })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    /// Scalar marginals (d = 1).
    pub fn scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Vector::from_element(1, v)).collect())
    }

    pub fn zeros(cfg: SpaceConfig) -> Self {
        Self { blocks: vec![Vector::zeros(cfg.d); cfg.n] }
    }

    pub fn config(&self) -> SpaceConfig {
        SpaceConfig { n: self.blocks.len(), d: self.blocks[0].len() }
    }

    pub fn blocks(&self) -> &[Vector] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &Vector {
        &self.blocks[i]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.blocks.iter().map(|b| b.iter().copied().collect()).collect()
    }

    pub fn norm_squared(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    pub fn add(&self, other: &MultiPoint) -> Result<MultiPoint> {
        self.same_config(other)?;
        Ok(Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &MultiPoint) -> Result<MultiPoint> {
        self.same_config(other)?;
        Ok(Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_config(&self, other: &MultiPoint) -> Result<()> {
        if self.config() != other.config() {
            return Err(Error::Config(format!(
                "points live in different spaces: {:?} vs {:?}",
                self.config(),
                other.config()
            )));
        }
        Ok(())
    }

    /// Sum of the blocks with indices in `members`.
    pub fn partial_sum(&self, members: impl IntoIterator<Item = usize>) -> Vector {
        let mut acc = Vector::zeros(self.blocks[0].len());
        for i in members {
            acc += &self.blocks[i];
        }
        acc
    }

    /// Exact bitwise equality of all coordinates.
    pub(crate) fn bits_eq(&self, other: &MultiPoint) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
            })
    }
}

/// c(x) = Σ_{i<j} ⟨x_i, x_j⟩, summed with i ascending then j.
pub fn cost_eval(x: &MultiPoint) -> f64 {
    let b = &x.blocks;
    let mut total = 0.0;
    for i in 0..b.len() {
        for j in (i + 1)..b.len() {
            total += b[i].dot(&b[j]);
        }
    }
    total
}

/// S(x) = Σ_i x_i.
pub fn sum_map(x: &MultiPoint) -> Vector {
    x.partial_sum(0..x.blocks.len())
}

/// q(v) = ½‖v‖².
pub fn half_sq(v: &Vector) -> f64 {
    0.5 * v.norm_squared()
}

/// Orthogonal projection onto Δ^⊥ = {Σ x_i = 0}: removes the block mean.
pub fn delta_perp_project(x: &MultiPoint) -> MultiPoint {
    let mean = sum_map(x) / x.blocks.len() as f64;
    MultiPoint {
        blocks: x.blocks.iter().map(|b| b - &mean).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rotation, vector};
    use std::f64::consts::PI;

    #[test]
    fn cost_of_123() {
        let x = MultiPoint::scalars(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(cost_eval(&x), 11.0);
        let s = sum_map(&x);
        let identity = half_sq(&s) - x.blocks().iter().map(half_sq).sum::<f64>();
        assert_eq!(identity, 11.0);
    }

    #[test]
    fn zero_point() {
        let cfg = SpaceConfig::new(4, 3).unwrap();
        let z = MultiPoint::zeros(cfg);
        assert_eq!(cost_eval(&z), 0.0);
        assert_eq!(sum_map(&z), Vector::zeros(3));
    }

    #[test]
    fn sum_map_examples() {
        let x = MultiPoint::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(sum_map(&x), vector(&[2.0, 2.0]));

        let e1 = vector(&[1.0, 0.0]);
        let t = rotation(-PI / 2.0) * (3f64.sqrt() / 2.0);
        let x = MultiPoint::new(vec![e1.clone(), &t * &e1, &t * &e1]).unwrap();
        let s = sum_map(&x);
        assert!((s[0] - 1.0).abs() < 1e-15);
        assert!((s[1] + 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn delta_perp_examples() {
        let x = MultiPoint::scalars(&[3.0, 1.0]).unwrap();
        assert_eq!(delta_perp_project(&x).to_rows(), vec![vec![1.0], vec![-1.0]]);
        let x = MultiPoint::scalars(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(delta_perp_project(&x).to_rows(), vec![vec![-1.0], vec![0.0], vec![1.0]]);
        let x = MultiPoint::scalars(&[2.5, 2.5, 2.5]).unwrap();
        assert_eq!(delta_perp_project(&x).norm_squared(), 0.0);
    }

    #[test]
    fn malformed_points_rejected() {
        assert!(MultiPoint::scalars(&[1.0]).is_err());
        assert!(MultiPoint::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(MultiPoint::scalars(&[1.0, f64::NAN]).is_err());
        assert!(SpaceConfig::new(1, 2).is_err());
        assert!(SpaceConfig::new(2, 0).is_err());
    }
}
