use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Hard cap on the number of lattice points any single sweep may visit.
pub const NODE_LIMIT: u128 = 10_000_000;

/// Uniform lattice on a box, endpoints included. Nodes are ordered
/// lexicographically by multi-index with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub steps: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, steps: Vec<usize>) -> Result<Self> {
        let g = Self { lo, hi, steps };
        g.validate()?;
        Ok(g)
    }

    /// Same interval and resolution on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], vec![steps; dim])
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.lo.len();
        if dim == 0 || self.hi.len() != dim || self.steps.len() != dim {
            return Err(Error::Config("grid bounds and steps must share a nonzero length".into()));
        }
        for k in 0..dim {
            if !(self.lo[k].is_finite() && self.hi[k].is_finite() && self.lo[k] < self.hi[k]) {
                return Err(Error::Config(format!("grid axis {k}: need finite lo < hi")));
            }
            if self.steps[k] < 2 {
                return Err(Error::Config(format!("grid axis {k}: need at least 2 nodes")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn node_count(&self) -> u128 {
        self.steps.iter().map(|&s| s as u128).product()
    }

    pub fn len(&self) -> usize {
        self.node_count() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.steps[axis] - 1) as f64
    }

    /// Largest spacing over all axes.
    pub fn max_step(&self) -> f64 {
        (0..self.dim()).map(|k| self.step(k)).fold(0.0, f64::max)
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        // Pin the last node to `hi` exactly so endpoints never drift.
        if i + 1 == self.steps[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.step(axis)
        }
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.steps[k];
            flat /= self.steps[k];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.steps).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn node(&self, flat: usize) -> Vector {
        let idx = self.multi_index(flat);
        Vector::from_iterator(self.dim(), idx.iter().enumerate().map(|(k, &i)| self.coordinate(k, i)))
    }

    pub fn nodes(&self) -> Vec<Vector> {
        (0..self.len()).map(|f| self.node(f)).collect()
    }

    /// True when the node touches a face of the box.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(&self.steps)
            .any(|(&i, &s)| i == 0 || i + 1 == s)
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.len() == self.dim() && (0..self.dim()).all(|k| x[k] >= self.lo[k] && x[k] <= self.hi[k])
    }

    pub(crate) fn guard(nodes: u128) -> Result<()> {
        if nodes > NODE_LIMIT {
            Err(Error::GridTooLarge { nodes, limit: NODE_LIMIT })
        } else {
            Ok(())
        }
    }
}
