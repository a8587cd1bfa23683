//! Functions known only at the nodes of a uniform lattice, and their discrete
//! Legendre–Fenchel transforms.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::Vector;

/// Node values of a function; `f64::INFINITY` marks nodes outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::Config("grid values must be finite or +inf".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&Vector) -> f64) -> Result<Self> {
        Grid::guard(grid.node_count())?;
        let values = grid.nodes().iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    /// Value at `x` if `x` is a node (to within 1e-12 per axis), +∞ otherwise.
    pub fn eval(&self, x: &Vector) -> f64 {
        match self.node_of(x) {
            Some(k) => self.values[k],
            None => f64::INFINITY,
        }
    }

    pub fn node_of(&self, x: &Vector) -> Option<usize> {
        if x.len() != self.grid.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            let h = self.grid.step(k);
            let pos = (x[k] - self.grid.lo[k]) / h;
            let r = pos.round();
            if r < 0.0 || r as usize >= self.grid.steps[k] || (pos - r).abs() * h > 1e-12 * (1.0 + x[k].abs()) {
                return None;
            }
            idx.push(r as usize);
        }
        Some(self.grid.flat_index(&idx))
    }

    /// First node minimizing f(node) + ½‖s − node‖², and the minimum.
    pub fn prox_with_value(&self, s: &Vector) -> Result<(Vector, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, &v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let val = v + 0.5 * (s - self.grid.node(k)).norm_squared();
            if best.is_none_or(|(_, b)| val < b) {
                best = Some((k, val));
            }
        }
        let (k, val) = best.ok_or_else(|| Error::Domain("grid function is +inf everywhere".into()))?;
        Ok((self.grid.node(k), val))
    }

    /// Largest finite-difference slope between neighbouring finite nodes.
    pub fn slope_bound(&self) -> f64 {
        let mut best: f64 = 0.0;
        for flat in 0..self.grid.len() {
            let v = self.values[flat];
            if !v.is_finite() {
                continue;
            }
            let idx = self.grid.multi_index(flat);
            for axis in 0..self.grid.dim() {
                if idx[axis] + 1 < self.grid.steps[axis] {
                    let mut j = idx.clone();
                    j[axis] += 1;
                    let w = self.values[self.grid.flat_index(&j)];
                    if w.is_finite() {
                        best = best.max((w - v).abs() / self.grid.step(axis));
                    }
                }
            }
        }
        best
    }
}

/// Discrete conjugate on a dual grid with the dual nodes whose supremum was
/// still increasing at the primal boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConjugate {
    pub func: GridFn,
    pub boundary_nodes: Vec<usize>,
}

/// u ↦ max over primal nodes of ⟨u, x⟩ − f(x), by direct enumeration.
pub fn legendre_direct(f: &GridFn, dual: &Grid) -> Result<GridConjugate> {
    check_dims(f, dual)?;
    Grid::guard(f.grid.node_count().saturating_mul(dual.node_count()))?;
    let primal = f.grid.nodes();
    let results: Vec<(f64, Option<usize>)> = (0..dual.len())
        .into_par_iter()
        .map(|k| {
            let u = dual.node(k);
            let mut best = (f64::NEG_INFINITY, None);
            for (j, x) in primal.iter().enumerate() {
                let fx = f.values[j];
                if !fx.is_finite() {
                    continue;
                }
                let v = u.dot(x) - fx;
                if v > best.0 {
                    best = (v, Some(j));
                }
            }
            best
        })
        .collect();
    finish(f, dual, &results)
}

/// One-dimensional transform through the lower convex hull of the node
/// values, linear in the number of primal plus dual nodes.
pub fn legendre_hull_1d(f: &GridFn, dual: &Grid) -> Result<GridConjugate> {
    check_dims(f, dual)?;
    if f.grid.dim() != 1 {
        return Err(Error::Unsupported("hull transform is one-dimensional".into()));
    }
    let xs: Vec<f64> = (0..f.grid.len()).map(|k| f.grid.coordinate(0, k)).collect();
    let finite: Vec<usize> = (0..xs.len()).filter(|&k| f.values[k].is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::Domain("grid function is +inf everywhere".into()));
    }
    // lower hull, left to right; collinear points are dropped
    let mut hull: Vec<usize> = Vec::new();
    for &k in &finite {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[b] - xs[a]) * (f.values[k] - f.values[a]) - (f.values[b] - f.values[a]) * (xs[k] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let slope = |p: usize| (f.values[hull[p + 1]] - f.values[hull[p]]) / (xs[hull[p + 1]] - xs[hull[p]]);
    let mut results = Vec::with_capacity(dual.len());
    let mut p = 0;
    for k in 0..dual.len() {
        let u = dual.coordinate(0, k);
        while p + 1 < hull.len() && u > slope(p) {
            p += 1;
        }
        while p > 0 && u <= slope(p - 1) {
            p -= 1;
        }
        let j = hull[p];
        results.push((u * xs[j] - f.values[j], Some(j)));
    }
    finish(f, dual, &results)
}

fn check_dims(f: &GridFn, dual: &Grid) -> Result<()> {
    if f.grid.dim() != dual.dim() {
        return Err(Error::Config("primal and dual grids differ in dimension".into()));
    }
    Ok(())
}

fn finish(f: &GridFn, dual: &Grid, results: &[(f64, Option<usize>)]) -> Result<GridConjugate> {
    let mut boundary_nodes = Vec::new();
    let mut values = Vec::with_capacity(results.len());
    for (k, &(v, arg)) in results.iter().enumerate() {
        values.push(if v.is_finite() { v } else { f64::INFINITY });
        if let Some(j) = arg {
            if still_rising(f, &dual.node(k), j, v) {
                boundary_nodes.push(k);
            }
        }
    }
    Ok(GridConjugate { func: GridFn::new(dual.clone(), values)?, boundary_nodes })
}

/// True when the maximizer sits on a face of the primal box and beats its
/// inward neighbour strictly, so the supremum would keep growing beyond the box.
fn still_rising(f: &GridFn, u: &Vector, j: usize, best: f64) -> bool {
    let g = &f.grid;
    let idx = g.multi_index(j);
    (0..g.dim()).any(|axis| {
        let inward = if idx[axis] == 0 {
            1isize
        } else if idx[axis] + 1 == g.steps[axis] {
            -1
        } else {
            return false;
        };
        let mut n = idx.clone();
        n[axis] = (n[axis] as isize + inward) as usize;
        let nf = g.flat_index(&n);
        let fv = f.values[nf];
        let neighbour = if fv.is_finite() { u.dot(&g.node(nf)) - fv } else { f64::NEG_INFINITY };
        best - neighbour > 1e-12 * (1.0 + best.abs())
    })
}
