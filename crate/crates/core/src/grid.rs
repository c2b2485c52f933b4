//! Rectangular grids over `(S, D)` and bilinearly interpolated fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice over `[0, s_max] x [0, d_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub s_max: f64,
    pub d_max: f64,
    pub n_s: usize,
    pub n_d: usize,
}

impl Grid2D {
    pub fn new(s_max: f64, d_max: f64, n_s: usize, n_d: usize) -> Result<Self> {
        let g = Grid2D { s_max, d_max, n_s, n_d };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_s < 2 || self.n_d < 2 {
            return Err(Error::validation("grids need at least two nodes per axis"));
        }
        if !(self.s_max > 0.0 && self.d_max > 0.0) || !self.s_max.is_finite() || !self.d_max.is_finite() {
            return Err(Error::validation("grid extents must be positive and finite"));
        }
        Ok(())
    }

    /// Parses `NSxND`, e.g. `64x64`, or a single `N` for a square grid.
    pub fn parse_shape(text: &str) -> Result<(usize, usize)> {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::validation(format!("grid shape must look like 64x64 or 64, got `{text}`")))
        };
        match text.split_once(['x', 'X']) {
            Some((a, b)) => Ok((num(a)?, num(b)?)),
            None => {
                let n = num(text)?;
                Ok((n, n))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n_s * self.n_d
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ds(&self) -> f64 {
        self.s_max / (self.n_s - 1) as f64
    }

    pub fn dd(&self) -> f64 {
        self.d_max / (self.n_d - 1) as f64
    }

    pub fn s_at(&self, i: usize) -> f64 {
        if i + 1 == self.n_s {
            self.s_max
        } else {
            self.ds() * i as f64
        }
    }

    pub fn d_at(&self, j: usize) -> f64 {
        if j + 1 == self.n_d {
            self.d_max
        } else {
            self.dd() * j as f64
        }
    }

    /// Flat index, `S` major.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_d + j
    }

    /// `(i, j)` of a flat index.
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k / self.n_d, k % self.n_d)
    }

    /// `(S, D)` of a flat index.
    pub fn node(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.coords(k);
        (self.s_at(i), self.d_at(j))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|k| self.node(k))
    }

    /// Whether `(s, d)` lies inside the extents, up to rounding.
    pub fn contains(&self, s: f64, d: f64) -> bool {
        let tol = 1e-12;
        s >= -tol * self.s_max && d >= -tol * self.d_max && s <= self.s_max * (1.0 + tol) && d <= self.d_max * (1.0 + tol)
    }

    /// A coarser grid over the same extents, with about `1/stride` of the
    /// nodes per axis.
    pub fn coarsened(&self, stride: usize) -> Grid2D {
        let f = |n: usize| ((n - 1) / stride.max(1) + 1).max(2);
        Grid2D { n_s: f(self.n_s), n_d: f(self.n_d), ..*self }
    }
}

/// How a field is evaluated between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Piecewise bilinear.
    Bilinear,
    /// Tensor-product Catmull-Rom cubic; continuously differentiable, with
    /// linear extrapolation for the ghost nodes past each edge.
    #[default]
    Cubic,
}

impl std::str::FromStr for Interpolation {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        match text {
            "bilinear" => Ok(Interpolation::Bilinear),
            "cubic" => Ok(Interpolation::Cubic),
            other => Err(Error::validation(format!("unknown interpolation `{other}`"))),
        }
    }
}

/// Values at the nodes of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field2D {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    #[serde(default)]
    pub scheme: Interpolation,
}

/// Catmull-Rom weights on nodes `i-1 ..= i+2` of an axis with `n` nodes, ghost
/// nodes folded into their neighbours.
#[inline]
fn cubic_weights(i: usize, t: f64, n: usize) -> [(usize, f64); 4] {
    let (t2, t3) = (t * t, t * t * t);
    let w = [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ];
    let mut out = [(i.saturating_sub(1), w[0]), (i, w[1]), (i + 1, w[2]), ((i + 2).min(n - 1), w[3])];
    if i == 0 {
        // v(-1) = 2 v(0) - v(1)
        out[0] = (0, 0.0);
        out[1].1 += 2.0 * w[0];
        out[2].1 -= w[0];
    }
    if i + 2 >= n {
        // v(n) = 2 v(n-1) - v(n-2)
        out[3] = (n - 1, 0.0);
        out[2].1 += 2.0 * w[3];
        out[1].1 -= w[3];
    }
    out
}

/// Fleet value on a grid.
pub type ValueField = Field2D;
/// Launch rate on a grid.
pub type PolicyField = Field2D;

impl Field2D {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field2D { grid, values, scheme: Interpolation::default() })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.nodes().map(|(s, d)| f(s, d)).collect();
        Field2D { grid, values, scheme: Interpolation::default() }
    }

    pub fn with_scheme(mut self, scheme: Interpolation) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Interpolated value; the flag reports clamping to the boundary.
    #[inline]
    pub fn interp_flagged(&self, s: f64, d: f64) -> (f64, bool) {
        let g = &self.grid;
        let clamped = !g.contains(s, d);
        let (fi, fj) = (
            (s.clamp(0.0, g.s_max) / g.ds()).min((g.n_s - 1) as f64),
            (d.clamp(0.0, g.d_max) / g.dd()).min((g.n_d - 1) as f64),
        );
        let i = (fi.floor() as usize).min(g.n_s - 2);
        let j = (fj.floor() as usize).min(g.n_d - 2);
        let (ts, td) = (fi - i as f64, fj - j as f64);
        if self.scheme == Interpolation::Cubic {
            let ws = cubic_weights(i, ts, g.n_s);
            let wd = cubic_weights(j, td, g.n_d);
            let mut v = 0.0;
            for &(a, wa) in &ws {
                let row = a * g.n_d;
                let mut acc = 0.0;
                for &(b, wb) in &wd {
                    acc += wb * self.values[row + b];
                }
                v += wa * acc;
            }
            return (v, clamped);
        }
        let v00 = self.at(i, j);
        let v01 = self.at(i, j + 1);
        let v10 = self.at(i + 1, j);
        let v11 = self.at(i + 1, j + 1);
        let v = (1.0 - ts) * ((1.0 - td) * v00 + td * v01) + ts * ((1.0 - td) * v10 + td * v11);
        (v, clamped)
    }

    #[inline]
    pub fn interp(&self, s: f64, d: f64) -> f64 {
        self.interp_flagged(s, d).0
    }

    /// Resamples onto another grid by interpolation.
    pub fn resample(&self, grid: Grid2D) -> Field2D {
        Field2D::from_fn(grid, |s, d| self.interp(s, d)).with_scheme(self.scheme)
    }

    pub fn sup_distance(&self, other: &Field2D) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Writes rows `S,D,<name>` in scientific notation.
    pub fn write_csv<W: std::io::Write>(&self, name: &str, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["S", "D", name])?;
        for (k, (s, d)) in self.grid.nodes().enumerate() {
            w.write_record([sci(s), sci(d), sci(self.values[k])])?;
        }
        w.flush()
    }
}

/// Full-precision scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.17e}")
}
