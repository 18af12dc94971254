//! Grid tables for pseudospectral products.
//!
//! The grids are sized so that projecting a quadratic product of retained
//! modes back onto the basis is exact (no aliasing reaches the retained
//! modes):
//! - 1D: `M = 2N` midpoints `x_j = (j + 1/2)/M`; products contain sine
//!   modes up to `2N`, which alias onto `2M - n ≥ 3N > N`.
//! - 2D: a uniform `M × M` grid with `M = 3 k_max + 1`, where `k_max` is the
//!   largest wavevector component; products of two retained fields tested
//!   against a third have components at most `3 k_max < M`.

use super::basis::{Basis, BasisKind};

#[derive(Debug, Clone)]
pub struct Collocation {
    kind: BasisKind,
    n_modes: usize,
    n_points: usize,
    /// `[component][mode][point]`
    values: Vec<f64>,
    /// `[derivative component][mode][point]`
    gradients: Vec<f64>,
    /// Quadrature weight of each point.
    weight: f64,
}

impl Collocation {
    pub fn new(basis: &Basis) -> Self {
        let n = basis.len();
        let points: Vec<[f64; 2]> = match basis.kind() {
            BasisKind::DirichletSine1d => {
                let m = 2 * n;
                (0..m).map(|j| [(j as f64 + 0.5) / m as f64, 0.0]).collect()
            }
            BasisKind::DivfreeTorus2d => {
                let k_max = basis
                    .torus_modes()
                    .iter()
                    .map(|t| t.k[0].abs().max(t.k[1].abs()))
                    .max()
                    .unwrap_or(1) as usize;
                let m = 3 * k_max + 1;
                (0..m * m)
                    .map(|idx| [(idx / m) as f64 / m as f64, (idx % m) as f64 / m as f64])
                    .collect()
            }
        };
        let n_points = points.len();
        let (n_comp, n_grad) = match basis.kind() {
            BasisKind::DirichletSine1d => (1, 1),
            BasisKind::DivfreeTorus2d => (2, 4),
        };
        let mut values = vec![0.0; n_comp * n * n_points];
        let mut gradients = vec![0.0; n_grad * n * n_points];
        for mode in 0..n {
            for (p, x) in points.iter().enumerate() {
                let v = basis.mode_value(mode, x);
                let g = basis.mode_gradient(mode, x);
                for c in 0..n_comp {
                    values[(c * n + mode) * n_points + p] = v[c];
                }
                for c in 0..n_grad {
                    gradients[(c * n + mode) * n_points + p] = g[c];
                }
            }
        }
        Self {
            kind: basis.kind(),
            n_modes: n,
            n_points,
            values,
            gradients,
            weight: 1.0 / n_points as f64,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Number of value components (1 or 2).
    pub fn components(&self) -> usize {
        self.values.len() / (self.n_modes * self.n_points)
    }

    /// Number of gradient components (1 or 4).
    pub fn gradient_components(&self) -> usize {
        self.gradients.len() / (self.n_modes * self.n_points)
    }

    fn synthesize_from(table: &[f64], n: usize, np: usize, coeffs: &[f64], out: &mut [f64]) {
        let n_comp = out.len() / np;
        for c in 0..n_comp {
            let dst = &mut out[c * np..(c + 1) * np];
            dst.fill(0.0);
            for (m, &u) in coeffs.iter().enumerate() {
                if u == 0.0 {
                    continue;
                }
                let row = &table[(c * n + m) * np..(c * n + m + 1) * np];
                for (d, r) in dst.iter_mut().zip(row) {
                    *d += u * r;
                }
            }
        }
    }

    /// Field values on the grid, `out[component * n_points + point]`.
    pub fn synthesize(&self, coeffs: &[f64], out: &mut [f64]) {
        Self::synthesize_from(&self.values, self.n_modes, self.n_points, coeffs, out);
    }

    /// Field gradient on the grid, same layout as [`Basis::mode_gradient`].
    pub fn synthesize_gradient(&self, coeffs: &[f64], out: &mut [f64]) {
        Self::synthesize_from(&self.gradients, self.n_modes, self.n_points, coeffs, out);
    }

    /// `L²` projection of grid values onto the retained modes.
    pub fn project(&self, grid: &[f64], out: &mut [f64]) {
        let n = self.n_modes;
        let np = self.n_points;
        let n_comp = grid.len() / np;
        for (m, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for c in 0..n_comp {
                let row = &self.values[(c * n + m) * np..(c * n + m + 1) * np];
                let g = &grid[c * np..(c + 1) * np];
                acc += row.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
            }
            *o = acc * self.weight;
        }
    }
}
