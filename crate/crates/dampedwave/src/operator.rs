//! Banded symmetric operators and the factorization kernels behind the
//! eigensolvers and resolvent solves.
//!
//! The discrete Schrodinger operator is the second-order central-difference
//! Dirichlet Laplacian plus a diagonal potential. In 1D it is tridiagonal;
//! on a rectangle with the first axis varying fastest it is banded with
//! bandwidth equal to the number of interior points along that axis.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::grid::{CoefficientSet, Grid};

/// Sparse symmetric operator in banded storage.
///
/// `bands[d][i]` holds entry `(i, i+d)`; the lower triangle is implied by
/// symmetry, so symmetry is exact by construction.
#[derive(Debug, Clone)]
pub struct SymmetricOperator {
    n: usize,
    bandwidth: usize,
    bands: Vec<Vec<f64>>,
}

impl SymmetricOperator {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        assert!(n > 0 && bandwidth < n);
        let bands = (0..=bandwidth).map(|d| vec![0.0; n - d]).collect();
        SymmetricOperator {
            n,
            bandwidth,
            bands,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn diag(&self) -> &[f64] {
        &self.bands[0]
    }

    /// Entry (i, j); zero outside the band.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bandwidth {
            0.0
        } else {
            self.bands[d][lo]
        }
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.bandwidth, "entry outside band");
        self.bands[d][lo] = v;
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut y: Vec<f64> = self.bands[0]
            .iter()
            .zip(x)
            .map(|(d, xi)| d * xi)
            .collect();
        for d in 1..=self.bandwidth {
            let band = &self.bands[d];
            for i in 0..self.n - d {
                let v = band[i];
                if v != 0.0 {
                    y[i] += v * x[i + d];
                    y[i + d] += v * x[i];
                }
            }
        }
        y
    }

    /// v' A v.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut q = 0.0;
        for i in 0..self.n {
            q += self.bands[0][i] * v[i] * v[i];
        }
        for d in 1..=self.bandwidth {
            let band = &self.bands[d];
            for i in 0..self.n - d {
                q += 2.0 * band[i] * v[i] * v[i + d];
            }
        }
        q
    }

    /// A + shift * I.
    pub fn shifted(&self, shift: f64) -> SymmetricOperator {
        let mut out = self.clone();
        for v in &mut out.bands[0] {
            *v += shift;
        }
        out
    }

    /// A + scale * diag(values).
    pub fn with_diagonal_added(&self, values: &[f64], scale: f64) -> SymmetricOperator {
        debug_assert_eq!(values.len(), self.n);
        let mut out = self.clone();
        for (v, w) in out.bands[0].iter_mut().zip(values) {
            *v += scale * w;
        }
        out
    }

    /// Gershgorin bounds enclosing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut radius = 0.0;
            for d in 1..=self.bandwidth {
                if i + d < self.n {
                    radius += self.bands[d][i].abs();
                }
                if i >= d {
                    radius += self.bands[d][i - d].abs();
                }
            }
            lo = lo.min(self.bands[0][i] - radius);
            hi = hi.max(self.bands[0][i] + radius);
        }
        (lo, hi)
    }

    /// Upper bound on the spectral norm (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Principal submatrix on a sorted index subset. The band never widens:
    /// compressed index distances only shrink.
    pub fn principal_submatrix(&self, indices: &[usize]) -> SymmetricOperator {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let m = indices.len();
        let mut out = SymmetricOperator::zeros(m, self.bandwidth.min(m.saturating_sub(1)));
        for p in 0..m {
            for q in p..m {
                let d = indices[q] - indices[p];
                if d > self.bandwidth {
                    break;
                }
                if q - p <= out.bandwidth {
                    out.bands[q - p][p] = self.bands[d][indices[p]];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for d in 0..=self.bandwidth {
            for i in 0..self.n - d {
                m[(i, i + d)] = self.bands[d][i];
                m[(i + d, i)] = self.bands[d][i];
            }
        }
        m
    }

    /// Number of eigenvalues strictly below `x`, by Sylvester inertia of the
    /// shifted LDL' factorization. For tridiagonal matrices this is the
    /// classical Sturm-sequence count and is reliable in floating point; for
    /// wider bands the pivot-free factorization uses a tiny-pivot safeguard.
    pub fn count_below(&self, x: f64) -> usize {
        if self.bandwidth == 1 {
            return self.sturm_count_tridiag(x);
        }
        let mut offmax: f64 = 0.0;
        for d in 1..=self.bandwidth {
            for &v in &self.bands[d] {
                offmax = offmax.max(v.abs());
            }
        }
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * offmax * offmax).max(1e-300);
        // row-wise LDL': l[d][j] = L[j+d][j] for the last `bandwidth` columns
        let bw = self.bandwidth;
        let mut dvals = vec![0.0f64; self.n];
        let mut lcols = vec![vec![0.0f64; bw]; self.n]; // lcols[j][d-1] = L[j+d][j]
        let mut count = 0usize;
        for j in 0..self.n {
            let mut dj = self.bands[0][j] - x;
            let kmin = j.saturating_sub(bw);
            for k in kmin..j {
                let l_jk = lcols[k][j - k - 1];
                dj -= l_jk * l_jk * dvals[k];
            }
            if dj.abs() < pivmin {
                dj = -pivmin;
            }
            dvals[j] = dj;
            if dj < 0.0 {
                count += 1;
            }
            for d in 1..=bw {
                let i = j + d;
                if i >= self.n {
                    break;
                }
                let mut s = if d <= self.bandwidth {
                    self.bands[d][j]
                } else {
                    0.0
                };
                let kmin_i = i.saturating_sub(bw);
                for k in kmin_i.max(kmin)..j {
                    s -= lcols[k][i - k - 1] * lcols[k][j - k - 1] * dvals[k];
                }
                lcols[j][d - 1] = s / dj;
            }
        }
        count
    }

    fn sturm_count_tridiag(&self, x: f64) -> usize {
        let diag = &self.bands[0];
        let off = &self.bands[1];
        let offmax = off.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * offmax * offmax).max(1e-300);
        let mut count = 0usize;
        let mut d = diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.n {
            let e = off[i - 1];
            d = (diag[i] - x) - e * e / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Assemble the Dirichlet Schrodinger matrix: Laplacian + diag(b) + mu diag(a).
pub fn assemble_schrodinger(
    grid: &Grid,
    coeffs: &CoefficientSet,
    mu: f64,
) -> SymmetricOperator {
    let n = grid.interior_count();
    match grid.dimension() {
        1 => {
            let h = grid.axes()[0].h;
            let inv_h2 = 1.0 / (h * h);
            let mut op = SymmetricOperator::zeros(n, 1);
            for i in 0..n {
                op.bands[0][i] = 2.0 * inv_h2 + coeffs.b[i] + mu * coeffs.a[i];
            }
            for i in 0..n - 1 {
                op.bands[1][i] = -inv_h2;
            }
            op
        }
        _ => {
            let nx = grid.axes()[0].points;
            let ny = grid.axes()[1].points;
            let inv_hx2 = 1.0 / (grid.axes()[0].h * grid.axes()[0].h);
            let inv_hy2 = 1.0 / (grid.axes()[1].h * grid.axes()[1].h);
            let mut op = SymmetricOperator::zeros(n, nx);
            for idx in 0..n {
                op.bands[0][idx] =
                    2.0 * (inv_hx2 + inv_hy2) + coeffs.b[idx] + mu * coeffs.a[idx];
            }
            for idx in 0..n - 1 {
                // x-neighbor only within the same grid row
                if (idx + 1) % nx != 0 {
                    op.bands[1][idx] = -inv_hx2;
                }
            }
            for idx in 0..n - nx {
                op.bands[nx][idx] = -inv_hy2;
            }
            let _ = ny;
            op
        }
    }
}

/// Banded Cholesky factorization of a symmetric positive definite operator.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    // l[d][j] = L[(j+d), j]
    l: Vec<Vec<f64>>,
}

impl BandedCholesky {
    /// Factor `op + shift * I`; fails if the shifted matrix is not positive
    /// definite.
    pub fn factor(op: &SymmetricOperator, shift: f64) -> Result<BandedCholesky> {
        let n = op.dim();
        let bw = op.bandwidth();
        let mut l: Vec<Vec<f64>> = (0..=bw).map(|d| vec![0.0; n - d]).collect();
        for j in 0..n {
            let mut s = op.bands[0][j] + shift;
            let kmin = j.saturating_sub(bw);
            for k in kmin..j {
                let ljk = l[j - k][k];
                s -= ljk * ljk;
            }
            if s <= 0.0 {
                return Err(Error::solver(
                    format!("Cholesky breakdown at column {j}: matrix not positive definite"),
                    s.abs(),
                ));
            }
            let ljj = s.sqrt();
            l[0][j] = ljj;
            for d in 1..=bw {
                let i = j + d;
                if i >= n {
                    break;
                }
                let mut s = op.bands[d][j];
                let kmin_i = i.saturating_sub(bw).max(kmin);
                for k in kmin_i..j {
                    s -= l[i - k][k] * l[j - k][k];
                }
                l[d][j] = s / ljj;
            }
        }
        Ok(BandedCholesky { n, bw, l })
    }

    /// Solve L L' x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let mut y = b.to_vec();
        for i in 0..self.n {
            let kmin = i.saturating_sub(self.bw);
            let mut s = y[i];
            for k in kmin..i {
                s -= self.l[i - k][k] * y[k];
            }
            y[i] = s / self.l[0][i];
        }
        for i in (0..self.n).rev() {
            let dmax = self.bw.min(self.n - 1 - i);
            let mut s = y[i];
            for d in 1..=dmax {
                s -= self.l[d][i] * y[i + d];
            }
            y[i] = s / self.l[0][i];
        }
        y
    }
}

/// Banded LU with partial pivoting over real or complex scalars; handles the
/// indefinite shifted systems behind inverse iteration.
pub struct BandedLu<T: ComplexField> {
    n: usize,
    m: usize, // original half-bandwidth; U may fill to 2m
    // ab[r][j] = A[i][j] with r = i - j + 2m
    ab: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: ComplexField<RealField = f64> + Copy> BandedLu<T> {
    /// Factor a banded matrix given by an entry callback over |i-j| <= m.
    pub fn factor(n: usize, m: usize, entry: impl Fn(usize, usize) -> T) -> Result<BandedLu<T>> {
        let rows = 3 * m + 1;
        let mut ab: Vec<Vec<T>> = (0..rows).map(|_| vec![T::zero(); n]).collect();
        for j in 0..n {
            let ilo = j.saturating_sub(m);
            let ihi = (j + m).min(n - 1);
            for i in ilo..=ihi {
                ab[i + 2 * m - j][j] = entry(i, j);
            }
        }
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            // partial pivot within the column band
            let imax = (k + m).min(n - 1);
            let mut p = k;
            let mut best = ab[2 * m][k].modulus();
            for i in k + 1..=imax {
                let v = ab[i + 2 * m - k][k].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if best < f64::MIN_POSITIVE {
                return Err(Error::solver(
                    format!("banded LU: singular pivot at column {k}"),
                    best,
                ));
            }
            if p != k {
                let jmax = (k + 2 * m).min(n - 1);
                for j in k..=jmax {
                    let rk = k + 2 * m - j;
                    let rp = p + 2 * m - j;
                    let tmp = ab[rk][j];
                    ab[rk][j] = ab[rp][j];
                    ab[rp][j] = tmp;
                }
            }
            let pivot = ab[2 * m][k];
            for i in k + 1..=imax {
                let l = ab[i + 2 * m - k][k] / pivot;
                ab[i + 2 * m - k][k] = l;
                let jmax = (k + 2 * m).min(n - 1);
                for j in k + 1..=jmax {
                    let u = ab[k + 2 * m - j][j];
                    if u != T::zero() {
                        let v = ab[i + 2 * m - j][j] - l * u;
                        ab[i + 2 * m - j][j] = v;
                    }
                }
            }
        }
        Ok(BandedLu { n, m, ab, pivots })
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        debug_assert_eq!(rhs.len(), self.n);
        let (n, m) = (self.n, self.m);
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let imax = (k + m).min(n - 1);
            let xk = x[k];
            for i in k + 1..=imax {
                let l = self.ab[i + 2 * m - k][k];
                if l != T::zero() {
                    x[i] -= l * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let jmax = (k + 2 * m).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=jmax {
                let u = self.ab[k + 2 * m - j][j];
                if u != T::zero() {
                    s -= u * x[j];
                }
            }
            x[k] = s / self.ab[2 * m][k];
        }
        x
    }
}
