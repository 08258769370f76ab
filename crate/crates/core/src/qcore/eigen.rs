//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that zeroes it.
//! Sweeps repeat until the off-diagonal Frobenius mass drops below
//! `OFF_DIAGONAL_STOP` relative to the matrix norm.

use num_complex::Complex64;

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

const OFF_DIAGONAL_STOP: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `m = V diag(values) V^dagger`, values descending and
/// the columns of `vectors` the matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct HermEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: SquareMatrix<N>,
}

impl<const N: usize> HermEigen<N> {
    /// Rebuild a matrix with the same eigenvectors and `f` applied to each
    /// eigenvalue.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SquareMatrix<N> {
        let v = &self.vectors;
        let mapped: [f64; N] = std::array::from_fn(|k| f(self.values[k]));
        SquareMatrix::from_fn(|i, j| {
            (0..N)
                .map(|k| v.0[i][k] * v.0[j][k].conj() * mapped[k])
                .sum()
        })
    }

    pub fn column(&self, k: usize) -> [Complex64; N] {
        std::array::from_fn(|i| self.vectors.0[i][k])
    }
}

fn off_diagonal_norm<const N: usize>(a: &SquareMatrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Full eigen-decomposition. Fails if `m` is not Hermitian within `tol`.
pub fn herm_eigen<const N: usize>(m: &SquareMatrix<N>, tol: f64) -> Result<HermEigen<N>> {
    let defect = m.hermitian_defect();
    if !(defect <= tol) {
        return Err(Error::NotHermitian(defect));
    }
    // Symmetrize so roundoff in the input does not feed the rotations.
    let mut a = SquareMatrix::<N>::from_fn(|i, j| {
        if i == j {
            Complex64::new(m.0[i][i].re, 0.0)
        } else {
            (m.0[i][j] + m.0[j][i].conj()) * 0.5
        }
    });
    let mut v = SquareMatrix::<N>::identity();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= OFF_DIAGONAL_STOP * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[j][j].re.total_cmp(&a.0[i][i].re));
    let values = std::array::from_fn(|k| a.0[order[k]][order[k]].re);
    let vectors = SquareMatrix::from_fn(|i, k| v.0[i][order[k]]);
    Ok(HermEigen { values, vectors })
}

/// Real spectrum of a Hermitian matrix, descending.
pub fn herm_eigenvalues<const N: usize>(m: &SquareMatrix<N>, tol: f64) -> Result<[f64; N]> {
    herm_eigen(m, tol).map(|e| e.values)
}

/// One two-sided rotation in the (p, q) plane: `a <- J^dagger a J`, `v <- v J`.
fn rotate<const N: usize>(a: &mut SquareMatrix<N>, v: &mut SquareMatrix<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let phase = apq / g;

    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * j_pp + akq * j_qp;
        a.0[k][q] = akp * j_pq + akq * j_qq;
    }
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a.0[q][k] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a.0[p][q] = Complex64::new(0.0, 0.0);
    a.0[q][p] = Complex64::new(0.0, 0.0);
    a.0[p][p].im = 0.0;
    a.0[q][q].im = 0.0;

    for k in 0..N {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * j_pp + vkq * j_qp;
        v.0[k][q] = vkp * j_pq + vkq * j_qq;
    }
}
