use num_complex::Complex64;

use super::settings::Party;
use crate::qcore::{ThreeQubitPureState, UnitVector, PAULIS};

/// `T[i][j][k] = <sigma_i (x) sigma_j (x) sigma_k>` with axes x, y, z = 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationTensor {
    pub entries: [[[f64; 3]; 3]; 3],
}

pub fn correlation_tensor(s: &ThreeQubitPureState) -> CorrelationTensor {
    let psi = s.amplitudes();
    let mut entries = [[[0.0; 3]; 3]; 3];
    for (i, si) in PAULIS.iter().enumerate() {
        for (j, sj) in PAULIS.iter().enumerate() {
            for (k, sk) in PAULIS.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..8 {
                    if psi[x] == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for y in 0..8 {
                        let e = si.0[x >> 2][y >> 2] * sj.0[(x >> 1) & 1][(y >> 1) & 1] * sk.0[x & 1][y & 1];
                        acc += psi[x].conj() * e * psi[y];
                    }
                }
                entries[i][j][k] = acc.re;
            }
        }
    }
    CorrelationTensor { entries }
}

impl CorrelationTensor {
    /// Axes order `xyz`, e.g. `get(0, 0, 2)` is `<X X Z>`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries[i][j][k]
    }

    /// `<(a.sigma) (b.sigma) (c.sigma)>`
    pub fn correlator(&self, a: &UnitVector, b: &UnitVector, c: &UnitVector) -> f64 {
        let (a, b, c) = (a.cartesian(), b.cartesian(), c.cartesian());
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    s += a[i] * b[j] * c[k] * self.entries[i][j][k];
                }
            }
        }
        s
    }

    /// Contract every slot but `free`'s; `u`, `v` are the remaining two
    /// parties' directions in A, B, C order. The correlator equals the dot
    /// product of the result with `free`'s direction.
    pub fn contract_except(&self, free: Party, u: &UnitVector, v: &UnitVector) -> [f64; 3] {
        let (u, v) = (u.cartesian(), v.cartesian());
        let mut out = [0.0; 3];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for p in 0..3 {
                for q in 0..3 {
                    let t = match free {
                        Party::A => self.entries[m][p][q],
                        Party::B => self.entries[p][m][q],
                        Party::C => self.entries[p][q][m],
                    };
                    s += u[p] * v[q] * t;
                }
            }
            *slot = s;
        }
        out
    }
}
