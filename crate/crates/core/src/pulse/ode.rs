//! Sparse complex matrices and the adaptive Dormand-Prince 4(5) stepper
//! used to integrate the vectorized Lindblad equation. The integrator works
//! on a block of column vectors at once (all 16 operator-basis elements of
//! a channel evolve under the same generator), stored interleaved so the
//! sparse kernel streams contiguously.

use crate::error::{Error, Result};
use crate::linalg::C64;

/// CSR matrix over complex doubles.
#[derive(Debug, Clone)]
pub struct Csr {
    pub dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl Csr {
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.retain(|t| t.2.norm_sqr() > 0.0);
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        // merge duplicates
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let Some(last) = merged.last_mut() {
                if last.0 == r && last.1 == c {
                    last.2 += v;
                    continue;
                }
            }
            merged.push((r, c, v));
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            col_idx: merged.iter().map(|t| t.1).collect(),
            values: merged.iter().map(|t| t.2).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// out += scale * (self . y) for `ncol` interleaved columns:
    /// element (i, col) lives at y[i * ncol + col].
    pub fn accumulate_multi(&self, scale: C64, y: &[C64], out: &mut [C64], ncol: usize) {
        debug_assert_eq!(y.len(), self.dim * ncol);
        for row in 0..self.dim {
            let start = self.row_ptr[row];
            let end = self.row_ptr[row + 1];
            let out_base = row * ncol;
            for k in start..end {
                let v = scale * self.values[k];
                let y_base = self.col_idx[k] * ncol;
                for c in 0..ncol {
                    out[out_base + c] += v * y[y_base + c];
                }
            }
        }
    }
}

/// Kronecker product of triplet lists: (A kron B) with A slow index.
pub fn kron_triplets(
    a: &[(usize, usize, C64)],
    b: &[(usize, usize, C64)],
    b_dim: usize,
) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &(ar, ac, av) in a {
        for &(br, bc, bv) in b {
            out.push((ar * b_dim + br, ac * b_dim + bc, av * bv));
        }
    }
    out
}

pub fn identity_triplets(dim: usize) -> Vec<(usize, usize, C64)> {
    (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect()
}

/// Dormand-Prince 4(5) with PI-free step control. `rhs(t, y, dy)` must fill
/// `dy` completely. Steps the interleaved block from t0 to t1.
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_steps: 2_000_000 }
    }
}

// Butcher tableau (Dormand & Prince 1980)
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl DormandPrince {
    pub fn integrate<F>(&self, mut rhs: F, y0: Vec<C64>, t0: f64, t1: f64) -> Result<Vec<C64>>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y0.len();
        let mut y = y0;
        let mut t = t0;
        let span = t1 - t0;
        let mut h = span / 100.0;
        let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); n]).collect();
        let mut ytmp = vec![C64::new(0.0, 0.0); n];
        let mut steps = 0usize;
        rhs(t, &y, &mut k[0]);
        while t < t1 {
            if steps > self.max_steps {
                return Err(Error::IntegrationFailed(format!(
                    "step limit exceeded at t = {t:.3e}"
                )));
            }
            steps += 1;
            if t + h > t1 {
                h = t1 - t;
            }
            for stage in 0..6 {
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, kj) in k.iter().enumerate().take(stage + 1) {
                        let a = A[stage][j];
                        if a != 0.0 {
                            acc += kj[i] * a;
                        }
                    }
                    ytmp[i] = y[i] + acc * h;
                }
                let tn = t + C[stage] * h;
                let (head, tail) = k.split_at_mut(stage + 1);
                let _ = head;
                rhs(tn, &ytmp, &mut tail[0]);
            }
            // 5th-order solution and embedded error
            let mut err_ratio: f64 = 0.0;
            for i in 0..n {
                let mut y5 = C64::new(0.0, 0.0);
                let mut y4 = C64::new(0.0, 0.0);
                for j in 0..7 {
                    if B5[j] != 0.0 {
                        y5 += k[j][i] * B5[j];
                    }
                    if B4[j] != 0.0 {
                        y4 += k[j][i] * B4[j];
                    }
                }
                let ynew = y[i] + y5 * h;
                let err = (y5 - y4).norm() * h.abs();
                let tol = self.atol + self.rtol * y[i].norm().max(ynew.norm());
                err_ratio = err_ratio.max(err / tol);
                ytmp[i] = ynew;
            }
            if err_ratio <= 1.0 {
                t += h;
                std::mem::swap(&mut y, &mut ytmp);
                // FSAL: the last stage was evaluated at (t + h, y_new)
                k.swap(0, 6);
            }
            let factor = if err_ratio > 0.0 {
                (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h *= factor;
            if h.abs() < span * 1e-14 {
                return Err(Error::IntegrationFailed(format!(
                    "step size underflow at t = {t:.3e}"
                )));
            }
        }
        Ok(y)
    }
}
