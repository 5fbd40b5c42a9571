//! Completely positive trace-preserving maps stored as superoperators in the
//! column-stacking convention: vec(rho)[i + j*d] = rho[i, j], so
//! vec(U rho U^dag) = (conj(U) kron U) vec(rho). Channels compose by
//! superoperator multiplication, left factor acting last.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    superop: CMatrix,
}

impl QuantumChannel {
    /// Wrap a d^2 x d^2 superoperator, checking trace preservation (1e-8)
    /// and complete positivity (Choi eigenvalues >= -1e-7).
    pub fn new(dim: usize, superop: CMatrix) -> Result<Self> {
        let ch = Self::new_unchecked(dim, superop)?;
        ch.validate()?;
        Ok(ch)
    }

    pub fn new_unchecked(dim: usize, superop: CMatrix) -> Result<Self> {
        if superop.rows() != dim * dim || superop.cols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator must be {0}x{0} for dim {dim}",
                dim * dim
            )));
        }
        Ok(Self { dim, superop })
    }

    pub fn validate(&self) -> Result<()> {
        let tp = self.trace_preservation_deviation();
        if tp > 1e-8 {
            return Err(Error::InvalidChannel(format!(
                "trace preservation violated by {tp:.3e}"
            )));
        }
        let min_ev = self.choi().min_eigenvalue()?;
        if min_ev < -1e-7 {
            return Err(Error::InvalidChannel(format!(
                "Choi eigenvalue {min_ev:.3e} below tolerance"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn superoperator(&self) -> &CMatrix {
        &self.superop
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, superop: CMatrix::identity(dim * dim) }
    }

    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        let dev = u.unitarity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { dim: u.rows(), superop: u.conj().kron(u) })
    }

    pub fn depolarizing(dim: usize) -> Self {
        // rho -> I/d * Tr(rho): S[(i + j d), (k + l d)] = delta_ij delta_kl / d
        let d2 = dim * dim;
        let mut s = CMatrix::zeros(d2, d2);
        for i in 0..dim {
            for k in 0..dim {
                s[(i + i * dim, k + k * dim)] = C64::new(1.0 / dim as f64, 0.0);
            }
        }
        Self { dim, superop: s }
    }

    /// Apply to a basis element |i><j| (column i + j*d of the superoperator).
    pub fn apply_basis_element(&self, i: usize, j: usize) -> CMatrix {
        let d = self.dim;
        let src = i + j * d;
        let col: Vec<C64> = (0..d * d).map(|r| self.superop[(r, src)]).collect();
        CMatrix::unvectorize(d, &col)
    }

    /// Apply to a density matrix; output symmetrized and renormalized to
    /// absorb the 1e-8-level drift composition accumulates.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel dim {} vs state dim {}",
                self.dim,
                rho.dim()
            )));
        }
        let out = self.superop.mul_vec(&rho.matrix().vectorize());
        let m = CMatrix::unvectorize(self.dim, &out);
        let herm = m.add(&m.dagger()).scale(C64::new(0.5, 0.0));
        let tr = herm.trace().re;
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidChannel(format!("output trace {tr} drifted")));
        }
        DensityMatrix::new(herm.scale(C64::new(1.0 / tr, 0.0)))
    }

    /// Compose so that `self` acts after `earlier`.
    pub fn after(&self, earlier: &QuantumChannel) -> Result<QuantumChannel> {
        if self.dim != earlier.dim {
            return Err(Error::DimensionMismatch("channel dims differ".into()));
        }
        Ok(QuantumChannel { dim: self.dim, superop: self.superop.mul(&earlier.superop) })
    }

    /// Normalized Choi state (trace 1): (1/d) sum_ij |i><j| (x) L(|i><j|).
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut c = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let block = self.apply_basis_element(i, j);
                for r in 0..d {
                    for s in 0..d {
                        c[(i * d + r, j * d + s)] = block[(r, s)] / d as f64;
                    }
                }
            }
        }
        c
    }

    pub fn trace_preservation_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let tr = self.apply_basis_element(i, j).trace();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((tr - C64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// 1 - lambda_max of the Choi state; zero for a unitary channel.
    pub fn non_unitarity(&self) -> Result<f64> {
        let evs = self.choi().hermitian_eigen()?.0;
        Ok((1.0 - evs[evs.len() - 1]).max(0.0))
    }

    /// Entanglement fidelity against an ideal unitary:
    /// F = <Phi| (U^dag L(.) U (x) id)(|Phi><Phi|) |Phi>.
    pub fn entanglement_fidelity(&self, ideal: &CMatrix) -> Result<f64> {
        if ideal.rows() != self.dim || ideal.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "ideal unitary {}x{} vs channel dim {}",
                ideal.rows(),
                ideal.cols(),
                self.dim
            )));
        }
        let d = self.dim;
        let udag = ideal.dagger();
        let mut f = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                let twisted = udag.mul(&self.apply_basis_element(i, j)).mul(ideal);
                f += twisted[(i, j)];
            }
        }
        let f = f.re / (d * d) as f64;
        Ok(f.clamp(0.0, 1.0))
    }

    /// Structured text dump: dim, then row-major complex entries.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        let d2 = self.dim * self.dim;
        for r in 0..d2 {
            let row: Vec<String> = (0..d2)
                .map(|c| {
                    let v = self.superop[(r, c)];
                    format!("{:+.17e}{:+.17e}j", v.re, v.im)
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Embed a single-qubit channel on one qubit of a two-qubit register
    /// (qubit 0 is the leftmost tensor factor).
    pub fn embed_on_qubit(&self, target: usize, num_qubits: usize) -> Result<QuantumChannel> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch("embedding expects a single-qubit channel".into()));
        }
        if num_qubits != 2 || target >= 2 {
            return Err(Error::InvalidValue("embedding supports 2-qubit registers".into()));
        }
        let d = 4;
        let mut s = CMatrix::zeros(d * d, d * d);
        // act on each two-qubit basis element, which factors across qubits
        for i in 0..d {
            for j in 0..d {
                // split indices into (qubit0, qubit1) with qubit 0 leftmost
                let (i0, i1) = (i >> 1, i & 1);
                let (j0, j1) = (j >> 1, j & 1);
                let (li, lj, oi, oj) = if target == 0 { (i0, j0, i1, j1) } else { (i1, j1, i0, j0) };
                let block = self.apply_basis_element(li, lj);
                for r in 0..2 {
                    for c in 0..2 {
                        let v = block[(r, c)];
                        if v.norm_sqr() == 0.0 {
                            continue;
                        }
                        let (row_full, col_full) = if target == 0 {
                            ((r << 1) | oi, (c << 1) | oj)
                        } else {
                            ((oi << 1) | r, (oj << 1) | c)
                        };
                        s[(row_full + col_full * d, i + j * d)] += v;
                    }
                }
            }
        }
        QuantumChannel::new_unchecked(4, s)
    }
}
