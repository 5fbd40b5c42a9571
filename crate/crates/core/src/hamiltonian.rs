//! Qubit Hamiltonian as a weighted Pauli sum, its coefficient-file format,
//! and the dense exact-diagonalization oracle.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::PauliString;
use std::collections::HashMap;
use std::path::Path;

/// Weighted sum of Pauli strings, coefficients in Hartree.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    metadata: HashMap<String, String>,
}

impl Hamiltonian {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (coeff, p) in &terms {
            if p.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "term {p} has {} qubits, expected {num_qubits}",
                    p.num_qubits()
                )));
            }
            if !coeff.is_finite() {
                return Err(Error::InvalidValue(format!("non-finite coefficient for {p}")));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::InvalidValue(format!("duplicate term {p}")));
            }
        }
        Ok(Self { num_qubits, terms, metadata: HashMap::new() })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Coefficient of the all-identity term (zero when absent).
    pub fn identity_offset(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, p)| p.is_identity())
            .map(|(c, _)| *c)
            .unwrap_or(0.0)
    }

    /// Terms other than the identity, in file order.
    pub fn sampled_terms(&self) -> Vec<(f64, PauliString)> {
        self.terms.iter().filter(|(_, p)| !p.is_identity()).cloned().collect()
    }

    pub fn metadata(&self) -> &HashMap<String, String> {
        &self.metadata
    }

    /// Parse the coefficient-file format: `# key: value` header lines, then
    /// one `PAULI coefficient` record per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = HashMap::new();
        let mut terms = Vec::new();
        let mut num_qubits = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let label = parts.next().ok_or_else(|| {
                Error::Config(format!("line {}: missing Pauli label", lineno + 1))
            })?;
            let coeff: f64 = parts
                .next()
                .ok_or_else(|| Error::Config(format!("line {}: missing coefficient", lineno + 1)))?
                .parse()
                .map_err(|e| Error::Config(format!("line {}: bad coefficient ({e})", lineno + 1)))?;
            if parts.next().is_some() {
                return Err(Error::Config(format!("line {}: trailing fields", lineno + 1)));
            }
            let pauli = PauliString::parse(label)?;
            match num_qubits {
                None => num_qubits = Some(pauli.num_qubits()),
                Some(n) if n != pauli.num_qubits() => {
                    return Err(Error::Config(format!(
                        "line {}: term width {} disagrees with {}",
                        lineno + 1,
                        pauli.num_qubits(),
                        n
                    )))
                }
                _ => {}
            }
            terms.push((coeff, pauli));
        }
        let num_qubits =
            num_qubits.ok_or_else(|| Error::Config("no Hamiltonian terms found".into()))?;
        let mut h = Self::new(num_qubits, terms)?;
        h.metadata = metadata;
        Ok(h)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Dense matrix of the full Hamiltonian.
    pub fn matrix(&self) -> CMatrix {
        let dim = 1 << self.num_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (coeff, p) in &self.terms {
            m = m.add(&p.matrix().scale(crate::linalg::C64::new(*coeff, 0.0)));
        }
        m
    }

    /// Minimum eigenvalue by dense Hermitian diagonalization.
    pub fn exact_ground_energy(&self) -> Result<f64> {
        if self.num_qubits > 10 {
            return Err(Error::InvalidValue(format!(
                "dense diagonalization capped at 10 qubits, got {}",
                self.num_qubits
            )));
        }
        let m = self.matrix();
        let dev = m.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        m.min_eigenvalue()
    }

    /// Sum_j coeff_j Tr(rho P_j); discards imaginary residue up to 1e-9.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        let dim = 1 << self.num_qubits;
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state dim {} vs Hamiltonian dim {}",
                rho.dim(),
                dim
            )));
        }
        let mut total = 0.0;
        for (coeff, p) in &self.terms {
            let tr = rho.matrix().mul(&p.matrix()).trace();
            if tr.im.abs() > 1e-9 {
                return Err(Error::InvalidValue(format!(
                    "Tr(rho {p}) has imaginary residue {:.3e}",
                    tr.im
                )));
            }
            total += coeff * tr.re;
        }
        Ok(total)
    }
}
