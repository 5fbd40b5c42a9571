//! Projective-measurement sampling of Hamiltonian terms and the per-sample
//! energy estimator: summing the sM outcome table along columns gives one
//! energy value per shot index, whose spread yields the standard error.
//! The identity term enters analytically and costs no shots.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::PauliString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// M Hamiltonian terms x s outcomes of +-1 eigenvalues.
#[derive(Debug, Clone)]
pub struct ShotTable {
    pub term_order: Vec<PauliString>,
    pub coefficients: Vec<f64>,
    pub identity_offset: f64,
    /// Row-major M x s, entries in {-1, +1}.
    pub samples: Vec<Vec<i8>>,
}

impl ShotTable {
    pub fn validate(&self) -> Result<()> {
        if self.term_order.len() != self.coefficients.len()
            || self.term_order.len() != self.samples.len()
        {
            return Err(Error::DimensionMismatch("table rows disagree".into()));
        }
        let s = self.samples.first().map(|r| r.len()).unwrap_or(0);
        if s == 0 {
            return Err(Error::InvalidValue("shot table needs at least one sample".into()));
        }
        for (row, p) in self.samples.iter().zip(&self.term_order) {
            if row.len() != s {
                return Err(Error::DimensionMismatch(format!("ragged row for {p}")));
            }
            if row.iter().any(|&v| v != 1 && v != -1) {
                return Err(Error::InvalidValue(format!("non +-1 outcome for {p}")));
            }
            if p.is_identity() {
                return Err(Error::InvalidValue("identity term must not be sampled".into()));
            }
        }
        Ok(())
    }

    pub fn shots(&self) -> usize {
        self.samples.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Delimited export, one term per row: label, coefficient, outcomes.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# identity_offset\t{:.17e}\n", self.identity_offset));
        for ((p, c), row) in self.term_order.iter().zip(&self.coefficients).zip(&self.samples) {
            out.push_str(&format!("{p}\t{c:.17e}"));
            for v in row {
                out.push_str(&format!("\t{v:+}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Mean energy with its standard error and the per-term shot count.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnergyEstimate {
    pub mean: f64,
    pub sem: f64,
    pub shots_used: u64,
}

impl EnergyEstimate {
    pub fn exact(mean: f64) -> Self {
        Self { mean, sem: 0.0, shots_used: 0 }
    }
}

/// Stable stream derivation so every (term, sweep point, iteration) gets an
/// independent reproducible generator regardless of execution order.
pub fn derive_seed(base: u64, stream: &[u64]) -> u64 {
    let mut h = splitmix64(base ^ 0x6a09e667f3bcc908);
    for &s in stream {
        h = splitmix64(h ^ splitmix64(s.wrapping_add(0x9e3779b97f4a7c15)));
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Probability of the +1 outcome when measuring `p` on `rho`.
pub fn plus_probability(rho: &DensityMatrix, p: &PauliString) -> Result<f64> {
    let v = p.basis_rotation();
    let rotated = v.dagger().mul(rho.matrix()).mul(&v);
    let dim = rho.dim();
    let mut total = 0.0;
    let mut plus = 0.0;
    for k in 0..dim {
        let prob = rotated[(k, k)].re;
        total += prob;
        if p.outcome_sign(k) > 0 {
            plus += prob;
        }
    }
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidValue(format!(
            "outcome probabilities sum to {total}, expected 1"
        )));
    }
    Ok(plus.clamp(0.0, 1.0))
}

/// Draw `shots` independent +-1 eigenvalue outcomes for one term.
pub fn sample_term(
    rho: &DensityMatrix,
    p: &PauliString,
    shots: usize,
    seed: u64,
) -> Result<Vec<i8>> {
    if p.is_identity() {
        return Err(Error::InvalidValue("identity term is handled analytically".into()));
    }
    if shots == 0 {
        return Err(Error::InvalidValue("shots must be >= 1".into()));
    }
    let p_plus = plus_probability(rho, p)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..shots)
        .map(|_| if rng.random::<f64>() < p_plus { 1 } else { -1 })
        .collect())
}

/// Sample every non-identity term of `h` against `rho`.
pub fn sample_hamiltonian(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    shots_per_term: usize,
    seed: u64,
) -> Result<ShotTable> {
    let terms = h.sampled_terms();
    let mut samples = Vec::with_capacity(terms.len());
    for (idx, (_, p)) in terms.iter().enumerate() {
        samples.push(sample_term(rho, p, shots_per_term, derive_seed(seed, &[idx as u64]))?);
    }
    let table = ShotTable {
        term_order: terms.iter().map(|(_, p)| p.clone()).collect(),
        coefficients: terms.iter().map(|(c, _)| *c).collect(),
        identity_offset: h.identity_offset(),
        samples,
    };
    table.validate()?;
    Ok(table)
}

/// Column-wise estimator: one energy value per shot index, averaged, with
/// the standard error of that mean.
pub fn estimate_energy(table: &ShotTable) -> Result<EnergyEstimate> {
    table.validate()?;
    let s = table.shots();
    let mut column_energies = Vec::with_capacity(s);
    for k in 0..s {
        let e: f64 = table
            .coefficients
            .iter()
            .zip(&table.samples)
            .map(|(c, row)| c * row[k] as f64)
            .sum::<f64>()
            + table.identity_offset;
        column_energies.push(e);
    }
    let mean = column_energies.iter().sum::<f64>() / s as f64;
    let sem = if s > 1 {
        let var =
            column_energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (s as f64 - 1.0);
        (var / s as f64).sqrt()
    } else {
        0.0
    };
    Ok(EnergyEstimate { mean, sem, shots_used: s as u64 })
}

/// Percentage absolute relative error and the percentage precision obtained
/// by sliding the measured mean by one standard error; reported as the
/// half-width of that interval in relative-error units, which reduces to
/// 100 * sem / |theory|.
pub fn relative_error(measured: &EnergyEstimate, theory: f64) -> Result<(f64, f64)> {
    if theory == 0.0 {
        return Err(Error::InvalidValue("relative error undefined for zero theory value".into()));
    }
    let eps = 100.0 * (measured.mean - theory).abs() / theory.abs();
    let sigma = 100.0 * measured.sem / theory.abs();
    Ok((eps, sigma))
}
