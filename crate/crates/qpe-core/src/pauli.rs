//! Pauli-string Hamiltonians and the random Heisenberg spin-glass model.
//!
//! The model is an all-to-all two-site Heisenberg glass on `n` sites:
//!
//!   H = Σ_{i<j} ( J^x_ij σ^x_i σ^x_j + J^y_ij σ^y_i σ^y_j + J^z_ij σ^z_i σ^z_j )
//!
//! with every coupling J^α_ij drawn independently and uniformly from {−1, +1}.
//! The interaction graph is the clique on n sites, so there are exactly
//! 3·n(n−1)/2 terms.
//!
//! Term order is canonical and fixed: pairs (i, j) with i < j in lexicographic
//! order, and X, Y, Z within each pair. Product-formula circuits depend on the
//! term order, so the canonical order makes every downstream result
//! reproducible; no reordering is ever applied.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest site count for which dense 2^n matrices are constructed.
pub const MAX_DENSE_SITES: usize = 12;

/// Single-site Pauli operator label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn label(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// A weighted Pauli string: `coefficient · ⊗_site axes[site]`.
///
/// The coefficient is real, so any sum of terms is Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    axes: Vec<PauliAxis>,
    coefficient: f64,
}

impl PauliTerm {
    /// Build a term from a dense per-site axis list.
    pub fn new(axes: Vec<PauliAxis>, coefficient: f64) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("Pauli term must cover at least one site"));
        }
        if !coefficient.is_finite() {
            return Err(Error::invalid(format!(
                "Pauli coefficient must be finite, got {coefficient}"
            )));
        }
        Ok(Self { axes, coefficient })
    }

    /// Two-site term `coefficient · σ^axis_i σ^axis_j` on an `n`-site register.
    pub fn two_site(
        n: usize,
        i: usize,
        j: usize,
        axis: PauliAxis,
        coefficient: f64,
    ) -> Result<Self> {
        if i == j || i >= n || j >= n {
            return Err(Error::invalid(format!(
                "two-site term needs distinct sites within 0..{n}, got ({i}, {j})"
            )));
        }
        let mut axes = vec![PauliAxis::I; n];
        axes[i] = axis;
        axes[j] = axis;
        Self::new(axes, coefficient)
    }

    /// Single-site term on an `n`-site register.
    pub fn single_site(n: usize, site: usize, axis: PauliAxis, coefficient: f64) -> Result<Self> {
        if site >= n {
            return Err(Error::invalid(format!(
                "site {site} out of range for {n} sites"
            )));
        }
        let mut axes = vec![PauliAxis::I; n];
        axes[site] = axis;
        Self::new(axes, coefficient)
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn num_sites(&self) -> usize {
        self.axes.len()
    }

    /// Non-identity sites in ascending order, with their axes.
    pub fn support(&self) -> Vec<(usize, PauliAxis)> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != PauliAxis::I)
            .map(|(s, a)| (s, *a))
            .collect()
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|a| **a != PauliAxis::I).count()
    }
}

/// A Pauli-sum Hamiltonian on `n` sites.
///
/// [`SpinGlassHamiltonian::generate`] produces the random ±1 Heisenberg glass;
/// [`SpinGlassHamiltonian::from_terms`] admits arbitrary term lists for
/// reference Hamiltonians (single terms, commuting sums) used in validation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinGlassHamiltonian {
    n: usize,
    seed: u64,
    terms: Vec<PauliTerm>,
}

impl SpinGlassHamiltonian {
    /// Generate the seeded random Heisenberg spin glass on `n ≥ 2` sites.
    ///
    /// Deterministic in `(n, seed)`: coupling `k` (canonical term index) is
    /// drawn from its own ChaCha8 sub-stream, so instances are reproducible
    /// across platforms and independent of generation order.
    pub fn generate(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!(
                "spin glass needs at least 2 sites, got {n}"
            )));
        }
        let mut terms = Vec::with_capacity(3 * n * (n - 1) / 2);
        let mut index = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(index);
                    let coeff = if rng.next_u64() >> 63 == 0 { 1.0 } else { -1.0 };
                    terms.push(PauliTerm::two_site(n, i, j, axis, coeff)?);
                    index += 1;
                }
            }
        }
        Ok(Self { n, seed, terms })
    }

    /// Build a Hamiltonian from an explicit term list.
    ///
    /// The `seed` is carried only as provenance metadata for serialization.
    pub fn from_terms(n: usize, seed: u64, terms: Vec<PauliTerm>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Hamiltonian needs at least one site"));
        }
        for t in &terms {
            if t.num_sites() != n {
                return Err(Error::invalid(format!(
                    "term covers {} sites, Hamiltonian has {n}",
                    t.num_sites()
                )));
            }
        }
        Ok(Self { n, seed, terms })
    }

    pub fn num_sites(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Number of interaction-graph edges, n(n−1)/2 for the clique.
    pub fn edge_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Σ|coefficients|; an upper bound on the spectral norm ‖H‖∞.
    ///
    /// For generated instances this is 3·|E|·|J| = 3·n(n−1)/2.
    pub fn coefficient_one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Dense 2^n × 2^n Hermitian matrix of the Hamiltonian.
    ///
    /// Site s maps to index bit s (site 0 is the least-significant bit).
    /// Guarded to n ≤ 12.
    pub fn to_dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_SITES {
            return Err(Error::resource(format!(
                "dense matrix construction limited to {MAX_DENSE_SITES} sites, got {}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.terms {
            let support = term.support();
            for col in 0..dim {
                // Each Pauli string maps a basis state to exactly one basis
                // state with a phase in {±1, ±i}.
                let mut row = col;
                let mut phase = Complex64::new(term.coefficient, 0.0);
                for &(site, axis) in &support {
                    let bit = (col >> site) & 1;
                    match axis {
                        PauliAxis::I => {}
                        PauliAxis::X => row ^= 1 << site,
                        PauliAxis::Y => {
                            row ^= 1 << site;
                            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                            phase *= if bit == 0 {
                                Complex64::new(0.0, 1.0)
                            } else {
                                Complex64::new(0.0, -1.0)
                            };
                        }
                        PauliAxis::Z => {
                            if bit == 1 {
                                phase = -phase;
                            }
                        }
                    }
                }
                m[(row, col)] += phase;
            }
        }
        Ok(m)
    }

    /// Serialize to the instance interchange schema.
    ///
    /// Only valid for Hamiltonians whose every term is a two-site same-axis
    /// string (always true for generated instances).
    pub fn to_record(&self) -> Result<InstanceRecord> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let support = t.support();
            let [(i, ai), (j, aj)] = support.as_slice() else {
                return Err(Error::invalid("instance schema covers two-site terms only"));
            };
            if ai != aj {
                return Err(Error::invalid(
                    "instance schema covers same-axis pair terms only",
                ));
            }
            if t.coefficient != 1.0 && t.coefficient != -1.0 {
                return Err(Error::invalid(
                    "instance schema covers ±1 coefficients only",
                ));
            }
            terms.push(TermRecord {
                sites: [*i, *j],
                axis: ai.label().to_string(),
                coeff: t.coefficient as i8,
            });
        }
        Ok(InstanceRecord {
            n: self.n,
            seed: self.seed,
            terms,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record()?)?)
    }

    pub fn from_record(record: &InstanceRecord) -> Result<Self> {
        let mut terms = Vec::with_capacity(record.terms.len());
        for t in &record.terms {
            let axis = match t.axis.as_str() {
                "X" => PauliAxis::X,
                "Y" => PauliAxis::Y,
                "Z" => PauliAxis::Z,
                other => {
                    return Err(Error::invalid(format!("unknown axis label {other:?}")));
                }
            };
            if t.coeff != 1 && t.coeff != -1 {
                return Err(Error::invalid(format!(
                    "coefficient must be ±1, got {}",
                    t.coeff
                )));
            }
            terms.push(PauliTerm::two_site(
                record.n,
                t.sites[0],
                t.sites[1],
                axis,
                f64::from(t.coeff),
            )?);
        }
        Self::from_terms(record.n, record.seed, terms)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let record: InstanceRecord = serde_json::from_str(json)?;
        Self::from_record(&record)
    }
}

/// JSON interchange form of a spin-glass instance:
/// `{n, seed, terms: [{sites: [i, j], axis: "X|Y|Z", coeff: ±1}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub n: usize,
    pub seed: u64,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub sites: [usize; 2],
    pub axis: String,
    pub coeff: i8,
}
