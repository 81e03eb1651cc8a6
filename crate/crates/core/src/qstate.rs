//! Dense state and operator representation.
//!
//! Basis ordering is big-endian: qubit 1 is the most significant bit of the
//! basis index, so `|i_1 i_2 ... i_n>` has index `sum_k i_k 2^(n-k)`. Qubit
//! indices in the public API are 1-based.

use nalgebra::{DMatrix, Matrix2};

use crate::{Error, Result, C64};

/// Default cap on the number of qubits for dense representations.
pub const DEFAULT_MAX_QUBITS: usize = 8;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QSTFIDLAB_MAX_QUBITS";

/// Absolute tolerance for normalization, trace and Hermiticity checks.
pub const STATE_TOL: f64 = 1e-12;

/// Eigenvalues of a density matrix may dip this far below zero.
pub const PSD_TOL: f64 = 1e-10;

/// Current dense-representation cap.
pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

pub(crate) fn check_cap(n_qubits: usize) -> Result<()> {
    let cap = max_qubits();
    if n_qubits > cap {
        return Err(Error::DimensionCap { n_qubits, cap });
    }
    Ok(())
}

/// Bit mask of a 1-based qubit index inside an `n`-qubit basis index.
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    debug_assert!(qubit >= 1 && qubit <= n_qubits);
    1 << (n_qubits - qubit)
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Shape(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_cap(n)?;
    Ok(n)
}

/// Normalized pure state over `2^n` basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them. Amplitudes whose
    /// squared norm is already 1 to within a few ulps are kept bit for bit.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() {
            return Err(Error::Degenerate("non-finite amplitudes".into()));
        }
        if norm_sq == 0.0 {
            return Err(Error::Degenerate("zero vector".into()));
        }
        let amplitudes = if (norm_sq - 1.0).abs() <= 4.0 * f64::EPSILON {
            amplitudes
        } else {
            let scale = norm_sq.sqrt().recip();
            amplitudes.into_iter().map(|a| a * scale).collect()
        };
        Ok(Self { n_qubits, amplitudes })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index>` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Shape("zero qubits".into()));
        }
        check_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Index(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps amplitudes already known to be normalized with a valid length.
    pub(crate) fn from_normalized(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "inner product of {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n_qubits + other.n_qubits;
        check_cap(n)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Self::from_normalized(n, amplitudes))
    }

    /// Applies a 2×2 operator to one qubit (1-based) in place.
    pub fn apply_single_qubit(&mut self, qubit: usize, op: &Matrix2<C64>) -> Result<()> {
        if qubit == 0 || qubit > self.n_qubits {
            return Err(Error::Index(format!(
                "qubit {qubit} out of range 1..={}",
                self.n_qubits
            )));
        }
        self.apply_single_qubit_unchecked(qubit, op);
        Ok(())
    }

    pub(crate) fn apply_single_qubit_unchecked(&mut self, qubit: usize, op: &Matrix2<C64>) {
        let mask = qubit_mask(self.n_qubits, qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask != 0 {
                continue;
            }
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | mask];
            self.amplitudes[i] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
            self.amplitudes[i | mask] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
        }
    }

    /// Outer product `|ψ><ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        density_from_pure(self)
    }
}

/// `ρ = |ψ><ψ|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let d = psi.dim();
    let a = psi.amplitudes();
    let entries = DMatrix::from_fn(d, d, |i, j| a[i] * a[j].conj());
    DensityMatrix {
        n_qubits: psi.n_qubits(),
        entries,
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates and wraps a `2^n × 2^n` matrix.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Shape(format!(
                "{}x{} matrix is not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let n_qubits = qubits_for_len(entries.nrows())?;
        let rho = Self { n_qubits, entries };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_entries_unchecked(n_qubits: usize, entries: DMatrix<C64>) -> Self {
        debug_assert_eq!(entries.nrows(), 1 << n_qubits);
        Self { n_qubits, entries }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Shape("zero qubits".into()));
        }
        check_cap(n_qubits)?;
        let d = 1usize << n_qubits;
        let entries = DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Ok(Self { n_qubits, entries })
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                let a = self.entries[(i, j)];
                let b = self.entries[(j, i)].conj();
                if (a - b).norm() > STATE_TOL {
                    return Err(Error::Domain(format!("matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::Domain(format!("trace {tr} differs from 1")));
        }
        let min_eig = min_hermitian_eigenvalue(&self.entries);
        if min_eig < -PSD_TOL {
            return Err(Error::Domain(format!("matrix has negative eigenvalue {min_eig}")));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<ψ|ρ|ψ>` without clamping.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "{}-qubit state against {}-qubit density matrix",
                psi.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(self.expectation_unchecked(psi.amplitudes()))
    }

    pub(crate) fn expectation_unchecked(&self, a: &[C64]) -> f64 {
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            let mut row = C64::new(0.0, 0.0);
            for (j, aj) in a.iter().enumerate().take(d) {
                row += self.entries[(i, j)] * aj;
            }
            acc += a[i].conj() * row;
        }
        acc.re
    }

    /// Reduced state on the qubits in `keep` (1-based), in big-endian order
    /// of the kept qubits.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if keep.is_empty() {
            return Err(Error::Index("empty keep set".into()));
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept[0] == 0 || *kept.last().unwrap() > n {
            return Err(Error::Index(format!("keep set {keep:?} not within 1..={n}")));
        }
        let traced: Vec<usize> = (1..=n).filter(|q| !kept.contains(q)).collect();

        let kept_offsets = subsystem_offsets(n, &kept);
        let traced_offsets = subsystem_offsets(n, &traced);
        let dk = kept_offsets.len();
        let mut out = DMatrix::from_element(dk, dk, C64::new(0.0, 0.0));
        for (a, &ra) in kept_offsets.iter().enumerate() {
            for (c, &rc) in kept_offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &traced_offsets {
                    acc += self.entries[(ra | t, rc | t)];
                }
                out[(a, c)] = acc;
            }
        }
        Ok(DensityMatrix::from_entries_unchecked(kept.len(), out))
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        check_cap(n)?;
        Ok(Self::from_entries_unchecked(n, self.entries.kronecker(&other.entries)))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Full-register index offsets for every assignment of `qubits`, enumerated
/// big-endian over those qubits.
fn subsystem_offsets(n_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let m = qubits.len();
    (0..1usize << m)
        .map(|local| {
            qubits.iter().enumerate().fold(0, |acc, (k, &q)| {
                if local & (1 << (m - 1 - k)) != 0 {
                    acc | qubit_mask(n_qubits, q)
                } else {
                    acc
                }
            })
        })
        .collect()
}

pub(crate) fn min_hermitian_eigenvalue(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Tolerance-aware equality used by tests and validation helpers.
pub fn approx_eq_matrix(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}
