//! U(1)-symmetric single-qubit channels and their parallel composition.
//!
//! A channel is fixed by one complex transition amplitude `f`. On the
//! vectorized single-qubit density matrix `(ρ00, ρ01, ρ10, ρ11)` it acts as
//!
//! ```text
//! | 1  0  0   1-|f|² |
//! | 0  f  0   0      |
//! | 0  0  f*  0      |
//! | 0  0  0   |f|²   |
//! ```
//!
//! `f = 1` is the identity (perfect transfer), `f = 0` resets to `|0><0|`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::qstate::{qubit_mask, DensityMatrix};
use crate::{Error, Result, C64};

/// Overshoot of `|f|` above 1 that is treated as rounding and clamped.
pub const AMPLITUDE_CLAMP_TOL: f64 = 1e-10;

/// Tolerance for the trace-preservation and Choi-positivity checks.
pub const CPTP_TOL: f64 = 1e-10;

/// Complex transition amplitude `f = |f| e^{iφ}` with `|f| ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionAmplitude {
    magnitude: f64,
    phase: f64,
}

impl TransitionAmplitude {
    pub const PERFECT: Self = Self {
        magnitude: 1.0,
        phase: 0.0,
    };

    pub const ZERO: Self = Self {
        magnitude: 0.0,
        phase: 0.0,
    };

    /// Phase is reduced into `[0, 2π)`.
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&magnitude) || !phase.is_finite() {
            return Err(Error::Domain(format!(
                "transition amplitude magnitude {magnitude} outside [0, 1]"
            )));
        }
        let mut phase = phase.rem_euclid(TAU);
        if phase >= TAU {
            phase = 0.0;
        }
        Ok(Self { magnitude, phase })
    }

    /// Real, non-negative amplitude.
    pub fn real(magnitude: f64) -> Result<Self> {
        Self::new(magnitude, 0.0)
    }

    /// From a complex value, clamping `|f|` to 1 when it overshoots by at most
    /// [`AMPLITUDE_CLAMP_TOL`].
    pub fn from_complex(f: C64) -> Result<Self> {
        let mut magnitude = f.norm();
        if magnitude > 1.0 && magnitude <= 1.0 + AMPLITUDE_CLAMP_TOL {
            magnitude = 1.0;
        }
        let phase = if magnitude == 0.0 { 0.0 } else { f.arg() };
        Self::new(magnitude, phase)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn value(&self) -> C64 {
        C64::from_polar(self.magnitude, self.phase)
    }
}

/// Superoperator on the vectorized single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitMap {
    matrix: Matrix4<C64>,
}

impl SingleQubitMap {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
        }
    }

    /// Wraps an arbitrary 4×4 matrix without any validation.
    pub fn from_matrix(matrix: Matrix4<C64>) -> Self {
        Self { matrix }
    }

    /// The amplitude-damping pattern for a raw complex `f`, skipping the
    /// `|f| ≤ 1` domain check.
    pub fn from_raw_amplitude(f: C64) -> Self {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let p = f.norm_sqr();
        #[rustfmt::skip]
        let matrix = Matrix4::new(
            one,  zero, zero,     C64::new(1.0 - p, 0.0),
            zero, f,    zero,     zero,
            zero, zero, f.conj(), zero,
            zero, zero, zero,     C64::new(p, 0.0),
        );
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    /// Acts on a single-qubit density matrix.
    pub fn apply(&self, rho: &Matrix2<C64>) -> Matrix2<C64> {
        let v = nalgebra::Vector4::new(rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)]);
        let w = self.matrix * v;
        Matrix2::new(w[0], w[1], w[2], w[3])
    }

    /// Choi matrix `Σ_ab |a><b| ⊗ Φ(|a><b|)`, indexed `(2a + c, 2b + d)`.
    pub fn choi(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|row, col| {
            let (a, c) = (row / 2, row % 2);
            let (b, d) = (col / 2, col % 2);
            self.matrix[(2 * c + d, 2 * a + b)]
        })
    }

    /// True iff the map is trace preserving within [`CPTP_TOL`] and its
    /// Choi matrix has no eigenvalue below `-CPTP_TOL`.
    pub fn is_cptp(&self) -> bool {
        // Tr Φ(|a><b|) = δ_ab: rows 0 and 3 (ρ00, ρ11) must sum to δ.
        for k in 0..4 {
            let expected = if k == 0 || k == 3 { 1.0 } else { 0.0 };
            let tr = self.matrix[(0, k)] + self.matrix[(3, k)];
            if (tr - C64::new(expected, 0.0)).norm() > CPTP_TOL {
                return false;
            }
        }
        let choi = self.choi();
        let herm_gap = (choi - choi.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_gap > CPTP_TOL {
            return false;
        }
        choi.symmetric_eigenvalues().iter().all(|&e| e >= -CPTP_TOL)
    }
}

/// The superoperator for transition amplitude `f`.
pub fn single_qubit_superoperator(f: TransitionAmplitude) -> SingleQubitMap {
    SingleQubitMap::from_raw_amplitude(f.value())
}

/// Kraus pair `K0 = diag(1, f*)`, `K1 = sqrt(1-|f|²) |0><1|` reproducing the
/// superoperator.
pub fn kraus_operators(f: TransitionAmplitude) -> [Matrix2<C64>; 2] {
    let zero = C64::new(0.0, 0.0);
    let k0 = Matrix2::new(C64::new(1.0, 0.0), zero, zero, f.value().conj());
    let gamma = (1.0 - f.magnitude() * f.magnitude()).max(0.0).sqrt();
    let k1 = Matrix2::new(zero, C64::new(gamma, 0.0), zero, zero);
    [k0, k1]
}

/// Applies `map` to one qubit (1-based) of `rho` in place.
pub fn apply_qubit_map(rho: &mut DensityMatrix, qubit: usize, map: &SingleQubitMap) -> Result<()> {
    let n = rho.n_qubits();
    if qubit == 0 || qubit > n {
        return Err(Error::Index(format!("qubit {qubit} out of range 1..={n}")));
    }
    apply_qubit_map_unchecked(rho.entries_mut(), n, qubit, map.matrix());
    Ok(())
}

fn apply_qubit_map_unchecked(m: &mut DMatrix<C64>, n: usize, qubit: usize, s: &Matrix4<C64>) {
    let mask = qubit_mask(n, qubit);
    let d = m.nrows();
    for j in (0..d).filter(|j| j & mask == 0) {
        for i in (0..d).filter(|i| i & mask == 0) {
            let v = [m[(i, j)], m[(i, j | mask)], m[(i | mask, j)], m[(i | mask, j | mask)]];
            let mut w = [C64::new(0.0, 0.0); 4];
            for (r, out) in w.iter_mut().enumerate() {
                *out = s[(r, 0)] * v[0] + s[(r, 1)] * v[1] + s[(r, 2)] * v[2] + s[(r, 3)] * v[3];
            }
            m[(i, j)] = w[0];
            m[(i, j | mask)] = w[1];
            m[(i | mask, j)] = w[2];
            m[(i | mask, j | mask)] = w[3];
        }
    }
}

/// `ρ_R = (Φ_1 ⊗ … ⊗ Φ_n)(ρ)`, one qubit at a time.
pub fn apply_parallel_channels(rho: &DensityMatrix, fs: &[TransitionAmplitude]) -> Result<DensityMatrix> {
    if fs.len() != rho.n_qubits() {
        return Err(Error::Shape(format!(
            "{} transition amplitudes for {} qubits",
            fs.len(),
            rho.n_qubits()
        )));
    }
    let mut out = rho.clone();
    apply_parallel_in_place(&mut out, fs);
    Ok(out)
}

pub(crate) fn apply_parallel_in_place(rho: &mut DensityMatrix, fs: &[TransitionAmplitude]) {
    let n = rho.n_qubits();
    for (k, f) in fs.iter().enumerate() {
        if *f == TransitionAmplitude::PERFECT {
            continue;
        }
        let map = single_qubit_superoperator(*f);
        apply_qubit_map_unchecked(rho.entries_mut(), n, k + 1, map.matrix());
    }
}

/// Open XX chain restricted to its single-excitation sector.
///
/// Sites are 1-based. The sector Hamiltonian is tridiagonal with hopping
/// `2 J_i` between sites `i` and `i+1` and on-site energy `-2 h_i` measured
/// from the fully polarized vacuum (with `σ^z|1> = -|1>`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    #[serde(rename = "N")]
    pub length: usize,
    #[serde(rename = "J")]
    pub couplings: Vec<f64>,
    #[serde(rename = "h", default)]
    pub fields: Vec<f64>,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>) -> Result<Self> {
        let spec = Self {
            length: couplings.len() + 1,
            couplings,
            fields,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform couplings and zero fields.
    pub fn uniform(length: usize, coupling: f64) -> Result<Self> {
        if length == 0 {
            return Err(Error::Domain("chain length must be positive".into()));
        }
        Self::new(vec![coupling; length - 1], vec![0.0; length])
    }

    /// Couplings `√(i (N - i))`, which give perfect end-to-end transfer.
    pub fn perfect_transfer(length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::Domain("chain length must be positive".into()));
        }
        let couplings = (1..length).map(|i| ((i * (length - i)) as f64).sqrt()).collect();
        Self::new(couplings, vec![0.0; length])
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::Domain("chain length must be positive".into()));
        }
        if self.couplings.len() != self.length - 1 {
            return Err(Error::Shape(format!(
                "{} couplings for a chain of length {}",
                self.couplings.len(),
                self.length
            )));
        }
        if !self.fields.is_empty() && self.fields.len() != self.length {
            return Err(Error::Shape(format!(
                "{} fields for a chain of length {}",
                self.fields.len(),
                self.length
            )));
        }
        if let Some(j) = self.couplings.iter().find(|j| !(j.is_finite() && **j > 0.0)) {
            return Err(Error::Domain(format!("coupling {j} is not strictly positive")));
        }
        if self.fields.iter().any(|h| !h.is_finite()) {
            return Err(Error::Domain("non-finite field".into()));
        }
        Ok(())
    }

    /// Single-excitation sector Hamiltonian.
    pub fn sector_hamiltonian(&self) -> DMatrix<f64> {
        let n = self.length;
        let mut h = DMatrix::zeros(n, n);
        for (i, j) in self.couplings.iter().enumerate() {
            h[(i, i + 1)] = 2.0 * j;
            h[(i + 1, i)] = 2.0 * j;
        }
        for (i, field) in self.fields.iter().enumerate() {
            h[(i, i)] = -2.0 * field;
        }
        h
    }

    /// `e^{-iHt}` in the sector.
    pub fn propagator(&self, t: f64) -> DMatrix<C64> {
        let eig = self.sector_hamiltonian().symmetric_eigen();
        let n = self.length;
        let v = &eig.eigenvectors;
        let phases: Vec<C64> = eig.eigenvalues.iter().map(|e| C64::from_polar(1.0, -e * t)).collect();
        DMatrix::from_fn(n, n, |r, s| {
            (0..n).map(|k| phases[k] * v[(r, k)] * v[(s, k)]).sum::<C64>()
        })
    }
}

/// Amplitude `<receiver| e^{-iHt} |sender>` for an excitation on the chain.
pub fn chain_transition_amplitude(
    spec: &ChainSpec,
    sender: usize,
    receiver: usize,
    t: f64,
) -> Result<TransitionAmplitude> {
    spec.validate()?;
    let n = spec.length;
    if sender == 0 || sender > n || receiver == 0 || receiver > n {
        return Err(Error::Index(format!("sites ({sender}, {receiver}) outside 1..={n}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time {t} must be finite and non-negative")));
    }
    let u = spec.propagator(t);
    TransitionAmplitude::from_complex(u[(receiver - 1, sender - 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{approx_eq_matrix, PureState};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn amplitude_domain() {
        assert!(TransitionAmplitude::new(1.2, 0.0).is_err());
        assert!(TransitionAmplitude::new(-0.1, 0.0).is_err());
        let f = TransitionAmplitude::new(0.5, -FRAC_PI_2).unwrap();
        assert!((f.phase() - 3.0 * FRAC_PI_2).abs() < 1e-15);
        let clamped = TransitionAmplitude::from_complex(c(1.0 + 5e-11)).unwrap();
        assert_eq!(clamped.magnitude(), 1.0);
        assert!(TransitionAmplitude::from_complex(c(1.0 + 1e-9)).is_err());
    }

    #[test]
    fn perfect_amplitude_is_identity() {
        let m = single_qubit_superoperator(TransitionAmplitude::PERFECT);
        assert_eq!(m, SingleQubitMap::identity());
    }

    #[test]
    fn zero_amplitude_resets_to_ground() {
        let m = single_qubit_superoperator(TransitionAmplitude::ZERO);
        let rho = Matrix2::new(c(0.3), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.7));
        let out = m.apply(&rho);
        assert_eq!(out, Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0)));
    }

    #[test]
    fn excited_population_decays_as_f_squared() {
        let m = single_qubit_superoperator(TransitionAmplitude::real(0.6).unwrap());
        let out = m.apply(&Matrix2::new(c(0.0), c(0.0), c(0.0), c(1.0)));
        assert!((out[(0, 0)].re - 0.64).abs() < 1e-15);
        assert!((out[(1, 1)].re - 0.36).abs() < 1e-15);
    }

    #[test]
    fn kraus_pair_reproduces_superoperator() {
        let f = TransitionAmplitude::new(0.7, 1.1).unwrap();
        let [k0, k1] = kraus_operators(f);
        let completeness = k0.adjoint() * k0 + k1.adjoint() * k1;
        assert!((completeness - Matrix2::identity()).norm() < 1e-15);
        let rho = Matrix2::new(c(0.4), C64::new(0.2, 0.1), C64::new(0.2, -0.1), c(0.6));
        let via_kraus = k0 * rho * k0.adjoint() + k1 * rho * k1.adjoint();
        let via_map = single_qubit_superoperator(f).apply(&rho);
        assert!((via_kraus - via_map).norm() < 1e-15);
    }

    #[test]
    fn cptp_examples() {
        assert!(single_qubit_superoperator(TransitionAmplitude::real(0.3).unwrap()).is_cptp());
        assert!(SingleQubitMap::identity().is_cptp());
        // Choi spectrum of the pattern is {0, 0, 1 - |f|², 1 + |f|²}; at
        // |f| = 1.2 the third eigenvalue is -0.44.
        let raw = SingleQubitMap::from_raw_amplitude(c(1.2));
        let mut ev: Vec<f64> = raw.choi().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 0.44).abs() < 1e-12);
        assert!(!raw.is_cptp());
        let not_tp = SingleQubitMap::from_matrix(Matrix4::identity() * c(0.5));
        assert!(!not_tp.is_cptp());
    }

    #[test]
    fn parallel_channels_examples() {
        let ghz4 = {
            let mut a = vec![0.0; 16];
            a[0] = 1.0;
            a[15] = 1.0;
            PureState::from_real(&a).unwrap()
        };
        let rho = ghz4.to_density();
        let same = apply_parallel_channels(&rho, &[TransitionAmplitude::PERFECT; 4]).unwrap();
        assert_eq!(same, rho);
        let out = apply_parallel_channels(&rho, &[TransitionAmplitude::ZERO; 4]).unwrap();
        let ground = PureState::basis(4, 0).unwrap().to_density();
        assert!(approx_eq_matrix(out.entries(), ground.entries(), 1e-15));
        assert!(matches!(
            apply_parallel_channels(&rho, &[TransitionAmplitude::ZERO; 3]),
            Err(Error::Shape(_))
        ));
    }

    /// Full `4^n × 4^n` transfer tensor built from Kronecker products of the
    /// single-qubit maps, indexed by `(i, j)` row-major pairs of the output and
    /// `(p, q)` of the input.
    fn brute_force_parallel(rho: &DMatrix<C64>, n: usize, fs: &[TransitionAmplitude]) -> DMatrix<C64> {
        let d = 1 << n;
        let maps: Vec<Matrix4<C64>> = fs.iter().map(|f| *single_qubit_superoperator(*f).matrix()).collect();
        let mut out = DMatrix::from_element(d, d, c(0.0));
        for i in 0..d {
            for j in 0..d {
                let mut acc = c(0.0);
                for p in 0..d {
                    for q in 0..d {
                        let mut a = c(1.0);
                        for (k, m) in maps.iter().enumerate() {
                            let bit = |x: usize| (x >> (n - 1 - k)) & 1;
                            a *= m[(2 * bit(i) + bit(j), 2 * bit(p) + bit(q))];
                        }
                        acc += a * rho[(p, q)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn bell_fidelity_matches_full_tensor_oracle() {
        let bell = PureState::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let rho = bell.to_density();
        let fs = [TransitionAmplitude::real(0.6).unwrap(); 2];
        let fast = apply_parallel_channels(&rho, &fs).unwrap();
        let oracle = brute_force_parallel(rho.entries(), 2, &fs);
        assert!(approx_eq_matrix(fast.entries(), &oracle, 1e-15));
        // <Φ+| ρ_R |Φ+> = (1 + (1-|f|²)² + |f|⁴ + 2|f|²) / 4 at real f.
        let fid = fast.expectation(&bell).unwrap();
        let p: f64 = 0.36;
        assert!((fid - (1.0 + (1.0 - p).powi(2) + p * p + 2.0 * p) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn heterogeneous_amplitudes_match_full_tensor_oracle() {
        let psi = PureState::new(
            (0..8)
                .map(|k| C64::new((k as f64).sin(), (k as f64 * 0.7).cos()))
                .collect(),
        )
        .unwrap();
        let fs = [
            TransitionAmplitude::new(0.3, 0.4).unwrap(),
            TransitionAmplitude::new(0.9, 2.0).unwrap(),
            TransitionAmplitude::new(0.55, 5.5).unwrap(),
        ];
        let rho = psi.to_density();
        let fast = apply_parallel_channels(&rho, &fs).unwrap();
        let oracle = brute_force_parallel(rho.entries(), 3, &fs);
        assert!(approx_eq_matrix(fast.entries(), &oracle, 1e-14));
    }

    #[test]
    fn single_site_chain_is_perfect() {
        let spec = ChainSpec::new(vec![], vec![0.3]).unwrap();
        let f = chain_transition_amplitude(&spec, 1, 1, 2.7).unwrap();
        assert!((f.magnitude() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_site_rabi_transfer() {
        // 2x2 block [[0, 2], [2, 0]]: <2|e^{-iHt}|1> = -i sin(2t).
        let spec = ChainSpec::uniform(2, 1.0).unwrap();
        let f = chain_transition_amplitude(&spec, 1, 2, FRAC_PI_4).unwrap();
        assert!((f.magnitude() - 1.0).abs() < 1e-12);
        assert!((f.phase() - 3.0 * FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn engineered_chain_transfers_perfectly() {
        // Hopping 2√(i(N-i)) = 4 J_x of a spin-(N-1)/2: mirror at t = π/4,
        // back to the sender at t = π/2.
        let spec = ChainSpec::perfect_transfer(5).unwrap();
        let f = chain_transition_amplitude(&spec, 1, 5, FRAC_PI_4).unwrap();
        assert!((f.magnitude() - 1.0).abs() < 1e-10);
        let back = chain_transition_amplitude(&spec, 1, 5, FRAC_PI_2).unwrap();
        assert!(back.magnitude() < 1e-10);
    }

    #[test]
    fn chain_sector_is_unitary() {
        let spec = ChainSpec::new(vec![1.0, 0.7, 1.3, 0.9], vec![0.1, -0.2, 0.0, 0.3, 0.05]).unwrap();
        for s in 1..=5 {
            let total: f64 = (1..=5)
                .map(|r| {
                    chain_transition_amplitude(&spec, s, r, 1.7)
                        .unwrap()
                        .magnitude()
                        .powi(2)
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn chain_errors() {
        let spec = ChainSpec::uniform(3, 1.0).unwrap();
        assert!(matches!(
            chain_transition_amplitude(&spec, 0, 2, 1.0),
            Err(Error::Index(_))
        ));
        assert!(matches!(
            chain_transition_amplitude(&spec, 1, 4, 1.0),
            Err(Error::Index(_))
        ));
        assert!(chain_transition_amplitude(&spec, 1, 3, -1.0).is_err());
        assert!(ChainSpec::new(vec![1.0, 0.0], vec![]).is_err());
        assert!(ChainSpec::new(vec![1.0], vec![0.0; 3]).is_err());
    }

    #[test]
    fn phase_choice_does_not_leak_into_populations() {
        let a = single_qubit_superoperator(TransitionAmplitude::new(0.8, PI).unwrap());
        let b = single_qubit_superoperator(TransitionAmplitude::new(0.8, 0.0).unwrap());
        let rho = Matrix2::new(c(0.2), c(0.1), c(0.1), c(0.8));
        let (oa, ob) = (a.apply(&rho), b.apply(&rho));
        assert_eq!(oa[(0, 0)], ob[(0, 0)]);
        assert_eq!(oa[(1, 1)], ob[(1, 1)]);
    }
}
