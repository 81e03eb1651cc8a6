//! Entanglement monotones for two- and three-qubit states.
//!
//! Three-qubit quantities use the labelling `(A, B, C) = (qubit 1, 2, 3)`.
//! The invariant polynomials `J1, J2, J3` are tied to the pair concurrences
//! by `C²_jk = 4 J_i` with `{i, j, k} = {1, 2, 3}`; that correspondence lives
//! in [`PAIR_OF_INVARIANT`] and nowhere else.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::qstate::{DensityMatrix, PureState};
use crate::{Error, Result, C64};

/// Round-off allowed below zero before a clamped quantity becomes an error.
pub const CLAMP_TOL: f64 = 1e-9;

/// Normalization and range tolerance for canonical coefficients and invariants.
pub const INVARIANT_TOL: f64 = 1e-12;

/// Qubit pair `(j, k)` (1-based) whose squared concurrence equals `4 J_i`,
/// for `i = 1, 2, 3`.
pub const PAIR_OF_INVARIANT: [(usize, usize); 3] = [(2, 3), (1, 3), (1, 2)];

/// Eigenvalues of unit-trace matrices below this are round-off; taking their
/// square root would leak `~1e-8` into the concurrence.
const EIGEN_FLOOR: f64 = 1e-14;

fn root_of_eigenvalue(e: f64, what: &str) -> Result<f64> {
    let e = clamp_small_negative(e, what)?;
    Ok(if e < EIGEN_FLOOR { 0.0 } else { e.sqrt() })
}

fn clamp_small_negative(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!("{what} = {x} is negative beyond round-off")))
    }
}

fn expect_qubits(n_expected: usize, n: usize, what: &str) -> Result<()> {
    if n != n_expected {
        return Err(Error::Shape(format!(
            "{what} needs a {n_expected}-qubit state, got {n} qubits"
        )));
    }
    Ok(())
}

/// `√((1+s)/2)|00> + √((1-s)/2)|11>`, whose concurrence is `√(1-s²)`.
pub fn schmidt_state_2q(s: f64) -> Result<PureState> {
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("Schmidt parameter {s} outside [-1, 1]")));
    }
    let a = ((1.0 + s) / 2.0).sqrt();
    let b = ((1.0 - s) / 2.0).sqrt();
    PureState::from_real(&[a, 0.0, 0.0, b])
}

/// Schmidt-form state with the given concurrence `C ∈ [0, 1]`.
pub fn state_with_concurrence(concurrence: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&concurrence) {
        return Err(Error::Domain(format!("concurrence {concurrence} outside [0, 1]")));
    }
    schmidt_state_2q((1.0 - concurrence * concurrence).sqrt())
}

/// `2 |a0 a3 - a1 a2|` for a two-qubit pure state.
pub fn concurrence_pure_2q(psi: &PureState) -> Result<f64> {
    expect_qubits(2, psi.n_qubits(), "pure-state concurrence")?;
    let a = psi.amplitudes();
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

fn hermitian_sqrt(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let eig = m.clone().symmetric_eigen();
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &e in eig.eigenvalues.iter() {
        roots.push(root_of_eigenvalue(e, "density eigenvalue")?);
    }
    let v = &eig.eigenvectors;
    let d = m.nrows();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        (0..d).map(|k| v[(i, k)] * v[(j, k)].conj() * roots[k]).sum()
    }))
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// Uses the Hermitian form `√ρ ρ̃ √ρ`, whose eigenvalues are the squares of the
/// `μ_i` in `max(0, μ1 - μ2 - μ3 - μ4)`.
pub fn concurrence_mixed_2q(rho: &DensityMatrix) -> Result<f64> {
    expect_qubits(2, rho.n_qubits(), "mixed-state concurrence")?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    // σ_y ⊗ σ_y is real: anti-diagonal (-1, 1, 1, -1).
    #[rustfmt::skip]
    let yy = Matrix4::new(
        zero, zero, zero, -one,
        zero, zero, one,  zero,
        zero, one,  zero, zero,
        -one, zero, zero, zero,
    );
    let yy = DMatrix::from_iterator(4, 4, yy.iter().copied());
    let r = rho.entries();
    let flipped = &yy * r.map(|z| z.conj()) * &yy;
    let sqrt_rho = hermitian_sqrt(r)?;
    let m = &sqrt_rho * flipped * &sqrt_rho;
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut mu = Vec::with_capacity(4);
    for &e in m.symmetric_eigenvalues().iter() {
        mu.push(root_of_eigenvalue(e, "spin-flip eigenvalue")?);
    }
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

fn single_qubit_det(rho: &DensityMatrix) -> f64 {
    let m = rho.entries();
    (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re
}

/// `C²_{cut|rest} = 4 det ρ_cut` for a three-qubit pure state.
pub fn one_tangle(psi: &PureState, cut: usize) -> Result<f64> {
    expect_qubits(3, psi.n_qubits(), "one-tangle")?;
    let marginal = psi.to_density().partial_trace(&[cut])?;
    Ok(clamp_small_negative(4.0 * single_qubit_det(&marginal), "one-tangle")?.min(1.0))
}

/// Squared pair concurrence `C²_jk` of a three-qubit pure state.
pub fn pair_concurrence_sq(psi: &PureState, pair: (usize, usize)) -> Result<f64> {
    expect_qubits(3, psi.n_qubits(), "pair concurrence")?;
    let marginal = psi.to_density().partial_trace(&[pair.0, pair.1])?;
    Ok(concurrence_mixed_2q(&marginal)?.powi(2))
}

/// Residual tangle `τ₃² = C²_{A|BC} - C²_AB - C²_AC`, clamped into `[0, 1]`.
pub fn three_tangle_sq(psi: &PureState) -> Result<f64> {
    let residual = monogamy_residual(psi)?;
    Ok(clamp_small_negative(residual, "three-tangle")?.min(1.0))
}

/// Unclamped `C²_{A|BC} - C²_AB - C²_AC`.
pub fn monogamy_residual(psi: &PureState) -> Result<f64> {
    expect_qubits(3, psi.n_qubits(), "three-tangle")?;
    let rho = psi.to_density();
    let rho_a = rho.partial_trace(&[1])?;
    let tangle_a = 4.0 * single_qubit_det(&rho_a);
    let c_ab = concurrence_mixed_2q(&rho.partial_trace(&[1, 2])?)?;
    let c_ac = concurrence_mixed_2q(&rho.partial_trace(&[1, 3])?)?;
    Ok(tangle_a - c_ab * c_ab - c_ac * c_ac)
}

/// Canonical three-qubit coefficients
/// `λ0|000> + λ1 e^{iφ}|100> + λ2|101> + λ3|110> + λ4|111>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalState {
    lambda: [f64; 5],
    phi: f64,
}

impl CanonicalState {
    pub fn new(lambda: [f64; 5], phi: f64) -> Result<Self> {
        if lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::Domain(format!(
                "canonical coefficients {lambda:?} must be finite and non-negative"
            )));
        }
        let norm: f64 = lambda.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > INVARIANT_TOL {
            return Err(Error::Domain(format!(
                "canonical coefficients have squared norm {norm}"
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&phi) {
            return Err(Error::Domain(format!("phase {phi} outside [0, π]")));
        }
        Ok(Self { lambda, phi })
    }

    /// Rescales non-negative weights to unit norm first.
    pub fn normalized(lambda: [f64; 5], phi: f64) -> Result<Self> {
        let norm: f64 = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Degenerate("all canonical coefficients vanish".into()));
        }
        Self::new(lambda.map(|l| l / norm), phi)
    }

    pub fn lambda(&self) -> [f64; 5] {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_state(&self) -> PureState {
        canonical_to_state(self)
    }

    pub fn invariants(&self) -> InvariantSet {
        invariants_from_canonical(self)
    }
}

/// Builds the canonical-form state vector.
pub fn canonical_to_state(c: &CanonicalState) -> PureState {
    let [l0, l1, l2, l3, l4] = c.lambda;
    let mut a = vec![C64::new(0.0, 0.0); 8];
    a[0b000] = C64::new(l0, 0.0);
    a[0b100] = C64::from_polar(l1, c.phi);
    a[0b101] = C64::new(l2, 0.0);
    a[0b110] = C64::new(l3, 0.0);
    a[0b111] = C64::new(l4, 0.0);
    PureState::new(a).expect("canonical coefficients are normalized")
}

/// Local-unitary invariant polynomials `J1..J5`. `J5` is only known for
/// states given in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub j: [f64; 4],
    pub j5: Option<f64>,
}

impl InvariantSet {
    pub fn new(j1: f64, j2: f64, j3: f64, j4: f64, j5: Option<f64>) -> Self {
        Self {
            j: [j1, j2, j3, j4],
            j5,
        }
    }

    pub fn j1(&self) -> f64 {
        self.j[0]
    }
    pub fn j2(&self) -> f64 {
        self.j[1]
    }
    pub fn j3(&self) -> f64 {
        self.j[2]
    }
    pub fn j4(&self) -> f64 {
        self.j[3]
    }
    pub fn j5(&self) -> Option<f64> {
        self.j5
    }

    /// Checks `J1..J4 ∈ [0, 1/4]` within [`INVARIANT_TOL`].
    pub fn validate(&self) -> Result<()> {
        for (i, &v) in self.j.iter().enumerate() {
            if !(-INVARIANT_TOL..=0.25 + INVARIANT_TOL).contains(&v) {
                return Err(Error::Domain(format!("J{} = {v} outside [0, 1/4]", i + 1)));
            }
        }
        Ok(())
    }

    /// `J1..J4` recovered from measures via `C²_jk = 4 J_i` and `τ₃² = 4 J4`.
    pub fn from_measures(m: &MeasureSet) -> Self {
        let sq = m.squared();
        Self::new(sq.c2_bc / 4.0, sq.c2_ac / 4.0, sq.c2_ab / 4.0, sq.tau3_sq / 4.0, None)
    }
}

/// Invariant polynomials of a canonical state.
pub fn invariants_from_canonical(c: &CanonicalState) -> InvariantSet {
    let [l0, l1, l2, l3, l4] = c.lambda;
    let j1 = (C64::from_polar(l1 * l4, c.phi) - l2 * l3).norm_sqr();
    let l0s = l0 * l0;
    let j2 = l0s * l2 * l2;
    let j3 = l0s * l3 * l3;
    let j4 = l0s * l4 * l4;
    let j5 = l0s * (j1 + l2 * l2 * l3 * l3 - l1 * l1 * l4 * l4);
    InvariantSet::new(j1, j2, j3, j4, Some(j5))
}

/// `C_GME = 4 (min{J2+J3, J1+J3, J1+J2} + J4)`.
pub fn gme_concurrence(j: &InvariantSet) -> f64 {
    let [j1, j2, j3, j4] = j.j;
    4.0 * ((j2 + j3).min(j1 + j3).min(j1 + j2) + j4)
}

/// Squared measures consumed by the fixed-entanglement fidelity formulas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SquaredMeasures {
    pub c2_bc: f64,
    pub c2_ac: f64,
    pub c2_ab: f64,
    pub tau3_sq: f64,
}

impl SquaredMeasures {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("C²_BC", self.c2_bc),
            ("C²_AC", self.c2_ac),
            ("C²_AB", self.c2_ab),
            ("τ₃²", self.tau3_sq),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn pair_sum(&self) -> f64 {
        self.c2_bc + self.c2_ac + self.c2_ab
    }

    /// Measures implied by invariants: `C²_jk = 4 J_i`, `τ₃² = 4 J4`.
    pub fn from_invariants(j: &InvariantSet) -> Self {
        let mut pairs = [0.0; 3];
        for (i, pair) in PAIR_OF_INVARIANT.iter().enumerate() {
            pairs[pair_slot(*pair)] = 4.0 * j.j[i];
        }
        Self {
            c2_bc: pairs[0],
            c2_ac: pairs[1],
            c2_ab: pairs[2],
            tau3_sq: 4.0 * j.j4(),
        }
    }
}

fn pair_slot(pair: (usize, usize)) -> usize {
    match pair {
        (2, 3) => 0,
        (1, 3) => 1,
        (1, 2) => 2,
        _ => unreachable!("pair table only holds BC, AC, AB"),
    }
}

/// Entanglement measures of a three-qubit pure state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    #[serde(rename = "C_AB")]
    pub c_ab: f64,
    #[serde(rename = "C_AC")]
    pub c_ac: f64,
    #[serde(rename = "C_BC")]
    pub c_bc: f64,
    pub tau3_sq: f64,
    #[serde(rename = "C_GME")]
    pub c_gme: f64,
}

impl MeasureSet {
    /// Pair concurrences from the two-qubit marginals, `τ₃²` from the
    /// monogamy residual, and `C_GME` from the implied invariants.
    pub fn from_state(psi: &PureState) -> Result<Self> {
        expect_qubits(3, psi.n_qubits(), "measure set")?;
        let rho = psi.to_density();
        let c_ab = concurrence_mixed_2q(&rho.partial_trace(&[1, 2])?)?;
        let c_ac = concurrence_mixed_2q(&rho.partial_trace(&[1, 3])?)?;
        let c_bc = concurrence_mixed_2q(&rho.partial_trace(&[2, 3])?)?;
        let tangle_a = 4.0 * single_qubit_det(&rho.partial_trace(&[1])?);
        let residual = tangle_a - c_ab * c_ab - c_ac * c_ac;
        let tau3_sq = clamp_small_negative(residual, "three-tangle")?.min(1.0);
        let mut m = Self {
            c_ab,
            c_ac,
            c_bc,
            tau3_sq,
            c_gme: 0.0,
        };
        m.c_gme = gme_concurrence(&InvariantSet::from_measures(&m)).min(1.0);
        Ok(m)
    }

    pub fn squared(&self) -> SquaredMeasures {
        SquaredMeasures {
            c2_bc: self.c_bc * self.c_bc,
            c2_ac: self.c_ac * self.c_ac,
            c2_ab: self.c_ab * self.c_ab,
            tau3_sq: self.tau3_sq,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn w3() -> PureState {
        let mut a = vec![0.0; 8];
        a[0b001] = 1.0;
        a[0b010] = 1.0;
        a[0b100] = 1.0;
        PureState::from_real(&a).unwrap()
    }

    fn ghz3() -> PureState {
        let mut a = vec![0.0; 8];
        a[0] = 1.0;
        a[7] = 1.0;
        PureState::from_real(&a).unwrap()
    }

    fn product3() -> PureState {
        PureState::new(
            [0.6, 0.8]
                .iter()
                .flat_map(|a| [0.28, 0.96].map(|b| a * b))
                .flat_map(|ab| [FRAC_1_SQRT_2, FRAC_1_SQRT_2].map(|c| C64::new(ab * c, 0.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn schmidt_examples() {
        let s1 = schmidt_state_2q(1.0).unwrap();
        assert_eq!(s1, PureState::basis(2, 0).unwrap());
        assert_eq!(concurrence_pure_2q(&s1).unwrap(), 0.0);
        let bell = schmidt_state_2q(0.0).unwrap();
        assert!((concurrence_pure_2q(&bell).unwrap() - 1.0).abs() < 1e-15);
        let s = schmidt_state_2q(0.6).unwrap();
        assert!((concurrence_pure_2q(&s).unwrap() - 0.8).abs() < 1e-15);
        assert!(schmidt_state_2q(1.5).is_err());
    }

    #[test]
    fn schmidt_concurrence_grid() {
        for k in 0..=40 {
            let s = -1.0 + k as f64 / 20.0;
            let c = concurrence_pure_2q(&schmidt_state_2q(s).unwrap()).unwrap();
            assert!((c - (1.0 - s * s).sqrt()).abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn pure_concurrence_rejects_wrong_size() {
        assert!(matches!(concurrence_pure_2q(&w3()), Err(Error::Shape(_))));
    }

    #[test]
    fn mixed_concurrence_examples() {
        let bell = schmidt_state_2q(0.0).unwrap().to_density();
        assert!((concurrence_mixed_2q(&bell).unwrap() - 1.0).abs() < 1e-10);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(concurrence_mixed_2q(&mixed).unwrap(), 0.0);
        // W marginal: (|00><00| + (|01>+|10>)(<01|+<10|)) / 3; μ = (2/3, 0, 0, 0).
        let marginal = w3().to_density().partial_trace(&[1, 2]).unwrap();
        assert!((concurrence_mixed_2q(&marginal).unwrap() - 2.0 / 3.0).abs() < 1e-10);
        assert!(concurrence_mixed_2q(&w3().to_density()).is_err());
    }

    #[test]
    fn one_tangle_examples() {
        assert!(one_tangle(&product3(), 1).unwrap() < 1e-12);
        for cut in 1..=3 {
            assert!((one_tangle(&ghz3(), cut).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((one_tangle(&w3(), 1).unwrap() - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn three_tangle_examples() {
        assert!((three_tangle_sq(&ghz3()).unwrap() - 1.0).abs() < 1e-10);
        assert!(three_tangle_sq(&w3()).unwrap() < 1e-9);
        let c = CanonicalState::new([FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2], 0.0).unwrap();
        let tau = three_tangle_sq(&c.to_state()).unwrap();
        assert!((tau - 4.0 * c.invariants().j4()).abs() < 1e-9);
        assert!((tau - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invariant_examples() {
        let h = FRAC_1_SQRT_2;
        let ghz = CanonicalState::new([h, 0.0, 0.0, 0.0, h], 0.0).unwrap().invariants();
        assert_eq!(&ghz.j[..3], &[0.0, 0.0, 0.0]);
        assert!((ghz.j4() - 0.25).abs() < 1e-15);
        assert_eq!(ghz.j5, Some(0.0));

        let bisep = CanonicalState::new([h, 0.0, h, 0.0, 0.0], 0.0).unwrap().invariants();
        assert!((bisep.j2() - 0.25).abs() < 1e-15);
        assert_eq!([bisep.j1(), bisep.j3(), bisep.j4()], [0.0, 0.0, 0.0]);

        let c4a = CanonicalState::new([0.5, 0.5, 0.5, 0.5, 0.0], 0.0)
            .unwrap()
            .invariants();
        for v in [c4a.j1(), c4a.j2(), c4a.j3()] {
            assert!((v - 1.0 / 16.0).abs() < 1e-15);
        }
        assert_eq!(c4a.j4(), 0.0);
        assert!((c4a.j5.unwrap() - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_state_examples() {
        let c = CanonicalState::new([1.0, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(c.to_state(), PureState::basis(3, 0).unwrap());
        let h = FRAC_1_SQRT_2;
        let g = CanonicalState::new([h, 0.0, 0.0, 0.0, h], 0.0).unwrap().to_state();
        assert!((g.inner(&ghz3()).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_validation() {
        assert!(CanonicalState::new([0.5; 5], 0.0).is_err());
        assert!(CanonicalState::new([1.0, 0.0, 0.0, 0.0, -0.0001], 0.0).is_err());
        assert!(CanonicalState::new([1.0, 0.0, 0.0, 0.0, 0.0], 4.0).is_err());
        assert!(CanonicalState::normalized([0.0; 5], 0.0).is_err());
    }

    #[test]
    fn pair_concurrences_follow_invariant_table() {
        let c = CanonicalState::new([0.5, 0.5, 0.5, 0.5, 0.0], 0.0).unwrap();
        let psi = c.to_state();
        let j = c.invariants();
        for (i, pair) in PAIR_OF_INVARIANT.iter().enumerate() {
            let c2 = pair_concurrence_sq(&psi, *pair).unwrap();
            assert!((c2 - 4.0 * j.j[i]).abs() < 1e-9, "J{} vs {pair:?}", i + 1);
        }
    }

    #[test]
    fn gme_examples() {
        assert!((gme_concurrence(&InvariantSet::new(0.0, 0.0, 0.0, 0.25, Some(0.0))) - 1.0).abs() < 1e-15);
        assert_eq!(gme_concurrence(&InvariantSet::new(0.0, 0.0, 0.0, 0.0, Some(0.0))), 0.0);
        let w = InvariantSet::new(1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 0.0, None);
        assert!((gme_concurrence(&w) - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn measure_set_of_w_state() {
        let m = MeasureSet::from_state(&w3()).unwrap();
        for c in [m.c_ab, m.c_ac, m.c_bc] {
            assert!((c - 2.0 / 3.0).abs() < 1e-10);
        }
        assert!(m.tau3_sq < 1e-9);
        assert!((m.c_gme - 8.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn squared_measures_round_trip_invariants() {
        let j = InvariantSet::new(0.01, 0.02, 0.03, 0.04, None);
        let sq = SquaredMeasures::from_invariants(&j);
        assert_eq!((sq.c2_bc, sq.c2_ac, sq.c2_ab, sq.tau3_sq), (0.04, 0.08, 0.12, 0.16));
        assert!(SquaredMeasures { c2_ab: 1.5, ..sq }.validate().is_err());
    }
}
