//! Closed-form transfer fidelities and reduction factors.
//!
//! Every formula beyond the single-qubit one is written in terms of the
//! single-qubit average fidelity `F1` and has the shape
//! `<F_n> = F1^n - E_n R_n(F1)`: a product-state term minus an entanglement
//! quantifier `E_n` times a reduction factor `R_n`.
//!
//! Where a printed formula disagrees with the Monte-Carlo oracle the crate
//! implements the version the oracle confirms; the rejected forms are kept in
//! [`variants`] so reports can show both.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::TransitionAmplitude;
use crate::entanglement::{InvariantSet, SquaredMeasures};
use crate::qstate::{DensityMatrix, PureState, STATE_TOL};
use crate::{Error, Result};

/// `<ψ|ρ|ψ>`, clamped into `[0, 1]` when within `1e-12` of the boundary.
pub fn fidelity(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    clamp_unit(rho.expectation(psi)?)
}

pub(crate) fn clamp_unit(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if (-STATE_TOL..0.0).contains(&v) {
        Ok(0.0)
    } else if v > 1.0 && v <= 1.0 + STATE_TOL {
        Ok(1.0)
    } else {
        Err(Error::Numerical(format!("fidelity {v} outside [0, 1]")))
    }
}

/// Single-qubit average fidelity `F1 ∈ [1/2, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SingleQubitAvgFidelity(f64);

impl SingleQubitAvgFidelity {
    pub const MIN: f64 = 0.5;
    pub const MAX: f64 = 1.0;

    /// Values within `1e-12` outside the interval are clamped onto it.
    pub fn new(value: f64) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&value) {
            Ok(Self(value))
        } else if (Self::MIN - STATE_TOL..Self::MIN).contains(&value) {
            Ok(Self(Self::MIN))
        } else if value > Self::MAX && value <= Self::MAX + STATE_TOL {
            Ok(Self(Self::MAX))
        } else {
            Err(Error::Domain(format!("single-qubit fidelity {value} outside [1/2, 1]")))
        }
    }

    /// `F1` for amplitude `f`; a domain error when the phase pushes it below 1/2.
    pub fn from_amplitude(f: TransitionAmplitude) -> Result<Self> {
        Self::new(avg_fidelity_single(f))
    }

    /// `(3 + 2|f| + |f|²) / 6`, the phase-optimized value.
    pub fn phase_optimal(magnitude: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&magnitude) {
            return Err(Error::Domain(format!("|f| = {magnitude} outside [0, 1]")));
        }
        Self::new((3.0 + 2.0 * magnitude + magnitude * magnitude) / 6.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `1/3 + |1 + f|² / 6`. Below 1/2 when `|1 + f| < 1`.
pub fn avg_fidelity_single(f: TransitionAmplitude) -> f64 {
    1.0 / 3.0 + (1.0 + f.value()).norm_sqr() / 6.0
}

/// Haar-averaged `n`-qubit fidelity through `n` identical channels:
/// `1/(2^n+1) + |1+f|^{2n} / (2^n (2^n+1))`.
pub fn avg_fidelity_haar_closed(n: usize, f: TransitionAmplitude) -> Result<f64> {
    if n == 0 || n > 62 {
        return Err(Error::Domain(format!("qubit count {n} not in 1..=62")));
    }
    let d = (1u64 << n) as f64;
    let base = (1.0 + f.value()).norm_sqr();
    Ok(1.0 / (d + 1.0) + base.powi(n as i32) / (d * (d + 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionKind {
    R2,
    R3,
    R4a,
    R4b,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 4] = [Self::R2, Self::R3, Self::R4a, Self::R4b];

    pub fn name(self) -> &'static str {
        match self {
            Self::R2 => "R2",
            Self::R3 => "R3",
            Self::R4a => "R4a",
            Self::R4b => "R4b",
        }
    }
}

impl FromStr for ReductionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown reduction factor {s:?}")))
    }
}

/// Reduction factors, all vanishing at `F1 = 1/2` and `F1 = 1`:
///
/// - `R2 = (F1 - 1/2)(1 - F1)`
/// - `R3 = F1 R2`
/// - `R4a = F1 R2 (1 - 3F1 + 4F1²)` (the curve plotted for GHZ4/B2; the
///   fidelity of those states uses `R2 (1 - 3F1 + 4F1²)`, see
///   [`four_qubit_avg_fidelity`])
/// - `R4b = F1² R2`
pub fn reduction_factor(kind: ReductionKind, f1: SingleQubitAvgFidelity) -> f64 {
    let f = f1.value();
    let r2 = (f - 0.5) * (1.0 - f);
    match kind {
        ReductionKind::R2 => r2,
        ReductionKind::R3 => f * r2,
        ReductionKind::R4a => f * r2 * quartic_weight(f),
        ReductionKind::R4b => f * f * r2,
    }
}

fn quartic_weight(f: f64) -> f64 {
    1.0 - 3.0 * f + 4.0 * f * f
}

/// Local-unitary average for a two-qubit state of concurrence `C`:
/// `F1² - 2 R2 C²`.
pub fn avg_fidelity_2q_fixed_concurrence(f1: SingleQubitAvgFidelity, concurrence: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&concurrence) {
        return Err(Error::Domain(format!("concurrence {concurrence} outside [0, 1]")));
    }
    let f = f1.value();
    Ok(f * f - 2.0 * reduction_factor(ReductionKind::R2, f1) * concurrence * concurrence)
}

/// Local-unitary average for a three-qubit state with invariants `J`:
/// `F1³ - 8 R3 (J1 + J2 + J3 + 3/2 J4)`.
pub fn avg_fidelity_3q_fixed_invariants(f1: SingleQubitAvgFidelity, j: &InvariantSet) -> Result<f64> {
    j.validate()?;
    let weight = j.j1() + j.j2() + j.j3() + 1.5 * j.j4();
    Ok(f1.value().powi(3) - 8.0 * reduction_factor(ReductionKind::R3, f1) * weight)
}

/// Three-qubit classes and the named four-qubit states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassTag {
    #[serde(rename = "c1")]
    C1,
    #[serde(rename = "c2a")]
    C2a,
    #[serde(rename = "c2b")]
    C2b,
    #[serde(rename = "c3a")]
    C3a,
    #[serde(rename = "c3b")]
    C3b,
    #[serde(rename = "c4a")]
    C4a,
    #[serde(rename = "c4b")]
    C4b,
    #[serde(rename = "c4c")]
    C4c,
    #[serde(rename = "c4d")]
    C4d,
    #[serde(rename = "GHZ4")]
    Ghz4,
    #[serde(rename = "Cl4")]
    Cl4,
    #[serde(rename = "X4")]
    X4,
    #[serde(rename = "B2")]
    B2,
    #[serde(rename = "W4")]
    W4,
}

impl ClassTag {
    pub const THREE_QUBIT: [ClassTag; 9] = [
        Self::C1,
        Self::C2a,
        Self::C2b,
        Self::C3a,
        Self::C3b,
        Self::C4a,
        Self::C4b,
        Self::C4c,
        Self::C4d,
    ];

    pub const FOUR_QUBIT: [ClassTag; 5] = [Self::Ghz4, Self::Cl4, Self::X4, Self::B2, Self::W4];

    pub fn name(self) -> &'static str {
        match self {
            Self::C1 => "c1",
            Self::C2a => "c2a",
            Self::C2b => "c2b",
            Self::C3a => "c3a",
            Self::C3b => "c3b",
            Self::C4a => "c4a",
            Self::C4b => "c4b",
            Self::C4c => "c4c",
            Self::C4d => "c4d",
            Self::Ghz4 => "GHZ4",
            Self::Cl4 => "Cl4",
            Self::X4 => "X4",
            Self::B2 => "B2",
            Self::W4 => "W4",
        }
    }

    pub fn is_three_qubit(self) -> bool {
        Self::THREE_QUBIT.contains(&self)
    }

    pub fn is_four_qubit(self) -> bool {
        Self::FOUR_QUBIT.contains(&self)
    }

    /// Whether the class carries pair concurrence and/or three-tangle.
    fn three_qubit_content(self) -> Result<(bool, bool)> {
        Ok(match self {
            Self::C1 => (false, false),
            Self::C2a | Self::C3a | Self::C4a => (true, false),
            Self::C2b => (false, true),
            Self::C3b | Self::C4b | Self::C4c | Self::C4d => (true, true),
            other => return Err(Error::Domain(format!("{} is not a three-qubit class", other.name()))),
        })
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::THREE_QUBIT
            .iter()
            .chain(Self::FOUR_QUBIT.iter())
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown class tag {s:?}")))
    }
}

/// Coefficient `c` in the class average `F1³ - c R3`.
pub fn class_avg_coefficient(tag: ClassTag) -> Result<f64> {
    tag.three_qubit_content()?;
    Ok(match tag {
        ClassTag::C1 => 0.0,
        ClassTag::C2a => 1.0 / 3.0,
        ClassTag::C2b | ClassTag::C3a | ClassTag::C4a => 1.0,
        ClassTag::C3b => 4.0 / 3.0,
        ClassTag::C4b => 5.0 / 3.0,
        ClassTag::C4c | ClassTag::C4d => 2.0,
        _ => unreachable!(),
    })
}

/// Class-averaged three-qubit fidelity `F1³ - c R3`.
pub fn class_avg_fidelity(tag: ClassTag, f1: SingleQubitAvgFidelity) -> Result<f64> {
    let c = class_avg_coefficient(tag)?;
    Ok(f1.value().powi(3) - c * reduction_factor(ReductionKind::R3, f1))
}

/// Entanglement weight `w` in `F1³ - R3 w` for a class.
///
/// Pair concurrences enter as `2 Σ C²_jk` and the three-tangle as `3 τ₃²`;
/// a class only reads the measures it can carry. For classes whose members
/// come in several pair patterns (2a, 3b, 4b) the sum runs over all pairs,
/// which equals the single-pattern expression on every member.
pub fn entanglement_weight(tag: ClassTag, m: &SquaredMeasures) -> Result<f64> {
    let (pairs, tangle) = tag.three_qubit_content()?;
    let mut w = 0.0;
    if pairs {
        w += 2.0 * m.pair_sum();
    }
    if tangle {
        w += 3.0 * m.tau3_sq;
    }
    Ok(w)
}

/// Local-unitary average for a class member with the given measures.
pub fn class_fixed_entanglement_fidelity(
    tag: ClassTag,
    f1: SingleQubitAvgFidelity,
    measures: &SquaredMeasures,
) -> Result<f64> {
    measures.validate()?;
    let w = entanglement_weight(tag, measures)?;
    Ok(f1.value().powi(3) - reduction_factor(ReductionKind::R3, f1) * w)
}

/// Two-qubit weight `E_2 = 2 C²`.
pub fn two_qubit_entanglement_weight(concurrence: f64) -> f64 {
    2.0 * concurrence * concurrence
}

/// Local-unitary average fidelity of the named four-qubit states:
///
/// - GHZ4, B2: `F1⁴ - 2 R2 (1 - 3F1 + 4F1²)`
/// - Cl4, X4: `F1⁴ - 4 R4b`
/// - W4: `F1⁴ - 3 R4b`
pub fn four_qubit_avg_fidelity(tag: ClassTag, f1: SingleQubitAvgFidelity) -> Result<f64> {
    let f = f1.value();
    let f4 = f.powi(4);
    Ok(match tag {
        ClassTag::Ghz4 | ClassTag::B2 => f4 - 2.0 * reduction_factor(ReductionKind::R2, f1) * quartic_weight(f),
        ClassTag::Cl4 | ClassTag::X4 => f4 - 4.0 * reduction_factor(ReductionKind::R4b, f1),
        ClassTag::W4 => f4 - 3.0 * reduction_factor(ReductionKind::R4b, f1),
        other => return Err(Error::Domain(format!("{} is not a four-qubit state", other.name()))),
    })
}

/// Formula variants that the Monte-Carlo oracle rejects, kept for reports.
pub mod variants {
    use super::*;

    /// Phase-zero two-qubit average with `(3 - |f|² + 2|f|)` in the
    /// concurrence term in place of `(3 - |f|² - 2|f|)`.
    pub fn two_qubit_plus_sign(f_abs: f64, concurrence: f64) -> f64 {
        let x = f_abs * f_abs + 2.0 * f_abs;
        (3.0 + x).powi(2) / 36.0 - x * (3.0 - f_abs * f_abs + 2.0 * f_abs) * concurrence.powi(2) / 18.0
    }

    /// Phase-zero two-qubit average with `(3 - |f|² - 2|f|)`, which equals
    /// `F1² - 2 R2 C²`.
    pub fn two_qubit_minus_sign(f_abs: f64, concurrence: f64) -> f64 {
        let x = f_abs * f_abs + 2.0 * f_abs;
        (3.0 + x).powi(2) / 36.0 - x * (3.0 - x) * concurrence.powi(2) / 18.0
    }

    /// Four-qubit averages with `R4a` (carrying an extra factor `F1`) in the
    /// GHZ4/B2 line; the other states are unchanged.
    pub fn four_qubit_with_r4a(tag: ClassTag, f1: SingleQubitAvgFidelity) -> Result<f64> {
        match tag {
            ClassTag::Ghz4 | ClassTag::B2 => Ok(f1.value().powi(4) - 2.0 * reduction_factor(ReductionKind::R4a, f1)),
            other => four_qubit_avg_fidelity(other, f1),
        }
    }
}
