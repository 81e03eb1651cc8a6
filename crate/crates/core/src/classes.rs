//! Three-qubit entanglement classes and the named four-qubit states.
//!
//! Classification works on the invariant polynomials of a canonical state.
//! The tests run in a fixed order (c1, c2a, c2b, c3a, c3b, c4a, c4b, c4c,
//! c4d) and the first match wins; an input matching nothing is reported as
//! [`Classification::Unclassified`], which is a valid outcome rather than an
//! error.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::entanglement::{gme_concurrence, CanonicalState, InvariantSet};
use crate::fidelity::ClassTag;
use crate::qstate::PureState;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Attempts per sampled state before giving up.
pub const SAMPLER_MAX_ATTEMPTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntanglementClass {
    pub tag: ClassTag,
    /// Sub-pattern for classes with several zero patterns, e.g. `"A-BC"`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variant: Option<String>,
}

impl EntanglementClass {
    fn plain(tag: ClassTag) -> Self {
        Self { tag, variant: None }
    }

    fn with_variant(tag: ClassTag, variant: &str) -> Self {
        Self {
            tag,
            variant: Some(variant.to_owned()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Class(EntanglementClass),
    Unclassified,
}

impl Classification {
    pub fn tag(&self) -> Option<ClassTag> {
        match self {
            Self::Class(c) => Some(c.tag),
            Self::Unclassified => None,
        }
    }

    pub fn label(&self) -> &'static str {
        self.tag().map_or("unclassified", ClassTag::name)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

const BISEPARABLE_LABELS: [&str; 3] = ["A-BC", "B-AC", "C-AB"];
const INVARIANT_LABELS: [&str; 3] = ["J1", "J2", "J3"];

/// Assigns a class to a full invariant set (`J5` required).
pub fn classify_3q(j: &InvariantSet, tol: f64) -> Result<Classification> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let j5 = j
        .j5()
        .ok_or_else(|| Error::Domain("classification needs J5, which is unavailable".into()))?;
    let [j1, j2, j3, j4] = j.j;
    let zero = |v: f64| v.abs() <= tol;
    let eq = |a: f64, b: f64| (a - b).abs() <= tol;
    let pair_zero = [zero(j1), zero(j2), zero(j3)];
    let n_pairs = pair_zero.iter().filter(|z| !**z).count();

    let root = (j1 * j2 * j3).max(0.0).sqrt();
    let sym = j1 * j2 + j1 * j3 + j2 * j3;

    if n_pairs == 0 && zero(j4) && zero(j5) {
        return Ok(Classification::Class(EntanglementClass::plain(ClassTag::C1)));
    }
    if n_pairs == 1 && zero(j4) && zero(j5) {
        let i = pair_zero.iter().position(|z| !*z).unwrap();
        return Ok(Classification::Class(EntanglementClass::with_variant(
            ClassTag::C2a,
            BISEPARABLE_LABELS[i],
        )));
    }
    if n_pairs == 0 && !zero(j4) && zero(j5) {
        return Ok(Classification::Class(EntanglementClass::plain(ClassTag::C2b)));
    }

    let w_family = zero(j4) && gme_concurrence(j) > tol;
    let ghz_family = !zero(j4);

    if w_family && eq(sym, root) && eq(root, j5 / 2.0) {
        return Ok(Classification::Class(EntanglementClass::plain(ClassTag::C3a)));
    }
    if ghz_family && zero(j5) && n_pairs <= 1 {
        let i = pair_zero.iter().position(|z| !*z).unwrap_or(0);
        return Ok(Classification::Class(EntanglementClass::with_variant(
            ClassTag::C3b,
            INVARIANT_LABELS[i],
        )));
    }
    if w_family && eq(root, j5 / 2.0) {
        return Ok(Classification::Class(EntanglementClass::plain(ClassTag::C4a)));
    }
    if ghz_family && zero(j5) && (pair_zero[1] || pair_zero[2]) {
        let label = if pair_zero[1] { "J2=0" } else { "J3=0" };
        return Ok(Classification::Class(EntanglementClass::with_variant(
            ClassTag::C4b,
            label,
        )));
    }
    if ghz_family && eq(j1 * j4 + sym, root) && eq(root, j5 / 2.0) {
        return Ok(Classification::Class(EntanglementClass::plain(ClassTag::C4c)));
    }
    if ghz_family {
        let quartic = (j4 + j5).powi(2) - 4.0 * (j1 + j4) * (j2 + j4) * (j3 + j4);
        if eq(root, j5.abs() / 2.0) && zero(quartic) {
            return Ok(Classification::Class(EntanglementClass::plain(ClassTag::C4d)));
        }
    }
    Ok(Classification::Unclassified)
}

/// Classifies a canonical state.
pub fn classify_canonical(c: &CanonicalState, tol: f64) -> Result<Classification> {
    classify_3q(&c.invariants(), tol)
}

/// Square root of a flat Dirichlet draw: uniform on the positive part of the
/// unit sphere's simplex image, every entry strictly positive.
fn sqrt_dirichlet<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| (d / total).sqrt()).collect()
}

fn spread(support: &[usize], values: &[f64]) -> [f64; 5] {
    let mut lambda = [0.0; 5];
    for (&i, &v) in support.iter().zip(values) {
        lambda[i] = v;
    }
    lambda
}

/// Positive real roots of `x³ + p x + q`.
fn positive_depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let g = |x: f64| x * x * x + p * x + q;
    let bisect = |mut lo: f64, mut hi: f64| {
        let rising = g(hi) > g(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let upper = 1.0 + p.abs() + q.abs();
    let mut knots = vec![0.0];
    if p < 0.0 {
        knots.push((-p / 3.0).sqrt());
    }
    knots.push(upper);
    knots
        .windows(2)
        .filter(|w| g(w[0]).signum() != g(w[1]).signum() && g(w[1]) != 0.0)
        .map(|w| bisect(w[0], w[1]))
        .filter(|&x| x > 0.0)
        .collect()
}

/// One candidate from the GHZ-family surface with all five coefficients
/// nonzero and a real relative phase. On that slice the two class-4d
/// conditions reduce to `λ4³ - (λ0² + λ1² - λ2² - λ3²) λ4 + 2 s λ1 λ2 λ3 = 0`
/// with `s = cos φ`.
fn c4d_candidate<R: Rng + ?Sized>(rng: &mut R) -> Option<([f64; 5], f64)> {
    let l = sqrt_dirichlet(4, rng);
    let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let p = -(l[0] * l[0] + l[1] * l[1] - l[2] * l[2] - l[3] * l[3]);
    let q = 2.0 * s * l[1] * l[2] * l[3];
    let roots = positive_depressed_cubic_roots(p, q);
    if roots.is_empty() {
        return None;
    }
    let x = roots[rng.random_range(0..roots.len())];
    let phi = if s > 0.0 { 0.0 } else { PI };
    Some(([l[0], l[1], l[2], l[3], x], phi))
}

fn class_candidate<R: Rng + ?Sized>(tag: ClassTag, rng: &mut R) -> Result<Option<([f64; 5], f64)>> {
    let phi = rng.random_range(0.0..=PI);
    let support: Vec<usize> = match tag {
        ClassTag::C1 => vec![rng.random_range(0..5)],
        ClassTag::C2a => match rng.random_range(0..3) {
            0 => vec![1, 2, 3, 4],
            1 => vec![0, 2],
            _ => vec![0, 3],
        },
        ClassTag::C2b => vec![0, 4],
        ClassTag::C3a => vec![0, 2, 3],
        ClassTag::C3b => vec![0, 4, rng.random_range(1..4)],
        ClassTag::C4a => vec![0, 1, 2, 3],
        ClassTag::C4b => {
            if rng.random::<bool>() {
                vec![0, 1, 3, 4]
            } else {
                vec![0, 1, 2, 4]
            }
        }
        ClassTag::C4c => vec![0, 2, 3, 4],
        ClassTag::C4d => return Ok(c4d_candidate(rng)),
        other => return Err(Error::Domain(format!("{} is not a three-qubit class", other.name()))),
    };
    let values = sqrt_dirichlet(support.len(), rng);
    Ok(Some((spread(&support, &values), phi)))
}

/// Draws a canonical state of the given class.
///
/// Coefficients come from a square-rooted flat Dirichlet law on the class's
/// support; a draw is kept only if it classifies back to `tag` at
/// [`DEFAULT_TOL`].
pub fn sample_class_state<R: Rng + ?Sized>(tag: ClassTag, rng: &mut R) -> Result<CanonicalState> {
    for _ in 0..SAMPLER_MAX_ATTEMPTS {
        let Some((lambda, phi)) = class_candidate(tag, rng)? else {
            continue;
        };
        let Ok(state) = CanonicalState::normalized(lambda, phi) else {
            continue;
        };
        if classify_canonical(&state, DEFAULT_TOL)?.tag() == Some(tag) {
            return Ok(state);
        }
    }
    Err(Error::SamplerFailure(SAMPLER_MAX_ATTEMPTS))
}

/// GHZ4, Cl4, X4, B2 (with `|Φ> = (|00> + |11>)/√2` on pairs 12 and 34) or W4.
pub fn named_four_qubit_state(tag: ClassTag) -> Result<PureState> {
    let mut a = [0.0; 16];
    match tag {
        ClassTag::Ghz4 => {
            a[0b0000] = FRAC_1_SQRT_2;
            a[0b1111] = FRAC_1_SQRT_2;
        }
        ClassTag::Cl4 => {
            for i in [0b0000, 0b0111, 0b1011, 0b1100] {
                a[i] = 0.5;
            }
        }
        ClassTag::X4 => {
            let s6 = 6f64.sqrt();
            a[0b1111] = 2f64.sqrt() / s6;
            for i in [0b0001, 0b0010, 0b0100, 0b1000] {
                a[i] = 1.0 / s6;
            }
        }
        ClassTag::B2 => {
            for i in [0b0000, 0b0011, 0b1100, 0b1111] {
                a[i] = 0.5;
            }
        }
        ClassTag::W4 => {
            for i in [0b0001, 0b0010, 0b0100, 0b1000] {
                a[i] = 0.5;
            }
        }
        other => {
            return Err(Error::Domain(format!(
                "{} is not a named four-qubit state",
                other.name()
            )))
        }
    }
    PureState::from_real(&a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn j(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64) -> InvariantSet {
        InvariantSet::new(j1, j2, j3, j4, Some(j5))
    }

    fn tag_of(inv: InvariantSet) -> Option<ClassTag> {
        classify_3q(&inv, DEFAULT_TOL).unwrap().tag()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(tag_of(j(0.0, 0.0, 0.0, 0.0, 0.0)), Some(ClassTag::C1));
        assert_eq!(tag_of(j(0.0, 0.0, 0.0, 0.25, 0.0)), Some(ClassTag::C2b));
        let s = 1.0 / 16.0;
        assert_eq!(tag_of(j(s, s, s, 0.0, 1.0 / 32.0)), Some(ClassTag::C4a));
    }

    #[test]
    fn biseparable_variants() {
        let c = classify_3q(&j(0.0, 0.2, 0.0, 0.0, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(
            c,
            Classification::Class(EntanglementClass::with_variant(ClassTag::C2a, "B-AC"))
        );
    }

    #[test]
    fn w_state_is_class_3a() {
        let h = 1.0 / 3f64.sqrt();
        let w = CanonicalState::new([h, 0.0, h, h, 0.0], 0.0).unwrap();
        assert_eq!(classify_canonical(&w, DEFAULT_TOL).unwrap().tag(), Some(ClassTag::C3a));
    }

    #[test]
    fn generic_state_is_unclassified() {
        let c = CanonicalState::normalized([0.5, 0.4, 0.3, 0.2, 0.6], 1.0).unwrap();
        assert_eq!(
            classify_canonical(&c, DEFAULT_TOL).unwrap(),
            Classification::Unclassified
        );
        assert_eq!(Classification::Unclassified.label(), "unclassified");
    }

    #[test]
    fn classify_errors() {
        let no_j5 = InvariantSet::new(0.0, 0.0, 0.0, 0.0, None);
        assert!(classify_3q(&no_j5, DEFAULT_TOL).is_err());
        assert!(classify_3q(&j(0.0, 0.0, 0.0, 0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn cubic_roots() {
        // (x - 1)(x - 2)(x + 3) = x³ - 7x + 6
        let mut r = positive_depressed_cubic_roots(-7.0, 6.0);
        r.sort_by(f64::total_cmp);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
        assert!(positive_depressed_cubic_roots(1.0, 1.0).is_empty());
        let r = positive_depressed_cubic_roots(-1.0, -0.5);
        assert_eq!(r.len(), 1);
        assert!((r[0].powi(3) - r[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sampler_round_trips_every_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for tag in ClassTag::THREE_QUBIT {
            for _ in 0..50 {
                let c = sample_class_state(tag, &mut rng).unwrap();
                assert_eq!(classify_canonical(&c, DEFAULT_TOL).unwrap().tag(), Some(tag));
            }
        }
    }

    #[test]
    fn sampler_rejects_four_qubit_tags() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_class_state(ClassTag::W4, &mut rng).is_err());
    }

    #[test]
    fn named_states() {
        let ghz = named_four_qubit_state(ClassTag::Ghz4).unwrap();
        assert!((ghz.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((ghz.amplitudes()[15].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let x4 = named_four_qubit_state(ClassTag::X4).unwrap();
        assert!((x4.amplitudes()[15].re - 2f64.sqrt() / 6f64.sqrt()).abs() < 1e-15);
        assert!((x4.amplitudes()[1].re - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        let w4 = named_four_qubit_state(ClassTag::W4).unwrap();
        for i in [1, 2, 4, 8] {
            assert!((w4.amplitudes()[i].re - 0.5).abs() < 1e-15);
        }
        let bell = PureState::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let b2 = named_four_qubit_state(ClassTag::B2).unwrap();
        assert!((b2.inner(&bell.tensor(&bell).unwrap()).unwrap().norm() - 1.0).abs() < 1e-15);
        for tag in ClassTag::FOUR_QUBIT {
            assert!((named_four_qubit_state(tag).unwrap().norm_sqr() - 1.0).abs() < 1e-14);
        }
        assert!(named_four_qubit_state(ClassTag::C1).is_err());
    }
}
