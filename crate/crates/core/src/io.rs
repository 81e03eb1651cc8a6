//! JSON file formats.
//!
//! Floats are written in scientific notation with 17 significant digits and
//! parsed with correct rounding, so every value survives a write/read cycle
//! bit for bit.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::channel::ChainSpec;
use crate::entanglement::CanonicalState;
use crate::qstate::{DensityMatrix, PureState};
use crate::{Error, Result, C64};

/// Compact JSON formatter printing floats as `{:.16e}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFloatFormatter;

impl Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with [`ExactFloatFormatter`].
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Writes `text` plus a trailing newline.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

fn pairs(values: impl Iterator<Item = C64>) -> Vec<[f64; 2]> {
    values.map(|z| [z.re, z.im]).collect()
}

fn complex(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

/// `{"n_qubits": k, "amplitudes": [[re, im], ...]}`, big-endian basis order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n_qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&PureState> for StateFile {
    fn from(psi: &PureState) -> Self {
        Self {
            n_qubits: psi.n_qubits(),
            amplitudes: pairs(psi.amplitudes().iter().copied()),
        }
    }
}

impl StateFile {
    pub fn into_state(self) -> Result<PureState> {
        let psi = PureState::new(complex(&self.amplitudes))?;
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!(
                "n_qubits = {} but {} amplitudes given",
                self.n_qubits,
                self.amplitudes.len()
            )));
        }
        Ok(psi)
    }
}

pub fn state_to_json(psi: &PureState) -> Result<String> {
    to_json(&StateFile::from(psi))
}

pub fn state_from_json(text: &str) -> Result<PureState> {
    from_json::<StateFile>(text)?.into_state()
}

/// `{"n_qubits": k, "dim": d, "entries": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub n_qubits: usize,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&DensityMatrix> for DensityFile {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.entries();
        let d = m.nrows();
        Self {
            n_qubits: rho.n_qubits(),
            dim: d,
            entries: pairs((0..d).flat_map(|i| (0..d).map(move |j| m[(i, j)]))),
        }
    }
}

impl DensityFile {
    pub fn into_density(self) -> Result<DensityMatrix> {
        let d = self.dim;
        if d != 1usize.checked_shl(self.n_qubits as u32).unwrap_or(0) || self.entries.len() != d * d {
            return Err(Error::Shape(format!(
                "n_qubits = {}, dim = {d} and {} entries do not agree",
                self.n_qubits,
                self.entries.len()
            )));
        }
        let values = complex(&self.entries);
        DensityMatrix::new(DMatrix::from_row_slice(d, d, &values))
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> Result<String> {
    to_json(&DensityFile::from(rho))
}

pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    from_json::<DensityFile>(text)?.into_density()
}

/// `{"lambda": [λ0, ..., λ4], "phi": φ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalFile {
    pub lambda: [f64; 5],
    pub phi: f64,
}

pub fn canonical_from_json(text: &str) -> Result<CanonicalState> {
    let c: CanonicalFile = from_json(text)?;
    CanonicalState::new(c.lambda, c.phi)
}

pub fn canonical_to_json(c: &CanonicalState) -> Result<String> {
    to_json(&CanonicalFile {
        lambda: c.lambda(),
        phi: c.phi(),
    })
}

/// `{"N": n, "J": [...], "h": [...]}`; `h` may be omitted.
pub fn chain_from_json(text: &str) -> Result<ChainSpec> {
    let spec: ChainSpec = from_json(text)?;
    spec.validate()?;
    Ok(spec)
}
