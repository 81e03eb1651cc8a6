use std::io::Write;

use serde::Serialize;

use super::{emit, read_input, ClassifyArgs, CliResult, EXIT_OK};
use crate::classes::{classify_canonical, Classification};
use crate::entanglement::{CanonicalState, MeasureSet};
use crate::io::{canonical_from_json, to_json};
use crate::Result;

#[derive(Debug, Serialize)]
pub struct ClassifyOutput {
    #[serde(rename = "J")]
    pub j: [f64; 5],
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub measures: MeasureSet,
}

pub fn classify_report(c: &CanonicalState, tol: f64) -> Result<ClassifyOutput> {
    let inv = c.invariants();
    let classification = classify_canonical(c, tol)?;
    let variant = match &classification {
        Classification::Class(e) => e.variant.clone(),
        Classification::Unclassified => None,
    };
    Ok(ClassifyOutput {
        j: [
            inv.j1(),
            inv.j2(),
            inv.j3(),
            inv.j4(),
            inv.j5().expect("canonical states carry J5"),
        ],
        class: classification.label().to_owned(),
        variant,
        measures: MeasureSet::from_state(&c.to_state())?,
    })
}

pub(super) fn command(args: ClassifyArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let text = read_input(&args.state)?;
    let c = canonical_from_json(&text)?;
    let report = classify_report(&c, args.tol)?;
    emit(args.out.as_deref(), &to_json(&report)?, stdout)?;
    Ok(EXIT_OK)
}
