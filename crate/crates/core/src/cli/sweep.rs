use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use super::{emit, CliError, CliResult, Format, SweepArgs, EXIT_OK};
use crate::channel::TransitionAmplitude;
use crate::fidelity::{
    avg_fidelity_haar_closed, avg_fidelity_single, class_avg_fidelity, four_qubit_avg_fidelity, reduction_factor,
    ClassTag, ReductionKind, SingleQubitAvgFidelity,
};
use crate::io::to_json;
use crate::Result;

/// Evenly spaced grid including both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub const DEFAULT_F1: Grid = Grid {
        start: 0.5,
        stop: 1.0,
        steps: 501,
    };

    pub const DEFAULT_F_ABS: Grid = Grid {
        start: 0.0,
        stop: 1.0,
        steps: 501,
    };

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(move |i| {
            if i + 1 == self.steps {
                self.stop
            } else {
                self.start + (self.stop - self.start) * i as f64 / last
            }
        })
    }
}

impl FromStr for Grid {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(CliError::usage(format!("grid {s:?} is not START:STOP:STEPS")));
        };
        let bad = |what: &str| CliError::usage(format!("grid {s:?}: bad {what}"));
        let start: f64 = a.trim().parse().map_err(|_| bad("start"))?;
        let stop: f64 = b.trim().parse().map_err(|_| bad("stop"))?;
        let steps: usize = n.trim().parse().map_err(|_| bad("step count"))?;
        if steps < 2 {
            return Err(CliError::usage(format!("grid {s:?} needs at least 2 steps")));
        }
        if !(start.is_finite() && stop.is_finite()) || start > stop {
            return Err(CliError::usage(format!("grid {s:?} needs finite start <= stop")));
        }
        Ok(Self { start, stop, steps })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepQuantity {
    Reduction(ReductionKind),
    ClassAverage(Option<ClassTag>),
    FourQubit(Option<ClassTag>),
    Haar(usize),
}

impl FromStr for SweepQuantity {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let tag = |a: Option<&str>, four: bool| -> CliResult<Option<ClassTag>> {
            let Some(a) = a else { return Ok(None) };
            let t: ClassTag = a.parse().map_err(|e: crate::Error| CliError::usage(e.to_string()))?;
            if t.is_four_qubit() != four {
                return Err(CliError::usage(format!("{t} does not belong to {head}")));
            }
            Ok(Some(t))
        };
        match head {
            "class_avg" => Ok(Self::ClassAverage(tag(arg, false)?)),
            "four_qubit" => Ok(Self::FourQubit(tag(arg, true)?)),
            "haar" => {
                let n = arg
                    .and_then(|a| a.parse::<usize>().ok())
                    .filter(|n| (1..=62).contains(n))
                    .ok_or_else(|| CliError::usage("haar needs a qubit count, e.g. haar:3"))?;
                Ok(Self::Haar(n))
            }
            _ if arg.is_none() => head
                .parse()
                .map(Self::Reduction)
                .map_err(|_| CliError::usage(format!("unknown quantity {s:?}"))),
            _ => Err(CliError::usage(format!("unknown quantity {s:?}"))),
        }
    }
}

/// What to tabulate and over which grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub quantity: SweepQuantity,
    pub axis: SweepAxis,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepAxis {
    F1(Grid),
    FAbs { grid: Grid, phase: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub quantity: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    /// Header plus one line per row; values in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn tags_for(quantity: SweepQuantity) -> Vec<ClassTag> {
    match quantity {
        SweepQuantity::ClassAverage(Some(t)) | SweepQuantity::FourQubit(Some(t)) => vec![t],
        SweepQuantity::ClassAverage(None) => ClassTag::THREE_QUBIT.to_vec(),
        SweepQuantity::FourQubit(None) => ClassTag::FOUR_QUBIT.to_vec(),
        _ => Vec::new(),
    }
}

fn quantity_label(q: SweepQuantity) -> String {
    match q {
        SweepQuantity::Reduction(k) => k.name().to_owned(),
        SweepQuantity::ClassAverage(t) => t.map_or("class_avg".into(), |t| format!("class_avg:{t}")),
        SweepQuantity::FourQubit(t) => t.map_or("four_qubit".into(), |t| format!("four_qubit:{t}")),
        SweepQuantity::Haar(n) => format!("haar:{n}"),
    }
}

fn values_at_f1(q: SweepQuantity, f1: SingleQubitAvgFidelity) -> Result<Vec<f64>> {
    match q {
        SweepQuantity::Reduction(k) => Ok(vec![reduction_factor(k, f1)]),
        SweepQuantity::ClassAverage(_) => tags_for(q).into_iter().map(|t| class_avg_fidelity(t, f1)).collect(),
        SweepQuantity::FourQubit(_) => tags_for(q)
            .into_iter()
            .map(|t| four_qubit_avg_fidelity(t, f1))
            .collect(),
        SweepQuantity::Haar(_) => unreachable!("haar sweeps run over |f|"),
    }
}

/// Tabulates the requested quantity.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<SweepTable> {
    let q = spec.quantity;
    let mut value_columns: Vec<String> = match q {
        SweepQuantity::Reduction(k) => vec![k.name().to_owned()],
        SweepQuantity::Haar(n) => vec![format!("F{n}")],
        _ => tags_for(q).iter().map(|t| t.name().to_owned()).collect(),
    };
    let mut rows = Vec::new();
    let columns = match spec.axis {
        SweepAxis::F1(grid) => {
            if matches!(q, SweepQuantity::Haar(_)) {
                return Err(CliError::usage("haar sweeps take --f-abs, not --f1"));
            }
            if grid.start < SingleQubitAvgFidelity::MIN || grid.stop > SingleQubitAvgFidelity::MAX {
                return Err(CliError::usage("F1 grid must lie within [0.5, 1]"));
            }
            for x in grid.points() {
                let f1 = SingleQubitAvgFidelity::new(x)?;
                let mut row = vec![x];
                row.extend(values_at_f1(q, f1)?);
                rows.push(row);
            }
            let mut c = vec!["F1".to_owned()];
            c.append(&mut value_columns);
            c
        }
        SweepAxis::FAbs { grid, phase } => {
            if grid.start < 0.0 || grid.stop > 1.0 {
                return Err(CliError::usage("|f| grid must lie within [0, 1]"));
            }
            for x in grid.points() {
                let f = TransitionAmplitude::new(x, phase)?;
                let f1_raw = avg_fidelity_single(f);
                let mut row = vec![x, f1_raw];
                match q {
                    SweepQuantity::Haar(n) => row.push(avg_fidelity_haar_closed(n, f)?),
                    _ => {
                        let f1 = SingleQubitAvgFidelity::new(f1_raw).map_err(|_| {
                            CliError::usage(format!(
                                "|f| = {x} at phase {phase} gives F1 = {f1_raw} < 1/2; use haar or a smaller phase"
                            ))
                        })?;
                        row.extend(values_at_f1(q, f1)?);
                    }
                }
                rows.push(row);
            }
            let mut c = vec!["f_abs".to_owned(), "F1".to_owned()];
            c.append(&mut value_columns);
            c
        }
    };
    Ok(SweepTable {
        quantity: quantity_label(q),
        columns,
        rows,
    })
}

pub(super) fn command(args: SweepArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let quantity: SweepQuantity = args.quantity.parse()?;
    let axis = match (&args.f1, &args.f_abs) {
        (Some(_), Some(_)) => return Err(CliError::usage("give either --f1 or --f-abs, not both")),
        (Some(g), None) => SweepAxis::F1(g.parse()?),
        (None, Some(g)) => SweepAxis::FAbs {
            grid: g.parse()?,
            phase: args.f_phase,
        },
        (None, None) if matches!(quantity, SweepQuantity::Haar(_)) => SweepAxis::FAbs {
            grid: Grid::DEFAULT_F_ABS,
            phase: args.f_phase,
        },
        (None, None) => SweepAxis::F1(Grid::DEFAULT_F1),
    };
    let table = run_sweep(&SweepSpec { quantity, axis })?;
    let text = match args.format {
        Format::Csv => table.to_csv().trim_end_matches('\n').to_owned(),
        Format::Json => to_json(&table)?,
    };
    emit(args.out.as_deref(), &text, stdout)?;
    Ok(EXIT_OK)
}
