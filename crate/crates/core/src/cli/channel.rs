use std::io::Write;

use serde::Serialize;

use super::{emit, read_input, ChannelArgs, CliError, CliResult, EXIT_OK};
use crate::channel::{apply_parallel_channels, chain_transition_amplitude, TransitionAmplitude};
use crate::fidelity::fidelity;
use crate::io::{chain_from_json, state_from_json, to_json, DensityFile};

#[derive(Serialize)]
struct ChannelOutput {
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<DensityFile>,
}

fn amplitudes(args: &ChannelArgs, n_qubits: usize) -> CliResult<Vec<TransitionAmplitude>> {
    if let Some(path) = &args.chain {
        let spec = chain_from_json(&read_input(path)?)?;
        let t = args.time.expect("clap requires --time with --chain");
        let f = chain_transition_amplitude(&spec, 1, spec.length, t)?;
        return Ok(vec![f; n_qubits]);
    }
    let mut mags = args.f_abs.clone();
    if mags.is_empty() {
        return Err(CliError::usage("give --f-abs or --chain"));
    }
    if mags.len() == 1 {
        mags = vec![mags[0]; n_qubits];
    }
    if mags.len() != n_qubits {
        return Err(CliError::usage(format!(
            "{} amplitudes for a {n_qubits}-qubit state",
            mags.len()
        )));
    }
    let phases = match args.f_phase.len() {
        0 => vec![0.0; n_qubits],
        1 => vec![args.f_phase[0]; n_qubits],
        k if k == n_qubits => args.f_phase.clone(),
        k => return Err(CliError::usage(format!("{k} phases for a {n_qubits}-qubit state"))),
    };
    mags.iter()
        .zip(&phases)
        .map(|(&m, &p)| TransitionAmplitude::new(m, p).map_err(CliError::from))
        .collect()
}

pub(super) fn command(args: ChannelArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let psi = state_from_json(&read_input(&args.state)?)?;
    let fs = amplitudes(&args, psi.n_qubits())?;
    let rho = apply_parallel_channels(&psi.to_density(), &fs)?;
    let fid = fidelity(&psi, &rho)?;
    if let Some(path) = args.out.as_deref() {
        emit(Some(path), &crate::io::density_to_json(&rho)?, stdout)?;
    }
    let out = ChannelOutput {
        fidelity: fid,
        density: args.out.is_none().then(|| DensityFile::from(&rho)),
    };
    emit(None, &to_json(&out)?, stdout)?;
    Ok(EXIT_OK)
}
