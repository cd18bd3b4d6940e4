//! Numerical certificate that a program implements a target unitary.
//!
//! Two kinds of evidence are gathered. Per-branch fidelities say which
//! transcript goes wrong; the Choi distance compares the whole channels.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::builder::{build_program, build_specification, BuildError, NonlocalCU};
use crate::executor::{channel_choi, run_branches, unitary_choi, ExecError};
use crate::protocol::{resource_census, validate_locality, Bit, Program, ResourceCensus};
use crate::qsim::{random, QsimError, State, Unitary};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum VerifyError {
    #[error("program has {program} external wires but the specification acts on {spec} qubits")]
    DimensionMismatch { program: usize, spec: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Largest accepted `1 − |⟨ψ_branch|U ψ_in⟩|`.
    pub tol_branch: f64,
    /// Largest accepted Frobenius distance between the two Choi matrices.
    pub tol_choi: f64,
    /// Total probe inputs; raised to the basis size if smaller.
    pub probes: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol_branch: 1e-10,
            tol_choi: 1e-9,
            probes: 16,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub branch: f64,
    pub choi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranscriptBit {
    pub wire: String,
    pub bit: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchReport {
    pub transcript: Vec<TranscriptBit>,
    /// Mean probability of this transcript over the probe inputs.
    pub probability: f64,
    /// Worst infidelity over the probe inputs on which it occurred.
    pub max_infidelity: f64,
}

impl BranchReport {
    pub fn bits(&self) -> String {
        self.transcript
            .iter()
            .map(|t| if t.bit == 1 { '1' } else { '0' })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub tolerances: Tolerances,
    pub census: ResourceCensus,
    pub choi_distance: f64,
    pub max_infidelity: f64,
    pub probes: usize,
    pub seed: u64,
    pub branches: Vec<BranchReport>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Builds the protocol for `spec` and checks it against `controlled(C)`.
pub fn verify<T: Real>(
    spec: &NonlocalCU<T>,
    opts: &VerifyOptions,
) -> Result<EquivalenceReport, VerifyError> {
    let program = build_program(spec);
    let target = build_specification(spec)?;
    verify_program(&program, &target, opts)
}

/// The full computational basis, then seeded Haar-random states.
pub fn probe_states<T: Real>(
    n_qubits: usize,
    opts: &VerifyOptions,
) -> Result<Vec<State<T>>, QsimError> {
    let basis = 1usize << n_qubits;
    let total = opts.probes.max(basis);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut probes = Vec::with_capacity(total);
    for i in 0..basis {
        probes.push(State::basis(n_qubits, i)?);
    }
    while probes.len() < total {
        probes.push(random::haar_state(n_qubits, &mut rng)?);
    }
    Ok(probes)
}

pub fn verify_program<T: Real>(
    program: &Program<T>,
    target: &Unitary<T>,
    opts: &VerifyOptions,
) -> Result<EquivalenceReport, VerifyError> {
    let n = program.n_external();
    if target.n_qubits() != n {
        return Err(VerifyError::DimensionMismatch {
            program: n,
            spec: target.n_qubits(),
        });
    }
    validate_locality(program).map_err(ExecError::Invalid)?;

    let probes = probe_states::<T>(n, opts)?;
    let wires: Vec<usize> = (0..n).collect();
    // transcript -> (summed probability, worst infidelity)
    let mut stats: BTreeMap<Vec<(Bit, bool)>, (f64, f64)> = BTreeMap::new();
    for input in &probes {
        let expected = input.apply_unitary(&wires, target)?;
        for outcome in run_branches(program, input)? {
            let infidelity = (1.0 - outcome.final_state.fidelity(&expected)?.as_f64()).max(0.0);
            let entry = stats.entry(outcome.transcript).or_insert((0.0, 0.0));
            entry.0 += outcome.probability.as_f64();
            entry.1 = entry.1.max(infidelity);
        }
    }

    let choi_distance = channel_choi(program)?
        .frobenius_distance(&unitary_choi(target)?)
        .expect("choi dimensions agree");

    let branches: Vec<BranchReport> = stats
        .into_iter()
        .map(|(transcript, (p_sum, worst))| BranchReport {
            transcript: transcript
                .into_iter()
                .map(|(b, v)| TranscriptBit {
                    wire: b.to_string(),
                    bit: u8::from(v),
                })
                .collect(),
            probability: p_sum / probes.len() as f64,
            max_infidelity: worst,
        })
        .collect();
    let max_infidelity = branches
        .iter()
        .map(|b| b.max_infidelity)
        .fold(0.0, f64::max);
    let pass = max_infidelity <= opts.tol_branch && choi_distance <= opts.tol_choi;

    Ok(EquivalenceReport {
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        tolerances: Tolerances {
            branch: opts.tol_branch,
            choi: opts.tol_choi,
        },
        census: resource_census(program),
        choi_distance,
        max_infidelity,
        probes: probes.len(),
        seed: opts.seed,
        branches,
    })
}
