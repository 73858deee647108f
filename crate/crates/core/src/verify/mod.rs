//! Certification of output states.

mod ame;
mod code;
mod density;

use serde::Serialize;

pub use ame::{is_ame, AmeReport, SubsetRecord};
pub use code::{
    codeword_transform_check, hadamard_outer, kl_check, kl_check_with, qecc312, qecc312_codewords,
    qecc312_shift, CodeSpec, KlRecord, KlReport, PauliString, TransformReport,
};
pub use density::{entropy, partial_trace, purity, DensityMatrix};

use crate::error::{Error, Result};
use crate::graph::{build_graph_state_on, builtin_target_graph, phase_polynomial_of, WeightedGraph};
use crate::protocol::{builtin_info, BuiltinInfo, RunRecord, Verification};
use crate::state::RegisterState;
use crate::STATE_TOL;

/// `|⟨a|b⟩|`.
pub fn overlap(a: &RegisterState, b: &RegisterState) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

/// True iff `|⟨a|b⟩| ≥ 1 − tol`.
pub fn equiv_global_phase(a: &RegisterState, b: &RegisterState, tol: f64) -> Result<bool> {
    Ok(overlap(a, b)? >= 1.0 - tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub q: u32,
    pub n: usize,
    pub overlap: f64,
    pub tol: f64,
    pub verdict: bool,
    /// Edges `(a, b, weight)` read back from the state's phases, when the
    /// state has graph-state form up to local Z powers.
    pub recovered_edges: Option<Vec<(usize, usize, u32)>>,
}

/// Compare a state against the graph state of `graph` built on the state's
/// own sites in positional order.
pub fn compare_graph(state: &RegisterState, graph: &WeightedGraph, tol: f64) -> Result<GraphReport> {
    if graph.q() != state.q() || graph.n() != state.num_sites() {
        return Err(Error::ShapeMismatch(format!(
            "graph with q={} on {} vertices vs state with q={} on {} sites",
            graph.q(),
            graph.n(),
            state.q(),
            state.num_sites()
        )));
    }
    let target = build_graph_state_on(graph, state.sites().to_vec())?;
    let overlap = overlap(state, &target)?;
    let recovered_edges = phase_polynomial_of(state).ok().map(|p| p.graph().edges());
    Ok(GraphReport {
        q: state.q(),
        n: state.num_sites(),
        overlap,
        tol,
        verdict: overlap >= 1.0 - tol,
        recovered_edges,
    })
}

/// Outcome of a builtin's advertised check on one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuiltinCheck {
    pub name: String,
    pub q: u32,
    pub target_matches: bool,
    pub ame: Option<bool>,
    pub verdict: bool,
}

/// Run the verification a builtin advertises against its output.
/// `n` is the chain length for the linear chains.
pub fn check_builtin(record: &RunRecord, n: Option<usize>) -> Result<BuiltinCheck> {
    let info: &BuiltinInfo = builtin_info(&record.protocol)?;
    let state = &record.state;
    let q = state.q();
    let (target_matches, ame) = match info.verification {
        Verification::Graph(g) | Verification::AmeGraph(g) => {
            let graph = builtin_target_graph(g, q, n.or(Some(state.num_sites())))?;
            let matches = compare_graph(state, &graph, STATE_TOL)?.verdict;
            let ame = matches!(info.verification, Verification::AmeGraph(_))
                .then(|| is_ame(state, STATE_TOL).verdict);
            (matches, ame)
        }
        Verification::Codeword(m) => {
            let target = hadamard_outer(&qecc312_codewords()[m])?;
            (equiv_global_phase(state, &target, STATE_TOL)?, None)
        }
    };
    Ok(BuiltinCheck {
        name: info.name.to_string(),
        q,
        target_matches,
        ame,
        verdict: target_matches && ame.unwrap_or(true),
    })
}
