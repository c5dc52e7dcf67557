//! Versioned JSON form of a [`SamplerState`].
//!
//! The alias table is not stored; it is rebuilt from `S` and the cached
//! degrees on load.

use serde::{Deserialize, Serialize};

use super::{SamplerConfig, SamplerState};
use crate::error::SamplerError;
use crate::estimator::EstimatorMode;
use crate::graph::{Graph, VertexId};

pub const STATE_FORMAT: &str = "subedge-sampler-state";
pub const STATE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub format: String,
    pub version: u32,
    pub n: usize,
    /// [`Graph::fingerprint`] of the graph the state was built on, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_fingerprint: Option<String>,
    pub eps: f64,
    pub delta: f64,
    pub x: f64,
    pub seed: u64,
    pub estimator: EstimatorMode,
    pub x_bar: f64,
    pub tau: f64,
    pub gamma_bar: f64,
    pub avg_degree_estimate: f64,
    pub t: u32,
    pub s: usize,
    pub sets_drawn: u32,
    pub sample_degree_sum: u64,
    pub sample: Vec<VertexId>,
    pub sample_degrees: Vec<u32>,
}

/// Relative tolerance for re-derived real-valued fields.
const REL_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

impl SamplerState {
    pub fn to_document(&self, graph_fingerprint: Option<String>) -> StateDocument {
        StateDocument {
            format: STATE_FORMAT.to_string(),
            version: STATE_VERSION,
            n: self.n,
            graph_fingerprint,
            eps: self.config.eps,
            delta: self.config.delta,
            x: self.config.x,
            seed: self.config.seed,
            estimator: self.config.estimator,
            x_bar: self.x_bar,
            tau: self.tau,
            gamma_bar: self.gamma_bar,
            avg_degree_estimate: self.avg_degree_estimate,
            t: self.repetitions,
            s: self.sample.len(),
            sets_drawn: self.sets_drawn,
            sample_degree_sum: self.sample_degree_sum,
            sample: self.sample.clone(),
            sample_degrees: self.sample_degrees.clone(),
        }
    }

    /// Rebuilds a state, re-deriving `x̄`, `τ`, `γ̄` and `m(S)` and rejecting
    /// documents whose stored values disagree.
    pub fn from_document(doc: &StateDocument) -> Result<SamplerState, SamplerError> {
        let bad = |msg: String| Err(SamplerError::InvalidState(msg));
        if doc.format != STATE_FORMAT {
            return bad(format!("unknown format {:?}", doc.format));
        }
        if doc.version != STATE_VERSION {
            return bad(format!("unsupported state version {}", doc.version));
        }
        if doc.s != doc.sample.len() {
            return bad(format!("s={} but S has {} entries", doc.s, doc.sample.len()));
        }
        if let Some(v) = doc.sample.iter().find(|&&v| v as usize >= doc.n) {
            return bad(format!("vertex {v} in S is not below n={}", doc.n));
        }
        let config = SamplerConfig {
            eps: doc.eps,
            delta: doc.delta,
            x: doc.x,
            seed: doc.seed,
            estimator: doc.estimator,
        };
        config.validate()?;
        let state = SamplerState::assemble(
            doc.n,
            config,
            doc.avg_degree_estimate,
            doc.t,
            doc.sets_drawn,
            doc.sample.clone(),
            doc.sample_degrees.clone(),
        )?;
        if state.sample_degree_sum != doc.sample_degree_sum {
            return bad(format!(
                "m(S)={} but the cached degrees sum to {}",
                doc.sample_degree_sum, state.sample_degree_sum
            ));
        }
        for (name, stored, derived) in [
            ("x_bar", doc.x_bar, state.x_bar),
            ("tau", doc.tau, state.tau),
            ("gamma_bar", doc.gamma_bar, state.gamma_bar),
        ] {
            if !close(stored, derived) {
                return bad(format!("{name}={stored} but the other fields give {derived}"));
            }
        }
        Ok(state)
    }

    pub fn to_json(&self, graph_fingerprint: Option<String>) -> String {
        serde_json::to_string_pretty(&self.to_document(graph_fingerprint)).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<SamplerState, SamplerError> {
        let doc: StateDocument = serde_json::from_str(text)
            .map_err(|e| SamplerError::InvalidState(format!("bad state JSON: {e}")))?;
        SamplerState::from_document(&doc)
    }
}

impl StateDocument {
    /// Checks that the document was built for `graph`: same `n`, same
    /// fingerprint when one is recorded, and cached degrees that match.
    pub fn check_graph(&self, graph: &Graph) -> Result<(), SamplerError> {
        if self.n != graph.n() {
            return Err(SamplerError::GraphMismatch(format!(
                "state has n={} but the graph has n={}",
                self.n,
                graph.n()
            )));
        }
        if let Some(fp) = &self.graph_fingerprint {
            let actual = graph.fingerprint();
            if *fp != actual {
                return Err(SamplerError::GraphMismatch(format!(
                    "state fingerprint {fp} but the graph fingerprint is {actual}"
                )));
            }
        }
        for (&v, &d) in self.sample.iter().zip(&self.sample_degrees) {
            if v as usize >= graph.n() || graph.degree(v) != d as usize {
                return Err(SamplerError::GraphMismatch(format!(
                    "cached degree {d} of vertex {v} does not match the graph"
                )));
            }
        }
        Ok(())
    }
}
