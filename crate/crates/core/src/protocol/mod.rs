//! Emitter/photon protocols as instruction sequences, and their execution.
//!
//! Emitters start in `|0⟩`. `PUMP` appends a photon site carrying a copy of
//! the emitter's digit. `MEAS` collapses an emitter in the Z basis and
//! removes it from the register; later `CORR` instructions apply `Z` (or
//! `X`) powers that are linear in the recorded outcomes. A photon may be the
//! target of any gate, including a `CZ` with an emitter, which models
//! re-interfering a stored photon with that emitter.

mod builtins;
mod expr;
mod parse;

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{RegisterState, Site, SiteKind};

pub use builtins::{builtin, builtin_info, BuiltinInfo, Dims, Verification, BUILTINS};
pub use expr::{Coef, LinearExpr};
pub use parse::parse_protocol;

/// Probability below which a forced outcome is treated as impossible.
pub const IMPOSSIBLE_BRANCH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrectionGate {
    X,
    Z,
}

impl fmt::Display for CorrectionGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrectionGate::X => f.write_str("X"),
            CorrectionGate::Z => f.write_str("Z"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    H(String),
    HDag(String),
    X(String, u32),
    Z(String, u32),
    Cz(String, String, u32),
    Pump { emitter: String, photon: String },
    Measure { emitter: String, variable: String },
    Correct {
        target: String,
        gate: CorrectionGate,
        exponent: LinearExpr,
    },
}

impl Instruction {
    /// Registers this instruction acts on (the pumped photon excluded).
    pub fn targets(&self) -> Vec<&str> {
        match self {
            Instruction::H(t)
            | Instruction::HDag(t)
            | Instruction::X(t, _)
            | Instruction::Z(t, _)
            | Instruction::Correct { target: t, .. } => vec![t],
            Instruction::Cz(a, b, _) => vec![a, b],
            Instruction::Pump { emitter, .. } | Instruction::Measure { emitter, .. } => {
                vec![emitter]
            }
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::H(t) => write!(f, "H {t}"),
            Instruction::HDag(t) => write!(f, "HDAG {t}"),
            Instruction::X(t, a) => write!(f, "X {t} {a}"),
            Instruction::Z(t, b) => write!(f, "Z {t} {b}"),
            Instruction::Cz(a, b, beta) => write!(f, "CZ {a} {b} {beta}"),
            Instruction::Pump { emitter, photon } => write!(f, "PUMP {emitter} {photon}"),
            Instruction::Measure { emitter, variable } => write!(f, "MEAS {emitter} {variable}"),
            Instruction::Correct {
                target,
                gate,
                exponent,
            } => write!(f, "CORR {target} {gate} {exponent}"),
        }
    }
}

/// A complete protocol: local dimension, emitter registers, program, and
/// the order in which photons are presented in the final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    pub name: String,
    pub q: u32,
    pub emitters: Vec<String>,
    pub instructions: Vec<Instruction>,
    /// Final photon order; `None` keeps emission order.
    pub order: Option<Vec<String>>,
}

/// Static well-formedness tracker shared by the parser and [`Protocol::validate`].
#[derive(Debug, Default)]
pub(crate) struct Checker {
    live_emitters: HashSet<String>,
    measured: HashSet<String>,
    photons: Vec<String>,
    variables: HashSet<String>,
}

impl Checker {
    pub(crate) fn new(emitters: &[String]) -> std::result::Result<Self, String> {
        let mut checker = Self::default();
        for e in emitters {
            if !checker.live_emitters.insert(e.clone()) {
                return Err(format!("emitter `{e}` declared twice"));
            }
        }
        Ok(checker)
    }

    fn require_live(&self, label: &str) -> std::result::Result<(), String> {
        if self.live_emitters.contains(label) || self.photons.iter().any(|p| p == label) {
            Ok(())
        } else if self.measured.contains(label) {
            Err(format!("emitter `{label}` targeted after its measurement"))
        } else {
            Err(format!("unknown register `{label}`"))
        }
    }

    fn require_emitter(&self, label: &str) -> std::result::Result<(), String> {
        if self.live_emitters.contains(label) {
            Ok(())
        } else if self.measured.contains(label) {
            Err(format!("emitter `{label}` was already measured"))
        } else {
            Err(format!("`{label}` is not an emitter"))
        }
    }

    fn is_taken(&self, label: &str) -> bool {
        self.live_emitters.contains(label)
            || self.measured.contains(label)
            || self.photons.iter().any(|p| p == label)
    }

    pub(crate) fn step(&mut self, ins: &Instruction) -> std::result::Result<(), String> {
        match ins {
            Instruction::Cz(a, b, _) if a == b => {
                return Err(format!("CZ needs two distinct registers, got `{a}` twice"));
            }
            Instruction::Pump { emitter, photon } => {
                self.require_emitter(emitter)?;
                if self.is_taken(photon) {
                    return Err(format!("photon label `{photon}` is not fresh"));
                }
                self.photons.push(photon.clone());
                return Ok(());
            }
            Instruction::Measure { emitter, variable } => {
                self.require_emitter(emitter)?;
                if variable == "q" || !self.variables.insert(variable.clone()) {
                    return Err(format!("outcome variable `{variable}` is not fresh"));
                }
                self.live_emitters.remove(emitter);
                self.measured.insert(emitter.clone());
                return Ok(());
            }
            Instruction::Correct { exponent, .. } => {
                for var in exponent.variables() {
                    if !self.variables.contains(var) {
                        return Err(format!("outcome variable `{var}` used before it is bound"));
                    }
                }
            }
            _ => {}
        }
        for t in ins.targets() {
            self.require_live(t)?;
        }
        Ok(())
    }

    pub(crate) fn check_order(&self, order: &[String]) -> std::result::Result<(), String> {
        let mut given: Vec<&str> = order.iter().map(String::as_str).collect();
        let mut emitted: Vec<&str> = self.photons.iter().map(String::as_str).collect();
        given.sort_unstable();
        emitted.sort_unstable();
        if given != emitted {
            return Err(format!(
                "ORDER lists {given:?} but the protocol emits {emitted:?}"
            ));
        }
        Ok(())
    }

    pub(crate) fn finish(&self) -> std::result::Result<(), String> {
        if !self.live_emitters.is_empty() {
            let mut left: Vec<_> = self.live_emitters.iter().cloned().collect();
            left.sort();
            return Err(format!("emitters never measured: {}", left.join(", ")));
        }
        Ok(())
    }
}

impl Protocol {
    /// Check register use, variable binding and photon ordering.
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidDimension(self.q));
        }
        let mut checker = Checker::new(&self.emitters).map_err(Error::InvalidProtocol)?;
        for (k, ins) in self.instructions.iter().enumerate() {
            checker
                .step(ins)
                .map_err(|m| Error::InvalidProtocol(format!("instruction {} (`{ins}`): {m}", k + 1)))?;
        }
        if let Some(order) = &self.order {
            checker.check_order(order).map_err(Error::BadOrdering)?;
        }
        checker.finish().map_err(Error::InvalidProtocol)
    }

    pub fn measurement_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Measure { .. }))
            .count()
    }

    /// Photon labels in emission order.
    pub fn photons(&self) -> Vec<&str> {
        self.instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Pump { photon, .. } => Some(photon.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Whether some `CZ` couples a photon with another register.
    pub fn uses_photon_interference(&self) -> bool {
        let photons: HashSet<&str> = self.photons().into_iter().collect();
        self.instructions.iter().any(|i| match i {
            Instruction::Cz(a, b, _) => photons.contains(a.as_str()) || photons.contains(b.as_str()),
            _ => false,
        })
    }

    /// Render in the line-oriented protocol format accepted by [`parse_protocol`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("# {}\n", self.name));
        }
        out.push_str(&format!("dim {}\n", self.q));
        out.push_str(&format!("emitters {}\n", self.emitters.join(" ")));
        for ins in &self.instructions {
            out.push_str(&ins.to_string());
            out.push('\n');
        }
        if let Some(order) = &self.order {
            out.push_str(&format!("ORDER {}\n", order.join(" ")));
        }
        out
    }
}

/// How measurement outcomes are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutcomeMode {
    /// Draw from the Born distribution with a deterministic seeded generator.
    Sample(u64),
    /// Use the listed outcomes, one per `MEAS`, in program order.
    Forced(Vec<u32>),
}

/// Outcome source for a single [`measure_z`] call.
pub enum Draw<'a> {
    Sample(&'a mut dyn RngCore),
    Forced(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub emitter: String,
    pub variable: String,
    pub outcome: u32,
    pub probability: f64,
}

/// Result of executing a protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub protocol: String,
    /// Final photonic state in the declared photon order.
    pub state: RegisterState,
    pub measurements: Vec<MeasurementRecord>,
    /// Probability of the realized measurement branch.
    pub branch_probability: f64,
}

/// Serializable summary of a [`RunRecord`] (the state is written separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecordFile {
    pub protocol: String,
    pub q: u32,
    pub photons: Vec<String>,
    pub measurements: Vec<MeasurementRecord>,
    pub branch_probability: f64,
}

impl RunRecord {
    pub fn outcomes(&self) -> Vec<u32> {
        self.measurements.iter().map(|m| m.outcome).collect()
    }

    pub fn to_file(&self) -> RunRecordFile {
        RunRecordFile {
            protocol: self.protocol.clone(),
            q: self.state.q(),
            photons: self.state.labels().iter().map(|s| s.to_string()).collect(),
            measurements: self.measurements.clone(),
            branch_probability: self.branch_probability,
        }
    }
}

/// Photon pumping: append photon `photon` carrying a copy of `emitter`'s digit.
pub fn pump(state: &mut RegisterState, emitter: &str, photon: &str) -> Result<()> {
    let site = emitter_site(state, emitter)?;
    state.append_copy(site, Site::photon(photon))
}

fn emitter_site(state: &RegisterState, emitter: &str) -> Result<usize> {
    let site = state
        .site_index(emitter)
        .ok_or_else(|| Error::UnknownRegister(emitter.to_string()))?;
    if state.sites()[site].kind != SiteKind::Emitter {
        return Err(Error::NotAnEmitter(emitter.to_string()));
    }
    Ok(site)
}

/// Z-basis measurement of an emitter. The emitter site is removed from the
/// register and the state renormalized; returns `(outcome, probability)`.
pub fn measure_z(state: &mut RegisterState, emitter: &str, draw: Draw<'_>) -> Result<(u32, f64)> {
    let site = emitter_site(state, emitter)?;
    let probs = state.digit_probabilities(site)?;
    let outcome = match draw {
        Draw::Forced(o) => {
            let p = probs.get(o as usize).copied().unwrap_or(0.0);
            if p <= IMPOSSIBLE_BRANCH {
                return Err(Error::ImpossibleOutcome {
                    emitter: emitter.to_string(),
                    outcome: o,
                    probability: p,
                });
            }
            o as usize
        }
        Draw::Sample(rng) => sample_index(&probs, rng.gen::<f64>()),
    };
    let p = state.project_out(site, outcome)?;
    Ok((outcome as u32, p))
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > IMPOSSIBLE_BRANCH {
            last_nonzero = k;
            acc += p;
            if target < acc {
                return k;
            }
        }
    }
    last_nonzero
}

/// Execute `protocol` from all emitters in `|0⟩`.
pub fn run(protocol: &Protocol, mode: &OutcomeMode) -> Result<RunRecord> {
    protocol.validate()?;
    if let OutcomeMode::Forced(list) = mode {
        let expected = protocol.measurement_count();
        if list.len() != expected {
            return Err(Error::OutcomeCount {
                got: list.len(),
                expected,
            });
        }
    }
    let q = protocol.q;
    let sites = protocol.emitters.iter().map(Site::emitter).collect();
    let mut state = RegisterState::zero(q, sites)?;
    let mut rng = match mode {
        OutcomeMode::Sample(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        OutcomeMode::Forced(_) => None,
    };
    let forced_list: &[u32] = match mode {
        OutcomeMode::Forced(list) => list,
        OutcomeMode::Sample(_) => &[],
    };
    let mut forced = forced_list.iter().copied();
    let mut bindings: HashMap<String, u32> = HashMap::new();
    let mut measurements = Vec::new();
    let mut branch_probability = 1.0;

    let site_of = |state: &RegisterState, label: &str| {
        state
            .site_index(label)
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    };

    for ins in &protocol.instructions {
        match ins {
            Instruction::H(t) => state.apply_hadamard(site_of(&state, t)?)?,
            Instruction::HDag(t) => state.apply_hadamard_dag(site_of(&state, t)?)?,
            Instruction::X(t, a) => state.apply_x(site_of(&state, t)?, i64::from(*a))?,
            Instruction::Z(t, b) => state.apply_z(site_of(&state, t)?, i64::from(*b))?,
            Instruction::Cz(a, b, beta) => {
                let (sa, sb) = (site_of(&state, a)?, site_of(&state, b)?);
                state.apply_cz(sa, sb, i64::from(*beta))?
            }
            Instruction::Pump { emitter, photon } => pump(&mut state, emitter, photon)?,
            Instruction::Measure { emitter, variable } => {
                let draw = match rng.as_mut() {
                    Some(r) => Draw::Sample(r),
                    None => Draw::Forced(forced.next().expect("outcome count checked")),
                };
                let (outcome, probability) = measure_z(&mut state, emitter, draw)?;
                bindings.insert(variable.clone(), outcome);
                branch_probability *= probability;
                measurements.push(MeasurementRecord {
                    emitter: emitter.clone(),
                    variable: variable.clone(),
                    outcome,
                    probability,
                });
            }
            Instruction::Correct {
                target,
                gate,
                exponent,
            } => {
                let power = exponent.eval(q, &bindings)?;
                let site = site_of(&state, target)?;
                match gate {
                    CorrectionGate::Z => state.apply_z(site, power)?,
                    CorrectionGate::X => state.apply_x(site, power)?,
                }
            }
        }
    }

    if let Some(order) = &protocol.order {
        state.reorder_by_labels(order)?;
    }
    Ok(RunRecord {
        protocol: protocol.name.clone(),
        state,
        measurements,
        branch_probability,
    })
}

/// Every forced outcome tuple for a protocol with `measurements` measurements.
pub fn all_outcome_tuples(q: u32, measurements: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..measurements {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..q).map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o);
                    next
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::photon_sites;
    use num_complex::Complex64;

    fn uniform_emitter(q: u32) -> RegisterState {
        let mut s = RegisterState::zero(q, vec![Site::emitter("e")]).unwrap();
        s.apply_hadamard(0).unwrap();
        s
    }

    #[test]
    fn pump_on_uniform_qutrit() {
        let mut s = uniform_emitter(3);
        pump(&mut s, "e", "p1").unwrap();
        let v = 1.0 / 3f64.sqrt();
        for (idx, a) in s.amplitudes().iter().enumerate() {
            let expected = if idx % 4 == 0 { v } else { 0.0 };
            assert!((a - Complex64::new(expected, 0.0)).norm() < 1e-12, "{idx}");
        }
        assert_eq!(s.labels(), vec!["e", "p1"]);
    }

    #[test]
    fn pump_on_zero_emitter() {
        let mut s = RegisterState::zero(4, vec![Site::emitter("e")]).unwrap();
        pump(&mut s, "e", "p").unwrap();
        assert_eq!(
            s,
            RegisterState::zero(4, vec![Site::emitter("e"), Site::photon("p")]).unwrap()
        );
    }

    #[test]
    fn pump_errors() {
        let mut s = uniform_emitter(3);
        pump(&mut s, "e", "p1").unwrap();
        assert_eq!(pump(&mut s, "e", "p1"), Err(Error::DuplicateLabel("p1".into())));
        assert_eq!(pump(&mut s, "p1", "p2"), Err(Error::NotAnEmitter("p1".into())));
        assert_eq!(pump(&mut s, "f", "p2"), Err(Error::UnknownRegister("f".into())));
    }

    #[test]
    fn forced_measurement_of_uniform_emitter() {
        let mut s = uniform_emitter(3);
        let (o, p) = measure_z(&mut s, "e", Draw::Forced(1)).unwrap();
        assert_eq!(o, 1);
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(s, RegisterState::empty(3).unwrap());
    }

    #[test]
    fn impossible_forced_outcome() {
        let mut s = RegisterState::zero(3, vec![Site::emitter("e")]).unwrap();
        assert!(matches!(
            measure_z(&mut s, "e", Draw::Forced(2)),
            Err(Error::ImpossibleOutcome { outcome: 2, .. })
        ));
    }

    #[test]
    fn sampling_skips_zero_probability_outcomes() {
        assert_eq!(sample_index(&[0.0, 1.0, 0.0], 0.0), 1);
        assert_eq!(sample_index(&[0.5, 0.5, 0.0], 0.999_999_999_999), 1);
        assert_eq!(sample_index(&[0.25, 0.25, 0.5], 0.3), 1);
    }

    #[test]
    fn unmeasured_emitter_is_rejected() {
        let p = Protocol {
            name: "t".into(),
            q: 2,
            emitters: vec!["e".into()],
            instructions: vec![Instruction::H("e".into())],
            order: None,
        };
        assert!(matches!(run(&p, &OutcomeMode::Sample(0)), Err(Error::InvalidProtocol(_))));
    }

    #[test]
    fn wrong_outcome_count_is_rejected() {
        let p = builtin("linear-cz", 3, Some(2)).unwrap();
        assert_eq!(
            run(&p, &OutcomeMode::Forced(vec![0, 0])),
            Err(Error::OutcomeCount {
                got: 2,
                expected: 1
            })
        );
    }

    #[test]
    fn chain_of_one_is_plus_state() {
        let p = builtin("linear-cz", 2, Some(1)).unwrap();
        let rec = run(&p, &OutcomeMode::Forced(vec![0])).unwrap();
        let mut plus = RegisterState::zero(2, photon_sites(1)).unwrap();
        plus.apply_hadamard(0).unwrap();
        assert!((rec.state.inner(&plus).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outcome_tuples_enumerate_all_branches() {
        let t = all_outcome_tuples(3, 2);
        assert_eq!(t.len(), 9);
        assert_eq!(t[0], vec![0, 0]);
        assert_eq!(t[8], vec![2, 2]);
        assert_eq!(all_outcome_tuples(5, 0), vec![Vec::<u32>::new()]);
    }
}
