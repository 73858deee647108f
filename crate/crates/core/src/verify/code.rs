use std::fmt;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::equiv_global_phase;
use crate::error::{Error, Result};
use crate::graph::{build_graph_state_on, WeightedGraph};
use crate::protocol::{builtin, run, OutcomeMode};
use crate::state::{photon_sites, RegisterState};
use crate::STATE_TOL;

/// `⊗_s X^{a_s} Z^{b_s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    q: u32,
    powers: Vec<(u32, u32)>,
}

impl PauliString {
    pub fn identity(q: u32, n: usize) -> Self {
        Self {
            q,
            powers: vec![(0, 0); n],
        }
    }

    pub fn new(q: u32, powers: Vec<(u32, u32)>) -> Self {
        let powers = powers.into_iter().map(|(a, b)| (a % q, b % q)).collect();
        Self { q, powers }
    }

    pub fn powers(&self) -> &[(u32, u32)] {
        &self.powers
    }

    pub fn weight(&self) -> usize {
        self.powers.iter().filter(|&&p| p != (0, 0)).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Every string on `n` sites with weight at most `max_weight`, identity first.
    pub fn up_to_weight(q: u32, n: usize, max_weight: usize) -> Vec<Self> {
        let nontrivial: Vec<(u32, u32)> = (0..q)
            .cartesian_product(0..q)
            .filter(|&p| p != (0, 0))
            .collect();
        let mut out = vec![Self::identity(q, n)];
        for w in 1..=max_weight.min(n) {
            for support in (0..n).combinations(w) {
                for choice in (0..w).map(|_| nontrivial.iter()).multi_cartesian_product() {
                    let mut s = Self::identity(q, n);
                    for (&site, &&p) in support.iter().zip(&choice) {
                        s.powers[site] = p;
                    }
                    out.push(s);
                }
            }
        }
        out
    }

    /// `P|ψ⟩`, with `Z` acting before `X` on each site.
    pub fn apply(&self, state: &RegisterState) -> Result<RegisterState> {
        if state.q() != self.q || state.num_sites() != self.powers.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}-site Pauli string on a {}-site register",
                self.powers.len(),
                state.num_sites()
            )));
        }
        let mut out = state.clone();
        for (site, &(a, b)) in self.powers.iter().enumerate() {
            if b != 0 {
                out.apply_z(site, i64::from(b))?;
            }
            if a != 0 {
                out.apply_x(site, i64::from(a))?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .powers
            .iter()
            .map(|&(a, b)| match (a, b) {
                (0, 0) => "I".to_string(),
                (a, 0) => format!("X{a}"),
                (0, b) => format!("Z{b}"),
                (a, b) => format!("X{a}Z{b}"),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An `[[n, k, d]]_q` code given by its codewords.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: u32,
    pub codewords: Vec<RegisterState>,
}

impl CodeSpec {
    /// Checks shapes only; orthonormality is reported by [`kl_check`].
    pub fn new(n: usize, k: usize, d: usize, q: u32, codewords: Vec<RegisterState>) -> Result<Self> {
        let expected = (q as usize).pow(k as u32);
        if codewords.len() != expected {
            return Err(Error::InvalidCode(format!(
                "{} codewords given, expected q^k = {expected}",
                codewords.len()
            )));
        }
        if d == 0 {
            return Err(Error::InvalidCode("distance must be at least 1".into()));
        }
        if let Some(bad) = codewords.iter().find(|c| c.q() != q || c.num_sites() != n) {
            return Err(Error::InvalidCode(format!(
                "codeword with q={} on {} sites in a q={q}, n={n} code",
                bad.q(),
                bad.num_sites()
            )));
        }
        Ok(Self {
            n,
            k,
            d,
            q,
            codewords,
        })
    }

    pub fn gram(&self, op: &PauliString) -> Result<Vec<Vec<Complex64>>> {
        let images = self
            .codewords
            .iter()
            .map(|c| op.apply(c))
            .collect::<Result<Vec<_>>>()?;
        self.codewords
            .iter()
            .map(|bra| images.iter().map(|ket| bra.inner(ket)).collect())
            .collect()
    }

    /// `max |⟨ψ_m|ψ_m'⟩ − δ_mm'|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self
            .gram(&PauliString::identity(self.q, self.n))
            .expect("shapes checked on construction");
        gram_deviation(&g, Complex64::new(1.0, 0.0))
    }
}

fn gram_deviation(g: &[Vec<Complex64>], f: Complex64) -> f64 {
    let mut worst = 0.0f64;
    for (m, row) in g.iter().enumerate() {
        for (mp, &v) in row.iter().enumerate() {
            let expected = if m == mp { f } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((v - expected).norm());
        }
    }
    worst
}

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// One error operator `E†F`. The Gram matrix depends on E and F only
/// through this product, so records are keyed by it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlRecord {
    pub operator: PauliString,
    pub weight: usize,
    #[serde(serialize_with = "serialize_complex")]
    pub f: Complex64,
    /// `max |G − f·I|`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: u32,
    pub max_weight: usize,
    pub strict: bool,
    pub tol: f64,
    pub verdict: bool,
    pub worst: Option<KlRecord>,
    pub records: Vec<KlRecord>,
}

/// Knill-Laflamme check over all `E†F` of weight at most `d − 1`.
pub fn kl_check(code: &CodeSpec) -> Result<KlReport> {
    kl_check_with(code, false, STATE_TOL)
}

/// As [`kl_check`]; `strict` raises the weight bound to `d`.
pub fn kl_check_with(code: &CodeSpec, strict: bool, tol: f64) -> Result<KlReport> {
    let max_weight = if strict { code.d } else { code.d - 1 };
    let mut records = Vec::new();
    for op in PauliString::up_to_weight(code.q, code.n, max_weight) {
        let g = code.gram(&op)?;
        // identity: compare against I itself so non-orthonormal input fails here
        let f = if op.is_identity() {
            Complex64::new(1.0, 0.0)
        } else {
            g[0][0]
        };
        records.push(KlRecord {
            weight: op.weight(),
            deviation: gram_deviation(&g, f),
            operator: op,
            f,
        });
    }
    let verdict = records.iter().all(|r| r.deviation <= tol);
    let worst = records
        .iter()
        .max_by(|a, b| a.deviation.total_cmp(&b.deviation))
        .cloned();
    Ok(KlReport {
        n: code.n,
        k: code.k,
        d: code.d,
        q: code.q,
        max_weight,
        strict,
        tol,
        verdict,
        worst,
        records,
    })
}

fn from_support(q: u32, n: usize, support: impl Iterator<Item = Vec<u32>>) -> RegisterState {
    let mut amps = vec![Complex64::new(0.0, 0.0); (q as usize).pow(n as u32)];
    for digits in support {
        let index = digits
            .iter()
            .fold(0usize, |acc, &d| acc * q as usize + (d % q) as usize);
        amps[index] += 1.0;
    }
    RegisterState::normalized(q, photon_sites(n), amps).expect("nonzero support")
}

/// The `[[3,1,2]]_3` codewords `Σ_j |j, j, j⟩`, `Σ_j |j+1, j, j+2⟩`,
/// `Σ_j |j+2, j, j+1⟩` (each over √3).
pub fn qecc312_codewords() -> Vec<RegisterState> {
    (0..3u32)
        .map(|m| from_support(3, 3, (0..3u32).map(move |j| vec![j + m, j, j + 2 * m])))
        .collect()
}

pub fn qecc312() -> CodeSpec {
    CodeSpec::new(3, 1, 2, 3, qecc312_codewords()).expect("well-formed")
}

/// `M = X ⊗ 1 ⊗ X²`, which cycles the codewords.
pub fn qecc312_shift() -> PauliString {
    PauliString::new(3, vec![(1, 0), (0, 0), (2, 0)])
}

/// `H ⊗ 1 ⊗ H`.
pub fn hadamard_outer(state: &RegisterState) -> Result<RegisterState> {
    let mut s = state.clone();
    s.apply_hadamard(0)?;
    s.apply_hadamard(2)?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformReport {
    /// `ψ_{m+1} = M ψ_m` for m = 0, 1.
    pub shift_generates: bool,
    /// `M³ ψ_0 = ψ_0`.
    pub shift_cubed_identity: bool,
    /// Protocol `qecc312-psi{m}` output equals `H⊗1⊗H ψ_m`, for every outcome branch.
    pub protocol_outputs: Vec<bool>,
    /// `H⊗1⊗H ψ_0` is the three-vertex path graph state.
    pub psi0_is_path_graph: bool,
    pub verdict: bool,
}

/// Tie the `[[3,1,2]]_3` codewords to their emitter protocols.
pub fn codeword_transform_check(code: &CodeSpec) -> Result<TransformReport> {
    if (code.n, code.k, code.d, code.q) != (3, 1, 2, 3) {
        return Err(Error::InvalidCode(format!(
            "expected a [[3,1,2]]_3 code, got [[{}, {}, {}]]_{}",
            code.n, code.k, code.d, code.q
        )));
    }
    let tol = STATE_TOL;
    let eq = |a: &RegisterState, b: &RegisterState| equiv_global_phase(a, b, tol);
    let m = qecc312_shift();
    let c = &code.codewords;

    let shift_generates = eq(&m.apply(&c[0])?, &c[1])? && eq(&m.apply(&c[1])?, &c[2])?;
    let cubed = m.apply(&m.apply(&m.apply(&c[0])?)?)?;
    let shift_cubed_identity = eq(&cubed, &c[0])?;

    let mut protocol_outputs = Vec::new();
    for (idx, word) in c.iter().enumerate() {
        let target = hadamard_outer(word)?;
        let p = builtin(&format!("qecc312-psi{idx}"), 3, None)?;
        let mut ok = true;
        for o in 0..3 {
            let record = run(&p, &OutcomeMode::Forced(vec![o]))?;
            ok &= eq(&record.state, &target)?;
        }
        protocol_outputs.push(ok);
    }

    let path = WeightedGraph::path(3, 3, 1)?;
    let psi0_is_path_graph = eq(
        &hadamard_outer(&c[0])?,
        &build_graph_state_on(&path, photon_sites(3))?,
    )?;

    let verdict = shift_generates
        && shift_cubed_identity
        && psi0_is_path_graph
        && protocol_outputs.iter().all(|&b| b);
    Ok(TransformReport {
        shift_generates,
        shift_cubed_identity,
        protocol_outputs,
        psi0_is_path_graph,
        verdict,
    })
}
