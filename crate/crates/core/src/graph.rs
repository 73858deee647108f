//! Weighted qudit graph states and recognition of quadratic phase patterns.
//!
//! A graph state is `Π_{a<b} CZ_{ab}^{Γ_ab} H^{⊗n} |0…0⟩`. Every such state
//! has flat amplitude magnitudes and phases `ω^{Σ Γ_ab i_a i_b}`; the
//! [`PhasePolynomial`] type captures that exponent (plus a linear part, which
//! appears before correction or after local `Z` gates) and lets protocol
//! outputs be read back as graphs.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{photon_sites, RegisterState, Site};
use crate::STATE_TOL;

/// Symmetric adjacency matrix with entries in `0..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    q: u32,
    gamma: Vec<Vec<u32>>,
}

impl WeightedGraph {
    /// Build from an edge list. Weights are reduced mod q, so a weight-q
    /// edge is the same as no edge. Repeated edges accumulate.
    pub fn new(q: u32, n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDimension(q));
        }
        let mut gamma = vec![vec![0u32; n]; n];
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) outside {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            let w = (gamma[a][b] + w % q) % q;
            gamma[a][b] = w;
            gamma[b][a] = w;
        }
        Ok(Self { q, gamma })
    }

    pub fn from_matrix(q: u32, gamma: Vec<Vec<u32>>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDimension(q));
        }
        let n = gamma.len();
        for (a, row) in gamma.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGraph("adjacency matrix is not square".into()));
            }
            if row[a] % q != 0 {
                return Err(Error::InvalidGraph(format!("nonzero diagonal at {a}")));
            }
            for b in 0..n {
                if row[b] % q != gamma[b][a] % q {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric entries at ({a}, {b})"
                    )));
                }
            }
        }
        let gamma = gamma
            .into_iter()
            .map(|row| row.into_iter().map(|w| w % q).collect())
            .collect();
        Ok(Self { q, gamma })
    }

    /// Path `0 – 1 – … – (n−1)` with every edge of weight `weight`.
    pub fn path(q: u32, n: usize, weight: u32) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v, weight)).collect();
        Self::new(q, n, &edges)
    }

    /// Cycle `0 – 1 – … – (n−1) – 0` with unit weights.
    pub fn cycle(q: u32, n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n, 1)).collect();
        Self::new(q, n, &edges)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn weight(&self, a: usize, b: usize) -> u32 {
        self.gamma[a][b]
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.gamma
    }

    /// Nonzero edges `(a, b, w)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let n = self.n();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.gamma[a][b] != 0 {
                    out.push((a, b, self.gamma[a][b]));
                }
            }
        }
        out
    }

    /// Relabel vertices so that new vertex `k` is old vertex `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidGraph(format!(
                "{order:?} is not a permutation of 0..{n}"
            )));
        }
        let gamma = (0..n)
            .map(|r| (0..n).map(|c| self.gamma[order[r]][order[c]]).collect())
            .collect();
        Ok(Self { q: self.q, gamma })
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            q: self.q,
            n: self.n(),
            edges: self.edges(),
        }
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        Self::new(file.q, file.n, &file.edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

/// On-disk form of a [`WeightedGraph`]: zero-based `[a, b, weight]` triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub q: u32,
    pub n: usize,
    pub edges: Vec<(usize, usize, u32)>,
}

/// Graph state of `g` on photon sites `p1 … pn`.
pub fn build_graph_state(g: &WeightedGraph) -> Result<RegisterState> {
    build_graph_state_on(g, photon_sites(g.n()))
}

/// Graph state of `g` on the given sites (vertex `k` ↦ `sites[k]`).
pub fn build_graph_state_on(g: &WeightedGraph, sites: Vec<Site>) -> Result<RegisterState> {
    if sites.len() != g.n() {
        return Err(Error::LengthMismatch {
            got: sites.len(),
            expected: g.n(),
        });
    }
    let mut state = RegisterState::zero(g.q(), sites)?;
    for s in 0..g.n() {
        state.apply_hadamard(s)?;
    }
    for (a, b, w) in g.edges() {
        state.apply_cz(a, b, i64::from(w))?;
    }
    Ok(state)
}

/// Exponent of a flat state `Σ ω^{Σ w_ab i_a i_b + Σ c_a i_a} e^{iθ} |i⟩ / q^{n/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePolynomial {
    q: u32,
    n: usize,
    pairs: BTreeMap<(usize, usize), u32>,
    linear: Vec<u32>,
    /// Global phase angle θ (radians); not restricted to multiples of 2π/q.
    constant: f64,
}

impl PhasePolynomial {
    pub fn new(q: u32, n: usize) -> Self {
        Self {
            q,
            n,
            pairs: BTreeMap::new(),
            linear: vec![0; n],
            constant: 0.0,
        }
    }

    pub fn from_graph(g: &WeightedGraph) -> Self {
        let mut poly = Self::new(g.q(), g.n());
        for (a, b, w) in g.edges() {
            poly.add_pair(a, b, w);
        }
        poly
    }

    /// Add `w · i_a · i_b` to the exponent.
    pub fn add_pair(&mut self, a: usize, b: usize, w: u32) -> &mut Self {
        assert!(a != b && a < self.n && b < self.n, "bad pair ({a}, {b})");
        let key = (a.min(b), a.max(b));
        let entry = self.pairs.entry(key).or_insert(0);
        *entry = (*entry + w % self.q) % self.q;
        if *entry == 0 {
            self.pairs.remove(&key);
        }
        self
    }

    /// Add `c · i_a` to the exponent.
    pub fn add_linear(&mut self, a: usize, c: u32) -> &mut Self {
        self.linear[a] = (self.linear[a] + c % self.q) % self.q;
        self
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &BTreeMap<(usize, usize), u32> {
        &self.pairs
    }

    pub fn pair(&self, a: usize, b: usize) -> u32 {
        self.pairs
            .get(&(a.min(b), a.max(b)))
            .copied()
            .unwrap_or(0)
    }

    pub fn linear(&self) -> &[u32] {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// No linear terms: the exponent is that of a graph state.
    pub fn is_graph_form(&self) -> bool {
        self.linear.iter().all(|&c| c == 0)
    }

    /// The adjacency matrix of the quadratic part.
    pub fn graph(&self) -> WeightedGraph {
        let edges: Vec<_> = self.pairs.iter().map(|(&(a, b), &w)| (a, b, w)).collect();
        WeightedGraph::new(self.q, self.n, &edges).expect("pairs are in range")
    }

    /// Exponent mod q at the given digits.
    pub fn exponent(&self, digits: &[u32]) -> u32 {
        let q = u64::from(self.q);
        let mut e: u64 = 0;
        for (&(a, b), &w) in &self.pairs {
            e += u64::from(w) * u64::from(digits[a]) * u64::from(digits[b]) % q;
        }
        for (a, &c) in self.linear.iter().enumerate() {
            e += u64::from(c) * u64::from(digits[a]) % q;
        }
        (e % q) as u32
    }

    /// Same quadratic and linear parts (global phase ignored).
    pub fn same_form(&self, other: &Self) -> bool {
        self.q == other.q
            && self.n == other.n
            && self.pairs == other.pairs
            && self.linear == other.linear
    }

    /// Relabel so that new site `k` is old site `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.n, "order length");
        let mut new_pos = vec![usize::MAX; self.n];
        for (k, &old) in order.iter().enumerate() {
            new_pos[old] = k;
        }
        let mut out = Self::new(self.q, self.n);
        out.constant = self.constant;
        for (&(a, b), &w) in &self.pairs {
            out.add_pair(new_pos[a], new_pos[b], w);
        }
        for (a, &c) in self.linear.iter().enumerate() {
            out.add_linear(new_pos[a], c);
        }
        out
    }

    /// Materialize the normalized state by direct enumeration of all digit strings.
    pub fn to_state(&self, sites: Vec<Site>) -> Result<RegisterState> {
        let q = self.q as usize;
        let len = q.pow(self.n as u32);
        let mag = (len as f64).sqrt().recip();
        let global = Complex64::from_polar(mag, self.constant);
        let mut digits = vec![0u32; self.n];
        let mut amps = Vec::with_capacity(len);
        for index in 0..len {
            let mut rem = index;
            for s in (0..self.n).rev() {
                digits[s] = (rem % q) as u32;
                rem /= q;
            }
            let e = self.exponent(&digits);
            amps.push(global * Complex64::from_polar(1.0, TAU * f64::from(e) / self.q as f64));
        }
        RegisterState::normalized(self.q, sites, amps)
    }
}

/// Read a flat state back as `ω^{quadratic + linear}` times a global phase.
///
/// The all-zeros amplitude fixes the gauge; linear coefficients come from
/// single-digit components and pair weights from two-digit components, then
/// every amplitude is checked against the reconstruction.
pub fn phase_polynomial_of(state: &RegisterState) -> Result<PhasePolynomial> {
    let q = state.q();
    let n = state.num_sites();
    let amps = state.amplitudes();
    let mag = (amps.len() as f64).sqrt().recip();
    if amps.iter().any(|a| (a.norm() - mag).abs() > STATE_TOL) {
        return Err(Error::NonFlatMagnitude);
    }
    let root = state.phase_root();
    let a0 = amps[0];
    let exponent_at = |index: usize| -> u32 {
        let ratio = amps[index] / a0;
        let k = (ratio.arg() * f64::from(q) / TAU).round() as i64;
        k.rem_euclid(i64::from(q)) as u32
    };
    let stride = |s: usize| (q as usize).pow((n - 1 - s) as u32);

    let mut poly = PhasePolynomial::new(q, n);
    poly.constant = a0.arg();
    for a in 0..n {
        poly.linear[a] = exponent_at(stride(a));
    }
    for a in 0..n {
        for b in a + 1..n {
            let both = exponent_at(stride(a) + stride(b));
            let w = (both + 2 * q - poly.linear[a] - poly.linear[b]) % q;
            if w != 0 {
                poly.pairs.insert((a, b), w);
            }
        }
    }
    for (index, amp) in amps.iter().enumerate() {
        let predicted = a0 * root.pow(i64::from(poly.exponent(&state.digits(index))));
        if (amp - predicted).norm() > STATE_TOL {
            return Err(Error::NonQuadraticPhase);
        }
    }
    Ok(poly)
}

/// Names accepted by [`builtin_target_graph`].
pub const TARGET_GRAPHS: [&str; 8] = [
    "linear-cz",
    "linear-cz2",
    "ame43-a",
    "ame43-b",
    "ame5",
    "ame6-a",
    "ame6-b",
    "ame7-3",
];

/// Target graph of a named protocol, vertex `k` being photon `p{k+1}` in the
/// protocol's declared photon order. `n` is only used by the linear chains.
pub fn builtin_target_graph(name: &str, q: u32, n: Option<usize>) -> Result<WeightedGraph> {
    let qutrit_only = |q: u32| {
        if q == 3 {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension {
                name: name.to_string(),
                q,
            })
        }
    };
    if q < 2 {
        return Err(Error::InvalidDimension(q));
    }
    let chain_len = || -> Result<usize> {
        match n {
            Some(n) if n >= 1 => Ok(n),
            _ => Err(Error::InvalidParameter(format!(
                "`{name}` needs a chain length n >= 1"
            ))),
        }
    };
    match name {
        "linear-cz" => WeightedGraph::path(q, chain_len()?, 1),
        "linear-cz2" => WeightedGraph::path(q, chain_len()?, q - 1),
        "ame43-a" => {
            qutrit_only(q)?;
            WeightedGraph::new(q, 4, &[(0, 1, 1), (0, 2, 1), (1, 3, 2), (2, 3, 1)])
        }
        "ame43-b" => {
            qutrit_only(q)?;
            WeightedGraph::new(q, 4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 2)])
        }
        "ame5" => WeightedGraph::cycle(q, 5),
        "ame6-a" => WeightedGraph::new(
            q,
            6,
            &[
                (0, 1, 1),
                (0, 2, 1),
                (1, 3, 1),
                (0, 3, 1),
                (2, 3, 1),
                (2, 4, 1),
                (3, 5, 1),
                (3, 4, 1),
                (1, 5, 1),
                (4, 5, 1),
            ],
        ),
        "ame6-b" => WeightedGraph::new(
            q,
            6,
            &[
                (0, 1, 1),
                (1, 2, 1),
                (0, 2, 1),
                (3, 4, 1),
                (4, 5, 1),
                (3, 5, 1),
                (0, 3, 1),
                (1, 4, 1),
                (2, 5, 1),
            ],
        ),
        "ame7-3" => {
            qutrit_only(q)?;
            WeightedGraph::new(
                q,
                7,
                &[
                    (0, 1, 2),
                    (0, 2, 1),
                    (1, 3, 1),
                    (0, 3, 1),
                    (2, 3, 1),
                    (2, 5, 1),
                    (3, 4, 1),
                    (3, 5, 1),
                    (4, 5, 1),
                    (4, 6, 2),
                    (3, 6, 1),
                    (1, 6, 1),
                ],
            )
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}
