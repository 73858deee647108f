//! Dense state vectors over an ordered register of q-level sites.
//!
//! Basis index convention: `index = Σ_s digit(s) · q^(n−1−s)`, so site 0 is
//! the most significant digit and kets read left to right in site order.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{operator_matrix, LocalOperator, OperatorKind, PhaseRoot};
use crate::error::{Error, Result};
use crate::NORM_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteKind {
    Emitter,
    Photon,
}

impl fmt::Display for SiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteKind::Emitter => f.write_str("emitter"),
            SiteKind::Photon => f.write_str("photon"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub kind: SiteKind,
    pub label: String,
}

impl Site {
    pub fn emitter(label: impl Into<String>) -> Self {
        Self {
            kind: SiteKind::Emitter,
            label: label.into(),
        }
    }

    pub fn photon(label: impl Into<String>) -> Self {
        Self {
            kind: SiteKind::Photon,
            label: label.into(),
        }
    }
}

/// `n` photon sites labelled `p1 … pn`.
pub fn photon_sites(n: usize) -> Vec<Site> {
    (1..=n).map(|k| Site::photon(format!("p{k}"))).collect()
}

/// A normalized amplitude vector of length `q^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    root: PhaseRoot,
    sites: Vec<Site>,
    amps: Vec<Complex64>,
}

fn checked_dim(q: u32, n: usize) -> Result<usize> {
    (q as usize)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::ShapeMismatch(format!("{q}^{n} amplitudes overflow")))
}

fn check_labels(sites: &[Site]) -> Result<()> {
    let mut seen = HashSet::new();
    for site in sites {
        if !seen.insert(site.label.as_str()) {
            return Err(Error::DuplicateLabel(site.label.clone()));
        }
    }
    Ok(())
}

impl RegisterState {
    /// The product state `|0…0⟩`.
    pub fn zero(q: u32, sites: Vec<Site>) -> Result<Self> {
        let root = PhaseRoot::new(q)?;
        check_labels(&sites)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); checked_dim(q, sites.len())?];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { root, sites, amps })
    }

    /// The zero-site register holding the scalar 1.
    pub fn empty(q: u32) -> Result<Self> {
        Self::zero(q, Vec::new())
    }

    /// A computational basis state `|d_0 d_1 …⟩`.
    pub fn basis(q: u32, sites: Vec<Site>, digits: &[u32]) -> Result<Self> {
        if digits.len() != sites.len() {
            return Err(Error::LengthMismatch {
                got: digits.len(),
                expected: sites.len(),
            });
        }
        let mut state = Self::zero(q, sites)?;
        let index = digits
            .iter()
            .fold(0usize, |acc, &d| acc * q as usize + (d % q) as usize);
        state.amps[0] = Complex64::new(0.0, 0.0);
        state.amps[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Wrap an amplitude vector, checking length, label uniqueness and norm.
    pub fn from_amplitudes(q: u32, sites: Vec<Site>, amps: Vec<Complex64>) -> Result<Self> {
        let root = PhaseRoot::new(q)?;
        check_labels(&sites)?;
        let expected = checked_dim(q, sites.len())?;
        if amps.len() != expected {
            return Err(Error::LengthMismatch {
                got: amps.len(),
                expected,
            });
        }
        let state = Self { root, sites, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales the vector to unit norm first.
    pub fn normalized(q: u32, sites: Vec<Site>, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(q, sites, amps)
    }

    /// A random normalized state drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(q: u32, sites: Vec<Site>, rng: &mut R) -> Result<Self> {
        let len = checked_dim(q, sites.len())?;
        let amps = (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Self::normalized(q, sites, amps)
    }

    pub fn q(&self) -> u32 {
        self.root.q()
    }

    pub fn phase_root(&self) -> &PhaseRoot {
        &self.root
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn labels(&self) -> Vec<&str> {
        self.sites.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn site_index(&self, label: &str) -> Option<usize> {
        self.sites.iter().position(|s| s.label == label)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.q() != other.q() || self.num_sites() != other.num_sites() {
            return Err(Error::ShapeMismatch(format!(
                "q={} n={} vs q={} n={}",
                self.q(),
                self.num_sites(),
                other.q(),
                other.num_sites()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Digit of site `site` in basis index `index`.
    #[inline]
    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.stride(site)) % self.q() as usize
    }

    /// Basis digits of `index`, site 0 first.
    pub fn digits(&self, index: usize) -> Vec<u32> {
        (0..self.num_sites())
            .map(|s| self.digit(index, s) as u32)
            .collect()
    }

    #[inline]
    fn stride(&self, site: usize) -> usize {
        (self.q() as usize).pow((self.num_sites() - 1 - site) as u32)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.num_sites() {
            Err(Error::SiteOutOfRange {
                site,
                len: self.num_sites(),
            })
        } else {
            Ok(())
        }
    }

    /// `X^alpha` on `site`.
    pub fn apply_x(&mut self, site: usize, alpha: i64) -> Result<()> {
        self.check_site(site)?;
        let q = self.q() as usize;
        let shift = alpha.rem_euclid(q as i64) as usize;
        if shift == 0 {
            return Ok(());
        }
        let stride = self.stride(site);
        let block = stride * q;
        let mut buf = vec![Complex64::new(0.0, 0.0); q];
        for base in (0..self.amps.len()).step_by(block) {
            for inner in 0..stride {
                let start = base + inner;
                for (d, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amps[start + d * stride];
                }
                for (d, amp) in buf.iter().enumerate() {
                    self.amps[start + ((d + shift) % q) * stride] = *amp;
                }
            }
        }
        Ok(())
    }

    /// `Z^beta` on `site`.
    pub fn apply_z(&mut self, site: usize, beta: i64) -> Result<()> {
        self.check_site(site)?;
        let q = self.q() as usize;
        let b = beta.rem_euclid(q as i64) as usize;
        if b == 0 {
            return Ok(());
        }
        let stride = self.stride(site);
        let block = stride * q;
        for base in (0..self.amps.len()).step_by(block) {
            for d in 1..q {
                let phase = self.root.pow_reduced(d * b % q);
                let start = base + d * stride;
                self.amps[start..start + stride]
                    .iter_mut()
                    .for_each(|a| *a *= phase);
            }
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, site: usize) -> Result<()> {
        let h = operator_matrix(OperatorKind::Fourier, self.q())?;
        self.apply_local(site, &h)
    }

    pub fn apply_hadamard_dag(&mut self, site: usize) -> Result<()> {
        let h = operator_matrix(OperatorKind::FourierDag, self.q())?;
        self.apply_local(site, &h)
    }

    /// Apply an arbitrary q×q operator to one site.
    pub fn apply_local(&mut self, site: usize, op: &LocalOperator) -> Result<()> {
        self.check_site(site)?;
        let q = self.q() as usize;
        if op.dim() != q {
            return Err(Error::ShapeMismatch(format!(
                "operator of dimension {} on q={q} register",
                op.dim()
            )));
        }
        let stride = self.stride(site);
        let block = stride * q;
        if op.is_diagonal() {
            for base in (0..self.amps.len()).step_by(block) {
                for d in 0..q {
                    let factor = op.get(d, d);
                    let start = base + d * stride;
                    self.amps[start..start + stride]
                        .iter_mut()
                        .for_each(|a| *a *= factor);
                }
            }
            return Ok(());
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); q];
        for base in (0..self.amps.len()).step_by(block) {
            for inner in 0..stride {
                let start = base + inner;
                for (d, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amps[start + d * stride];
                }
                for row in 0..q {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (col, amp) in buf.iter().enumerate() {
                        acc += op.get(row, col) * amp;
                    }
                    self.amps[start + row * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// `CZ^beta` between two sites: phase `ω^{β·i·j}`.
    pub fn apply_cz(&mut self, site_a: usize, site_b: usize, beta: i64) -> Result<()> {
        self.check_site(site_a)?;
        self.check_site(site_b)?;
        if site_a == site_b {
            return Err(Error::IdenticalSites(site_a));
        }
        let q = self.q() as usize;
        let b = beta.rem_euclid(q as i64) as usize;
        if b == 0 {
            return Ok(());
        }
        let (sa, sb) = (self.stride(site_a), self.stride(site_b));
        for (index, amp) in self.amps.iter_mut().enumerate() {
            let da = (index / sa) % q;
            let db = (index / sb) % q;
            let e = b * da * db % q;
            if e != 0 {
                *amp *= self.root.pow_reduced(e);
            }
        }
        Ok(())
    }

    /// Append a new site whose digit is a copy of `source`'s digit:
    /// `Σ c_{i,rest}|i⟩|rest⟩ ↦ Σ c_{i,rest}|i⟩|rest⟩|i⟩_new`.
    pub fn append_copy(&mut self, source: usize, site: Site) -> Result<()> {
        self.check_site(source)?;
        if self.site_index(&site.label).is_some() {
            return Err(Error::DuplicateLabel(site.label));
        }
        let q = self.q() as usize;
        let stride = self.stride(source);
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len() * q];
        for (index, amp) in self.amps.iter().enumerate() {
            let d = (index / stride) % q;
            amps[index * q + d] = *amp;
        }
        self.amps = amps;
        self.sites.push(site);
        Ok(())
    }

    /// Born probabilities of each digit value at `site`.
    pub fn digit_probabilities(&self, site: usize) -> Result<Vec<f64>> {
        self.check_site(site)?;
        let q = self.q() as usize;
        let stride = self.stride(site);
        let mut probs = vec![0.0; q];
        for (index, amp) in self.amps.iter().enumerate() {
            probs[(index / stride) % q] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Project `site` onto `digit`, delete the site and renormalize.
    /// Returns the probability of the projection.
    pub(crate) fn project_out(&mut self, site: usize, digit: usize) -> Result<f64> {
        self.check_site(site)?;
        let q = self.q() as usize;
        let stride = self.stride(site);
        let block = stride * q;
        let mut amps = Vec::with_capacity(self.amps.len() / q);
        for base in (0..self.amps.len()).step_by(block) {
            let start = base + digit * stride;
            amps.extend_from_slice(&self.amps[start..start + stride]);
        }
        let prob: f64 = amps.iter().map(Complex64::norm_sqr).sum();
        if prob > 0.0 {
            let scale = 1.0 / prob.sqrt();
            amps.iter_mut().for_each(|a| *a *= scale);
        }
        self.amps = amps;
        self.sites.remove(site);
        Ok(prob)
    }

    /// Reorder sites so that new site `k` is old site `order[k]`.
    pub fn permute_sites(&mut self, order: &[usize]) -> Result<()> {
        let n = self.num_sites();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::LengthMismatch {
                got: order.len(),
                expected: n,
            });
        }
        for &s in order {
            self.check_site(s)?;
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::IdenticalSites(s));
            }
        }
        let q = self.q() as usize;
        let strides: Vec<usize> = (0..n).map(|s| self.stride(s)).collect();
        // new position k has stride q^(n-1-k); old site order[k] contributes its digit there
        let new_stride_of_old: Vec<usize> = {
            let mut v = vec![0; n];
            for (k, &old) in order.iter().enumerate() {
                v[old] = strides[k];
            }
            v
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            let target: usize = (0..n)
                .map(|s| ((index / strides[s]) % q) * new_stride_of_old[s])
                .sum();
            amps[target] = *amp;
        }
        self.amps = amps;
        self.sites = order.iter().map(|&s| self.sites[s].clone()).collect();
        Ok(())
    }

    /// Reorder sites to follow the given label sequence.
    pub fn reorder_by_labels<S: AsRef<str>>(&mut self, labels: &[S]) -> Result<()> {
        let order = labels
            .iter()
            .map(|l| {
                self.site_index(l.as_ref())
                    .ok_or_else(|| Error::UnknownRegister(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.permute_sites(&order)
    }

    /// Replace site labels and kinds without touching amplitudes.
    pub fn relabel(&mut self, sites: Vec<Site>) -> Result<()> {
        if sites.len() != self.num_sites() {
            return Err(Error::LengthMismatch {
                got: sites.len(),
                expected: self.num_sites(),
            });
        }
        check_labels(&sites)?;
        self.sites = sites;
        Ok(())
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            q: self.q(),
            sites: self.sites.clone(),
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_file(file: StateFile) -> Result<Self> {
        let amps = file
            .amps
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Self::from_amplitudes(file.q, file.sites, amps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

/// On-disk form of a [`RegisterState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub q: u32,
    pub sites: Vec<Site>,
    pub amps: Vec<[f64; 2]>,
}
