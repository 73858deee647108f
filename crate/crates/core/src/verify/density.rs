use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::RegisterState;

/// Reduced density matrix of a subset of sites. Row/column index follows the
/// same most-significant-first convention as states, over the kept sites in
/// the order they were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    q: u32,
    sites: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `Tr ρ²`, computed as `Σ |ρ_ij|²` (valid because ρ is Hermitian).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(Complex64::norm_sqr).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Von Neumann entropy in base q, `0 · log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        let log_q = f64::from(self.q).ln();
        self.eigenvalues()
            .into_iter()
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.ln() / log_q)
            .sum()
    }
}

/// `ρ_S = Tr_{S^c} |ψ⟩⟨ψ|` for the sites in `keep`.
pub fn partial_trace(state: &RegisterState, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = state.num_sites();
    let mut in_keep = vec![false; n];
    for &s in keep {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, len: n });
        }
        if std::mem::replace(&mut in_keep[s], true) {
            return Err(Error::IdenticalSites(s));
        }
    }
    let q = state.q() as usize;
    let rest: Vec<usize> = (0..n).filter(|s| !in_keep[*s]).collect();
    let rows = q.pow(keep.len() as u32);
    let cols = q.pow(rest.len() as u32);

    // M[k, r] = ψ(k, r), so that ρ = M M†
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let k = keep.iter().fold(0, |acc, &s| acc * q + state.digit(index, s));
        let r = rest.iter().fold(0, |acc, &s| acc * q + state.digit(index, s));
        m[(k, r)] = *amp;
    }
    let matrix = &m * m.adjoint();
    Ok(DensityMatrix {
        q: state.q(),
        sites: keep.to_vec(),
        matrix,
    })
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

pub fn entropy(rho: &DensityMatrix) -> f64 {
    rho.entropy()
}
