use itertools::Itertools;
use serde::Serialize;

use super::density::partial_trace;
use crate::state::RegisterState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetRecord {
    pub subset: Vec<usize>,
    pub purity: f64,
    /// `|purity − q^{−|S|}|`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmeReport {
    pub n: usize,
    pub q: u32,
    pub tol: f64,
    pub verdict: bool,
    pub worst: Option<SubsetRecord>,
    pub subsets: Vec<SubsetRecord>,
}

impl AmeReport {
    /// Records for subsets of exactly `size` sites.
    pub fn of_size(&self, size: usize) -> impl Iterator<Item = &SubsetRecord> {
        self.subsets.iter().filter(move |r| r.subset.len() == size)
    }
}

/// Check every subset of at most `⌊n/2⌋` sites for maximal mixedness.
pub fn is_ame(state: &RegisterState, tol: f64) -> AmeReport {
    let n = state.num_sites();
    let q = state.q();
    let mut subsets = Vec::new();
    for size in 1..=n / 2 {
        let target = f64::from(q).powi(-(size as i32));
        for subset in (0..n).combinations(size) {
            let rho = partial_trace(state, &subset).expect("subset is in range");
            let purity = rho.purity();
            subsets.push(SubsetRecord {
                subset,
                purity,
                deviation: (purity - target).abs(),
            });
        }
    }
    let worst = subsets
        .iter()
        .max_by(|a, b| a.deviation.total_cmp(&b.deviation))
        .cloned();
    let verdict = subsets.iter().all(|r| r.deviation <= tol);
    AmeReport {
        n,
        q,
        tol,
        verdict,
        worst,
        subsets,
    }
}
