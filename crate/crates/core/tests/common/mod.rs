//! Brute-force reference implementations, written against raw amplitude
//! vectors without going through the library's kernels.
#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use quemit::state::{photon_sites, RegisterState};
use rand::Rng;

pub type Dense = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn omega(q: u32, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * k.rem_euclid(q as i64) as f64 / q as f64)
}

pub fn to_digits(mut index: usize, q: u32, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for s in (0..n).rev() {
        d[s] = index % q as usize;
        index /= q as usize;
    }
    d
}

pub fn from_digits(digits: &[usize], q: u32) -> usize {
    digits.iter().fold(0, |acc, &d| acc * q as usize + d)
}

pub fn random_state<R: Rng>(q: u32, n: usize, rng: &mut R) -> RegisterState {
    let amps: Vec<Complex64> = (0..(q as usize).pow(n as u32))
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    RegisterState::normalized(q, photon_sites(n), amps).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn matvec(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `1 ⊗ … ⊗ U ⊗ … ⊗ 1` with `U` (q×q, row-major rows) on `site`.
pub fn embed(q: u32, n: usize, site: usize, u: &Dense) -> Dense {
    let dim = (q as usize).pow(n as u32);
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for (row, out) in m.iter_mut().enumerate() {
        let rd = to_digits(row, q, n);
        for (col, entry) in out.iter_mut().enumerate() {
            let cd = to_digits(col, q, n);
            if (0..n).all(|s| s == site || rd[s] == cd[s]) {
                *entry = u[rd[site]][cd[site]];
            }
        }
    }
    m
}

/// `|i⟩ ↦ |i + alpha⟩` written as a permutation of indices.
pub fn shift_by_permutation(state: &[Complex64], q: u32, n: usize, site: usize, alpha: i64) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); state.len()];
    for (i, amp) in state.iter().enumerate() {
        let mut d = to_digits(i, q, n);
        d[site] = (d[site] as i64 + alpha).rem_euclid(q as i64) as usize;
        out[from_digits(&d, q)] = *amp;
    }
    out
}

/// `|i⟩ ↦ ω^{beta·i}|i⟩` as a diagonal multiply.
pub fn clock_by_diagonal(state: &[Complex64], q: u32, n: usize, site: usize, beta: i64) -> Vec<Complex64> {
    state
        .iter()
        .enumerate()
        .map(|(i, amp)| amp * omega(q, beta * to_digits(i, q, n)[site] as i64))
        .collect()
}

pub fn fourier(q: u32) -> Dense {
    let norm = (q as f64).sqrt().recip();
    (0..q)
        .map(|j| (0..q).map(|i| omega(q, (i * j) as i64) * norm).collect())
        .collect()
}

/// `ρ_{k,k'} = Σ_{i,j : rest(i)=rest(j)} ψ_i ψ_j^*` over all index pairs.
pub fn brute_partial_trace(state: &RegisterState, keep: &[usize]) -> Dense {
    let q = state.q();
    let n = state.num_sites();
    let amps = state.amplitudes();
    let k_dim = (q as usize).pow(keep.len() as u32);
    let mut rho = vec![vec![c(0.0, 0.0); k_dim]; k_dim];
    for (i, a) in amps.iter().enumerate() {
        let di = to_digits(i, q, n);
        for (j, b) in amps.iter().enumerate() {
            let dj = to_digits(j, q, n);
            if (0..n).any(|s| !keep.contains(&s) && di[s] != dj[s]) {
                continue;
            }
            let ki: Vec<usize> = keep.iter().map(|&s| di[s]).collect();
            let kj: Vec<usize> = keep.iter().map(|&s| dj[s]).collect();
            rho[from_digits(&ki, q)][from_digits(&kj, q)] += a * b.conj();
        }
    }
    rho
}

/// The isometry `V|x⟩ = |x⟩|x_source⟩` as an explicit `q^{n+1} × q^n` matrix.
#[allow(clippy::needless_range_loop)]
pub fn pump_isometry(q: u32, n: usize, source: usize) -> Dense {
    let rows = (q as usize).pow(n as u32 + 1);
    let cols = (q as usize).pow(n as u32);
    let mut v = vec![vec![c(0.0, 0.0); cols]; rows];
    for col in 0..cols {
        let mut d = to_digits(col, q, n);
        d.push(d[source]);
        let row = from_digits(&d, q);
        v[row][col] = c(1.0, 0.0);
    }
    v
}
