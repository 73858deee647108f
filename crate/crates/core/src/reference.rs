//! Explicitly written reference states, built by direct enumeration rather
//! than by gates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{photon_sites, RegisterState};

fn index_of(q: u32, digits: &[u32]) -> usize {
    digits
        .iter()
        .fold(0usize, |acc, &d| acc * q as usize + (d % q) as usize)
}

/// `Σ_{i,j} |i, j, i+j, i+2j⟩ / 3`, the four-qutrit AME state.
pub fn ame43_explicit() -> RegisterState {
    let mut amps = vec![Complex64::new(0.0, 0.0); 81];
    for i in 0..3 {
        for j in 0..3 {
            amps[index_of(3, &[i, j, i + j, i + 2 * j])] += 1.0 / 3.0;
        }
    }
    RegisterState::from_amplitudes(3, photon_sites(4), amps).expect("normalized by construction")
}

/// `Σ_j |j…j⟩ / √q` on `n` sites.
pub fn ghz(q: u32, n: usize) -> Result<RegisterState> {
    if n == 0 {
        return Err(Error::InvalidParameter("GHZ state needs at least one site".into()));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); (q as usize).pow(n as u32)];
    for j in 0..q {
        amps[index_of(q, &vec![j; n])] = Complex64::new(1.0, 0.0);
    }
    RegisterState::normalized(q, photon_sites(n), amps)
}

/// Tensor product of single-site states, site 0 first.
pub fn product(q: u32, factors: &[Vec<Complex64>]) -> Result<RegisterState> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        if f.len() != q as usize {
            return Err(Error::LengthMismatch {
                got: f.len(),
                expected: q as usize,
            });
        }
        amps = amps
            .iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect();
    }
    RegisterState::normalized(q, photon_sites(factors.len()), amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ame43_support_is_nine_strings() {
        let s = ame43_explicit();
        let support: Vec<Vec<u32>> = (0..81)
            .filter(|&i| s.amplitudes()[i].norm() > 0.0)
            .map(|i| s.digits(i))
            .collect();
        assert_eq!(support.len(), 9);
        assert!(support.contains(&vec![1, 2, 0, 2]));
    }

    #[test]
    fn ghz_and_product_shapes() {
        let g = ghz(2, 4).unwrap();
        assert!((g.amplitudes()[0].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((g.amplitudes()[15].re - 0.5f64.sqrt()).abs() < 1e-15);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let p = product(3, &[vec![zero, one, zero], vec![one, one, zero]]).unwrap();
        assert!((p.amplitudes()[3].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((p.amplitudes()[4].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(product(3, &[vec![one, one]]).is_err());
    }
}
