//! The built-in protocol catalogue.
//!
//! Each protocol is written in the protocol text format and parsed on
//! demand, so `quemit show <name>` prints exactly what is executed. Photon
//! orders are chosen so that vertex `k` of the matching target graph is the
//! `k`-th photon of the output state.

use std::fmt::Write as _;

use super::{parse_protocol, Protocol};
use crate::error::{Error, Result};

/// Local dimensions a builtin accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dims {
    Exactly(u32),
    AtLeast(u32),
}

impl Dims {
    pub fn allows(self, q: u32) -> bool {
        match self {
            Dims::Exactly(d) => q == d,
            Dims::AtLeast(d) => q >= d,
        }
    }

    pub fn smallest(self) -> u32 {
        match self {
            Dims::Exactly(d) | Dims::AtLeast(d) => d,
        }
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dims::Exactly(d) => write!(f, "q = {d}"),
            Dims::AtLeast(d) => write!(f, "q >= {d}"),
        }
    }
}

/// What a builtin's output is certified against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    /// Global-phase equality with the named target graph state.
    Graph(&'static str),
    /// As `Graph`, and the state must also be AME.
    AmeGraph(&'static str),
    /// Equality with `H⊗1⊗H` applied to codeword `m` of the [[3,1,2]]_3 code.
    Codeword(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuiltinInfo {
    pub name: &'static str,
    /// Photon count; `None` for the chains, whose length is a parameter.
    pub photons: Option<usize>,
    pub dims: Dims,
    pub emitters: usize,
    pub interference: bool,
    pub verification: Verification,
}

impl BuiltinInfo {
    pub fn photons_label(&self) -> String {
        match self.photons {
            Some(n) => n.to_string(),
            None => "n >= 2".to_string(),
        }
    }
}

const fn info(
    name: &'static str,
    photons: Option<usize>,
    dims: Dims,
    emitters: usize,
    interference: bool,
    verification: Verification,
) -> BuiltinInfo {
    BuiltinInfo {
        name,
        photons,
        dims,
        emitters,
        interference,
        verification,
    }
}

pub const BUILTINS: [BuiltinInfo; 12] = [
    info("linear-cz", None, Dims::AtLeast(2), 1, false, Verification::Graph("linear-cz")),
    info("linear-cz2", None, Dims::AtLeast(2), 1, false, Verification::Graph("linear-cz2")),
    info("ame43-a", Some(4), Dims::Exactly(3), 2, false, Verification::AmeGraph("ame43-a")),
    info("ame43-b", Some(4), Dims::Exactly(3), 2, false, Verification::AmeGraph("ame43-b")),
    info("ame5-one-emitter", Some(5), Dims::AtLeast(2), 1, true, Verification::AmeGraph("ame5")),
    info("ame5-two-emitter", Some(5), Dims::AtLeast(2), 2, false, Verification::AmeGraph("ame5")),
    info("ame6-a", Some(6), Dims::AtLeast(2), 2, true, Verification::AmeGraph("ame6-a")),
    info("ame6-b", Some(6), Dims::AtLeast(2), 3, false, Verification::AmeGraph("ame6-b")),
    info("ame7-3", Some(7), Dims::Exactly(3), 2, true, Verification::AmeGraph("ame7-3")),
    info("qecc312-psi0", Some(3), Dims::Exactly(3), 1, false, Verification::Codeword(0)),
    info("qecc312-psi1", Some(3), Dims::Exactly(3), 1, false, Verification::Codeword(1)),
    info("qecc312-psi2", Some(3), Dims::Exactly(3), 1, false, Verification::Codeword(2)),
];

pub fn builtin_info(name: &str) -> Result<&'static BuiltinInfo> {
    BUILTINS
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))
}

const AME43_A: &str = "\
emitters e1 e2
H e1
H e2
CZ e1 e2 1
PUMP e1 p1
PUMP e2 p2
H e1
HDAG e2
CZ e1 e2 1
PUMP e1 p3
PUMP e2 p4
H e1
H e2
MEAS e1 o1
MEAS e2 o2
CORR p3 Z (q-1)*o1
CORR p4 Z (q-1)*o2
ORDER p1 p2 p3 p4
";

const AME43_B: &str = "\
emitters e1 e2
H e1
H e2
CZ e1 e2 1
PUMP e1 p1
PUMP e2 p2
H e1
H e2
CZ e1 e2 2
PUMP e1 p3
PUMP e2 p4
H e1
H e2
MEAS e1 o1
MEAS e2 o2
CORR p3 Z (q-1)*o1
CORR p4 Z (q-1)*o2
ORDER p1 p2 p3 p4
";

// single emitter, p1 re-interfered with the emitter before the last pump
const AME5_ONE_EMITTER: &str = "\
emitters e
H e
PUMP e p1
H e
PUMP e p2
H e
PUMP e p3
H e
PUMP e p4
H e
CZ p1 e 1
PUMP e p5
H e
MEAS e o
CORR p5 Z (q-1)*o
ORDER p1 p2 p3 p4 p5
";

// cycle is p1-p2-p5-p4-p3-p1
const AME5_TWO_EMITTER: &str = "\
emitters e1 e2
H e1
H e2
CZ e1 e2 1
PUMP e1 p1
PUMP e2 p2
H e1
H e2
PUMP e1 p3
H e1
CZ e1 e2 1
PUMP e1 p4
PUMP e2 p5
H e1
H e2
MEAS e1 o1
MEAS e2 o2
CORR p4 Z (q-1)*o1
CORR p5 Z (q-1)*o2
ORDER p1 p2 p5 p4 p3
";

const AME6_A: &str = "\
emitters e1 e2
H e1
H e2
CZ e1 e2 1
PUMP e1 p1
PUMP e2 p2
H e1
H e2
CZ p1 e2 1
CZ e1 e2 1
PUMP e1 p3
PUMP e2 p4
H e1
H e2
CZ p4 e1 1
CZ p2 e2 1
CZ e1 e2 1
PUMP e1 p5
PUMP e2 p6
H e1
H e2
MEAS e1 o1
MEAS e2 o2
CORR p5 Z (q-1)*o1
CORR p6 Z (q-1)*o2
ORDER p1 p2 p3 p4 p5 p6
";

const AME6_B: &str = "\
emitters e1 e2 e3
H e1
H e2
H e3
CZ e1 e2 1
CZ e2 e3 1
CZ e1 e3 1
PUMP e1 p1
PUMP e2 p2
PUMP e3 p3
H e1
H e2
H e3
CZ e1 e2 1
CZ e2 e3 1
CZ e1 e3 1
PUMP e1 p4
PUMP e2 p5
PUMP e3 p6
H e1
H e2
H e3
MEAS e1 o1
MEAS e2 o2
MEAS e3 o3
CORR p4 Z (q-1)*o1
CORR p5 Z (q-1)*o2
CORR p6 Z (q-1)*o3
ORDER p1 p2 p3 p4 p5 p6
";

const AME7_3: &str = "\
emitters e1 e2
H e1
H e2
CZ e1 e2 2
PUMP e1 p1
PUMP e2 p2
H e1
H e2
CZ p1 e2 1
CZ e1 e2 1
PUMP e1 p3
PUMP e2 p4
H e1
H e2
CZ p4 e1 1
CZ e1 e2 1
PUMP e2 p5
HDAG e2
CZ p4 e2 1
CZ p2 e2 1
PUMP e1 p6
PUMP e2 p7
H e1
H e2
MEAS e1 o1
MEAS e2 o2
CORR p6 Z (q-1)*o1
CORR p7 Z (q-1)*o2
ORDER p1 p2 p3 p4 p5 p6 p7
";

/// Codeword generators for the [[3,1,2]]_3 code after `H⊗1⊗H`.
/// `start` prepares the emitter in `|start⟩`; `mid_z` is the Z power
/// applied to the emitter before the third photon.
fn qecc312(start: u32, mid_z: u32) -> String {
    let mut text = String::from("emitters e\n");
    if start != 0 {
        writeln!(text, "X e {start}").unwrap();
    }
    text.push_str("H e\nPUMP e p1\nH e\nPUMP e p2\nH e\n");
    if mid_z != 0 {
        writeln!(text, "Z e {mid_z}").unwrap();
    }
    text.push_str("PUMP e p3\nH e\nMEAS e o\nCORR p3 Z (q-1)*o\nORDER p3 p2 p1\n");
    text
}

/// Single-emitter chain; `dagger` selects `H†` after every pump.
fn chain(n: usize, dagger: bool) -> String {
    let mut text = String::from("emitters e\nH e\n");
    let step = if dagger { "HDAG" } else { "H" };
    for k in 1..=n {
        writeln!(text, "PUMP e p{k}\n{step} e").unwrap();
    }
    let corr = if dagger { "o" } else { "(q-1)*o" };
    writeln!(text, "MEAS e o\nCORR p{n} Z {corr}").unwrap();
    let order: Vec<String> = (1..=n).map(|k| format!("p{k}")).collect();
    writeln!(text, "ORDER {}", order.join(" ")).unwrap();
    text
}

/// Build the named protocol at local dimension `q`. `n` is the chain length
/// for `linear-cz` / `linear-cz2` and ignored otherwise.
pub fn builtin(name: &str, q: u32, n: Option<usize>) -> Result<Protocol> {
    let info = builtin_info(name)?;
    if !info.dims.allows(q) {
        return Err(Error::UnsupportedDimension {
            name: name.to_string(),
            q,
        });
    }
    let chain_len = || match n {
        Some(n) if n >= 1 => Ok(n),
        _ => Err(Error::InvalidParameter(format!(
            "`{name}` needs a chain length n >= 1"
        ))),
    };
    let body = match name {
        "linear-cz" => chain(chain_len()?, false),
        "linear-cz2" => chain(chain_len()?, true),
        "ame43-a" => AME43_A.to_string(),
        "ame43-b" => AME43_B.to_string(),
        "ame5-one-emitter" => AME5_ONE_EMITTER.to_string(),
        "ame5-two-emitter" => AME5_TWO_EMITTER.to_string(),
        "ame6-a" => AME6_A.to_string(),
        "ame6-b" => AME6_B.to_string(),
        "ame7-3" => AME7_3.to_string(),
        "qecc312-psi0" => qecc312(0, 0),
        "qecc312-psi1" => qecc312(2, 1),
        "qecc312-psi2" => qecc312(1, 2),
        _ => unreachable!("listed in BUILTINS"),
    };
    parse_protocol(name, &format!("dim {q}\n{body}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Instruction;

    fn photon_czs(p: &Protocol) -> usize {
        let photons = p.photons();
        p.instructions
            .iter()
            .filter(|i| match i {
                Instruction::Cz(a, b, _) => {
                    photons.contains(&a.as_str()) || photons.contains(&b.as_str())
                }
                _ => false,
            })
            .count()
    }

    #[test]
    fn every_builtin_parses_and_matches_its_table_row() {
        for info in &BUILTINS {
            let q = info.dims.smallest().max(2);
            let p = builtin(info.name, q, Some(4)).unwrap();
            assert_eq!(p.emitters.len(), info.emitters, "{}", info.name);
            assert_eq!(p.uses_photon_interference(), info.interference, "{}", info.name);
            assert_eq!(p.photons().len(), info.photons.unwrap_or(4), "{}", info.name);
            assert_eq!(p.measurement_count(), info.emitters, "{}", info.name);
        }
    }

    #[test]
    fn ame6_b_has_three_emitters_and_no_photon_gate() {
        let p = builtin("ame6-b", 3, None).unwrap();
        assert_eq!(p.emitters.len(), 3);
        assert_eq!(photon_czs(&p), 0);
    }

    #[test]
    fn ame5_one_emitter_has_exactly_one_photon_gate() {
        let p = builtin("ame5-one-emitter", 4, None).unwrap();
        assert_eq!(p.emitters.len(), 1);
        assert_eq!(photon_czs(&p), 1);
    }

    #[test]
    fn qutrit_only_builtins_reject_other_dimensions() {
        for name in ["ame43-a", "ame43-b", "ame7-3", "qecc312-psi1"] {
            assert!(matches!(
                builtin(name, 4, None),
                Err(Error::UnsupportedDimension { .. })
            ));
        }
        assert!(matches!(builtin("ame5", 3, None), Err(Error::UnknownBuiltin(_))));
        assert!(builtin("linear-cz", 3, None).is_err());
        assert!(builtin("linear-cz", 3, Some(0)).is_err());
    }

    #[test]
    fn chain_uses_hdag_for_cz2() {
        let p = builtin("linear-cz2", 3, Some(3)).unwrap();
        let hdags = p
            .instructions
            .iter()
            .filter(|i| matches!(i, Instruction::HDag(_)))
            .count();
        assert_eq!(hdags, 3);
        assert!(matches!(p.instructions[0], Instruction::H(_)));
    }

    #[test]
    fn builtins_round_trip_through_text() {
        for info in &BUILTINS {
            let p = builtin(info.name, info.dims.smallest(), Some(3)).unwrap();
            assert_eq!(parse_protocol(info.name, &p.to_text()).unwrap(), p);
        }
    }
}
