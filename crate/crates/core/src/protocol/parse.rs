//! Line-oriented protocol text.
//!
//! ```text
//! # comment
//! dim 3
//! emitters e0 e1
//! H e0
//! HDAG e1
//! X e0 2
//! Z e0 1
//! CZ e0 e1 2
//! PUMP e0 p1
//! CZ p1 e1 1
//! MEAS e0 o1
//! CORR p1 Z (q-1)*o1
//! ORDER p1
//! ```

use super::{Checker, CorrectionGate, Instruction, LinearExpr, Protocol};
use crate::error::{ParseError, Result};

fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse and statically validate a protocol. `name` is recorded on the result.
pub fn parse_protocol(name: &str, text: &str) -> Result<Protocol> {
    Ok(Parser::default().parse(name, text)?)
}

#[derive(Default)]
struct Parser {
    q: Option<u32>,
    emitters: Option<Vec<String>>,
    checker: Option<Checker>,
    instructions: Vec<Instruction>,
    order: Option<Vec<String>>,
}

impl Parser {
    fn parse(mut self, name: &str, text: &str) -> std::result::Result<Protocol, ParseError> {
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            self.line(&tokens).map_err(|m| ParseError::new(line, m))?;
        }
        let end = last_line.max(1);
        let q = self
            .q
            .ok_or_else(|| ParseError::new(end, "missing `dim` directive"))?;
        let emitters = self
            .emitters
            .ok_or_else(|| ParseError::new(end, "missing `emitters` directive"))?;
        let checker = self.checker.expect("set with emitters");
        checker.finish().map_err(|m| ParseError::new(end, m))?;
        if let Some(order) = &self.order {
            checker.check_order(order).map_err(|m| ParseError::new(end, m))?;
        }
        Ok(Protocol {
            name: name.to_string(),
            q,
            emitters,
            instructions: self.instructions,
            order: self.order,
        })
    }

    fn line(&mut self, tokens: &[&str]) -> std::result::Result<(), String> {
        let (keyword, args) = (tokens[0], &tokens[1..]);
        match keyword {
            "dim" => {
                if self.q.is_some() {
                    return Err("`dim` given twice".into());
                }
                let [value] = args else {
                    return Err("`dim` takes one integer".into());
                };
                let q: u32 = parse_int(value)?;
                if q < 2 {
                    return Err(format!("local dimension must be at least 2, got {q}"));
                }
                self.q = Some(q);
                return Ok(());
            }
            "emitters" => {
                if self.emitters.is_some() {
                    return Err("`emitters` given twice".into());
                }
                if args.is_empty() {
                    return Err("`emitters` needs at least one label".into());
                }
                let labels = args
                    .iter()
                    .map(|a| label(a))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                self.checker = Some(Checker::new(&labels)?);
                self.emitters = Some(labels);
                return Ok(());
            }
            _ => {}
        }

        if self.q.is_none() {
            return Err(format!("`{keyword}` before `dim`"));
        }
        let Some(checker) = self.checker.as_mut() else {
            return Err(format!("`{keyword}` before `emitters`"));
        };
        if self.order.is_some() {
            return Err("`ORDER` must be the last directive".into());
        }
        let instruction = match keyword {
            "H" => Instruction::H(one_label(keyword, args)?),
            "HDAG" => Instruction::HDag(one_label(keyword, args)?),
            "X" | "Z" => {
                let [t, p] = args else {
                    return Err(format!("`{keyword}` takes a register and an integer power"));
                };
                let (t, p) = (label(t)?, parse_int(p)?);
                if keyword == "X" {
                    Instruction::X(t, p)
                } else {
                    Instruction::Z(t, p)
                }
            }
            "CZ" => {
                let [a, b, beta] = args else {
                    return Err("`CZ` takes two registers and an integer power".into());
                };
                Instruction::Cz(label(a)?, label(b)?, parse_int(beta)?)
            }
            "PUMP" => {
                let [e, p] = args else {
                    return Err("`PUMP` takes an emitter and a new photon label".into());
                };
                Instruction::Pump {
                    emitter: label(e)?,
                    photon: label(p)?,
                }
            }
            "MEAS" => {
                let [e, v] = args else {
                    return Err("`MEAS` takes an emitter and an outcome variable".into());
                };
                Instruction::Measure {
                    emitter: label(e)?,
                    variable: label(v)?,
                }
            }
            "CORR" => {
                let [t, gate, rest @ ..] = args else {
                    return Err("`CORR` takes a register, a gate and an exponent".into());
                };
                let gate = match *gate {
                    "Z" => CorrectionGate::Z,
                    "X" => CorrectionGate::X,
                    other => return Err(format!("unknown correction gate `{other}`")),
                };
                Instruction::Correct {
                    target: label(t)?,
                    gate,
                    exponent: LinearExpr::parse(&rest.join(" "))?,
                }
            }
            "ORDER" => {
                if args.is_empty() {
                    return Err("`ORDER` needs at least one photon label".into());
                }
                let order = args
                    .iter()
                    .map(|a| label(a))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                checker.check_order(&order)?;
                self.order = Some(order);
                return Ok(());
            }
            other => return Err(format!("unknown token `{other}`")),
        };
        checker.step(&instruction)?;
        self.instructions.push(instruction);
        Ok(())
    }
}

fn label(s: &str) -> std::result::Result<String, String> {
    if is_label(s) {
        Ok(s.to_string())
    } else {
        Err(format!("`{s}` is not a valid label"))
    }
}

fn one_label(keyword: &str, args: &[&str]) -> std::result::Result<String, String> {
    match args {
        [t] => label(t),
        _ => Err(format!("`{keyword}` takes exactly one register")),
    }
}

fn parse_int(s: &str) -> std::result::Result<u32, String> {
    s.parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::protocol::{Coef, LinearExpr};

    const CHAIN: &str = "\
# three-photon chain
dim 3
emitters e
H e
PUMP e p1
H e
PUMP e p2
H e
PUMP e p3
H e   # last Hadamard
MEAS e o1
CORR p3 Z (q-1)*o1
ORDER p1 p2 p3
";

    fn err_line(text: &str) -> (usize, String) {
        match parse_protocol("t", text) {
            Err(Error::Parse(ParseError { line, message })) => (line, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_chain() {
        let p = parse_protocol("chain", CHAIN).unwrap();
        assert_eq!(p.q, 3);
        assert_eq!(p.emitters, vec!["e"]);
        assert_eq!(p.instructions.len(), 9);
        assert_eq!(
            p.instructions[8],
            Instruction::Correct {
                target: "p3".into(),
                gate: CorrectionGate::Z,
                exponent: LinearExpr::var("o1", Coef::Q_MINUS_ONE),
            }
        );
        assert_eq!(p.order.as_deref().unwrap(), ["p1", "p2", "p3"]);
    }

    #[test]
    fn text_round_trip() {
        let p = parse_protocol("chain", CHAIN).unwrap();
        assert_eq!(parse_protocol("chain", &p.to_text()).unwrap(), p);
    }

    #[test]
    fn unknown_token_reports_line() {
        let text = CHAIN.replace("H e   # last Hadamard", "SWAP e p1");
        let (line, msg) = err_line(&text);
        assert_eq!(line, 10);
        assert!(msg.contains("unknown token `SWAP`"), "{msg}");
    }

    #[test]
    fn structural_errors() {
        assert_eq!(err_line("emitters e\n").0, 1);
        assert_eq!(err_line("dim 3\nH e\n").0, 2);
        assert_eq!(err_line("dim 1\n").0, 1);
        assert_eq!(err_line("dim 3\nemitters e\nH f\n").0, 3);
        assert_eq!(err_line("dim 3\nemitters e\nCZ e e 1\n").0, 3);
        assert_eq!(err_line("dim 3\nemitters e\nPUMP e e\n").0, 3);
        assert_eq!(err_line("dim 3\nemitters e\nMEAS e o\nH e\n").0, 4);
        assert_eq!(err_line("dim 3\nemitters e\nCORR e Z o1\n").0, 3);
        assert_eq!(err_line("dim 3\nemitters e\nX e -1\n").0, 3);
        assert_eq!(err_line("dim 3\nemitters e\nCORR e Y 1\n").0, 3);
        assert_eq!(err_line("dim 3\nemitters e e\n").0, 2);
        // unmeasured emitter is reported at end of input
        assert_eq!(err_line("dim 3\nemitters e\nH e\n").0, 3);
    }

    #[test]
    fn order_must_match_photons() {
        let text = CHAIN.replace("ORDER p1 p2 p3", "ORDER p1 p2");
        let (line, msg) = err_line(&text);
        assert_eq!(line, 13);
        assert!(msg.contains("ORDER"), "{msg}");
        let text = format!("{CHAIN}H e\n");
        assert_eq!(err_line(&text).1, "`ORDER` must be the last directive");
    }
}
