//! Line-oriented program files.
//!
//! ```text
//! # nonlocal CNOT
//! extern q0@A q1@B
//! phase 1
//! bell q2@A q3@B
//! phase 2
//! cgate A q0 -> q2 : X
//! measz A q2 -> c1
//! send A->B c1
//! cpauli B q3 X if c1
//! gate B q3 : H
//! alloc A q7 0
//! discard c1
//! ```
//!
//! Keywords and party names are case-insensitive; `#` starts a comment.
//! Everything after `:` is a gate expression.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{Bit, ExternalWire, Gate, Instruction, Party, Pauli, Phase, Program, Qubit};
use crate::gatelang::parse_gate;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

/// A parsed program plus the 1-based source line of each instruction.
#[derive(Clone, Debug)]
pub struct ProgramSource<T: Real = f64> {
    pub program: Program<T>,
    pub lines: Vec<usize>,
}

pub fn parse_program<T: Real>(src: &str) -> Result<ProgramSource<T>, TextError> {
    let mut external: Option<Vec<ExternalWire>> = None;
    let mut body: Vec<(usize, Phase, Instruction<T>)> = Vec::new();
    let mut phase = Phase::Unphased;

    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| TextError { line, message };
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (head, gate_text) = match text.split_once(':') {
            Some((h, g)) => (h, Some(g.trim())),
            None => (text, None),
        };
        let head = head.replace("->", " -> ");
        let toks: Vec<&str> = head.split_whitespace().collect();
        let keyword = toks[0].to_ascii_lowercase();
        let args = &toks[1..];
        let gate = || -> Result<Gate<T>, TextError> {
            let g = gate_text
                .filter(|g| !g.is_empty())
                .ok_or_else(|| err(format!("`{keyword}` needs `: <gate expression>`")))?;
            let m = parse_gate::<T>(g).map_err(|e| err(e.to_string()))?;
            Ok(Gate::new(g, m))
        };
        if gate_text.is_some() && !matches!(keyword.as_str(), "gate" | "cgate") {
            return Err(err(format!("`{keyword}` does not take a gate expression")));
        }

        let ins = match (keyword.as_str(), args) {
            ("extern", wires) => {
                if external.is_some() {
                    return Err(err("duplicate `extern` declaration".into()));
                }
                if !body.is_empty() {
                    return Err(err("`extern` must precede all instructions".into()));
                }
                let wires = wires
                    .iter()
                    .map(|w| {
                        let (wire, party) = located_qubit(w).map_err(&err)?;
                        Ok(ExternalWire { wire, party })
                    })
                    .collect::<Result<_, TextError>>()?;
                external = Some(wires);
                continue;
            }
            ("phase", [tag]) => {
                phase = match tag.to_ascii_lowercase().as_str() {
                    "none" => Phase::Unphased,
                    n => n
                        .parse::<u8>()
                        .ok()
                        .and_then(Phase::from_number)
                        .ok_or_else(|| {
                            err(format!("unknown phase `{tag}` (expected 1, 2, 3 or none)"))
                        })?,
                };
                continue;
            }
            ("alloc", [party, wire, value]) => Instruction::AllocQubit {
                party: party_of(party).map_err(&err)?,
                wire: qubit(wire).map_err(&err)?,
                value: match *value {
                    "0" => false,
                    "1" => true,
                    v => return Err(err(format!("alloc value must be 0 or 1, got `{v}`"))),
                },
            },
            ("bell", [left, right]) => {
                let (l, lp) = located_qubit(left).map_err(&err)?;
                let (r, rp) = located_qubit(right).map_err(&err)?;
                match (lp, rp) {
                    (Party::Alice, Party::Bob) => Instruction::MakeBellPair { alice: l, bob: r },
                    (Party::Bob, Party::Alice) => Instruction::MakeBellPair { alice: r, bob: l },
                    _ => return Err(err("a Bell pair needs one end at A and one at B".into())),
                }
            }
            ("gate", [party, wires @ ..]) if !wires.is_empty() => Instruction::ApplyLocal {
                party: party_of(party).map_err(&err)?,
                wires: wires
                    .iter()
                    .map(|w| qubit(w))
                    .collect::<Result<_, _>>()
                    .map_err(&err)?,
                gate: gate()?,
            },
            ("cgate", [party, control, "->", targets @ ..]) if !targets.is_empty() => {
                Instruction::ApplyControlledLocal {
                    party: party_of(party).map_err(&err)?,
                    control: qubit(control).map_err(&err)?,
                    targets: targets
                        .iter()
                        .map(|w| qubit(w))
                        .collect::<Result<_, _>>()
                        .map_err(&err)?,
                    gate: gate()?,
                }
            }
            ("measz", [party, wire, "->", out]) => Instruction::MeasureZ {
                party: party_of(party).map_err(&err)?,
                wire: qubit(wire).map_err(&err)?,
                out: bit(out).map_err(&err)?,
            },
            ("send", [from, "->", to, b]) => Instruction::SendBit {
                from: party_of(from).map_err(&err)?,
                to: party_of(to).map_err(&err)?,
                bit: bit(b).map_err(&err)?,
            },
            ("cpauli", [party, wire, pauli, kw, b]) if kw.eq_ignore_ascii_case("if") => {
                Instruction::ConditionalPauli {
                    party: party_of(party).map_err(&err)?,
                    wire: qubit(wire).map_err(&err)?,
                    pauli: match pauli.to_ascii_uppercase().as_str() {
                        "X" => Pauli::X,
                        "Z" => Pauli::Z,
                        p => return Err(err(format!("correction must be X or Z, got `{p}`"))),
                    },
                    bit: bit(b).map_err(&err)?,
                }
            }
            ("discard", [b]) => Instruction::DiscardBit {
                bit: bit(b).map_err(&err)?,
            },
            (
                "phase" | "alloc" | "bell" | "gate" | "cgate" | "measz" | "send" | "cpauli"
                | "discard",
                _,
            ) => return Err(err(format!("malformed `{keyword}` instruction: `{text}`"))),
            _ => return Err(err(format!("unknown instruction `{}`", toks[0]))),
        };
        body.push((line, phase, ins));
    }

    let mut program = Program::new(external.unwrap_or_default());
    let mut lines = Vec::with_capacity(body.len());
    for (line, phase, ins) in body {
        program.push(phase, ins);
        lines.push(line);
    }
    Ok(ProgramSource { program, lines })
}

fn party_of(tok: &str) -> Result<Party, String> {
    match tok.to_ascii_lowercase().as_str() {
        "a" | "alice" => Ok(Party::Alice),
        "b" | "bob" => Ok(Party::Bob),
        _ => Err(format!("expected a party (A or B), got `{tok}`")),
    }
}

fn numbered(tok: &str, prefix: char) -> Option<u32> {
    let mut chars = tok.chars();
    let head = chars.next()?;
    if head.to_ascii_lowercase() != prefix {
        return None;
    }
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn qubit(tok: &str) -> Result<Qubit, String> {
    numbered(tok, 'q')
        .map(Qubit)
        .ok_or_else(|| format!("expected a quantum wire like `q1`, got `{tok}`"))
}

fn bit(tok: &str) -> Result<Bit, String> {
    numbered(tok, 'c')
        .map(Bit)
        .ok_or_else(|| format!("expected a classical wire like `c1`, got `{tok}`"))
}

fn located_qubit(tok: &str) -> Result<(Qubit, Party), String> {
    let (w, p) = tok
        .split_once('@')
        .ok_or_else(|| format!("expected `wire@party`, got `{tok}`"))?;
    Ok((qubit(w)?, party_of(p)?))
}

fn join<I: IntoIterator<Item = Qubit>>(wires: I) -> String {
    wires
        .into_iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One program-file line, without the trailing newline.
impl<T: Real> fmt::Display for Instruction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = match self {
            Instruction::AllocQubit { party, wire, value } => {
                format!("alloc {} {} {}", party.short(), wire, u8::from(*value))
            }
            Instruction::MakeBellPair { alice, bob } => format!("bell {alice}@A {bob}@B"),
            Instruction::ApplyLocal { party, wires, gate } => {
                format!(
                    "gate {} {} : {}",
                    party.short(),
                    join(wires.iter().copied()),
                    gate.label
                )
            }
            Instruction::ApplyControlledLocal {
                party,
                control,
                targets,
                gate,
            } => format!(
                "cgate {} {} -> {} : {}",
                party.short(),
                control,
                join(targets.iter().copied()),
                gate.label
            ),
            Instruction::MeasureZ { party, wire, out } => {
                format!("measz {} {} -> {}", party.short(), wire, out)
            }
            Instruction::SendBit { from, to, bit } => {
                format!("send {}->{} {}", from.short(), to.short(), bit)
            }
            Instruction::ConditionalPauli {
                party,
                wire,
                pauli,
                bit,
            } => format!(
                "cpauli {} {} {} if {}",
                party.short(),
                wire,
                match pauli {
                    Pauli::X => "X",
                    Pauli::Z => "Z",
                },
                bit
            ),
            Instruction::DiscardBit { bit } => format!("discard {bit}"),
        };
        f.write_str(&line)
    }
}

pub(super) fn write_program<T: Real>(p: &Program<T>) -> String {
    let mut out = String::new();
    if !p.external().is_empty() {
        let decl: Vec<String> = p
            .external()
            .iter()
            .map(|e| format!("{}@{}", e.wire, e.party.short()))
            .collect();
        let _ = writeln!(out, "extern {}", decl.join(" "));
    }
    let mut current = Phase::Unphased;
    for (phase, ins) in p.iter() {
        if phase != current {
            match phase.number() {
                Some(n) => {
                    let _ = writeln!(out, "phase {n}");
                }
                None => out.push_str("phase none\n"),
            }
            current = phase;
        }
        let _ = writeln!(out, "{ins}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
EXTERN q0@a q1@Bob
phase 1
Bell q3@B q2@A   # reversed ends
phase 2
cgate A q0 -> q2 : X
measz A q2->c1
send A -> B c1
CPAULI b q3 x IF C1
phase none
gate B q3 q1 : H x RZ(0.25)
discard c1
";

    #[test]
    fn parses_every_form() {
        let src = parse_program::<f64>(SAMPLE).unwrap();
        let p = &src.program;
        assert_eq!(
            p.external(),
            &[
                ExternalWire {
                    wire: Qubit(0),
                    party: Party::Alice
                },
                ExternalWire {
                    wire: Qubit(1),
                    party: Party::Bob
                },
            ]
        );
        assert_eq!(src.lines, vec![4, 6, 7, 8, 9, 11, 12]);
        assert_eq!(
            p.instructions()[0],
            Instruction::MakeBellPair {
                alice: Qubit(2),
                bob: Qubit(3)
            }
        );
        assert_eq!(
            p.instructions()[4],
            Instruction::ConditionalPauli {
                party: Party::Bob,
                wire: Qubit(3),
                pauli: Pauli::X,
                bit: Bit(1)
            }
        );
        assert_eq!(
            p.phases(),
            &[
                Phase::Distribution,
                Phase::Interaction,
                Phase::Interaction,
                Phase::Interaction,
                Phase::Interaction,
                Phase::Unphased,
                Phase::Unphased
            ]
        );
        let g = p.instructions()[5].gate().unwrap();
        assert_eq!(g.label, "H x RZ(0.25)");
        assert_eq!(g.matrix.dim(), 4);
    }

    #[test]
    fn written_text_reparses_identically() {
        let p = parse_program::<f64>(SAMPLE).unwrap().program;
        let again = parse_program::<f64>(&p.to_text()).unwrap().program;
        assert_eq!(again, p);
        assert_eq!(again.to_text(), p.to_text());
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("bell q1@A q2@A", 1),
            ("\n\nfoo q1", 3),
            ("gate A q1", 1),
            ("gate A q1 : RZ(", 1),
            ("measz A q1 c1", 1),
            ("cpauli B q1 Y if c1", 1),
            ("alloc A q1 2", 1),
            ("discard q1", 1),
            ("send A->B c1 : H", 1),
            ("phase 4", 1),
            ("discard c1\nextern q0@A", 2),
        ];
        for (src, line) in cases {
            let e = parse_program::<f64>(src).unwrap_err();
            assert_eq!(e.line, line, "{src}: {e}");
        }
        let e = parse_program::<f64>("gate A q1 : RZ(").unwrap_err();
        assert!(e.message.contains("offset 3"), "{e}");
    }
}
