//! Netlist text format and binary truth-table files.
//!
//! ```text
//! # comment
//! circuit and2 inputs 2
//! 1 = INPUT 0
//! 2 = INPUT 1
//! 3 = AND 1 2
//! output 3
//! ```

use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate, GateId, GateKind};
use crate::error::{Error, Result};
use crate::truthtable::TruthTable;

/// Largest `n` accepted in a truth-table file header.
pub const MAX_TABLE_FILE_N: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    pub name: String,
    pub circuit: Circuit,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (pos, ch) in line.char_indices() {
        if ch == ' ' || ch == '\t' {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..pos], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(pos);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> LineParser<'a> {
    fn syntax(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, column, message: message.into() }
    }

    fn next_column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.text)
            }
            None => Err(self.syntax(self.end_column, format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let column = self.next_column();
        let t = self.next(&format!("'{kw}'"))?;
        if t != kw {
            return Err(self.syntax(column, format!("expected '{kw}', found '{t}'")));
        }
        Ok(())
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let column = self.next_column();
        let t = self.next(what)?;
        if !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.syntax(column, format!("expected {what}, found '{t}'")));
        }
        t.parse().map_err(|_| self.syntax(column, format!("{what} '{t}' is out of range")))
    }

    fn done(&self) -> Result<()> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(self.syntax(t.column, format!("unexpected token '{}'", t.text))),
            None => Ok(()),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Parses a netlist, keeping the circuit name.
pub fn parse_netlist(text: &str) -> Result<Netlist> {
    let mut header: Option<(String, usize)> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut output: Option<GateId> = None;
    let mut last_line = 0;

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let tokens = tokenize(line);
        if tokens.is_empty() || tokens[0].text.starts_with('#') {
            continue;
        }
        let end_column = line.chars().count() + 1;
        let mut p = LineParser { line: line_no, tokens, pos: 0, end_column };
        let semantic = |message: String| Error::Semantic { line: line_no, message };

        if output.is_some() {
            return Err(semantic("content after the output line".into()));
        }
        let first = p.tokens[0].text;
        if header.is_none() {
            p.keyword("circuit")?;
            let column = p.next_column();
            let name = p.next("circuit name")?;
            if !valid_ident(name) {
                return Err(p.syntax(column, format!("invalid circuit name '{name}'")));
            }
            p.keyword("inputs")?;
            let n: usize = p.number("input count")?;
            p.done()?;
            header = Some((name.to_string(), n));
            continue;
        }
        let n = header.as_ref().map_or(0, |h| h.1);

        if first == "output" {
            p.pos = 1;
            let id: GateId = p.number("gate id")?;
            p.done()?;
            if id == 0 || id as usize > gates.len() {
                return Err(semantic(format!("output refers to undefined gate {id}")));
            }
            output = Some(id);
            continue;
        }

        let id: GateId = p.number("gate id")?;
        p.keyword("=")?;
        let kind_column = p.next_column();
        let kind_text = p.next("gate kind")?;
        let expected = gates.len() as GateId + 1;
        if id != expected {
            let why = if id == 0 {
                "gate ids start at 1".to_string()
            } else if id < expected {
                format!("duplicate gate id {id}")
            } else {
                format!("gate id {id} skips ahead; expected {expected}")
            };
            return Err(semantic(why));
        }

        let read_refs = |p: &mut LineParser<'_>| -> Result<Vec<GateId>> {
            let mut refs = Vec::new();
            while !p.at_end() {
                let r: GateId = p.number("gate id")?;
                if r == 0 || r >= id {
                    return Err(semantic(format!(
                        "gate {id} references gate {r}, which is not defined before it"
                    )));
                }
                refs.push(r);
            }
            if refs.is_empty() {
                return Err(p.syntax(p.end_column, "expected at least one gate id"));
            }
            Ok(refs)
        };

        let gate = match kind_text {
            "INPUT" => {
                let k: u32 = p.number("input index")?;
                p.done()?;
                if k as usize >= n {
                    return Err(semantic(format!("input index {k} out of range for {n} inputs")));
                }
                if gates.len() != k as usize {
                    return Err(semantic(format!(
                        "gate {id} = INPUT {k}: inputs must be gates 1..{n} in order"
                    )));
                }
                Gate::new(GateKind::Input(k), vec![])
            }
            "CONST" => {
                let column = p.next_column();
                let t = p.next("0 or 1")?;
                let b = match t {
                    "0" => false,
                    "1" => true,
                    _ => return Err(p.syntax(column, format!("expected 0 or 1, found '{t}'"))),
                };
                p.done()?;
                Gate::new(GateKind::Const(b), vec![])
            }
            "NOT" | "AND" | "OR" => {
                let refs = read_refs(&mut p)?;
                let kind = match kind_text {
                    "NOT" => GateKind::Not,
                    "AND" => GateKind::And,
                    _ => GateKind::Or,
                };
                if kind == GateKind::Not && refs.len() != 1 {
                    return Err(semantic(format!("NOT takes exactly one input, got {}", refs.len())));
                }
                Gate::new(kind, refs)
            }
            "MOD" => {
                let m: u32 = p.number("modulus")?;
                if m < 2 {
                    return Err(semantic(format!("modulus {m} must be at least 2")));
                }
                let refs = read_refs(&mut p)?;
                Gate::new(GateKind::Mod(m), refs)
            }
            other => return Err(p.syntax(kind_column, format!("unknown gate kind '{other}'"))),
        };
        if gates.len() < n && !matches!(gate.kind, GateKind::Input(_)) {
            return Err(semantic(format!("gate {id}: the first {n} gates must be INPUT gates")));
        }
        gates.push(gate);
    }

    let Some((name, n)) = header else {
        return Err(Error::Syntax { line: 1, column: 1, message: "missing 'circuit' header".into() });
    };
    let Some(output) = output else {
        return Err(Error::Semantic { line: last_line, message: "missing output line".into() });
    };
    if gates.len() < n {
        return Err(Error::Semantic {
            line: last_line,
            message: format!("{n} inputs declared but only {} INPUT gates defined", gates.len()),
        });
    }
    let circuit = Circuit::new(n, gates, output)
        .map_err(|e| Error::Semantic { line: last_line, message: e.to_string() })?;
    Ok(Netlist { name, circuit })
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_netlist(text).map(|n| n.circuit)
}

/// Parses raw bytes; invalid UTF-8 is reported as a syntax error at its position.
pub fn parse_circuit_bytes(bytes: &[u8]) -> Result<Circuit> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_circuit(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let column = std::str::from_utf8(&valid[line_start..]).map_or(1, |s| s.chars().count() + 1);
            Err(Error::Syntax { line, column, message: "invalid UTF-8".into() })
        }
    }
}

/// Canonical text form: gates in id order, single spaces, LF line endings.
pub fn serialize_circuit(circuit: &Circuit, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "circuit {} inputs {}", name, circuit.n_inputs());
    for (idx, g) in circuit.gates().iter().enumerate() {
        let _ = write!(out, "{} = {}", idx + 1, g.kind.mnemonic());
        match g.kind {
            GateKind::Input(k) => {
                let _ = write!(out, " {k}");
            }
            GateKind::Const(b) => {
                let _ = write!(out, " {}", b as u8);
            }
            GateKind::Mod(m) => {
                let _ = write!(out, " {m}");
            }
            _ => {}
        }
        for f in &g.fanin {
            let _ = write!(out, " {f}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "output {}", circuit.output());
    out
}

/// `tt n=<n>\n` followed by the table packed LSB-first, 8 entries per byte.
pub fn write_truthtable(table: &TruthTable) -> Vec<u8> {
    let n_bytes = table.len().div_ceil(8);
    let mut out = format!("tt n={}\n", table.n()).into_bytes();
    out.reserve(n_bytes);
    let payload = table.words().iter().flat_map(|w| w.to_le_bytes());
    out.extend(payload.take(n_bytes));
    out
}

pub fn read_truthtable(bytes: &[u8]) -> Result<TruthTable> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..nl])
        .map_err(|_| Error::Format("header is not UTF-8".into()))?;
    let n_text = header
        .strip_prefix("tt n=")
        .ok_or_else(|| Error::Format(format!("bad header '{header}'")))?;
    if n_text.is_empty() || !n_text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Format(format!("bad header '{header}'")));
    }
    let n: usize = n_text.parse().map_err(|_| Error::Format(format!("bad header '{header}'")))?;
    if n > MAX_TABLE_FILE_N {
        return Err(Error::Format(format!("n={n} exceeds the supported maximum {MAX_TABLE_FILE_N}")));
    }
    let payload = &bytes[nl + 1..];
    let expected = (1usize << n).div_ceil(8);
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, expected {expected} for n={n}",
            payload.len()
        )));
    }
    if n < 3 && payload[0] >> (1u32 << n) != 0 {
        return Err(Error::Format("nonzero bits past the end of the table".into()));
    }
    let words = payload
        .chunks(8)
        .map(|chunk| {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            u64::from_le_bytes(buf)
        })
        .collect();
    Ok(TruthTable::from_words(n, words))
}

#[cfg(test)]
mod tests {
    use super::*;

    const AND2: &str = "circuit and2 inputs 2\n1 = INPUT 0\n2 = INPUT 1\n3 = AND 1 2\noutput 3\n";

    #[test]
    fn parse_minimal_netlist() {
        let nl = parse_netlist(AND2).unwrap();
        assert_eq!(nl.name, "and2");
        assert_eq!(nl.circuit.size(), 3);
        assert_eq!(serialize_circuit(&nl.circuit, "and2"), AND2);
    }

    #[test]
    fn comments_blank_lines_and_crlf() {
        let text = "# header comment\r\n\r\ncircuit c inputs 1\r\n  # indented\r\n1 = INPUT 0\r\n2 = NOT 1\r\noutput 2\r\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.truth_table().unwrap().to_bit_string(), "10");
    }

    #[test]
    fn modulus_one_is_semantic_error() {
        let text = "circuit m inputs 2\n1 = INPUT 0\n2 = INPUT 1\n3 = MOD 1 1 2\noutput 3\n";
        assert!(matches!(parse_circuit(text), Err(Error::Semantic { line: 4, .. })));
    }

    #[test]
    fn mod_gate_serialization() {
        let text = "circuit m inputs 3\n1 = INPUT 0\n2 = INPUT 1\n3 = INPUT 2\n4 = MOD 6 1 2 3\noutput 4\n";
        let c = parse_circuit(text).unwrap();
        assert!(serialize_circuit(&c, "m").contains("4 = MOD 6 1 2 3\n"));
    }

    #[test]
    fn rejects_forward_refs_duplicates_and_unknown_kinds() {
        let fwd = "circuit c inputs 1\n1 = INPUT 0\n2 = AND 1 3\n3 = NOT 1\noutput 2\n";
        assert!(matches!(parse_circuit(fwd), Err(Error::Semantic { line: 3, .. })));
        let dup = "circuit c inputs 1\n1 = INPUT 0\n2 = NOT 1\n2 = NOT 1\noutput 2\n";
        assert!(matches!(parse_circuit(dup), Err(Error::Semantic { line: 4, .. })));
        let unk = "circuit c inputs 1\n1 = INPUT 0\n2 = XOR 1 1\noutput 2\n";
        assert_eq!(
            parse_circuit(unk),
            Err(Error::Syntax { line: 3, column: 5, message: "unknown gate kind 'XOR'".into() })
        );
        assert!(parse_circuit("").is_err());
        assert!(parse_circuit("circuit c inputs 1\n1 = INPUT 0\n").is_err());
        assert!(parse_circuit_bytes(b"circuit c inputs 1\n\xff").is_err());
    }

    #[test]
    fn truthtable_files() {
        let t = TruthTable::from_bit_str("1").unwrap();
        assert_eq!(write_truthtable(&t), b"tt n=0\n\x01");
        let t = TruthTable::from_bit_str("0001").unwrap();
        let bytes = write_truthtable(&t);
        assert_eq!(bytes, b"tt n=2\n\x08");
        assert_eq!(read_truthtable(&bytes).unwrap(), t);
        assert!(read_truthtable(b"tt n=2\n\x08\x00").is_err());
        assert!(read_truthtable(b"tt n=2\n\x18").is_err());
        assert!(read_truthtable(b"tt n=x\n").is_err());
    }
}
