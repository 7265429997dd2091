//! Protocol scripts: one step per line,
//! `<op> ctrl=<labels> res=<label>[,<label>] tgt=<label>[,<label>]` with ops
//! from {con, fanout, add, rem, remadd, cnot, swap, teleport}, plus
//! `checkpoint <name>` lines and `#` comments. Parsing is total: it returns
//! positioned diagnostics instead of panicking.

use std::fmt;

use crate::locc::{PrimitiveCall, PrimitiveKind};
use crate::net::Topology;
use crate::registers::Label;

/// 1-based line/column of a token in the source text.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SourcePos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A parse or validation problem, anchored to a source position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    pub pos: SourcePos,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Step {
    Call(PrimitiveCall),
    Checkpoint(String),
}

#[derive(Clone, Debug)]
pub struct ScriptStep {
    pub step: Step,
    pub pos: SourcePos,
}

/// A parsed protocol: ordered primitive invocations and checkpoint markers.
#[derive(Clone, Debug, Default)]
pub struct ProtocolScript {
    pub steps: Vec<ScriptStep>,
}

impl PartialEq for ProtocolScript {
    /// Structural equality; source positions are ignored so that a
    /// pretty-printed script compares equal to its original.
    fn eq(&self, other: &Self) -> bool {
        self.steps.len() == other.steps.len()
            && self
                .steps
                .iter()
                .zip(other.steps.iter())
                .all(|(a, b)| a.step == b.step)
    }
}

fn op_kind(name: &str) -> Option<PrimitiveKind> {
    Some(match name {
        "con" => PrimitiveKind::Con,
        "fanout" => PrimitiveKind::Fanout,
        "add" => PrimitiveKind::Add,
        "rem" => PrimitiveKind::Rem,
        "remadd" => PrimitiveKind::RemAdd,
        "swap" => PrimitiveKind::Swap,
        "teleport" => PrimitiveKind::Teleport,
        "cnot" => PrimitiveKind::LocalCnot,
        _ => return None,
    })
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && c != '=' && c != ',' && c != '#')
}

impl ProtocolScript {
    /// Parse source text, collecting every diagnostic rather than stopping at
    /// the first.
    pub fn parse(text: &str) -> Result<ProtocolScript, Vec<Diagnostic>> {
        let mut steps = Vec::new();
        let mut diagnostics = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let code = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            if code.trim().is_empty() {
                continue;
            }
            // (token, 1-based column) pairs
            let tokens: Vec<(&str, usize)> = code
                .split_whitespace()
                .map(|t| {
                    let col = t.as_ptr() as usize - code.as_ptr() as usize + 1;
                    (t, col)
                })
                .collect();
            let (op_tok, op_col) = tokens[0];
            let pos = SourcePos {
                line: line_no,
                col: op_col,
            };
            if op_tok == "checkpoint" {
                if tokens.len() != 2 {
                    diagnostics.push(Diagnostic {
                        pos,
                        message: "checkpoint takes exactly one name".into(),
                    });
                    continue;
                }
                steps.push(ScriptStep {
                    step: Step::Checkpoint(tokens[1].0.to_string()),
                    pos,
                });
                continue;
            }
            let Some(kind) = op_kind(op_tok) else {
                diagnostics.push(Diagnostic {
                    pos,
                    message: format!("unknown op `{op_tok}`"),
                });
                continue;
            };
            let mut ctrl: Option<(Vec<Label>, usize)> = None;
            let mut res: Option<(Vec<Label>, usize)> = None;
            let mut tgt: Option<(Vec<Label>, usize)> = None;
            let mut line_ok = true;
            for &(tok, col) in &tokens[1..] {
                let field_pos = SourcePos { line: line_no, col };
                let Some((key, value)) = tok.split_once('=') else {
                    diagnostics.push(Diagnostic {
                        pos: field_pos,
                        message: format!("expected key=value, got `{tok}`"),
                    });
                    line_ok = false;
                    continue;
                };
                let mut labels = Vec::new();
                let mut labels_ok = true;
                for part in value.split(',') {
                    if valid_label(part) {
                        labels.push(Label::new(part));
                    } else {
                        diagnostics.push(Diagnostic {
                            pos: field_pos,
                            message: format!("invalid register label `{part}` in `{tok}`"),
                        });
                        labels_ok = false;
                    }
                }
                if !labels_ok {
                    line_ok = false;
                    continue;
                }
                let slot = match key {
                    "ctrl" => &mut ctrl,
                    "res" => &mut res,
                    "tgt" => &mut tgt,
                    other => {
                        diagnostics.push(Diagnostic {
                            pos: field_pos,
                            message: format!("unknown field `{other}` (expected ctrl/res/tgt)"),
                        });
                        line_ok = false;
                        continue;
                    }
                };
                if slot.is_some() {
                    diagnostics.push(Diagnostic {
                        pos: field_pos,
                        message: format!("duplicate field `{key}`"),
                    });
                    line_ok = false;
                } else {
                    *slot = Some((labels, col));
                }
            }
            if !line_ok {
                continue;
            }
            let (want_c, want_r, want_t) = kind.arity();
            let arity_err = |name: &str,
                                 want: usize,
                                 got: &Option<(Vec<Label>, usize)>,
                                 diagnostics: &mut Vec<Diagnostic>| {
                let (got_n, col) = match got {
                    Some((labels, col)) => (labels.len(), *col),
                    None => (0, op_col),
                };
                if got_n != want {
                    diagnostics.push(Diagnostic {
                        pos: SourcePos { line: line_no, col },
                        message: format!(
                            "`{op_tok}` needs {want} {name} register(s), got {got_n}"
                        ),
                    });
                    return true;
                }
                false
            };
            let mut bad = false;
            bad |= arity_err("ctrl", want_c, &ctrl, &mut diagnostics);
            bad |= arity_err("res", want_r, &res, &mut diagnostics);
            bad |= arity_err("tgt", want_t, &tgt, &mut diagnostics);
            if bad {
                continue;
            }
            let take = |v: Option<(Vec<Label>, usize)>| v.map(|(l, _)| l).unwrap_or_default();
            let call = PrimitiveCall::new(kind, take(ctrl), take(res), take(tgt));
            // Same register twice in one call is always a mistake.
            let mut seen: Vec<&Label> = Vec::new();
            let mut dup = None;
            for l in call.labels() {
                if seen.contains(&l) {
                    dup = Some(l.clone());
                    break;
                }
                seen.push(l);
            }
            if let Some(l) = dup {
                diagnostics.push(Diagnostic {
                    pos,
                    message: format!("register `{l}` appears twice in one step"),
                });
                continue;
            }
            steps.push(ScriptStep {
                step: Step::Call(call),
                pos,
            });
        }
        if diagnostics.is_empty() {
            Ok(ProtocolScript { steps })
        } else {
            Err(diagnostics)
        }
    }

    /// Canonical text form; `parse(to_text(s)) == s`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            match &step.step {
                Step::Checkpoint(name) => out.push_str(&format!("checkpoint {name}\n")),
                Step::Call(call) => {
                    let join = |labels: &[Label]| {
                        labels
                            .iter()
                            .map(|l| l.as_str())
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    out.push_str(call.kind.name());
                    if !call.ctrl.is_empty() {
                        out.push_str(&format!(" ctrl={}", join(&call.ctrl)));
                    }
                    if !call.res.is_empty() {
                        out.push_str(&format!(" res={}", join(&call.res)));
                    }
                    if !call.tgt.is_empty() {
                        out.push_str(&format!(" tgt={}", join(&call.tgt)));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Labels referenced by the script but absent from the topology.
    pub fn check_labels(&self, topology: &Topology) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        for step in &self.steps {
            if let Step::Call(call) = &step.step {
                for l in call.labels() {
                    if topology.owner(l).is_none() {
                        diagnostics.push(Diagnostic {
                            pos: step.pos,
                            message: format!("unknown register label `{l}`"),
                        });
                    }
                }
            }
        }
        diagnostics
    }

    /// Total measurement sites, in execution order.
    pub fn measurement_count(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match &s.step {
                Step::Call(c) => c.kind.measurement_count(),
                Step::Checkpoint(_) => 0,
            })
            .sum()
    }

    pub fn checkpoint_names(&self) -> Vec<&str> {
        self.steps
            .iter()
            .filter_map(|s| match &s.step {
                Step::Checkpoint(name) => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }
}

/// Parse and validate against a topology in one call.
pub fn parse_script(text: &str, topology: &Topology) -> Result<ProtocolScript, Vec<Diagnostic>> {
    let script = ProtocolScript::parse(text)?;
    let diagnostics = script.check_labels(topology);
    if diagnostics.is_empty() {
        Ok(script)
    } else {
        Err(diagnostics)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_con_step() {
        let s = ProtocolScript::parse("con ctrl=A res=C tgt=D").unwrap();
        assert_eq!(s.steps.len(), 1);
        let Step::Call(call) = &s.steps[0].step else {
            panic!("expected call");
        };
        assert_eq!(call.kind, PrimitiveKind::Con);
        assert_eq!(call.ctrl, vec![Label::new("A")]);
        assert_eq!(call.res, vec![Label::new("C")]);
        assert_eq!(call.tgt, vec![Label::new("D")]);
    }

    #[test]
    fn parses_add_with_two_controls() {
        let s = ProtocolScript::parse("add ctrl=D,H res=I tgt=J").unwrap();
        let Step::Call(call) = &s.steps[0].step else {
            panic!("expected call");
        };
        assert_eq!(call.kind, PrimitiveKind::Add);
        assert_eq!(call.ctrl, vec![Label::new("D"), Label::new("H")]);
    }

    #[test]
    fn missing_target_is_an_arity_diagnostic() {
        let errs = ProtocolScript::parse("con ctrl=A res=C").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].pos.line, 1);
        assert!(errs[0].message.contains("tgt"));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let text = "con ctrl=A res=C tgt=D\nbogus ctrl=A\ncon ctrl=A res=C,X tgt=D";
        let errs = ProtocolScript::parse(text).unwrap_err();
        assert_eq!(errs[0].pos, SourcePos { line: 2, col: 1 });
        assert!(errs[0].message.contains("unknown op"));
        // line 3: res takes one register for con
        assert_eq!(errs[1].pos.line, 3);
        assert_eq!(errs[1].pos.col, 12);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let s = ProtocolScript::parse("# heading\n\ncon ctrl=A res=C tgt=D # inline\n").unwrap();
        assert_eq!(s.steps.len(), 1);
    }

    #[test]
    fn round_trip_is_identity() {
        let text = "
con ctrl=A res=C tgt=D
checkpoint psi1
add ctrl=D,H res=I tgt=J
fanout ctrl=J res=K,M tgt=L,N
cnot ctrl=N tgt=F
rem res=L tgt=J
remadd res=J tgt=D,H
swap res=B,C tgt=A,D
teleport ctrl=P res=A tgt=B
";
        let script = ProtocolScript::parse(text).unwrap();
        let printed = script.to_text();
        let reparsed = ProtocolScript::parse(&printed).unwrap();
        assert_eq!(script, reparsed);
    }

    #[test]
    fn measurement_count_sums_op_sites() {
        let text = "
con ctrl=A res=C tgt=D
fanout ctrl=J res=K,M tgt=L,N
add ctrl=D,H res=I tgt=J
cnot ctrl=N tgt=F
rem res=L tgt=J
remadd res=J tgt=D,H
";
        let script = ProtocolScript::parse(text).unwrap();
        assert_eq!(script.measurement_count(), 1 + 2 + 1 + 0 + 1 + 1);
    }

    #[test]
    fn duplicate_register_in_step_is_rejected() {
        let errs = ProtocolScript::parse("con ctrl=A res=A tgt=D").unwrap_err();
        assert!(errs[0].message.contains("appears twice"));
    }
}
