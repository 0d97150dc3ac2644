use thiserror::Error;

use super::{Move, Program, QueryStates, Rule, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undeclared state `{name}`")]
    UndeclaredState {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}: duplicate rule for `{state} {read}`")]
    DuplicateRule {
        line: usize,
        state: String,
        read: String,
    },
    #[error("rule table is not total; missing: {}", .missing.iter().map(|(s, r)| format!("{s} {r}")).collect::<Vec<_>>().join(", "))]
    Totality { missing: Vec<(String, String)> },
    #[error("invalid program: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn bits(tok: &str, width: usize) -> Option<u8> {
    if tok.len() != width {
        return None;
    }
    tok.chars().try_fold(0u8, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

struct RawRule<'a> {
    line: usize,
    toks: Vec<(usize, &'a str)>,
}

/// Parses and validates.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let p = parse_unvalidated(text)?;
    let mut violations = p.violations();
    if let Some(pos) = violations
        .iter()
        .position(|v| matches!(v, Violation::MissingRules(_)))
    {
        if violations.len() == 1 {
            let Violation::MissingRules(missing) = violations.remove(pos) else {
                unreachable!()
            };
            return Err(ParseError::Totality { missing });
        }
    }
    if violations.is_empty() {
        Ok(p)
    } else {
        Err(ParseError::Invalid(violations))
    }
}

/// Parses syntax and state references only; invariants are left to [`super::validate`].
pub fn parse_unvalidated(text: &str) -> Result<Program, ParseError> {
    let syntax = |line, column, message: &str| ParseError::Syntax {
        line,
        column,
        message: message.to_string(),
    };
    let mut tracks = None;
    let mut roles: [Option<(usize, String)>; 6] = Default::default();
    let mut extra: Vec<(usize, usize, String)> = Vec::new();
    let mut raw_rules = Vec::new();

    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if let Some((key, value)) = content.split_once(':') {
            let key = key.trim();
            let vcol = key.len() + 2 + value.len() - value.trim_start().len();
            let value = value.trim();
            let slot = match key {
                "tracks" => {
                    tracks = Some(match value {
                        "3" => 3,
                        "4" => 4,
                        _ => return Err(syntax(line, vcol, "tracks must be 3 or 4")),
                    });
                    continue;
                }
                "states" => {
                    for (col, name) in tokens(value) {
                        extra.push((line, vcol + col - 1, name.to_string()));
                    }
                    continue;
                }
                "start" => 0,
                "limit" => 1,
                "halt" => 2,
                "query" => 3,
                "yes" => 4,
                "no" => 5,
                _ => return Err(syntax(line, 1, &format!("unknown header `{key}`"))),
            };
            if value.is_empty() || value.contains(char::is_whitespace) {
                return Err(syntax(line, vcol, "expected a single state name"));
            }
            if roles[slot].is_some() {
                return Err(syntax(line, 1, &format!("repeated header `{key}`")));
            }
            roles[slot] = Some((line, value.to_string()));
        } else {
            raw_rules.push(RawRule {
                line,
                toks: tokens(content),
            });
        }
    }

    let tracks = tracks.ok_or_else(|| syntax(1, 1, "missing `tracks:` header"))?;
    for (slot, key) in ["start", "limit", "halt"].iter().enumerate() {
        if roles[slot].is_none() {
            return Err(syntax(1, 1, &format!("missing `{key}:` header")));
        }
    }

    let mut states: Vec<String> = Vec::new();
    let intern = |name: &str, states: &mut Vec<String>| -> usize {
        if let Some(i) = states.iter().position(|s| s == name) {
            i
        } else {
            states.push(name.to_string());
            states.len() - 1
        }
    };
    let ids: Vec<Option<usize>> = roles
        .iter()
        .map(|r| r.as_ref().map(|(_, n)| intern(n, &mut states)))
        .collect();
    for (_, _, name) in &extra {
        intern(name, &mut states);
    }

    let query_roles = [ids[3], ids[4], ids[5]];
    let (query, partial_query) = match query_roles {
        [Some(query), Some(yes), Some(no)] => (Some(QueryStates { query, yes, no }), false),
        [None, None, None] => (None, false),
        _ => (None, true),
    };

    let mut program = Program {
        tracks,
        start: ids[0].unwrap(),
        limit: ids[1].unwrap(),
        halt: ids[2].unwrap(),
        query,
        partial_query,
        rules: vec![None; states.len() << tracks],
        states,
    };

    for RawRule { line, toks } in raw_rules {
        let [(c0, from), (c1, read), (c2, arrow), (c3, to), (c4, write), (c5, mv)] = toks[..] else {
            let col = toks.get(6).map_or(toks.last().map_or(1, |t| t.0), |t| t.0);
            return Err(syntax(line, col, "expected `<state> <read> -> <state> <write> <L|R|S>`"));
        };
        if arrow != "->" {
            return Err(syntax(line, c2, "expected `->`"));
        }
        let lookup = |name: &str, col| {
            program.state_id(name).ok_or_else(|| ParseError::UndeclaredState {
                line,
                column: col,
                name: name.to_string(),
            })
        };
        let from_id = lookup(from, c0)?;
        let to_id = lookup(to, c3)?;
        let read_v = bits(read, tracks)
            .ok_or_else(|| syntax(line, c1, &format!("read vector must be {tracks} bits")))?;
        let write_v = bits(write, tracks)
            .ok_or_else(|| syntax(line, c4, &format!("write vector must be {tracks} bits")))?;
        let mv = match mv {
            "L" => Move::L,
            "R" => Move::R,
            "S" => Move::S,
            _ => return Err(syntax(line, c5, "move must be L, R or S")),
        };
        if program.rule(from_id, read_v).is_some() {
            return Err(ParseError::DuplicateRule {
                line,
                state: from.to_string(),
                read: read.to_string(),
            });
        }
        program.set_rule(
            from_id,
            read_v,
            Rule {
                write: write_v,
                mv,
                next: to_id,
            },
        );
    }
    Ok(program)
}
