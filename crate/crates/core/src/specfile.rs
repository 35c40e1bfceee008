//! Line-oriented system description format.
//!
//! ```text
//! # middle-thirds Cantor set
//! system cantor
//! space v 0 1
//! edge a v v similarity 1/3 0 1
//! edge b v v similarity 1/3 2/3 1
//! incidence full
//! ```
//!
//! Directives: `system <name>`, `space <vertex> <lo> <hi>`,
//! `edge <id> <from> <to> similarity <ratio> <offset> <sign>`,
//! `family cf [truncate <N>]`, `incidence full | banded <w> | upper | explicit`
//! and `allow <a> <b>` (explicit incidence only). Numbers may be written as
//! decimals or as `p/q`. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{GdmsError, Result};
use crate::graph::{parse_label, EdgeRecord, IncidenceMatrix, IncidenceSpec, MultiGraph};
use crate::maps::{ContractionFamily, Similarity, VertexSpace};
use crate::system::{Alphabet, GdmsSystem};

/// A parsed system plus non-fatal findings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSpec {
    pub system: GdmsSystem,
    pub warnings: Vec<String>,
}

fn syntax(line: usize, message: impl Into<String>) -> GdmsError {
    GdmsError::Syntax {
        line,
        message: message.into(),
    }
}

fn invalid(line: usize, message: impl Into<String>) -> GdmsError {
    GdmsError::validation(Some(line), message)
}

/// Decimal or `p/q` rational.
pub fn parse_number(token: &str) -> Option<f64> {
    let value = match token.split_once('/') {
        Some((p, q)) => {
            let (p, q): (f64, f64) = (p.parse().ok()?, q.parse().ok()?);
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => token.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

struct EdgeLine {
    line: usize,
    id: String,
    from: String,
    to: String,
    ratio: f64,
    offset: f64,
    sign: i8,
}

enum IncidenceLine {
    Rule(IncidenceSpec),
    Explicit,
}

#[derive(Default)]
struct Draft {
    name: Option<(usize, String)>,
    spaces: Vec<(usize, String, f64, f64)>,
    edges: Vec<EdgeLine>,
    family_cf: Option<(usize, Option<u64>)>,
    incidence: Option<(usize, IncidenceLine)>,
    allows: Vec<(usize, String, String)>,
}

fn expect_len(line: usize, tokens: &[&str], n: usize, usage: &str) -> Result<()> {
    if tokens.len() != n {
        return Err(syntax(line, format!("expected `{usage}`")));
    }
    Ok(())
}

fn number(line: usize, token: &str, what: &str) -> Result<f64> {
    parse_number(token).ok_or_else(|| syntax(line, format!("{what} `{token}` is not a number")))
}

fn positive_integer(line: usize, token: &str, what: &str) -> Result<u64> {
    match token.parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(syntax(line, format!("{what} `{token}` is not a positive integer"))),
    }
}

fn read_lines(text: &str) -> Result<Draft> {
    let mut d = Draft::default();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&keyword) = tokens.first() else { continue };
        match keyword {
            "system" => {
                expect_len(line, &tokens, 2, "system <name>")?;
                if d.name.is_some() {
                    return Err(syntax(line, "duplicate `system` line"));
                }
                d.name = Some((line, tokens[1].to_string()));
            }
            "space" => {
                expect_len(line, &tokens, 4, "space <vertex> <lo> <hi>")?;
                let lo = number(line, tokens[2], "lower end")?;
                let hi = number(line, tokens[3], "upper end")?;
                d.spaces.push((line, tokens[1].to_string(), lo, hi));
            }
            "edge" => {
                expect_len(
                    line,
                    &tokens,
                    8,
                    "edge <id> <from> <to> similarity <ratio> <offset> <sign>",
                )?;
                if tokens[4] != "similarity" {
                    return Err(syntax(line, format!("unknown map kind `{}`", tokens[4])));
                }
                let sign = match tokens[7] {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    other => return Err(syntax(line, format!("orientation `{other}` is not +1 or -1"))),
                };
                d.edges.push(EdgeLine {
                    line,
                    id: tokens[1].to_string(),
                    from: tokens[2].to_string(),
                    to: tokens[3].to_string(),
                    ratio: number(line, tokens[5], "ratio")?,
                    offset: number(line, tokens[6], "offset")?,
                    sign,
                });
            }
            "family" => {
                if d.family_cf.is_some() {
                    return Err(syntax(line, "duplicate `family` line"));
                }
                let truncate = match tokens.as_slice() {
                    [_, "cf"] => None,
                    [_, "cf", "truncate", n] => Some(positive_integer(line, n, "truncation size")?),
                    [_, other, ..] if *other != "cf" => return Err(syntax(line, format!("unknown family `{other}`"))),
                    _ => return Err(syntax(line, "expected `family cf [truncate <N>]`")),
                };
                d.family_cf = Some((line, truncate));
            }
            "incidence" => {
                if d.incidence.is_some() {
                    return Err(syntax(line, "duplicate `incidence` line"));
                }
                let inc = match tokens.as_slice() {
                    [_, "full"] => IncidenceLine::Rule(IncidenceSpec::Full),
                    [_, "upper"] => IncidenceLine::Rule(IncidenceSpec::UpperTriangular),
                    [_, "banded", w] => {
                        IncidenceLine::Rule(IncidenceSpec::Banded(positive_integer(line, w, "band width")?))
                    }
                    [_, "explicit"] => IncidenceLine::Explicit,
                    _ => {
                        return Err(syntax(
                            line,
                            "expected `incidence full | banded <w> | upper | explicit`",
                        ))
                    }
                };
                d.incidence = Some((line, inc));
            }
            "allow" => {
                expect_len(line, &tokens, 3, "allow <a> <b>")?;
                d.allows.push((line, tokens[1].to_string(), tokens[2].to_string()));
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    Ok(d)
}

/// Parses and validates a system description.
pub fn parse_spec(text: &str) -> Result<ParsedSpec> {
    let d = read_lines(text)?;
    let (_, name) = d
        .name
        .clone()
        .ok_or_else(|| GdmsError::validation(None, "missing `system` line"))?;
    let (inc_line, inc) = d
        .incidence
        .as_ref()
        .ok_or_else(|| GdmsError::validation(None, "missing `incidence` line"))?;
    let inc_line = *inc_line;
    if !matches!(inc, IncidenceLine::Explicit) {
        if let Some((line, ..)) = d.allows.first() {
            return Err(invalid(*line, "`allow` lines need `incidence explicit`"));
        }
    }

    // vertices, in declaration order
    let mut vertex_index: HashMap<String, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut spaces = Vec::new();
    for (line, v, lo, hi) in &d.spaces {
        if vertex_index.insert(v.clone(), vertices.len()).is_some() {
            return Err(invalid(*line, format!("vertex `{v}` declared twice")));
        }
        vertices.push(v.clone());
        spaces.push(VertexSpace::new(*lo, *hi).map_err(|e| relabel(e, *line))?);
    }

    let system = if let Some((fam_line, truncate)) = d.family_cf {
        if let Some(e) = d.edges.first() {
            return Err(invalid(
                e.line.max(fam_line),
                "`family cf` and `edge` lines are mutually exclusive",
            ));
        }
        if d.spaces.len() > 1 {
            return Err(invalid(
                d.spaces[1].0,
                "the continued-fraction family lives on a single vertex",
            ));
        }
        if let Some((line, _, lo, hi)) = d.spaces.first() {
            if (*lo, *hi) != (0.0, 1.0) {
                return Err(invalid(*line, "the continued-fraction family needs the space [0, 1]"));
            }
        }
        let vertex = vertices.first().cloned().unwrap_or_else(|| "v".to_string());
        let incidence = match inc {
            IncidenceLine::Rule(rule) => rule.clone(),
            IncidenceLine::Explicit => {
                let Some(n) = truncate else {
                    return Err(invalid(inc_line, "explicit incidence needs `family cf truncate <N>`"));
                };
                let ids: Vec<String> = (1..=n).map(|e| e.to_string()).collect();
                IncidenceSpec::Explicit(explicit_matrix(&ids, &d.allows, None)?)
            }
        };
        GdmsSystem::continued_fraction(name, vertex, truncate, incidence).map_err(|e| relabel(e, inc_line))?
    } else {
        if vertices.is_empty() {
            return Err(GdmsError::validation(None, "no `space` lines"));
        }
        let mut records = Vec::new();
        let mut maps = Vec::new();
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for e in &d.edges {
            if seen.insert(&e.id, e.line).is_some() {
                return Err(invalid(e.line, format!("edge `{}` declared twice", e.id)));
            }
            let lookup = |v: &str| {
                vertex_index
                    .get(v)
                    .copied()
                    .ok_or_else(|| invalid(e.line, format!("unknown vertex `{v}`")))
            };
            let (from, to) = (lookup(&e.from)?, lookup(&e.to)?);
            let map = Similarity::new(e.ratio, e.offset, e.sign).map_err(|err| relabel(err, e.line))?;
            let (a, b) = map.image(&spaces[to]);
            let target = spaces[from];
            if a < target.lo - 1e-12 || b > target.hi + 1e-12 {
                return Err(invalid(
                    e.line,
                    format!(
                        "edge `{}` maps X_{} onto [{a}, {b}], outside X_{} = [{}, {}]",
                        e.id, e.to, e.from, target.lo, target.hi
                    ),
                ));
            }
            records.push(EdgeRecord {
                id: e.id.clone(),
                initial: from,
                terminal: to,
            });
            maps.push(map);
        }
        if records.is_empty() {
            return Err(GdmsError::validation(None, "no `edge` lines"));
        }
        let incidence = match inc {
            IncidenceLine::Rule(rule) => {
                if rule.needs_labels() {
                    if let Some(e) = d.edges.iter().find(|e| parse_label(&e.id).is_none()) {
                        return Err(invalid(
                            e.line,
                            format!(
                                "incidence `{}` needs positive integer edge ids, found `{}`",
                                rule.keyword(),
                                e.id
                            ),
                        ));
                    }
                }
                rule.clone()
            }
            IncidenceLine::Explicit => {
                let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
                IncidenceSpec::Explicit(explicit_matrix(&ids, &d.allows, Some(&records))?)
            }
        };
        let graph = MultiGraph::new(vertices, records)?;
        GdmsSystem::similarity(name, graph, spaces, maps, incidence).map_err(|e| relabel(e, inc_line))?
    };

    let mut warnings = Vec::new();
    if system.alphabet() == Alphabet::Finite {
        let edges = system.graph().edges();
        for (a, b) in system.level_one_overlaps() {
            warnings.push(format!(
                "images of edges `{}` and `{}` overlap at level 1; the open set condition may fail",
                edges[a].id, edges[b].id
            ));
        }
        let surviving = system.surviving_edges()?;
        let dead: Vec<&str> = (0..edges.len())
            .filter(|e| surviving.binary_search(e).is_err())
            .map(|e| edges[e].id.as_str())
            .collect();
        if !dead.is_empty() {
            warnings.push(format!(
                "edges without infinite continuations, left out of pressure, dimension and sampling: {}",
                dead.join(" ")
            ));
        }
    }
    Ok(ParsedSpec { system, warnings })
}

/// Attaches a line number to a validation error raised without one.
fn relabel(err: GdmsError, line: usize) -> GdmsError {
    match err {
        GdmsError::Validation { line: None, message } => GdmsError::Validation {
            line: Some(line),
            message,
        },
        other => other,
    }
}

fn explicit_matrix(
    ids: &[String],
    allows: &[(usize, String, String)],
    records: Option<&[EdgeRecord]>,
) -> Result<IncidenceMatrix> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut m = IncidenceMatrix::zeros(ids.len());
    for (line, a, b) in allows {
        let find = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| invalid(*line, format!("unknown edge `{id}`")))
        };
        let (ia, ib) = (find(a)?, find(b)?);
        if let Some(records) = records {
            if records[ia].terminal != records[ib].initial {
                return Err(invalid(
                    *line,
                    format!("`{a}` cannot be followed by `{b}`: the terminal vertex of `{a}` is not the initial vertex of `{b}`"),
                ));
            }
        }
        m.set(ia, ib, true);
    }
    Ok(m)
}

/// Canonical text form; parsing it gives back an equal system.
///
/// Continued-fraction systems are written as `family cf truncate N` with `N`
/// the largest label, so they round-trip when their labels are `1..=N`.
pub fn serialize(system: &GdmsSystem) -> String {
    let mut out = String::new();
    let graph = system.graph();
    writeln!(out, "system {}", system.name()).unwrap();
    for (v, space) in graph.vertices().iter().zip(system.spaces()) {
        writeln!(out, "space {v} {} {}", space.lo, space.hi).unwrap();
    }
    match system.family() {
        ContractionFamily::Similarity(maps) => {
            for (e, m) in graph.edges().iter().zip(maps) {
                writeln!(
                    out,
                    "edge {} {} {} similarity {} {} {}",
                    e.id,
                    graph.vertices()[e.initial],
                    graph.vertices()[e.terminal],
                    m.ratio,
                    m.offset,
                    m.sign
                )
                .unwrap();
            }
        }
        ContractionFamily::ContinuedFraction => match system.alphabet() {
            Alphabet::Infinite => writeln!(out, "family cf").unwrap(),
            Alphabet::Finite => {
                let n = graph.edges().iter().filter_map(EdgeRecord::label).max().unwrap_or(0);
                writeln!(out, "family cf truncate {n}").unwrap()
            }
        },
    }
    writeln!(out, "incidence {}", system.incidence()).unwrap();
    if let IncidenceSpec::Explicit(m) = system.incidence() {
        for (a, b) in m.pairs() {
            writeln!(out, "allow {} {}", graph.edges()[a].id, graph.edges()[b].id).unwrap();
        }
    }
    out
}
