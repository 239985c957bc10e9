//! Line-oriented text formats for graphs and presentations, and parsers for
//! manifold expressions and F-group signatures.
//!
//! Graph files:
//!
//! ```text
//! # lens space L(5)
//! white w genus 0
//! black b
//! edge e w b 5
//! ```
//!
//! Presentation files list `gen <name> <role>` lines, then `rel <word>` lines
//! with words such as `a^2 b^-1 c`; `1` is the empty word.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{GraphError, StratifoldGraph};
use crate::presentation::{FSignature, Generator, GroupPresentation, PresentationError, Role, Word};
use crate::spine::{ManifoldExpr, SpineError, Summand};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Spine(#[from] SpineError),
}

impl FormatError {
    fn syntax(line: usize, message: impl Into<String>) -> Self {
        FormatError::Syntax {
            line,
            message: message.into(),
        }
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_int(line: usize, s: &str, what: &str) -> Result<i64, FormatError> {
    s.parse()
        .map_err(|_| FormatError::syntax(line, format!("expected integer {what}, found `{s}`")))
}

/// Parses a graph. Vertices may be declared after the edges that use them.
/// The graph is not validated.
pub fn parse_graph(text: &str) -> Result<StratifoldGraph, FormatError> {
    let mut g = StratifoldGraph::new();
    let mut edges = Vec::new();
    for (line, t) in content_lines(text) {
        let at = |source| FormatError::Graph { line, source };
        match t.as_slice() {
            ["white", id, "genus", genus] => {
                let genus = parse_int(line, genus, "genus")?;
                g.add_white(*id, genus).map_err(at)?;
            }
            ["black", id] => {
                g.add_black(*id).map_err(at)?;
            }
            ["edge", id, white, black, label] => {
                let label = parse_int(line, label, "label")?;
                edges.push((line, *id, *white, *black, label));
            }
            _ => return Err(FormatError::syntax(line, format!("unrecognized line `{}`", t.join(" ")))),
        }
    }
    for (line, id, white, black, label) in edges {
        g.add_edge(id, white, black, label)
            .map_err(|source| FormatError::Graph { line, source })?;
    }
    Ok(g)
}

pub fn serialize_graph(g: &StratifoldGraph) -> String {
    let mut out = String::new();
    for w in g.whites() {
        writeln!(out, "white {} genus {}", w.id, w.genus).unwrap();
    }
    for b in g.blacks() {
        writeln!(out, "black {}", b.id).unwrap();
    }
    for e in g.edges() {
        writeln!(out, "edge {} {} {} {}", e.id, e.white, e.black, e.label).unwrap();
    }
    out
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name != "1" && !name.contains('^') && !name.contains('#')
}

fn parse_word_tokens(line: usize, tokens: &[&str]) -> Result<Word, FormatError> {
    if tokens == ["1"] {
        return Ok(Word::identity());
    }
    let mut syllables = Vec::new();
    for tok in tokens {
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => (n, parse_int(line, e, "exponent")?),
            None => (*tok, 1),
        };
        if !valid_name(name) {
            return Err(FormatError::syntax(line, format!("bad generator `{name}`")));
        }
        syllables.push((name.to_string(), exp));
    }
    Ok(Word::new(syllables))
}

/// Parses a word such as `a^2 b^-1 c`.
pub fn parse_word(text: &str) -> Result<Word, FormatError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(FormatError::syntax(1, "empty word; write `1` for the identity"));
    }
    parse_word_tokens(1, &tokens)
}

pub fn parse_presentation(text: &str) -> Result<GroupPresentation, FormatError> {
    let mut generators = Vec::new();
    let mut relators = Vec::new();
    for (line, t) in content_lines(text) {
        match t.as_slice() {
            ["gen", name, role] => {
                if !relators.is_empty() {
                    return Err(FormatError::syntax(line, "generators must precede relators"));
                }
                if !valid_name(name) {
                    return Err(FormatError::syntax(line, format!("bad generator name `{name}`")));
                }
                let role = Role::from_token(role)
                    .ok_or_else(|| FormatError::syntax(line, format!("unknown role `{role}`")))?;
                generators.push(Generator::new(*name, role));
            }
            ["rel", word @ ..] if !word.is_empty() => relators.push(parse_word_tokens(line, word)?),
            _ => return Err(FormatError::syntax(line, format!("unrecognized line `{}`", t.join(" ")))),
        }
    }
    Ok(GroupPresentation::new(generators, relators)?)
}

pub fn serialize_presentation(p: &GroupPresentation) -> String {
    let mut out = String::new();
    for g in p.generators() {
        writeln!(out, "gen {} {}", g.name, g.role.token()).unwrap();
    }
    for r in p.relators() {
        writeln!(out, "rel {r}").unwrap();
    }
    out
}

/// True when the text looks like a presentation rather than a graph.
pub fn is_presentation_text(text: &str) -> bool {
    content_lines(text)
        .next()
        .is_some_and(|(_, t)| t[0] == "gen" || t[0] == "rel")
}

/// Parses `L(5) # S2xS1 # S2~xS1 # P2xS1 # S3`.
pub fn parse_expr(text: &str) -> Result<ManifoldExpr, FormatError> {
    let mut summands = Vec::new();
    for term in text.split('#') {
        let term = term.trim();
        let s = match term {
            "S2xS1" => Summand::S2xS1,
            "S2~xS1" => Summand::TwistedS2xS1,
            "P2xS1" => Summand::P2xS1,
            "S3" => Summand::S3,
            _ => {
                let q = term
                    .strip_prefix("L(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|q| q.trim().parse::<i64>().ok())
                    .ok_or_else(|| FormatError::syntax(1, format!("unknown summand `{term}`")))?;
                if q < 2 {
                    return Err(SpineError::DomainError(q).into());
                }
                Summand::Lens(q as u64)
            }
        };
        summands.push(s);
    }
    Ok(ManifoldExpr::new(summands)?)
}

/// Parses `F(g;m1,m2,...)` with a Neumann-convention genus `g`.
pub fn parse_signature(text: &str) -> Result<FSignature, FormatError> {
    let bad = || FormatError::syntax(1, format!("expected F(g;m1,...,mp), found `{}`", text.trim()));
    let inner = text
        .trim()
        .strip_prefix("F(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (genus, periods) = inner.split_once(';').unwrap_or((inner, ""));
    let genus: i64 = genus.trim().parse().map_err(|_| bad())?;
    let periods = periods
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<u64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FSignature::from_genus(genus, periods)?)
}
