//! Line-oriented text formats.
//!
//! Every format accepts `#` comment lines and arbitrary whitespace between
//! fields. Writers emit input their parser accepts; reals are written in the
//! shortest form that parses back to the same value.
//!
//! | format          | line                                   |
//! |-----------------|----------------------------------------|
//! | points          | `x0 x1 ...`                            |
//! | distance matrix | row `i`: `d(i,0) ... d(i,i-1)`         |
//! | complex         | `v0 v1 ...` (one maximal simplex)      |
//! | tower           | `i <grade> v0 ...` / `c <grade> u v`   |
//! | filtration      | `<grade> v0 ...`                       |
//! | diagram         | `<dim> <birth> <death or inf>`         |
//! | collapse trace  | `r <dominated> <dominating>` / `c <col> <col>` |

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::collapse::{CollapseEvent, CollapseTrace, RetractionMap};
use crate::complex::{ComplexError, ComplexMatrix, Simplex, VertexId};
use crate::filtration::Filtration;
use crate::persistence::{PersistenceDiagram, PersistencePair};
use crate::pipeline::SnapshotStats;
use crate::rips::{DistanceMatrix, RipsError};
use crate::tower::{ElementaryOp, OpKind, Tower};

pub const TOWER_HEADER: &str = "# tower 1";
pub const STATS_HEADER: &str = "grade,v_before,m_before,d_before,v_after,m_after,d_after";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    /// Positions are 1-based.
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Rips(#[from] RipsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Points,
    DistMat,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedInput {
    Points(Vec<Vec<f64>>),
    DistMat(DistanceMatrix),
    Complex(ComplexMatrix),
}

pub fn parse(kind: InputKind, text: &str) -> Result<ParsedInput, FormatError> {
    Ok(match kind {
        InputKind::Points => ParsedInput::Points(parse_points(text)?),
        InputKind::DistMat => ParsedInput::DistMat(parse_distance_matrix(text)?),
        InputKind::Complex => ParsedInput::Complex(parse_complex(text)?),
    })
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Token<'a> {
    fn error(&self, message: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T, FormatError> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected {what}, found `{}`", self.text)))
    }

    fn real(&self) -> Result<f64, FormatError> {
        let x: f64 = self.parse("a real number")?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(self.error(format!("non-finite value `{}`", self.text)))
        }
    }

    fn vertex(&self) -> Result<VertexId, FormatError> {
        self.parse("a non-negative integer vertex id")
    }
}

#[derive(Debug)]
struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn error(&self, message: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            line: self.number,
            column: 1,
            message: message.into(),
        }
    }
}

/// Non-comment lines, blank ones included, trailing blanks dropped.
fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out: Vec<Line<'_>> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let mut tokens = Vec::new();
            let mut start = None;
            for (pos, ch) in l.char_indices().chain(std::iter::once((l.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        tokens.push(Token {
                            text: &l[s..pos],
                            line: i + 1,
                            column: l[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            Line { number: i + 1, tokens }
        })
        .collect();
    while out.last().is_some_and(|l| l.tokens.is_empty()) {
        out.pop();
    }
    out
}

fn fmt_real(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, FormatError> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for line in lines(text).into_iter().filter(|l| !l.tokens.is_empty()) {
        let p = line.tokens.iter().map(Token::real).collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = points.first() {
            if first.len() != p.len() {
                return Err(line.error(format!("point has {} coordinates, expected {}", p.len(), first.len())));
            }
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(RipsError::NoPoints.into());
    }
    Ok(points)
}

pub fn write_points(points: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        let fields: Vec<String> = p.iter().map(|&x| fmt_real(x)).collect();
        let _ = writeln!(out, "{}", fields.join(" "));
    }
    out
}

/// Lower-triangular distances: line `i` holds `d(i,0) .. d(i,i-1)`, so the
/// first row is empty and may be omitted. An optional leading line with a
/// single integer is a size header and must match the row count. A full square matrix is
/// accepted too and must be symmetric.
pub fn parse_distance_matrix(text: &str) -> Result<DistanceMatrix, FormatError> {
    let all = lines(text);
    let header = all
        .first()
        .filter(|l| l.tokens.len() == 1)
        .and_then(|l| l.tokens[0].text.parse::<usize>().ok());
    let has_header = header.is_some();

    let triangular = |body: &[Line<'_>]| -> Option<bool> {
        if !body.is_empty() && body.iter().enumerate().all(|(i, l)| l.tokens.len() == i) {
            Some(false)
        } else if body.iter().enumerate().all(|(i, l)| l.tokens.len() == i + 1) {
            Some(true)
        } else {
            None
        }
    };
    let square = |body: &[Line<'_>]| body.len() > 1 && body.iter().all(|l| l.tokens.len() == body.len());

    let mut attempts: Vec<(&[Line<'_>], Option<usize>)> = Vec::new();
    if has_header {
        attempts.push((&all[1..], header));
    }
    attempts.push((&all[..], None));

    for (body, size) in attempts {
        let rows_expected = |n: usize| size.map_or(!body.is_empty(), |s| s == n);
        if let Some(implicit_first) = triangular(body).filter(|&imp| rows_expected(body.len() + imp as usize)) {
            let mut rows: Vec<Vec<f64>> = Vec::with_capacity(body.len() + 1);
            if implicit_first {
                rows.push(Vec::new());
            }
            for l in body {
                rows.push(distances_of(l)?);
            }
            return Ok(DistanceMatrix::from_lower_triangular(&rows)?);
        }
        if square(body) && rows_expected(body.len()) {
            let n = body.len();
            let mut data = Vec::with_capacity(n * n);
            for l in body {
                data.extend(distances_of(l)?);
            }
            return Ok(DistanceMatrix::from_full(n, data)?);
        }
    }

    let body = if has_header { &all[1..] } else { &all[..] };
    let offset = match body.first() {
        Some(l) if l.tokens.len() == 1 => 1,
        _ => 0,
    };
    match body.iter().enumerate().find(|(i, l)| l.tokens.len() != i + offset) {
        Some((i, l)) => Err(l.error(format!(
            "row has {} entries, expected {} for a lower-triangular matrix",
            l.tokens.len(),
            i + offset
        ))),
        None => Err(RipsError::NoPoints.into()),
    }
}

fn distances_of(l: &Line<'_>) -> Result<Vec<f64>, FormatError> {
    l.tokens
        .iter()
        .map(|t| {
            let x = t.real()?;
            if x < 0.0 {
                Err(t.error(format!("negative distance {x}")))
            } else {
                Ok(x)
            }
        })
        .collect()
}

/// Lower triangle with a size header.
pub fn write_distance_matrix(d: &DistanceMatrix) -> String {
    let mut out = format!("{}\n", d.len());
    for row in d.lower_triangular_rows() {
        let fields: Vec<String> = row.iter().map(|&x| fmt_real(x)).collect();
        let _ = writeln!(out, "{}", fields.join(" "));
    }
    out
}

fn simplex_of(tokens: &[Token<'_>]) -> Result<Simplex, FormatError> {
    let vertices = tokens.iter().map(Token::vertex).collect::<Result<Vec<_>, _>>()?;
    Simplex::new(vertices).map_err(|e| tokens[0].error(e.to_string()))
}

pub fn parse_complex(text: &str) -> Result<ComplexMatrix, FormatError> {
    let simplices = lines(text)
        .into_iter()
        .filter(|l| !l.tokens.is_empty())
        .map(|l| simplex_of(&l.tokens))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ComplexMatrix::from_simplex_list(&simplices)?)
}

/// One maximal simplex per line, in column order.
pub fn write_complex(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for s in m.maximal_simplices() {
        let _ = writeln!(out, "{s}");
    }
    out
}

pub fn write_tower(t: &Tower) -> String {
    let mut out = format!("{TOWER_HEADER}\n");
    for op in t.ops() {
        let _ = match &op.kind {
            OpKind::Include(s) => writeln!(out, "i {} {s}", fmt_real(op.grade)),
            OpKind::Contract { from, to } => writeln!(out, "c {} {from} {to}", fmt_real(op.grade)),
        };
    }
    out
}

pub fn parse_tower(text: &str) -> Result<Tower, FormatError> {
    match text.lines().find(|l| !l.trim().is_empty()) {
        Some(first) if first.split_whitespace().eq(TOWER_HEADER.split_whitespace()) => {}
        _ => {
            return Err(FormatError::Syntax {
                line: 1,
                column: 1,
                message: format!("missing `{TOWER_HEADER}` header"),
            })
        }
    }
    let mut ops = Vec::new();
    for l in lines(text).into_iter().filter(|l| !l.tokens.is_empty()) {
        let t = &l.tokens;
        if t.len() < 3 {
            return Err(l.error("expected an op kind, a grade and vertices"));
        }
        let grade = t[1].real()?;
        match t[0].text {
            "i" => ops.push(ElementaryOp::include(simplex_of(&t[2..])?, grade)),
            "c" if t.len() == 4 => ops.push(ElementaryOp::contract(t[2].vertex()?, t[3].vertex()?, grade)),
            "c" => return Err(l.error("contraction takes exactly two vertices")),
            other => return Err(t[0].error(format!("unknown op `{other}`"))),
        }
    }
    Ok(Tower::new(ops))
}

pub fn write_filtration(f: &Filtration) -> String {
    let mut out = String::new();
    for (s, g) in f.cells() {
        let _ = writeln!(out, "{} {s}", fmt_real(*g));
    }
    out
}

pub fn parse_filtration(text: &str) -> Result<Filtration, FormatError> {
    let mut f = Filtration::new();
    for l in lines(text).into_iter().filter(|l| !l.tokens.is_empty()) {
        if l.tokens.len() < 2 {
            return Err(l.error("expected a grade and at least one vertex"));
        }
        f.push(simplex_of(&l.tokens[1..])?, l.tokens[0].real()?);
    }
    Ok(f)
}

/// `<dim> <birth> <death>` sorted by (dim, birth, death), `inf` for
/// essential classes.
pub fn write_diagram(d: &PersistenceDiagram) -> String {
    let mut out = String::new();
    for p in d.pairs() {
        let _ = writeln!(out, "{} {} {}", p.dim, fmt_real(p.birth), fmt_real(p.death));
    }
    out
}

pub fn parse_diagram(text: &str) -> Result<PersistenceDiagram, FormatError> {
    let mut pairs = Vec::new();
    for l in lines(text).into_iter().filter(|l| !l.tokens.is_empty()) {
        let [dim, birth, death] = l.tokens[..] else {
            return Err(l.error("expected `<dim> <birth> <death>`"));
        };
        let birth_v = birth.real()?;
        let death_v = if death.text == "inf" {
            f64::INFINITY
        } else {
            death.real()?
        };
        if death_v < birth_v {
            return Err(death.error("death precedes birth"));
        }
        pairs.push(PersistencePair {
            dim: dim.parse("a dimension")?,
            birth: birth_v,
            death: death_v,
        });
    }
    Ok(PersistenceDiagram::new(pairs))
}

pub fn write_trace(trace: &CollapseTrace) -> String {
    let mut out = String::new();
    for e in &trace.events {
        let _ = match *e {
            CollapseEvent::Row { dominated, dominating } => writeln!(out, "r {dominated} {dominating}"),
            CollapseEvent::Column { dominated, dominating } => writeln!(out, "c {dominated} {dominating}"),
        };
    }
    out
}

pub fn parse_trace(text: &str) -> Result<CollapseTrace, FormatError> {
    let mut trace = CollapseTrace::default();
    for l in lines(text).into_iter().filter(|l| !l.tokens.is_empty()) {
        let [kind, a, b] = l.tokens[..] else {
            return Err(l.error("expected `r|c <id> <id>`"));
        };
        trace.events.push(match kind.text {
            "r" => CollapseEvent::Row {
                dominated: a.vertex()?,
                dominating: b.vertex()?,
            },
            "c" => CollapseEvent::Column {
                dominated: a.parse("a column id")?,
                dominating: b.parse("a column id")?,
            },
            other => return Err(kind.error(format!("unknown event `{other}`"))),
        });
    }
    Ok(trace)
}

/// `<vertex> <image>` for every vertex, in increasing vertex order.
pub fn write_retraction(r: &RetractionMap) -> String {
    let mut out = String::new();
    for (s, t) in r.iter() {
        let _ = writeln!(out, "{s} {t}");
    }
    out
}

/// Grades as whitespace-separated reals.
pub fn parse_grades(text: &str) -> Result<Vec<f64>, FormatError> {
    lines(text)
        .iter()
        .flat_map(|l| l.tokens.iter())
        .map(Token::real)
        .collect()
}

pub fn write_stats_csv(stats: &[SnapshotStats]) -> String {
    let mut out = format!("{STATS_HEADER}\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_real(s.grade),
            s.before.v,
            s.before.m,
            s.before.d,
            s.after.v,
            s.after.m,
            s.after.d
        );
    }
    out
}
