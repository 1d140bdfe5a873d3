//! Plain-text instance, trajectory and solution files.
//!
//! All formats are line based and whitespace delimited; `#` starts a comment
//! that runs to the end of the line. Floats are written in the shortest form
//! that parses back to the same value.
//!
//! ```text
//! HOLMC 1
//! nodes 3
//! edge F 2 0 1 -1
//! edge L 2 0 2 3
//! edge F 3 0 1 2 -0.5
//! ```

use std::fmt::{self, Write as _};

use holmc_core::motion::{Trajectory, Vec2};
use holmc_core::{EdgeKind, HypergraphBuilder, LiftedHypergraph, NodePartition};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Shortest round-trip decimal form; exponent notation for very large or
/// very small magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{x:?}")
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    /// Column just past the content, for "missing value" errors.
    end: usize,
}

impl<'a> Line<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn get(&self, i: usize, what: &str) -> Result<Token<'a>, ParseError> {
        self.tokens
            .get(i)
            .copied()
            .ok_or_else(|| self.err(self.end, format!("missing {what}")))
    }

    fn expect_len(&self, n: usize) -> Result<(), ParseError> {
        match self.tokens.get(n) {
            Some(t) => Err(self.err(t.column, format!("unexpected token `{}`", t.text))),
            None if self.tokens.len() < n => Err(self.err(self.end, "line is too short")),
            None => Ok(()),
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &content[s..pos],
                        line: i + 1,
                        column: content[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        let end = content.trim_end().chars().count() + 1;
        (!tokens.is_empty()).then_some(Line {
            number: i + 1,
            tokens,
            end,
        })
    })
}

fn token_err(t: Token<'_>, message: impl Into<String>) -> ParseError {
    ParseError {
        line: t.line,
        column: t.column,
        message: message.into(),
    }
}

fn parse_usize(t: Token<'_>) -> Result<usize, ParseError> {
    t.text
        .parse()
        .map_err(|_| token_err(t, format!("expected a non-negative integer, found `{}`", t.text)))
}

fn parse_u64(t: Token<'_>) -> Result<u64, ParseError> {
    t.text
        .parse()
        .map_err(|_| token_err(t, format!("expected a non-negative integer, found `{}`", t.text)))
}

fn parse_f64(t: Token<'_>) -> Result<f64, ParseError> {
    match t.text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(token_err(t, format!("expected a finite number, found `{}`", t.text))),
    }
}

fn keyword(t: Token<'_>, expected: &str) -> Result<(), ParseError> {
    if t.text == expected {
        Ok(())
    } else {
        Err(token_err(t, format!("expected `{expected}`, found `{}`", t.text)))
    }
}

fn eof_err(text: &str, what: &str) -> ParseError {
    ParseError {
        line: text.lines().count().max(1),
        column: 1,
        message: format!("unexpected end of file, expected {what}"),
    }
}

pub fn write_instance(graph: &LiftedHypergraph) -> String {
    let mut edges: Vec<_> = graph.edges().collect();
    edges.sort_by(|a, b| {
        (a.nodes.len(), a.nodes, a.kind != EdgeKind::Connectivity).cmp(&(
            b.nodes.len(),
            b.nodes,
            b.kind != EdgeKind::Connectivity,
        ))
    });
    let mut out = String::new();
    writeln!(out, "HOLMC 1").unwrap();
    writeln!(out, "nodes {}", graph.node_count()).unwrap();
    for e in edges {
        let kind = match e.kind {
            EdgeKind::Connectivity => 'F',
            EdgeKind::Lifted => 'L',
        };
        write!(out, "edge {kind} {}", e.nodes.len()).unwrap();
        for v in e.nodes {
            write!(out, " {v}").unwrap();
        }
        writeln!(out, " {}", format_float(e.cost)).unwrap();
    }
    out
}

/// Parses an instance file. Edge lines may come in any order and list their
/// nodes in any order; repeated node sets of the same kind add up.
pub fn parse_instance(text: &str) -> Result<LiftedHypergraph, ParseError> {
    let mut it = lines(text);
    let header = it.next().ok_or_else(|| eof_err(text, "`HOLMC 1` header"))?;
    keyword(header.get(0, "header")?, "HOLMC")?;
    keyword(header.get(1, "version")?, "1")?;
    header.expect_len(2)?;
    let nodes_line = it.next().ok_or_else(|| eof_err(text, "`nodes <N>`"))?;
    keyword(nodes_line.get(0, "`nodes`")?, "nodes")?;
    let n = parse_usize(nodes_line.get(1, "node count")?)?;
    nodes_line.expect_len(2)?;
    let mut builder = HypergraphBuilder::new(n);
    let mut ids = Vec::new();
    for line in it {
        keyword(line.get(0, "`edge`")?, "edge")?;
        let kind_tok = line.get(1, "edge kind")?;
        let kind = match kind_tok.text {
            "F" => EdgeKind::Connectivity,
            "L" => EdgeKind::Lifted,
            other => return Err(token_err(kind_tok, format!("edge kind must be F or L, found `{other}`"))),
        };
        let k_tok = line.get(2, "edge order")?;
        let k = parse_usize(k_tok)?;
        if k < 2 {
            return Err(token_err(k_tok, "an edge needs at least two nodes"));
        }
        ids.clear();
        for i in 0..k {
            let t = line.get(3 + i, "node id")?;
            let v = parse_usize(t)?;
            if v >= n {
                return Err(token_err(t, format!("node {v} out of range for {n} nodes")));
            }
            ids.push(v);
        }
        let cost_tok = line.get(3 + k, "cost")?;
        let cost = parse_f64(cost_tok)?;
        line.expect_len(4 + k)?;
        builder
            .add_edge(&ids, kind, cost)
            .map_err(|e| token_err(line.tokens[0], e.to_string()))?;
    }
    Ok(builder.build())
}

/// Trajectories of a sequence with `frames` frames.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryFile {
    pub frames: usize,
    pub feature_dim: usize,
    pub trajectories: Vec<Trajectory>,
}

impl TrajectoryFile {
    /// Sequence length inferred from the trajectories.
    pub fn new(trajectories: Vec<Trajectory>) -> Self {
        let frames = trajectories.iter().map(|t| t.end_frame()).max().unwrap_or(0);
        let feature_dim = trajectories.first().map_or(0, |t| t.feature_dim());
        Self {
            frames,
            feature_dim,
            trajectories,
        }
    }
}

pub fn write_trajectories(file: &TrajectoryFile) -> String {
    let mut out = String::new();
    writeln!(out, "TRAJ 1 {} {}", file.frames, file.feature_dim).unwrap();
    for t in &file.trajectories {
        writeln!(out, "traj {} {} {}", t.id, t.start_frame(), t.len()).unwrap();
        for (i, p) in t.positions().iter().enumerate() {
            write!(out, "{} {}", format_float(p.x), format_float(p.y)).unwrap();
            let features = &t.features()[i * t.feature_dim()..(i + 1) * t.feature_dim()];
            for f in features {
                write!(out, " {}", format_float(*f)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_trajectories(text: &str) -> Result<TrajectoryFile, ParseError> {
    let mut it = lines(text);
    let header = it.next().ok_or_else(|| eof_err(text, "`TRAJ 1` header"))?;
    keyword(header.get(0, "header")?, "TRAJ")?;
    keyword(header.get(1, "version")?, "1")?;
    let frames = parse_usize(header.get(2, "frame count")?)?;
    let feature_dim = parse_usize(header.get(3, "feature dimension")?)?;
    header.expect_len(4)?;
    let mut trajectories = Vec::new();
    while let Some(line) = it.next() {
        keyword(line.get(0, "`traj`")?, "traj")?;
        let id = parse_u64(line.get(1, "trajectory id")?)?;
        let start = parse_usize(line.get(2, "start frame")?)?;
        let len_tok = line.get(3, "length")?;
        let len = parse_usize(len_tok)?;
        line.expect_len(4)?;
        if len < 2 {
            return Err(token_err(len_tok, "a trajectory needs at least two positions"));
        }
        if start.checked_add(len).map_or(true, |end| end > frames) {
            return Err(token_err(len_tok, format!("trajectory ends after frame {frames}")));
        }
        let mut positions = Vec::with_capacity(len);
        let mut features = Vec::with_capacity(len * feature_dim);
        for _ in 0..len {
            let row = it
                .next()
                .ok_or_else(|| eof_err(text, "a position line"))?;
            let x = parse_f64(row.get(0, "x coordinate")?)?;
            let y = parse_f64(row.get(1, "y coordinate")?)?;
            for i in 0..feature_dim {
                features.push(parse_f64(row.get(2 + i, "feature value")?)?);
            }
            row.expect_len(2 + feature_dim)?;
            positions.push(Vec2::new(x, y));
        }
        let t = Trajectory::with_features(id, start, positions, feature_dim, features)
            .map_err(|e| token_err(line.tokens[0], e.to_string()))?;
        trajectories.push(t);
    }
    Ok(TrajectoryFile {
        frames,
        feature_dim,
        trajectories,
    })
}

/// A component id per node, optionally with the objective value. Without the
/// objective this is a plain label file.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFile {
    pub objective: Option<f64>,
    pub partition: NodePartition,
}

pub fn write_solution(solution: &SolutionFile) -> String {
    let mut out = String::new();
    if let Some(obj) = solution.objective {
        // an empty sum comes out as -0
        writeln!(out, "objective {}", format_float(obj + 0.0)).unwrap();
    }
    for (v, c) in solution.partition.labels().iter().enumerate() {
        writeln!(out, "{v} {c}").unwrap();
    }
    out
}

/// Node lines may come in any order and use any component ids; every node
/// `0..N` must appear exactly once. Ids are normalized to the smallest
/// member of each component.
pub fn parse_solution(text: &str) -> Result<SolutionFile, ParseError> {
    let mut objective = None;
    let mut entries: Vec<(usize, u64, Token<'_>)> = Vec::new();
    for (i, line) in lines(text).enumerate() {
        let first = line.get(0, "node id")?;
        if first.text == "objective" {
            if i != 0 {
                return Err(token_err(first, "`objective` must be the first line"));
            }
            objective = Some(parse_f64(line.get(1, "objective value")?)?);
            line.expect_len(2)?;
            continue;
        }
        let v = parse_usize(first)?;
        let c = parse_u64(line.get(1, "component id")?)?;
        line.expect_len(2)?;
        entries.push((v, c, first));
    }
    let n = entries.len();
    let mut labels = vec![None; n];
    for &(v, c, tok) in &entries {
        if v >= n {
            return Err(token_err(tok, format!("node {v} out of range for {n} labeled nodes")));
        }
        if labels[v].replace(c).is_some() {
            return Err(token_err(tok, format!("node {v} is labeled twice")));
        }
    }
    let labels: Vec<u64> = labels.into_iter().map(|l| l.expect("all nodes labeled")).collect();
    Ok(SolutionFile {
        objective,
        partition: NodePartition::from_labels(&labels),
    })
}

/// Formats a score line as `name value`.
pub struct Metric<'a>(pub &'a str, pub f64);

impl fmt::Display for Metric<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.0, self.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats() {
        assert_eq!(format_float(-1.0), "-1");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1e-20), "1e-20");
        assert_eq!(format_float(2.5e300), "2.5e300");
        for x in [0.1 + 0.2, -3.0e-7, 123456.789, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_instance("# header\nHOLMC 1 # version\n\nnodes 2\nedge F 2 1 0 -1.5 # cost\n").unwrap();
        assert_eq!(write_instance(&g), "HOLMC 1\nnodes 2\nedge F 2 0 1 -1.5\n");
    }

    #[test]
    fn error_positions() {
        let e = parse_instance("HOLMC 1\nnodes 2\nedge F 2 0 x 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 12));
        let e = parse_instance("HOLMC 1\nnodes 2\nedge F 2 0 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 13));
        let e = parse_instance("HOLMC 2\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 7));
        let e = parse_instance("").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_instance("HOLMC 1\nnodes 2\nedge F 2 0 1 nan\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 14));
    }

    #[test]
    fn solution_round_trip() {
        let s = parse_solution("objective -1\n2 7\n0 3\n1 3\n").unwrap();
        assert_eq!(s.objective, Some(-1.0));
        assert_eq!(s.partition.labels(), &[0, 0, 2]);
        assert_eq!(write_solution(&s), "objective -1\n0 0\n1 0\n2 2\n");
        assert!(parse_solution("0 0\n0 1\n").is_err());
        assert!(parse_solution("0 0\n2 1\n").is_err());
    }

    #[test]
    fn trajectory_bounds() {
        let e = parse_trajectories("TRAJ 1 2 0\ntraj 0 1 2\n0 0\n1 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let ok = parse_trajectories("TRAJ 1 3 1\ntraj 4 1 2\n0 0 0.5\n1 1 0.25\n").unwrap();
        assert_eq!(ok.trajectories[0].feature(2), Some(&[0.25][..]));
        assert_eq!(write_trajectories(&ok), "TRAJ 1 3 1\ntraj 4 1 2\n0 0 0.5\n1 1 0.25\n");
    }
}
