//! File formats: strict-order preference profiles (`.soc`, 2022 header
//! style plus the older CSV variant), matrix CSV, layout CSV/SVG, and a
//! parenthesized text format for group-separable trees.

use crate::election::{Election, Ranking};
use crate::embedding::EmbeddingLayout;
use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::structures::{GsTree, TreeNode};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// A parsed preference profile: the election plus whatever names and header
/// metadata the file carried.
#[derive(Clone, Debug)]
pub struct PrefLibProfile {
    pub election: Election,
    /// Candidate display names, indexed by 0-based candidate id.
    pub candidate_names: Vec<String>,
    /// Free-form header metadata (`# KEY: VALUE` lines).
    pub metadata: BTreeMap<String, String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses one `count: c1,c2,...` or `count,c1,c2,...` data row with 1-based
/// candidate ids.
fn parse_vote_row(lineno: usize, count_str: &str, rest: &str, m: usize) -> Result<(Ranking, u64)> {
    let count: u64 = count_str
        .trim()
        .parse()
        .map_err(|_| parse_err(lineno, format!("bad vote count {count_str:?}")))?;
    if count == 0 {
        return Err(parse_err(lineno, "vote count must be positive"));
    }
    if rest.contains('{') || rest.contains('}') {
        return Err(Error::UnsupportedFormat(format!(
            "line {lineno}: tied preference groups are not supported; only complete strict orders"
        )));
    }
    let mut order = Vec::with_capacity(m);
    for tok in rest.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(parse_err(lineno, "empty candidate entry"));
        }
        let c: usize = tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad candidate id {tok:?}")))?;
        if c == 0 || c > m {
            return Err(parse_err(
                lineno,
                format!("candidate id {c} outside 1..={m}"),
            ));
        }
        order.push(c - 1);
    }
    if order.len() != m {
        return Err(parse_err(
            lineno,
            format!("vote lists {} of {m} candidates", order.len()),
        ));
    }
    let ranking = Ranking::new(order)
        .map_err(|e| parse_err(lineno, format!("invalid vote: {e}")))?;
    Ok((ranking, count))
}

/// Reads a strict-order profile. Header-style files start with `#` comment
/// lines; the older variant starts with the candidate count on the first
/// line, followed by `id,name` rows, a `voters,sum,unique` row, and
/// comma-separated vote rows.
pub fn read_soc_profile(path: impl AsRef<Path>) -> Result<PrefLibProfile> {
    let text = std::fs::read_to_string(path)?;
    parse_soc(&text)
}

/// Reads a strict-order profile and returns just the election.
pub fn read_soc(path: impl AsRef<Path>) -> Result<Election> {
    Ok(read_soc_profile(path)?.election)
}

pub fn parse_soc(text: &str) -> Result<PrefLibProfile> {
    let first_meaningful = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| parse_err(1, "empty file"))?;
    if first_meaningful.trim_start().starts_with('#') {
        parse_soc_2022(text)
    } else {
        parse_soc_legacy(text)
    }
}

fn parse_soc_2022(text: &str) -> Result<PrefLibProfile> {
    let mut metadata = BTreeMap::new();
    let mut names: BTreeMap<usize, String> = BTreeMap::new();
    let mut m: Option<usize> = None;
    let mut declared_voters: Option<u64> = None;
    let mut votes: Vec<(Ranking, u64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let Some((key, value)) = header.split_once(':') else {
                continue; // plain comment
            };
            let key = key.trim().to_uppercase();
            let value = value.trim().to_string();
            if let Some(num) = key.strip_prefix("ALTERNATIVE NAME ") {
                let id: usize = num
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad alternative id {num:?}")))?;
                names.insert(id, value);
            } else {
                match key.as_str() {
                    "NUMBER ALTERNATIVES" => {
                        m = Some(value.parse().map_err(|_| {
                            parse_err(lineno, format!("bad NUMBER ALTERNATIVES {value:?}"))
                        })?);
                    }
                    "NUMBER VOTERS" => {
                        declared_voters = Some(value.parse().map_err(|_| {
                            parse_err(lineno, format!("bad NUMBER VOTERS {value:?}"))
                        })?);
                    }
                    "DATA TYPE" => {
                        if value != "soc" {
                            return Err(Error::UnsupportedFormat(format!(
                                "data type {value:?}; only soc (complete strict orders) is supported"
                            )));
                        }
                        metadata.insert(key, value);
                    }
                    _ => {
                        metadata.insert(key, value);
                    }
                }
            }
            continue;
        }
        let m = m.ok_or_else(|| {
            parse_err(lineno, "data row before a # NUMBER ALTERNATIVES header")
        })?;
        let (count_str, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(lineno, "expected `count: c1,c2,...`"))?;
        votes.push(parse_vote_row(lineno, count_str, rest, m)?);
    }
    let m = m.ok_or_else(|| parse_err(1, "missing # NUMBER ALTERNATIVES header"))?;
    let election = Election::new(m, votes)?;
    if let Some(declared) = declared_voters {
        if declared != election.num_voters() {
            return Err(parse_err(
                1,
                format!(
                    "header declares {declared} voters but rows sum to {}",
                    election.num_voters()
                ),
            ));
        }
    }
    let candidate_names = (1..=m)
        .map(|i| names.get(&i).cloned().unwrap_or_else(|| format!("c{i}")))
        .collect();
    Ok(PrefLibProfile {
        election,
        candidate_names,
        metadata,
    })
}

fn parse_soc_legacy(text: &str) -> Result<PrefLibProfile> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (idx0, first) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let m: usize = first
        .trim()
        .parse()
        .map_err(|_| parse_err(idx0 + 1, "expected the candidate count"))?;
    let mut candidate_names = Vec::with_capacity(m);
    for _ in 0..m {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| parse_err(idx0 + 1, "missing candidate name rows"))?;
        let (id, name) = line
            .split_once(',')
            .ok_or_else(|| parse_err(idx + 1, "expected `id,name`"))?;
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| parse_err(idx + 1, "bad candidate id"))?;
        if id != candidate_names.len() + 1 {
            return Err(parse_err(idx + 1, "candidate ids must be 1,2,..."));
        }
        candidate_names.push(name.trim().to_string());
    }
    let (idx, counts_line) = lines
        .next()
        .ok_or_else(|| parse_err(idx0 + 1, "missing voter count row"))?;
    let declared: Vec<&str> = counts_line.split(',').collect();
    if declared.len() != 3 {
        return Err(parse_err(idx + 1, "expected `voters,sum,unique`"));
    }
    let declared_voters: u64 = declared[0]
        .trim()
        .parse()
        .map_err(|_| parse_err(idx + 1, "bad voter count"))?;
    let mut votes = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let (count_str, rest) = line
            .trim()
            .split_once(',')
            .ok_or_else(|| parse_err(lineno, "expected `count,c1,c2,...`"))?;
        votes.push(parse_vote_row(lineno, count_str, rest, m)?);
    }
    let election = Election::new(m, votes)?;
    if declared_voters != election.num_voters() {
        return Err(parse_err(
            idx + 1,
            format!(
                "header declares {declared_voters} voters but rows sum to {}",
                election.num_voters()
            ),
        ));
    }
    Ok(PrefLibProfile {
        election,
        candidate_names,
        metadata: BTreeMap::new(),
    })
}

/// Writes an election in the header style with 1-based candidate ids.
pub fn write_soc(election: &Election, path: impl AsRef<Path>) -> Result<()> {
    let names: Vec<String> = (1..=election.num_candidates())
        .map(|i| format!("c{i}"))
        .collect();
    write_soc_named(election, &names, path)
}

pub fn write_soc_named(
    election: &Election,
    candidate_names: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let m = election.num_candidates();
    let mut out = String::new();
    let _ = writeln!(out, "# FILE NAME: {}", file_name(&path));
    let _ = writeln!(out, "# DATA TYPE: soc");
    let _ = writeln!(out, "# NUMBER ALTERNATIVES: {m}");
    let _ = writeln!(out, "# NUMBER VOTERS: {}", election.num_voters());
    let _ = writeln!(out, "# NUMBER UNIQUE ORDERS: {}", election.votes().len());
    for (i, name) in candidate_names.iter().enumerate().take(m) {
        let _ = writeln!(out, "# ALTERNATIVE NAME {}: {}", i + 1, name);
    }
    for (ranking, count) in election.votes() {
        let ids: Vec<String> = ranking.order().iter().map(|c| (c + 1).to_string()).collect();
        let _ = writeln!(out, "{count}: {}", ids.join(","));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn file_name(path: &impl AsRef<Path>) -> String {
    path.as_ref()
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Full-precision decimal for lossless `f64` round trips (17 significant
/// digits).
fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a matrix as `m` rows of `m` comma-separated full-precision
/// values, no header.
pub fn write_matrix_csv(matrix: &FrequencyMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a matrix CSV, validates bistochasticity within `1e-6`, and
/// renormalizes columns to sum exactly to one.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<FrequencyMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_csv(&text)
}

pub fn parse_matrix_csv(text: &str) -> Result<FrequencyMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(idx + 1, format!("bad number {tok:?}")))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let m = rows.len();
    if m == 0 {
        return Err(parse_err(1, "empty matrix"));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != m) {
        return Err(parse_err(
            bad + 1,
            format!("row has {} entries, expected {m}", rows[bad].len()),
        ));
    }
    // validate on file tolerance, then renormalize columns
    FrequencyMatrix::from_rows_with_tolerance(rows.clone(), 1e-6)?;
    for j in 0..m {
        let sum: f64 = rows.iter().map(|r| r[j]).sum();
        for row in rows.iter_mut() {
            row[j] /= sum;
        }
    }
    Ok(FrequencyMatrix::from_rows_with_tolerance(rows, 1e-5)?)
}

/// Writes a layout as `label,x,y` rows (with that header line).
pub fn write_layout_csv(layout: &EmbeddingLayout, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("label,x,y\n");
    for (label, coord) in layout.labels().iter().zip(layout.coords()) {
        let _ = writeln!(
            out,
            "{label},{},{}",
            format_f64(coord[0]),
            format_f64(coord[1])
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes all defined misrepresentation ratios as
/// `label_a,label_b,npos,euclidean,ratio` rows.
pub fn write_ratios_csv(
    ratios: &[(String, String, f64, f64, f64)],
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = String::from("label_a,label_b,npos,euclidean,ratio\n");
    for (a, b, npos, euc, ratio) in ratios {
        let _ = writeln!(
            out,
            "{a},{b},{},{},{}",
            format_f64(*npos),
            format_f64(*euc),
            format_f64(*ratio)
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Minimal SVG scatter of a layout: fixed 1000x1000 view box, one circle and
/// one text label per point.
pub fn write_layout_svg(layout: &EmbeddingLayout, path: impl AsRef<Path>) -> Result<()> {
    let coords = layout.coords();
    let (mut min_x, mut max_x, mut min_y, mut max_y) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for c in coords {
        min_x = min_x.min(c[0]);
        max_x = max_x.max(c[0]);
        min_y = min_y.min(c[1]);
        max_y = max_y.max(c[1]);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-12);
    let margin = 60.0;
    let scale = (1000.0 - 2.0 * margin) / span;
    let project = |c: &[f64; 2]| {
        let x = margin + (c[0] - min_x) * scale;
        // SVG y axis points down
        let y = 1000.0 - margin - (c[1] - min_y) * scale;
        (x, y)
    };
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n",
    );
    let _ = writeln!(
        out,
        "  <rect width=\"1000\" height=\"1000\" fill=\"white\"/>"
    );
    for (label, coord) in layout.labels().iter().zip(coords) {
        let (x, y) = project(coord);
        let _ = writeln!(
            out,
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"black\"/>"
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"8\">{}</text>",
            x + 4.0,
            y - 4.0,
            xml_escape(label)
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Parses a group-separable tree from a parenthesized expression with
/// 1-based candidate ids at the leaves, like `(1 (2 (3 4)))`.
pub fn parse_gs_tree(text: &str) -> Result<GsTree> {
    let tokens = tokenize_tree(text)?;
    let mut pos = 0usize;
    let node = parse_tree_node(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(parse_err(1, "trailing tokens after tree expression"));
    }
    GsTree::from_node(&node)
}

/// Reads a tree either from a file path or, when the argument looks like
/// `flat:m`, `balanced:m` or `caterpillar:m`, builds that shape directly.
pub fn read_gs_tree(arg: &str) -> Result<GsTree> {
    if let Some((shape, count)) = arg.split_once(':') {
        if let Ok(m) = count.parse::<usize>() {
            return match shape {
                "flat" => GsTree::flat(m),
                "balanced" => GsTree::balanced(m),
                "caterpillar" => GsTree::caterpillar(m),
                _ => Err(Error::InvalidTree(format!("unknown tree shape {shape:?}"))),
            };
        }
    }
    let text = std::fs::read_to_string(arg)?;
    parse_gs_tree(&text)
}

#[derive(Debug, PartialEq)]
enum TreeToken {
    Open,
    Close,
    Leaf(usize),
}

fn tokenize_tree(text: &str) -> Result<Vec<TreeToken>> {
    let mut tokens = Vec::new();
    let mut digits = String::new();
    let flush = |digits: &mut String, tokens: &mut Vec<TreeToken>| -> Result<()> {
        if !digits.is_empty() {
            let id: usize = digits
                .parse()
                .map_err(|_| parse_err(1, format!("bad leaf id {digits:?}")))?;
            if id == 0 {
                return Err(parse_err(1, "leaf ids are 1-based"));
            }
            tokens.push(TreeToken::Leaf(id - 1));
            digits.clear();
        }
        Ok(())
    };
    for ch in text.chars() {
        match ch {
            '(' => {
                flush(&mut digits, &mut tokens)?;
                tokens.push(TreeToken::Open);
            }
            ')' => {
                flush(&mut digits, &mut tokens)?;
                tokens.push(TreeToken::Close);
            }
            c if c.is_ascii_digit() => digits.push(c),
            c if c.is_whitespace() || c == ',' => flush(&mut digits, &mut tokens)?,
            other => return Err(parse_err(1, format!("unexpected character {other:?}"))),
        }
    }
    flush(&mut digits, &mut tokens)?;
    Ok(tokens)
}

fn parse_tree_node(tokens: &[TreeToken], pos: &mut usize) -> Result<TreeNode> {
    match tokens.get(*pos) {
        Some(TreeToken::Leaf(c)) => {
            *pos += 1;
            Ok(TreeNode::Leaf(*c))
        }
        Some(TreeToken::Open) => {
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(TreeToken::Close) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => children.push(parse_tree_node(tokens, pos)?),
                    None => return Err(parse_err(1, "unclosed parenthesis")),
                }
            }
            Ok(TreeNode::Internal(children))
        }
        Some(TreeToken::Close) | None => Err(parse_err(1, "expected a leaf or subtree")),
    }
}
