//! Text formats: hypergraph instances, test matrices, and protocol
//! transcripts.
//!
//! Instances and matrices are line-oriented and human-diffable. `#`
//! starts a comment; blank lines are skipped. Writers emit canonical
//! form with no comments, so a write/read cycle is exact, and matrix
//! round-trips are bit-exact. Transcripts have a fixed field order so
//! they can serve as golden files.

use std::fmt::Write as _;

use hgt_core::{Bitset, Hypergraph, ProtocolKind, ProtocolTranscript, Severity, TestMatrix};

/// Parse failure with the 1-based source line it was detected on.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, message: message.into() })
}

/// Content lines with comments stripped, paired with source line numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then_some((i + 1, line))
        })
        .collect()
}

/// A parsed hypergraph plus the warnings its validation produced
/// (uncovered vertices). Hard invariant violations are parse errors.
#[derive(Debug, Clone)]
pub struct LoadedHypergraph {
    pub hypergraph: Hypergraph,
    pub warnings: Vec<String>,
}

/// Format: first content line `n m`, then m lines of space-separated
/// vertex ids, one edge per line.
pub fn parse_hypergraph(text: &str) -> Result<LoadedHypergraph, FormatError> {
    let lines = content_lines(text);
    let Some(&(header_line, header)) = lines.first() else {
        return fail(1, "empty file: expected a `n m` header line");
    };
    let mut it = header.split_whitespace();
    let (Some(n_tok), Some(m_tok), None) = (it.next(), it.next(), it.next()) else {
        return fail(header_line, format!("header must be `n m`, got `{header}`"));
    };
    let n: usize = n_tok
        .parse()
        .or_else(|_| fail(header_line, format!("bad vertex count `{n_tok}`")))?;
    let m: usize = m_tok
        .parse()
        .or_else(|_| fail(header_line, format!("bad edge count `{m_tok}`")))?;
    if n == 0 {
        return fail(header_line, "vertex count must be at least 1");
    }
    let edge_lines = &lines[1..];
    if edge_lines.len() != m {
        let at = edge_lines.last().map_or(header_line, |&(l, _)| l);
        return fail(at, format!("expected {m} edge lines, found {}", edge_lines.len()));
    }
    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut seen: std::collections::BTreeMap<Vec<usize>, usize> = std::collections::BTreeMap::new();
    for &(line, content) in edge_lines {
        let mut edge: Vec<usize> = Vec::new();
        for tok in content.split_whitespace() {
            let v: usize =
                tok.parse().or_else(|_| fail(line, format!("bad vertex id `{tok}`")))?;
            if v == 0 || v > n {
                return fail(line, format!("vertex {v} outside [1, {n}]"));
            }
            if edge.contains(&v) {
                return fail(line, format!("vertex {v} repeated within the edge"));
            }
            edge.push(v);
        }
        if edge.is_empty() {
            return fail(line, "edge has no vertices");
        }
        let mut key = edge.clone();
        key.sort_unstable();
        if let Some(first) = seen.insert(key, line) {
            return fail(line, format!("duplicate of the edge on line {first}"));
        }
        edges.push(edge);
    }
    let hypergraph =
        Hypergraph::new(n, edges).map_err(|e| FormatError { line: header_line, message: e.to_string() })?;
    let warnings = hypergraph
        .validate()
        .iter()
        .filter(|d| d.severity == Severity::Warning)
        .map(|d| d.to_string())
        .collect();
    Ok(LoadedHypergraph { hypergraph, warnings })
}

pub fn format_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("{} {}\n", h.n(), h.edge_count());
    for e in h.edges() {
        let ids: Vec<String> = e.iter().map(usize::to_string).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

/// Format: first content line `t width real_columns`, then t rows of
/// width characters from {0,1}.
pub fn parse_matrix(text: &str) -> Result<TestMatrix, FormatError> {
    let lines = content_lines(text);
    let Some(&(header_line, header)) = lines.first() else {
        return fail(1, "empty file: expected a `t width real_columns` header line");
    };
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|tok| tok.parse().or_else(|_| fail(header_line, format!("bad number `{tok}`"))))
        .collect::<Result<_, _>>()?;
    let [t, width, real_columns] = nums[..] else {
        return fail(header_line, format!("header must be `t width real_columns`, got `{header}`"));
    };
    let row_lines = &lines[1..];
    if row_lines.len() != t {
        let at = row_lines.last().map_or(header_line, |&(l, _)| l);
        return fail(at, format!("expected {t} rows, found {}", row_lines.len()));
    }
    let mut matrix = TestMatrix::new(width, real_columns)
        .map_err(|e| FormatError { line: header_line, message: e.to_string() })?;
    for &(line, content) in row_lines {
        if content.len() != width {
            return fail(line, format!("row has {} characters, width is {width}", content.len()));
        }
        let mut row = Bitset::new(width);
        for (i, c) in content.chars().enumerate() {
            match c {
                '0' => {}
                '1' => row.set(i),
                other => return fail(line, format!("invalid character `{other}`")),
            }
        }
        matrix.push_row(row).map_err(|e| FormatError { line, message: e.to_string() })?;
    }
    Ok(matrix)
}

pub fn format_matrix(m: &TestMatrix) -> String {
    let mut out = format!("{} {} {}\n", m.t(), m.width(), m.real_columns());
    for r in 0..m.t() {
        for c in 0..m.width() {
            out.push(if m.get(r, c) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn ids_one_based(ids: &[usize]) -> String {
    let v: Vec<String> = ids.iter().map(|i| (i + 1).to_string()).collect();
    v.join(" ")
}

/// Stable line-oriented transcript: protocol and parameters, flags, one
/// block per stage (pools, response bits, surviving edge ids), then the
/// stripped vertices, violations, answer, and test total. Edge ids are
/// 1-based to match the instance file's line order.
pub fn format_transcript(tr: &ProtocolTranscript) -> String {
    let mut out = String::new();
    match &tr.protocol {
        ProtocolKind::NonAdaptive { p } => {
            out.push_str("protocol=non-adaptive\n");
            let _ = writeln!(out, "p={p}");
        }
        ProtocolKind::TwoStage { q, chi } => {
            out.push_str("protocol=two-stage\n");
            let _ = writeln!(out, "q={q}");
            let _ = writeln!(out, "chi={chi}");
        }
        ProtocolKind::ThreeStage { b } => {
            out.push_str("protocol=three-stage\n");
            let _ = writeln!(out, "b={b}");
        }
    }
    let _ = writeln!(out, "strict={}", tr.strict);
    let _ = writeln!(out, "partial={}", tr.partial);
    for (i, stage) in tr.stages.iter().enumerate() {
        let _ = writeln!(out, "stage={}", i + 1);
        let _ = writeln!(out, "tests={}", stage.pools.len());
        for pool in &stage.pools {
            let ids: Vec<String> = pool.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "pool={}", ids.join(" "));
        }
        let _ = writeln!(out, "response={}", bits_to_string(&stage.responses));
        let _ = writeln!(out, "survivors={}", ids_one_based(&stage.survivors));
    }
    if let Some(focus) = tr.focus_edge {
        let _ = writeln!(out, "focus={}", focus + 1);
    }
    if !tr.stripped.is_empty() {
        let ids: Vec<String> = tr.stripped.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "stripped={}", ids.join(" "));
    }
    for v in &tr.violations {
        let _ = writeln!(out, "violation={v}");
    }
    let _ = writeln!(out, "answer={}", ids_one_based(&tr.answer));
    let _ = writeln!(out, "total_tests={}", tr.total_tests);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypergraph_round_trip() {
        let text = "# a path\n4 3\n1 2\n2 3\n3 4\n";
        let loaded = parse_hypergraph(text).unwrap();
        assert_eq!(loaded.hypergraph.n(), 4);
        assert_eq!(loaded.hypergraph.edge_count(), 3);
        assert!(loaded.warnings.is_empty());
        let emitted = format_hypergraph(&loaded.hypergraph);
        assert_eq!(emitted, "4 3\n1 2\n2 3\n3 4\n");
        let again = parse_hypergraph(&emitted).unwrap();
        assert_eq!(again.hypergraph, loaded.hypergraph);
    }

    #[test]
    fn hypergraph_errors_carry_line_numbers() {
        let err = parse_hypergraph("4 2\n1 2\n2 9\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_hypergraph("4 2\n1 2\n2 1\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("duplicate"));
        let err = parse_hypergraph("4 2\n1 2\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_hypergraph("# only comments\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_hypergraph("4 1\n1 1 2\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn hypergraph_warns_on_uncovered_vertex() {
        let loaded = parse_hypergraph("5 2\n1 2\n3 4\n").unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.warnings[0].contains("vertex 5"));
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let text = "3 5 4\n10010\n01000\n00111\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.t(), 3);
        assert_eq!(m.width(), 5);
        assert_eq!(m.real_columns(), 4);
        assert_eq!(format_matrix(&m), text);
    }

    #[test]
    fn matrix_errors_carry_line_numbers() {
        assert_eq!(parse_matrix("2 3 3\n101\n1\n").unwrap_err().line, 3);
        assert_eq!(parse_matrix("2 3 3\n101\n102\n").unwrap_err().line, 3);
        assert_eq!(parse_matrix("1 3 4\n111\n").unwrap_err().line, 1);
        assert_eq!(parse_matrix("2 3 3\n111\n").unwrap_err().line, 2);
    }
}
