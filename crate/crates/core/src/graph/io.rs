//! Plain-text edge lists: one `i j` pair per line, `#` comments, and an
//! optional leading `n <count>` header.

use std::fmt::Write as _;

use super::{Graph, GraphError};

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut declared_n = None;
    let mut edges = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line: line_no,
                message: format!("expected a non-negative integer, found {s:?}"),
            })
        };
        match fields.as_slice() {
            ["n", count] if !seen_content => declared_n = Some(parse(count)?),
            [a, b] => edges.push((parse(a)?, parse(b)?)),
            _ => {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: format!("expected \"i j\", found {line:?}"),
                })
            }
        }
        seen_content = true;
    }
    let inferred = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let n = declared_n.unwrap_or(inferred);
    Graph::new(n, edges)
}

/// Serializes in the format read by [`parse_edge_list`], with a
/// `# family:` comment and an explicit node count.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    match g.family() {
        Some(family) => writeln!(out, "# family: {family}").unwrap(),
        None => writeln!(out, "# family: custom").unwrap(),
    }
    writeln!(out, "n {}", g.n()).unwrap();
    for &(i, j) in g.edges() {
        writeln!(out, "{i} {j}").unwrap();
    }
    out
}
