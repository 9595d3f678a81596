use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

/// Parses a SNAP-style edge list: `#` comment lines and `src dst` integer
/// pairs separated by whitespace. Node ids are remapped to `0..n` in order of
/// first appearance.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut remap: HashMap<u64, u32> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut edges = Vec::new();

    let mut intern = |id: u64, line: usize| -> Result<u32> {
        if let Some(&k) = remap.get(&id) {
            return Ok(k);
        }
        let k = u32::try_from(original_ids.len()).map_err(|_| Error::Parse {
            line,
            message: "too many distinct node ids".into(),
        })?;
        remap.insert(id, k);
        original_ids.push(id);
        Ok(k)
    };

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (src, dst) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (parse_id(a, line_no)?, parse_id(b, line_no)?),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `src dst`, found {trimmed:?}"),
                })
            }
        };
        let s = intern(src, line_no)?;
        let d = intern(dst, line_no)?;
        edges.push((s, d));
    }

    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    Graph::from_edges(original_ids.len(), edges, Some(original_ids))
}

pub fn parse_edge_list_str(text: &str) -> Result<Graph> {
    parse_edge_list(text.as_bytes())
}

fn parse_id(token: &str, line: usize) -> Result<u64> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid node id {token:?}"),
    })
}

/// Writes the graph as a tab-separated edge list under original ids.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# Nodes: {} Edges: {}", graph.n(), graph.nnz())?;
    for &(s, d) in graph.edges() {
        writeln!(
            out,
            "{}\t{}",
            graph.original_id(s as usize),
            graph.original_id(d as usize)
        )?;
    }
    Ok(())
}
