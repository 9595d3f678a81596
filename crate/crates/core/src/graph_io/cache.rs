//! Versioned binary snapshot of a graph.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "PRNK1"            magic + format version
//! u64 n, u64 nnz
//! u64 row_ptr[n + 1]  CSR offsets, rows = destination nodes
//! u32 src[nnz]        source node of each link, ascending within a row
//! u64 ids[n]          original node ids
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 5] = b"PRNK1";

pub fn write_cache(graph: &Graph, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_cache_to(graph, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_cache_to<W: Write>(graph: &Graph, out: &mut W) -> Result<()> {
    let n = graph.n();
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(src, dst) in graph.edges() {
        rows[dst as usize].push(src);
    }
    out.write_all(CACHE_MAGIC)?;
    out.write_all(&(n as u64).to_le_bytes())?;
    out.write_all(&(graph.nnz() as u64).to_le_bytes())?;
    let mut offset = 0u64;
    out.write_all(&offset.to_le_bytes())?;
    for row in &mut rows {
        row.sort_unstable();
        offset += row.len() as u64;
        out.write_all(&offset.to_le_bytes())?;
    }
    for &src in rows.iter().flatten() {
        out.write_all(&src.to_le_bytes())?;
    }
    for &id in graph.original_ids() {
        out.write_all(&id.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<Graph> {
    let mut input = BufReader::new(File::open(path)?);
    read_cache_from(&mut input).map_err(|err| match err {
        Error::Cache { message, .. } => Error::Cache {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn read_cache_from<R: Read>(input: &mut R) -> Result<Graph> {
    let corrupt = |message: &str| Error::Cache {
        path: Default::default(),
        message: message.to_string(),
    };

    let mut magic = [0u8; 5];
    input
        .read_exact(&mut magic)
        .map_err(|_| corrupt("truncated header"))?;
    if &magic != CACHE_MAGIC {
        return Err(corrupt("bad magic or unsupported version"));
    }
    let n = read_u64(input).map_err(|_| corrupt("truncated header"))? as usize;
    let nnz = read_u64(input).map_err(|_| corrupt("truncated header"))? as usize;

    let mut row_ptr = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        row_ptr.push(read_u64(input).map_err(|_| corrupt("truncated row offsets"))? as usize);
    }
    if row_ptr[0] != 0 || row_ptr[n] != nnz || row_ptr.windows(2).any(|w| w[0] > w[1]) {
        return Err(corrupt("inconsistent row offsets"));
    }

    let mut edges = Vec::with_capacity(nnz);
    for dst in 0..n {
        for _ in row_ptr[dst]..row_ptr[dst + 1] {
            let mut buf = [0u8; 4];
            input
                .read_exact(&mut buf)
                .map_err(|_| corrupt("truncated column indices"))?;
            edges.push((u32::from_le_bytes(buf), dst as u32));
        }
    }
    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        ids.push(read_u64(input).map_err(|_| corrupt("truncated id table"))?);
    }

    let graph = Graph::from_edges(n, edges, Some(ids))?;
    if graph.nnz() != nnz {
        return Err(corrupt("duplicate links"));
    }
    Ok(graph)
}

fn read_u64<R: Read>(input: &mut R) -> std::io::Result<u64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}
