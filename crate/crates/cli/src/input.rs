use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use prnk_core::graph_io::{load_graph, Graph, GraphFormat};
use prnk_core::operator::read_teleport;

use crate::failure::{Context, Failure};

pub fn parse_format(format: Option<&str>) -> Result<Option<GraphFormat>, Failure> {
    format
        .map(|f| f.parse::<GraphFormat>())
        .transpose()
        .map_err(Failure::from)
}

pub fn load(path: &Path, format: Option<&str>) -> Result<Graph, Failure> {
    let format = parse_format(format)?;
    load_graph(path, format).context(format!("reading {}", path.display()))
}

/// One float per line, exactly `n` values.
pub fn read_vector(path: &Path, n: usize) -> Result<Vec<f64>, Failure> {
    let file = File::open(path).context(format!("opening {}", path.display()))?;
    read_teleport(BufReader::new(file), n).context(format!("reading {}", path.display()))
}
