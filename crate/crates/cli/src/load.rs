use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pwgraph::{io, Graph, GraphSignal, Partition, SubsetChain, VertexSet};

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

pub fn graph(path: &Path, nu: Option<&Path>) -> Result<Graph> {
    let weights = nu.map(open).transpose()?;
    let g = io::load_graph(open(path)?, weights).map_err(|e| match nu {
        Some(nu) => anyhow::anyhow!("{} (vertex weights {}): {e}", path.display(), nu.display()),
        None => anyhow::anyhow!("{}: {e}", path.display()),
    })?;
    if g.is_empty() {
        bail!("{}: graph has no edges", path.display());
    }
    Ok(g)
}

pub fn signal(g: &Graph, path: &Path) -> Result<GraphSignal> {
    io::load_signal(g, open(path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn samples(g: &Graph, path: &Path) -> Result<BTreeMap<usize, f64>> {
    io::load_samples(g, open(path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn shells(g: &Graph, path: &Path) -> Result<Vec<VertexSet>> {
    let shells = io::load_shells(g, open(path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    if shells.is_empty() {
        bail!("{}: no shells", path.display());
    }
    Ok(shells)
}

pub fn partition(g: &Graph, path: &Path) -> Result<Partition> {
    Partition::new(g, shells(g, path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn chain(g: &Graph, path: &Path) -> Result<SubsetChain> {
    SubsetChain::new(g, shells(g, path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// First shell of a partition file, without validating the remaining lines.
pub fn initial_set(g: &Graph, path: &Path) -> Result<VertexSet> {
    Ok(shells(g, path)?.swap_remove(0))
}
