use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::Args;
use monophily::graph::preprocess;
use monophily::io::{read_graph, EdgeFormat};
use monophily::LabeledGraph;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Edge file: one `source target` pair per line, or a dense 0/1 matrix.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Label file with header `node_id,label`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Edge file format: `edgelist` or `matrix`.
    #[arg(long, default_value = "edgelist")]
    pub format: EdgeFormat,
    /// Treat edges as directed arcs.
    #[arg(long)]
    pub directed: bool,
    /// Skip restriction to labeled nodes and the largest component.
    #[arg(long)]
    pub raw: bool,
    /// File listing one graph per line: `edges_path labels_path [graph_id]`.
    /// Relative paths resolve against the listing's directory.
    #[arg(long, conflicts_with_all = ["edges", "labels"])]
    pub batch: Option<PathBuf>,
}

pub struct GraphSource {
    pub id: String,
    pub edges: PathBuf,
    pub labels: Option<PathBuf>,
}

pub struct LoadedGraph {
    pub id: String,
    pub graph: LabeledGraph,
}

impl GraphArgs {
    pub fn sources(&self) -> Result<Vec<GraphSource>> {
        if let Some(batch) = &self.batch {
            return read_batch(batch);
        }
        let Some(edges) = &self.edges else {
            bail!("either --edges or --batch is required");
        };
        Ok(vec![GraphSource {
            id: graph_id(edges),
            edges: edges.clone(),
            labels: self.labels.clone(),
        }])
    }

    pub fn load(&self, src: &GraphSource) -> Result<LoadedGraph> {
        let g = read_graph(&src.edges, src.labels.as_deref(), self.directed, self.format)
            .with_context(|| format!("reading graph {}", src.edges.display()))?;
        let graph = if self.raw {
            g
        } else {
            preprocess(&g).with_context(|| format!("preprocessing graph {}", src.id))?
        };
        Ok(LoadedGraph { id: src.id.clone(), graph })
    }

    pub fn input_paths(&self, sources: &[GraphSource]) -> Vec<PathBuf> {
        let mut paths: Vec<PathBuf> = self.batch.iter().cloned().collect();
        for s in sources {
            paths.push(s.edges.clone());
            paths.extend(s.labels.clone());
        }
        paths
    }
}

fn graph_id(edges: &Path) -> String {
    edges
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| edges.display().to_string())
}

fn read_batch(path: &Path) -> Result<Vec<GraphSource>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            bail!(
                "{}:{}: expected `edges_path labels_path [graph_id]`",
                path.display(),
                i + 1
            );
        }
        let edges = base.join(fields[0]);
        out.push(GraphSource {
            id: fields.get(2).map(|s| s.to_string()).unwrap_or_else(|| graph_id(&edges)),
            labels: Some(base.join(fields[1])),
            edges,
        });
    }
    if out.is_empty() {
        bail!("{}: no graphs listed", path.display());
    }
    Ok(out)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = fs::File::open(path).with_context(|| format!("hashing {}", path.display()))?;
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Derive an independent seed for a named substream.
pub fn substream_seed(seed: u64, name: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Output directory whose files are written atomically and recorded in the
/// manifest.
pub struct OutputDir {
    dir: PathBuf,
    written: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: BTreeMap::new() })
    }

    /// Write via a temporary file in the same directory, then rename.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.written.insert(name.to_string(), hex::encode(Sha256::digest(bytes)));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn finish(self, manifest: ManifestDraft) -> Result<()> {
        let m = RunManifest {
            command: manifest.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: manifest.seed,
            config: manifest.config,
            inputs: manifest.inputs,
            outputs: self.written,
            started_unix: manifest.started_unix,
            finished_unix: unix_now(),
        };
        let mut bytes = serde_json::to_vec_pretty(&m)?;
        bytes.push(b'\n');
        write_atomic(&self.dir.join("manifest.json"), &bytes)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    /// Input path to SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output file name to SHA-256.
    pub outputs: BTreeMap<String, String>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub struct ManifestDraft {
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub started_unix: u64,
}

impl ManifestDraft {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value, inputs: &[PathBuf]) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            command: command.to_string(),
            seed,
            config,
            inputs,
            started_unix: unix_now(),
        })
    }
}

/// Parse label fractions: `lo:hi:step` in percent, or a comma list of
/// percentages or fractions.
pub fn parse_fractions(text: &str) -> Result<Vec<f64>> {
    let to_fraction = |x: f64| if x >= 1.0 { x / 100.0 } else { x };
    if text.contains(':') {
        let parts: Vec<u32> = text
            .split(':')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("--fractions {text:?}: expected integer percentages lo:hi:step"))?;
        let [lo, hi, step] = parts[..] else {
            bail!("--fractions {text:?}: expected lo:hi:step");
        };
        if step == 0 || lo > hi {
            bail!("--fractions {text:?}: need lo <= hi and step > 0");
        }
        return Ok((lo..=hi).step_by(step as usize).map(|p| p as f64 / 100.0).collect());
    }
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map(to_fraction)
                .with_context(|| format!("--fractions: {p:?} is not a number"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_ranges() {
        let f = parse_fractions("10:90:10").unwrap();
        assert_eq!(f.len(), 9);
        assert_eq!(f[0], 0.1);
        assert_eq!(f[4], 0.5);
        assert_eq!(f[8], 0.9);
        assert_eq!(parse_fractions("50").unwrap(), vec![0.5]);
        assert_eq!(parse_fractions("0.3, 70").unwrap(), vec![0.3, 0.7]);
        assert!(parse_fractions("10:5:1").is_err());
        assert!(parse_fractions("a").is_err());
    }

    #[test]
    fn substreams_differ() {
        assert_ne!(substream_seed(1, "null", 0), substream_seed(1, "null", 1));
        assert_ne!(substream_seed(1, "null", 0), substream_seed(2, "null", 0));
        assert_eq!(substream_seed(1, "null", 0), substream_seed(1, "null", 0));
    }
}

/// Write to stdout. A closed reader (for example `| head`) ends output
/// quietly instead of failing the command.
pub fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
