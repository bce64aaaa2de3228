//! Number formatting, CSV assembly and atomic artifact writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Six significant digits, without exponent notation or trailing zeros.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    let s = rounded.to_string();
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn header(seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("# marchcast {VERSION} seed={s}\n"),
        None => format!("# marchcast {VERSION} seed=none\n"),
    }
}

/// A CSV under construction, preceded by the version/seed comment line and
/// any extra comment lines.
pub struct Table {
    comments: Vec<String>,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(columns)?;
        Ok(Self {
            comments: Vec::new(),
            writer,
        })
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self, seed: Option<u64>) -> Result<Vec<u8>> {
        let mut out = header(seed).into_bytes();
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        out.extend(self.writer.into_inner().context("flushing csv")?);
        Ok(out)
    }
}

/// Files produced by one command, keyed by path relative to the output directory.
#[derive(Default)]
pub struct Artifacts {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub inputs: Vec<PathBuf>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn input(&mut self, path: &Path) {
        if !self.inputs.iter().any(|p| p == path) {
            self.inputs.push(path.to_path_buf());
        }
    }
}

#[derive(Serialize)]
struct FileHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    inputs: Vec<FileHash>,
    outputs: Vec<FileHash>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn hash_input(path: &Path) -> Result<FileHash> {
    let hash = if path.is_dir() {
        // hash of the sorted (name, content hash) listing
        let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
            .with_context(|| format!("listing {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        let mut h = Sha256::new();
        for e in entries {
            let bytes = std::fs::read(&e).with_context(|| format!("reading {}", e.display()))?;
            h.update(e.file_name().unwrap_or_default().as_encoded_bytes());
            h.update(sha256(&bytes).as_bytes());
        }
        hex::encode(h.finalize())
    } else {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        sha256(&bytes)
    };
    Ok(FileHash {
        path: path.display().to_string(),
        sha256: hash,
    })
}

/// Writes via a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes every artifact plus `manifest.json` under `dir`, or prints the
/// artifacts to stdout when no directory is given.
pub fn emit<C: Serialize>(
    artifacts: &Artifacts,
    dir: Option<&Path>,
    command: &str,
    config: &C,
) -> Result<()> {
    let Some(dir) = dir else {
        let mut out = std::io::stdout().lock();
        let many = artifacts.files.len() > 1;
        for (name, bytes) in &artifacts.files {
            if many {
                writeln!(out, "==> {} <==", name.display())?;
            }
            out.write_all(bytes)?;
        }
        out.flush()?;
        return Ok(());
    };
    let mut outputs = Vec::new();
    for (name, bytes) in &artifacts.files {
        let path = dir.join(name);
        write_atomic(&path, bytes)?;
        log::info!("wrote {}", path.display());
        outputs.push(FileHash {
            path: name.display().to_string(),
            sha256: sha256(bytes),
        });
    }
    let manifest = Manifest {
        tool: "marchcast",
        version: VERSION,
        command,
        config,
        inputs: artifacts
            .inputs
            .iter()
            .map(|p| hash_input(p))
            .collect::<Result<_>>()?,
        outputs,
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    write_atomic(&dir.join("manifest.json"), &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.28912345), "0.289123");
        assert_eq!(sig6(40.6789123), "40.6789");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-0.0000001234567), "-0.000000123457");
        assert_eq!(sig6(638512875.0), "638513000");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
