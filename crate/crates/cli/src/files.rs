use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use opmgr_core::bench::{parse_instance, BestKnownRegistry, Format};
use opmgr_core::pfsp::Instance;

/// Instance name as used in the registry: the file stem.
pub fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn load_instance(path: &Path, format: Format) -> Result<Instance> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&bytes, format).map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn load_registry(path: &Path) -> Result<BestKnownRegistry> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    BestKnownRegistry::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Regular files of a dataset directory, sorted by name.
pub fn dataset_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && !instance_name(&path).starts_with('.') {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing into {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}
