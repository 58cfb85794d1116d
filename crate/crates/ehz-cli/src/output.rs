use crate::{CliError, OutArgs};
use std::io::Write;
use std::path::{Path, PathBuf};
use tempfile::NamedTempFile;

pub const OUT_DIR_VAR: &str = "EHZ_OUT_DIR";

fn destination(out: &OutArgs, default_name: &str) -> Option<PathBuf> {
    out.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_VAR)
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(&d).join(default_name))
    })
}

/// Writes to a temp file next to the target and renames it into place, so a
/// failed run never leaves a truncated artifact.
fn write_atomic(path: &Path, body: &str) -> Result<(), CliError> {
    let err = |e: std::io::Error| CliError::Write(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(err)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(body.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub fn emit(out: &OutArgs, default_name: &str, body: &str) -> Result<(), CliError> {
    match destination(out, default_name) {
        Some(path) => {
            write_atomic(&path, body)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Write(format!("stdout: {e}")))
        }
    }
}
