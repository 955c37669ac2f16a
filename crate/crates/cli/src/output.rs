use std::path::Path;

use anyhow::{Context, Result};

/// Writes a report file and echoes its path; output files are the artifact,
/// so every one of them is announced.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote: {}", path.display());
    Ok(())
}

/// Runs `f` on a dedicated rayon pool when a worker count is requested;
/// `workers = 0` keeps the default pool. Results are identical either way.
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    Ok(pool.install(f))
}

/// Echoes the fully resolved invocation so a reader can re-run it verbatim.
pub fn echo_command(parts: &[String]) {
    println!("command: enose-bench {}", parts.join(" "));
}
