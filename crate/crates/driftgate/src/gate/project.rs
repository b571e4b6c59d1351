//! Generation and building of gate projects.
//!
//! A gate project is a minimal cargo package whose build script runs
//! [`static_assert_conforms`](super::static_assert_conforms) and exits
//! nonzero on failure, so a drifted producer literally fails `cargo build`
//! before any pipeline code is compiled into a runnable binary. The same
//! machinery drives the compile-fail corpus and the compile-overhead
//! benchmark; both reuse one persistent target directory so dependency
//! artifacts are built once and the measured cost is the gate itself.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;

/// Captured result of a `cargo build` over a gate project.
#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub success: bool,
    /// Combined standard output and standard error of the build.
    pub log: String,
}

/// Persistent target directory shared by every generated gate project.
pub fn shared_target_dir() -> PathBuf {
    std::env::temp_dir().join("driftgate-build-cache")
}

/// Absolute path of this crate, baked in at compile time so generated
/// projects can depend on it by path.
pub fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// Writes a gate project at `root`: a package named `package` whose build
/// script is exactly `build_script`.
pub fn write_gate_project(root: &Path, package: &str, build_script: &str) -> io::Result<()> {
    fs::create_dir_all(root.join("src"))?;
    let manifest = format!(
        "[package]\n\
         name = \"{package}\"\n\
         version = \"0.0.0\"\n\
         edition = \"2021\"\n\
         \n\
         [build-dependencies]\n\
         driftgate = {{ path = \"{}\" }}\n",
        crate_dir().display()
    );
    fs::write(root.join("Cargo.toml"), manifest)?;
    fs::write(root.join("build.rs"), build_script)?;
    fs::write(root.join("src").join("main.rs"), "fn main() {}\n")?;
    Ok(())
}

/// Runs `cargo build` on a gate project, returning success and the combined
/// build log. Uses the shared target directory and the local package cache
/// only.
pub fn build_gate_project(root: &Path) -> io::Result<BuildOutcome> {
    let output = Command::new("cargo")
        .arg("build")
        .arg("--offline")
        .current_dir(root)
        .env("CARGO_TARGET_DIR", shared_target_dir())
        .output()?;
    let mut log = String::from_utf8_lossy(&output.stdout).into_owned();
    log.push_str(&String::from_utf8_lossy(&output.stderr));
    Ok(BuildOutcome {
        success: output.status.success(),
        log,
    })
}

/// Removes the build artifacts of one gate project from the shared target
/// directory, forcing its next build to redo the gate work.
pub fn clean_gate_project(root: &Path, package: &str) -> io::Result<()> {
    Command::new("cargo")
        .arg("clean")
        .arg("--offline")
        .arg("-p")
        .arg(package)
        .current_dir(root)
        .env("CARGO_TARGET_DIR", shared_target_dir())
        .output()
        .map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn written_project_has_the_expected_layout() {
        let dir = tempfile::tempdir().unwrap();
        write_gate_project(dir.path(), "gate-probe", "fn main() {}\n").unwrap();
        let manifest = fs::read_to_string(dir.path().join("Cargo.toml")).unwrap();
        assert!(manifest.contains("name = \"gate-probe\""));
        assert!(manifest.contains("[build-dependencies]"));
        assert!(manifest.contains("driftgate"));
        assert_eq!(
            fs::read_to_string(dir.path().join("build.rs")).unwrap(),
            "fn main() {}\n"
        );
        assert!(dir.path().join("src/main.rs").exists());
    }
}
