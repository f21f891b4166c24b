//! Run manifests: a JSON sidecar per emitted result file, carrying enough
//! resolved parameters to re-run the command.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::util;

#[derive(Debug, Serialize)]
pub struct PhaseTiming {
    pub phase: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// The argv this run was invoked with.
    pub argv: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    /// Fully resolved parameters, defaults included.
    pub parameters: serde_json::Value,
    pub timings: Vec<PhaseTiming>,
}

impl RunManifest {
    pub fn new(command: &'static str, parameters: serde_json::Value) -> Self {
        RunManifest {
            tool: "folksim",
            version: env!("CARGO_PKG_VERSION"),
            command,
            argv: std::env::args().collect(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            parameters,
            timings: Vec::new(),
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.to_owned());
        self
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_owned());
    }

    /// Runs `f`, recording its wall-clock time under `phase`.
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let value = f();
        self.timings.push(PhaseTiming {
            phase: phase.to_owned(),
            seconds: start.elapsed().as_secs_f64(),
        });
        value
    }

    /// Writes `<primary>.manifest.json` next to the primary output.
    pub fn write_next_to(&self, primary: &Path) -> anyhow::Result<PathBuf> {
        let path = util::with_extension_appended(primary, ".manifest.json");
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        util::write_file(&path, json.as_bytes())?;
        Ok(path)
    }
}
