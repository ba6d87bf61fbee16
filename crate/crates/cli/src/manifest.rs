use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::failure::Failure;

/// Record of one invocation, written after every output file exists.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub config: serde_json::Value,
    /// Unix seconds.
    pub started_at: u64,
    pub wall_time_secs: f64,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl RunManifest {
    pub fn start(command: &str, version: &str) -> Self {
        RunManifest {
            command: command.to_owned(),
            version: version.to_owned(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: serde_json::Value::Null,
            started_at: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            wall_time_secs: 0.0,
            clock: Some(Instant::now()),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn settings(&mut self, config: impl Serialize) {
        self.config = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
    }

    pub fn finish(mut self, path: &Path) -> Result<(), Failure> {
        if let Some(clock) = self.clock.take() {
            self.wall_time_secs = clock.elapsed().as_secs_f64();
        }
        let json = serde_json::to_string_pretty(&self).map_err(|e| Failure::data(e.to_string()))?;
        fs::write(path, json + "\n").map_err(|e| Failure::io(path, e))
    }
}
