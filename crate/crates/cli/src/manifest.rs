//! Run manifests: a `#`-commented header recording how an output was made.
//!
//! ```text
//! # urkit manifest
//! # command: simulate
//! # version: 0.1.0
//! # timestamp: 2026-01-01T00:00:00Z
//! # seed: 7
//! # config:
//! #   [simulate]
//! #   T = 200
//! # end manifest
//! ```
//!
//! Everything after `# end manifest` is the output body, which a rerun with
//! `--config <file>` reproduces exactly.

use std::time::SystemTime;

const BEGIN: &str = "# urkit manifest";
const END: &str = "# end manifest";
const CONFIG_INDENT: &str = "#   ";

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub timestamp: String,
    pub seed: Option<u64>,
    /// Additional `key: value` lines, such as input paths.
    pub extra: Vec<(String, String)>,
    /// Resolved configuration in INI form.
    pub config: String,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, config: String) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
            seed,
            extra: Vec::new(),
            config,
        }
    }

    pub fn with_extra(mut self, key: &str, value: impl Into<String>) -> Self {
        self.extra.push((key.into(), value.into()));
        self
    }

    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = format!("{BEGIN}\n# command: {}\n# version: {}\n", self.command, self.version);
        out.push_str(&format!("# timestamp: {}\n", self.timestamp));
        match self.seed {
            Some(s) => out.push_str(&format!("# seed: {s}\n")),
            None => out.push_str("# seed: none\n"),
        }
        for (k, v) in &self.extra {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str("# config:\n");
        for line in self.config.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                out.push_str(CONFIG_INDENT);
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(END);
        out.push('\n');
        out
    }

    /// Parses the manifest at the top of `text`, or `None` when the text
    /// does not start with one.
    pub fn parse(text: &str) -> Result<Option<Self>, String> {
        let mut lines = text.lines();
        if lines.next().map(str::trim_end) != Some(BEGIN) {
            return Ok(None);
        }
        let mut m = Manifest {
            command: String::new(),
            version: String::new(),
            timestamp: String::new(),
            seed: None,
            extra: Vec::new(),
            config: String::new(),
        };
        let mut in_config = false;
        for line in lines {
            if line.trim_end() == END {
                if m.command.is_empty() {
                    return Err("manifest has no command".into());
                }
                return Ok(Some(m));
            }
            if in_config {
                if let Some(c) = line.strip_prefix(CONFIG_INDENT) {
                    m.config.push_str(c);
                } else if line.trim_end() != "#" {
                    return Err(format!("malformed manifest config line `{line}`"));
                }
                m.config.push('\n');
                continue;
            }
            let body = line
                .strip_prefix("# ")
                .ok_or_else(|| format!("malformed manifest line `{line}`"))?;
            if body.trim_end() == "config:" {
                in_config = true;
                continue;
            }
            let (key, value) = body
                .split_once(": ")
                .ok_or_else(|| format!("malformed manifest line `{line}`"))?;
            match key {
                "command" => m.command = value.into(),
                "version" => m.version = value.into(),
                "timestamp" => m.timestamp = value.into(),
                "seed" if value == "none" => m.seed = None,
                "seed" => {
                    m.seed = Some(value.parse().map_err(|_| format!("bad manifest seed `{value}`"))?)
                }
                _ => m.extra.push((key.into(), value.into())),
            }
        }
        Err(format!("manifest is missing `{END}`"))
    }
}

/// Splits a file into its manifest and body.
pub fn split_body(text: &str) -> &str {
    match text.find(&format!("{END}\n")) {
        Some(i) => &text[i + END.len() + 1..],
        None => text,
    }
}
