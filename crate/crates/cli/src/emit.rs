//! Reproducibility headers and CSV emission.
//!
//! Every output starts with `# key = value` comment lines carrying the full
//! resolved configuration, so a result file doubles as the config file that
//! recreates it (strip the `# ` prefix). CSV readers that skip `#` comments
//! see a plain table.

use crate::error::CliError;
use std::fmt::Display;
use std::fs;
use std::path::Path;

/// Ordered `key = value` pairs for a run's reproducibility header.
#[derive(Debug, Clone, Default)]
pub struct Header {
    pairs: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        let mut header = Header::default();
        header.push("command", command);
        header
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.pairs.push((key.to_string(), value.to_string()));
    }

    /// The header as CSV comment lines, newline-terminated.
    pub fn comment_block(&self) -> String {
        let mut block = String::new();
        for (key, value) in &self.pairs {
            block.push_str(&format!("# {key} = {value}\n"));
        }
        block
    }

    /// Prints the header to stdout (used when a command has no output file).
    pub fn print(&self) {
        print!("{}", self.comment_block());
    }
}

/// Writes `header` then `body` to `path`.
pub fn write_with_header(path: &Path, header: &Header, body: &str) -> Result<(), CliError> {
    fs::write(path, format!("{}{body}", header.comment_block()))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// Re-writes an existing file with `header` placed in front of its content.
pub fn prepend_header(path: &Path, header: &Header) -> Result<(), CliError> {
    let body = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading back {}: {e}", path.display())))?;
    write_with_header(path, header, &body)
}

/// Formats one CSV row from already-stringified fields.
pub fn csv_row(fields: &[String]) -> String {
    let mut row = fields.join(",");
    row.push('\n');
    row
}
