//! Flat `key = value` config files.
//!
//! Every flag of a subcommand can instead come from a config file given with
//! `--config`; an explicit flag always wins over the file. Keys are the long
//! flag names without the leading dashes. Unknown keys, duplicate keys, and
//! unparseable values are usage errors so that a typo never silently changes
//! an experiment.

use crate::error::CliError;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// A loaded config file with its remaining unclaimed keys. Commands take the
/// keys they know and then call [`ConfigFile::finish`] so leftovers fail
/// loudly.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Loads `path` when given; an absent path yields an empty file.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("config file {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "config file {}, line {}: expected `key = value`, got {line:?}",
                    path.display(),
                    number + 1
                )));
            };
            let key = key.trim().to_string();
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::usage(format!(
                    "config file {}: duplicate key {key:?}",
                    path.display()
                )));
            }
        }
        Ok(ConfigFile { values })
    }

    /// Resolves one setting: the flag value if given, else the config value
    /// parsed as `T`, else `None`.
    pub fn take<T: FromStr>(&mut self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        let file_value = self.values.remove(key);
        if flag.is_some() {
            return Ok(flag);
        }
        match file_value {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::usage(format!("config key {key:?}: cannot parse value {raw:?}"))
            }),
        }
    }

    /// Errors on any key no `take` call claimed.
    pub fn finish(self) -> Result<(), CliError> {
        if let Some(key) = self.values.keys().next() {
            return Err(CliError::usage(format!(
                "config file: unknown key {key:?} for this subcommand"
            )));
        }
        Ok(())
    }
}

/// Parses a seed list: a single number, a comma list, or an inclusive range
/// `a..b` (so `1..10` means the ten seeds 1 through 10).
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let text = text.trim();
    let bad = |why: &str| CliError::usage(format!("seeds {text:?}: {why}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo
            .trim()
            .parse()
            .map_err(|_| bad("range start is not a number"))?;
        let hi: u64 = hi
            .trim()
            .parse()
            .map_err(|_| bad("range end is not a number"))?;
        if lo > hi {
            return Err(bad("range start exceeds its end"));
        }
        return Ok((lo..=hi).collect());
    }
    let seeds: Vec<u64> = text
        .split(',')
        .map(|part| part.trim().parse().map_err(|_| bad("expected numbers")))
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(bad("empty"));
    }
    Ok(seeds)
}

/// Parses a comma-separated list of names, rejecting empties.
pub fn parse_names(text: &str) -> Result<Vec<String>, CliError> {
    let names: Vec<String> = text
        .split(',')
        .map(|part| part.trim().to_string())
        .collect();
    if names.iter().any(String::is_empty) {
        return Err(CliError::usage(format!("empty name in list {text:?}")));
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn config_from(text: &str) -> Result<ConfigFile, CliError> {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "{text}").unwrap();
        ConfigFile::load(Some(file.path()))
    }

    #[test]
    fn flags_override_file_values() {
        let mut config = config_from("budget = 5\nseed = 3\n").unwrap();
        assert_eq!(config.take(Some(9_usize), "budget").unwrap(), Some(9));
        assert_eq!(config.take(None::<u64>, "seed").unwrap(), Some(3));
        config.finish().unwrap();
    }

    #[test]
    fn unknown_and_duplicate_keys_are_usage_errors() {
        let config = config_from("budget = 5\n").unwrap();
        assert_eq!(config.finish().unwrap_err().exit_code(), 1);
        let err = config_from("a = 1\na = 2\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let mut config = config_from("# note\n\nknn-k = 4\n").unwrap();
        assert_eq!(config.take(None::<usize>, "knn-k").unwrap(), Some(4));
        config.finish().unwrap();
    }

    #[test]
    fn bad_values_name_the_key() {
        let mut config = config_from("budget = soon\n").unwrap();
        let err = config.take(None::<usize>, "budget").unwrap_err();
        assert!(err.to_string().contains("budget"));
    }

    #[test]
    fn seed_ranges_are_inclusive() {
        assert_eq!(parse_seeds("1..10").unwrap().len(), 10);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("2, 4, 8").unwrap(), vec![2, 4, 8]);
        assert_eq!(parse_seeds("5..2").unwrap_err().exit_code(), 1);
    }

    #[test]
    fn name_lists_reject_empties() {
        assert_eq!(parse_names("odoem,random").unwrap().len(), 2);
        assert!(parse_names("odoem,,random").is_err());
    }
}
