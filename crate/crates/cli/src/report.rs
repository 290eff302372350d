//! `odoem report`: summarize learning-curve CSVs written by `benchmark`.

use crate::config::ConfigFile;
use crate::emit::{csv_row, write_with_header, Header};
use crate::error::CliError;
use clap::Args as ClapArgs;
use std::path::{Path, PathBuf};

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Curve CSV files to summarize
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Config file with `key = value` lines; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optional summary CSV path
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
struct CurveSummary {
    file: String,
    strategy: String,
    seed: String,
    steps: usize,
    final_mse: f64,
    auc: f64,
}

fn summarize(path: &Path) -> Result<CurveSummary, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("curve file {}: {e}", path.display())))?;
    let malformed = |why: &str| CliError::Io(format!("curve file {}: {why}", path.display()));

    let mut strategy = "-".to_string();
    let mut seed = "-".to_string();
    let mut mse_column = None;
    let mut mses = Vec::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "strategy" => strategy = value.trim().to_string(),
                    "seed" | "seeds" => seed = value.trim().to_string(),
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match mse_column {
            None => {
                mse_column = Some(
                    fields
                        .iter()
                        .position(|name| name.trim() == "mse")
                        .ok_or_else(|| malformed("no mse column in the header"))?,
                );
            }
            Some(column) => {
                let raw = fields
                    .get(column)
                    .ok_or_else(|| malformed("row shorter than the header"))?;
                let mse: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| malformed(&format!("bad mse value {raw:?}")))?;
                mses.push(mse);
            }
        }
    }
    if mses.is_empty() {
        return Err(malformed("no data rows"));
    }
    Ok(CurveSummary {
        file: path
            .file_name()
            .map(|name| name.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string()),
        strategy,
        seed,
        steps: mses.len(),
        final_mse: *mses.last().expect("nonempty"),
        auc: mses.iter().sum(),
    })
}

pub fn run(args: Args) -> Result<i32, CliError> {
    let mut config = ConfigFile::load(args.config.as_deref())?;
    let output = config.take(args.output, "output")?;
    config.finish()?;

    let summaries = args
        .inputs
        .iter()
        .map(|path| summarize(path))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = vec![[
        "file".to_string(),
        "strategy".to_string(),
        "seed".to_string(),
        "steps".to_string(),
        "final_mse".to_string(),
        "auc".to_string(),
    ]];
    for s in &summaries {
        rows.push([
            s.file.clone(),
            s.strategy.clone(),
            s.seed.clone(),
            s.steps.to_string(),
            s.final_mse.to_string(),
            s.auc.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, width)| format!("{cell:<width$}"))
            .collect();
        println!("{}", line.join("  ").trim_end());
    }

    if let Some(path) = output {
        let mut header = Header::new("report");
        for input in &args.inputs {
            header.push("input", input.display());
        }
        let mut body = String::from("file,strategy,seed,steps,final_mse,auc\n");
        for s in &summaries {
            body.push_str(&csv_row(&[
                s.file.clone(),
                s.strategy.clone(),
                s.seed.clone(),
                s.steps.to_string(),
                s.final_mse.to_string(),
                s.auc.to_string(),
            ]));
        }
        write_with_header(&path, &header, &body)?;
    }
    Ok(0)
}
