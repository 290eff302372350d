//! `odoem generate`: write a synthetic dataset CSV.

use crate::config::ConfigFile;
use crate::emit::{prepend_header, Header};
use crate::error::CliError;
use clap::Args as ClapArgs;
use odoem::datasets::{
    generate, generate_rotating_images, write_image_csv, write_manifold_csv, ManifoldKind,
    ParamLayout,
};
use std::path::PathBuf;

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Config file with `key = value` lines; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset kind: torus, mobius, klein-figure8, klein-bottle, or
    /// rotating-images
    #[arg(long)]
    kind: Option<String>,
    /// Number of instances (a perfect square for grid layouts; the image
    /// count for rotating-images)
    #[arg(long)]
    n: Option<usize>,
    /// Variance of the Gaussian coordinate noise
    #[arg(long)]
    noise_var: Option<f64>,
    /// Seed for noise and random layouts
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter layout: grid or random
    #[arg(long)]
    layout: Option<String>,
    /// Output CSV path
    #[arg(short, long)]
    output: Option<PathBuf>,
}

struct Resolved {
    kind: String,
    n: usize,
    noise_var: f64,
    seed: u64,
    layout: String,
    output: PathBuf,
    surface_given: bool,
}

fn resolve(args: Args) -> Result<Resolved, CliError> {
    let mut config = ConfigFile::load(args.config.as_deref())?;
    let kind = config.take(args.kind, "kind")?;
    let n = config.take(args.n, "n")?;
    let noise_var = config.take(args.noise_var, "noise-var")?;
    let seed = config.take(args.seed, "seed")?;
    let layout = config.take(args.layout, "layout")?;
    let output = config.take(args.output, "output")?;
    config.finish()?;
    let kind = kind.ok_or_else(|| CliError::usage("--kind is required"))?;
    let output = output.ok_or_else(|| CliError::usage("--output is required"))?;
    let surface_given = noise_var.is_some() || seed.is_some() || layout.is_some();
    Ok(Resolved {
        kind,
        n: n.unwrap_or(400),
        noise_var: noise_var.unwrap_or(0.0),
        seed: seed.unwrap_or(1),
        layout: layout.unwrap_or_else(|| "grid".to_string()),
        output,
        surface_given,
    })
}

pub fn run(args: Args) -> Result<i32, CliError> {
    let resolved = resolve(args)?;
    let mut header = Header::new("generate");
    header.push("kind", &resolved.kind);
    header.push("n", resolved.n);
    header.push("output", resolved.output.display());

    if resolved.kind == "rotating-images" {
        if resolved.surface_given {
            return Err(CliError::usage(
                "--noise-var, --seed, and --layout do not apply to rotating-images",
            ));
        }
        let images = generate_rotating_images(resolved.n);
        write_image_csv(&images, &resolved.output)?;
        prepend_header(&resolved.output, &header)?;
        println!(
            "wrote {} images to {}",
            images.len(),
            resolved.output.display()
        );
        return Ok(0);
    }

    let kind = ManifoldKind::from_name(&resolved.kind)
        .map_err(|e| CliError::usage(format!("{e}, rotating-images")))?;
    if !(resolved.noise_var >= 0.0) {
        return Err(CliError::usage(format!(
            "noise variance must be nonnegative, got {}",
            resolved.noise_var
        )));
    }
    let layout = match resolved.layout.as_str() {
        "grid" => ParamLayout::Grid,
        "random" => ParamLayout::RandomUniform,
        other => {
            return Err(CliError::usage(format!(
                "unknown layout {other:?}; valid layouts: grid, random"
            )))
        }
    };
    header.push("noise-var", resolved.noise_var);
    header.push("seed", resolved.seed);
    header.push("layout", &resolved.layout);

    let data = generate(
        kind,
        resolved.n,
        resolved.noise_var.sqrt(),
        resolved.seed,
        layout,
    )?;
    write_manifold_csv(&data, &resolved.output)?;
    prepend_header(&resolved.output, &header)?;
    println!(
        "wrote {} instances to {}",
        data.len(),
        resolved.output.display()
    );
    Ok(0)
}
