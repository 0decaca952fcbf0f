use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use entqfi::experiment::{load_config, run_experiment, write_outputs, ExperimentConfig};
use entqfi::ordering::Measure;

/// Score random two-qubit states by entanglement and by LOCC-optimized
/// quantum Fisher information, and tabulate how the two orderings agree.
#[derive(Parser, Debug)]
#[command(name = "entqfi", version)]
struct Cli {
    /// Start from a saved config.json; other flags override its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Number of random states.
    #[arg(long, value_name = "N")]
    states: Option<usize>,

    /// Master seed; state i is drawn from its own stream derived from it.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,

    /// Coarse grid spacing is 2π/K.
    #[arg(long, value_name = "K")]
    grid_divisor: Option<usize>,

    /// Spacing 2π/K2 of the second pass for states the coarse grid leaves unmoved.
    #[arg(long, value_name = "K2")]
    refine_divisor: Option<usize>,

    /// Equality tolerance as measure=value, where measure is concurrence,
    /// negativity, ree or mqfi. Repeatable.
    #[arg(long, value_name = "MEASURE=EPS")]
    eps_order: Vec<String>,

    /// Product states in the REE separable ansatz.
    #[arg(long, value_name = "M")]
    ree_components: Option<usize>,

    /// Random restarts per REE solve.
    #[arg(long, value_name = "R")]
    ree_multistarts: Option<usize>,

    /// Iteration cap per REE restart.
    #[arg(long, value_name = "N")]
    ree_max_sweeps: Option<usize>,

    /// REE stopping threshold on the per-sweep improvement, in bits.
    #[arg(long, value_name = "BITS")]
    ree_threshold: Option<f64>,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "results")]
    out: PathBuf,

    /// Witnesses listed per discordant cell.
    #[arg(long, value_name = "L")]
    witness_limit: Option<usize>,
}

fn build_config(cli: &Cli) -> entqfi::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.count = cli.states.unwrap_or(cfg.count);
    cfg.master_seed = cli.seed.unwrap_or(cfg.master_seed);
    cfg.grid_divisor = cli.grid_divisor.unwrap_or(cfg.grid_divisor);
    cfg.refine_divisor = cli.refine_divisor.unwrap_or(cfg.refine_divisor);
    cfg.ree.components = cli.ree_components.unwrap_or(cfg.ree.components);
    cfg.ree.multistarts = cli.ree_multistarts.unwrap_or(cfg.ree.multistarts);
    cfg.ree.max_sweeps = cli.ree_max_sweeps.unwrap_or(cfg.ree.max_sweeps);
    cfg.ree.threshold = cli.ree_threshold.unwrap_or(cfg.ree.threshold);
    cfg.witness_limit = cli.witness_limit.unwrap_or(cfg.witness_limit);
    for spec in &cli.eps_order {
        let (name, value) = spec.split_once('=').ok_or_else(|| {
            entqfi::Error::Config(format!("--eps-order expects measure=value, got {spec:?}"))
        })?;
        let eps: f64 = value
            .trim()
            .parse()
            .map_err(|e| entqfi::Error::Config(format!("--eps-order {spec:?}: {e}")))?;
        cfg.tolerances.set(name.trim(), eps)?;
    }
    cfg.out_dir = cli.out.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> entqfi::Result<()> {
    let cfg = build_config(cli)?;
    let result = run_experiment(&cfg)?;
    write_outputs(&result, &cfg.out_dir)?;

    let t = &result.timings;
    eprintln!(
        "{} states, {} separable; states {:.1?}, grid search {:.1?}, ordering {:.1?}",
        result.records.len(),
        result.separable_count(),
        t.states,
        t.grid_search,
        t.ordering
    );
    eprintln!(
        "refined {}, unresolved {}",
        result.refined_ids().len(),
        result.unresolved_ids().len()
    );
    for m in Measure::ALL {
        if let Some(c) = result.census(m) {
            let empty = c.counts.iter().flatten().filter(|&&n| n == 0).count();
            eprintln!("{m}: {} pairs, {empty} empty cells", c.total());
        }
    }
    eprintln!("wrote {}", cfg.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
