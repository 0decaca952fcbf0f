//! End-to-end run: generate the ensemble, score every state, search the
//! rotation grids, tally pair orderings and write the result files.
//!
//! All QFI values are the mean QFI per particle, `λ_max(C)/2`, in `[0, 2]`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locc::{optimize_with_steps, EulerAngleSet, GridStep, LoccOptimum, REFINE_TOL};
use crate::measures::{concurrence, is_separable, negativity, ree, ReeSolverConfig};
use crate::ordering::{
    census, find_counterexamples, Census, Measure, MeasureRelation, MqfiRelation,
    OrderingTolerances, PairWitness, StateRecord,
};
use crate::qcore::DensityMatrix;
use crate::randgen::{derive_stream, ensemble_state, RngStream};

pub const STATES_CSV: &str = "states.csv";
pub const CENSUS_REPORT: &str = "census_report.txt";
pub const CONFIG_JSON: &str = "config.json";

pub fn plot_file_name(m: Measure) -> String {
    format!("fig1_{}.csv", m.name())
}

const STATE_HEADER: [&str; 12] = [
    "id",
    "separable",
    "concurrence",
    "negativity",
    "ree",
    "ree_converged",
    "qfi_raw",
    "qfi_max",
    "qfi_min",
    "refined",
    "max_angles",
    "min_angles",
];

const PLOT_HEADER: [&str; 4] = ["measure", "qfi_raw", "qfi_max", "qfi_min"];

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub count: usize,
    pub master_seed: u64,
    /// Coarse grid spacing `2π/grid_divisor`.
    pub grid_divisor: usize,
    /// Spacing of the second pass, run only when the first leaves an extreme
    /// at the raw value.
    pub refine_divisor: usize,
    pub tolerances: OrderingTolerances,
    pub ree: ReeSolverConfig,
    /// Witnesses kept per discordant cell.
    pub witness_limit: usize,
    /// Where [`write_outputs`] puts files. Not part of the echo, since it
    /// does not affect any value.
    #[serde(skip, default = "default_out_dir")]
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            count: 1000,
            master_seed: 1,
            grid_divisor: 4,
            refine_divisor: 6,
            tolerances: OrderingTolerances::default(),
            ree: ReeSolverConfig::default(),
            witness_limit: 10,
            out_dir: default_out_dir(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config("state count must be at least 1".into()));
        }
        GridStep::from_divisor(self.grid_divisor)?;
        if self.refine_divisor <= self.grid_divisor {
            return Err(Error::Config(format!(
                "refine divisor {} must exceed grid divisor {}",
                self.refine_divisor, self.grid_divisor
            )));
        }
        if self.witness_limit == 0 {
            return Err(Error::Config("witness limit must be at least 1".into()));
        }
        self.tolerances.validate()?;
        self.ree.validate()
    }

    fn steps(&self) -> Result<(GridStep, GridStep)> {
        Ok((
            GridStep::from_divisor(self.grid_divisor)?,
            GridStep::from_divisor(self.refine_divisor)?,
        ))
    }
}

/// Wall-clock time per phase. Reported on the console only; never written
/// to the output files, which must not vary between runs.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimings {
    pub states: Duration,
    pub grid_search: Duration,
    pub ordering: Duration,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<StateRecord>,
    /// One per measure; empty when there are fewer than two states.
    pub censuses: Vec<Census>,
    /// Discordant-cell witnesses for every measure.
    pub witnesses: Vec<PairWitness>,
    pub timings: PhaseTimings,
}

impl ExperimentResult {
    pub fn census(&self, m: Measure) -> Option<&Census> {
        self.censuses.iter().find(|c| c.measure == m)
    }

    pub fn witnesses_for(&self, m: Measure) -> impl Iterator<Item = &PairWitness> {
        self.witnesses.iter().filter(move |w| w.measure == m)
    }

    pub fn refined_ids(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| r.refined)
            .map(|r| r.id)
            .collect()
    }

    /// States where, after every pass, the maximum or the minimum still sits
    /// at the raw value.
    pub fn unresolved_ids(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| !(r.qfi_max - r.qfi_raw > REFINE_TOL && r.qfi_raw - r.qfi_min > REFINE_TOL))
            .map(|r| r.id)
            .collect()
    }

    pub fn separable_count(&self) -> usize {
        self.records.iter().filter(|r| r.separable).count()
    }
}

struct Scored {
    rho: DensityMatrix,
    separable: bool,
    concurrence: f64,
    negativity: f64,
    ree: f64,
    ree_converged: bool,
}

fn score(rho: DensityMatrix, mut rng: RngStream, cfg: &ReeSolverConfig) -> Scored {
    let sol = ree(&rho, cfg, &mut rng);
    Scored {
        separable: is_separable(&rho),
        concurrence: concurrence(&rho),
        negativity: negativity(&rho),
        ree: sol.value.clamp(0.0, 1.0),
        ree_converged: sol.converged,
        rho,
    }
}

fn record(id: usize, s: &Scored, opt: &LoccOptimum) -> StateRecord {
    StateRecord {
        id,
        separable: s.separable,
        concurrence: s.concurrence,
        negativity: s.negativity,
        ree: s.ree,
        ree_converged: s.ree_converged,
        qfi_raw: opt.raw_value,
        qfi_max: opt.max_value,
        qfi_min: opt.min_value,
        refined: opt.refined,
        max_angles: opt.max_angles,
        min_angles: opt.min_angles,
    }
}

fn run_with<F>(cfg: &ExperimentConfig, count: usize, source: F) -> Result<ExperimentResult>
where
    F: Fn(usize) -> (DensityMatrix, RngStream) + Sync,
{
    cfg.validate()?;
    let (coarse, fine) = cfg.steps()?;

    let start = Instant::now();
    let scored: Vec<Scored> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (rho, rng) = source(i);
            score(rho, rng, &cfg.ree)
        })
        .collect();
    let states = start.elapsed();

    let start = Instant::now();
    let optima: Vec<LoccOptimum> = scored
        .par_iter()
        .map(|s| optimize_with_steps(&s.rho, coarse, fine))
        .collect();
    let grid_search = start.elapsed();

    let start = Instant::now();
    let records: Vec<_> = scored
        .iter()
        .zip(&optima)
        .enumerate()
        .map(|(i, (s, o))| record(i, s, o))
        .collect();
    let (censuses, witnesses) = if records.len() >= 2 {
        let censuses = census(&records, &cfg.tolerances)?;
        let witnesses = Measure::ALL
            .iter()
            .map(|&m| find_counterexamples(&records, m, &cfg.tolerances, cfg.witness_limit))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        (censuses, witnesses)
    } else {
        (Vec::new(), Vec::new())
    };
    let ordering = start.elapsed();

    Ok(ExperimentResult {
        config: cfg.clone(),
        records,
        censuses,
        witnesses,
        timings: PhaseTimings {
            states,
            grid_search,
            ordering,
        },
    })
}

/// Runs the seeded ensemble. State `i` and its REE solver stream depend only
/// on `(master_seed, i)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_with(cfg, cfg.count, |i| ensemble_state(cfg.master_seed, i))
}

/// Runs the pipeline on given states instead of the random ensemble. State
/// `i` gets REE stream `(master_seed, i)`; `cfg.count` is ignored.
pub fn analyze_states(
    states: &[DensityMatrix],
    cfg: &ExperimentConfig,
) -> Result<ExperimentResult> {
    if states.is_empty() {
        return Err(Error::Config("no states to analyze".into()));
    }
    let cfg = ExperimentConfig {
        count: states.len(),
        ..cfg.clone()
    };
    run_with(&cfg, states.len(), |i| {
        (states[i].clone(), derive_stream(cfg.master_seed, i as u64))
    })
}

/// Twelve digits after the decimal point; negative zero and roundoff below
/// the last digit print as plain zero.
pub fn format_value(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn format_angles(a: &EulerAngleSet) -> String {
    a.as_array()
        .iter()
        .map(|x| format!("{x:.6}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_angles(s: &str) -> std::result::Result<EulerAngleSet, String> {
    let parts: Vec<f64> = s
        .split(';')
        .map(|p| p.parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    let arr: [f64; 6] = parts
        .try_into()
        .map_err(|p: Vec<f64>| format!("expected 6 angles, got {}", p.len()))?;
    Ok(EulerAngleSet::from_array(arr))
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

pub fn emit_state_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e| Error::csv(path, e);
    w.write_record(STATE_HEADER).map_err(err)?;
    let mut rows: Vec<_> = result.records.iter().collect();
    rows.sort_by_key(|r| r.id);
    for r in rows {
        w.write_record([
            r.id.to_string(),
            flag(r.separable).into(),
            format_value(r.concurrence),
            format_value(r.negativity),
            format_value(r.ree),
            flag(r.ree_converged).into(),
            format_value(r.qfi_raw),
            format_value(r.qfi_max),
            format_value(r.qfi_min),
            flag(r.refined).into(),
            format_angles(&r.max_angles),
            format_angles(&r.min_angles),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`emit_state_csv`].
pub fn read_state_csv(path: &Path) -> Result<Vec<StateRecord>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = rd.headers().map_err(|e| Error::csv(path, e))?.clone();
    if header.iter().ne(STATE_HEADER) {
        return Err(Error::Config(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header
        )));
    }
    let bad =
        |line: usize, what: String| Error::Config(format!("{}:{line}: {what}", path.display()));
    let mut out = Vec::new();
    for (n, row) in rd.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let line = n + 2;
        let num = |i: usize| {
            row[i]
                .parse::<f64>()
                .map_err(|e| bad(line, format!("{}: {e}", STATE_HEADER[i])))
        };
        let boolean = |i: usize| match &row[i] {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(bad(
                line,
                format!("{}: expected 0 or 1, got {other:?}", STATE_HEADER[i]),
            )),
        };
        out.push(StateRecord {
            id: row[0].parse().map_err(|e| bad(line, format!("id: {e}")))?,
            separable: boolean(1)?,
            concurrence: num(2)?,
            negativity: num(3)?,
            ree: num(4)?,
            ree_converged: boolean(5)?,
            qfi_raw: num(6)?,
            qfi_max: num(7)?,
            qfi_min: num(8)?,
            refined: boolean(9)?,
            max_angles: parse_angles(&row[10]).map_err(|e| bad(line, e))?,
            min_angles: parse_angles(&row[11]).map_err(|e| bad(line, e))?,
        });
    }
    Ok(out)
}

/// One file per measure: the measure and the three QFI values of every
/// state, sorted by measure then id.
pub fn emit_plot_data(result: &ExperimentResult, dir: &Path) -> Result<()> {
    for m in Measure::ALL {
        let path = dir.join(plot_file_name(m));
        let mut rows: Vec<_> = result.records.iter().collect();
        rows.sort_by(|a, b| m.of(a).total_cmp(&m.of(b)).then(a.id.cmp(&b.id)));
        let mut w = csv_writer(&path)?;
        let err = |e| Error::csv(&path, e);
        w.write_record(PLOT_HEADER).map_err(err)?;
        for r in rows {
            w.write_record([m.of(r), r.qfi_raw, r.qfi_max, r.qfi_min].map(format_value))
                .map_err(err)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn write_report(result: &ExperimentResult, out: &mut impl Write) -> std::io::Result<()> {
    let cfg = &result.config;
    let tol = &cfg.tolerances;
    writeln!(out, "# entqfi census report")?;
    writeln!(
        out,
        "# qfi values are the mean QFI per particle, lambda_max(C)/2, in [0, 2]"
    )?;
    writeln!(
        out,
        "# states={} seed={} grid_divisor={} refine_divisor={} witness_limit={}",
        cfg.count, cfg.master_seed, cfg.grid_divisor, cfg.refine_divisor, cfg.witness_limit
    )?;
    writeln!(
        out,
        "# eps concurrence={} negativity={} ree={} mqfi={}",
        tol.concurrence, tol.negativity, tol.ree, tol.mqfi
    )?;
    writeln!(
        out,
        "# pairs are ordered by id; state 1 of a pair has the lower id"
    )?;
    writeln!(out, "# separable={}", result.separable_count())?;
    for c in &result.censuses {
        writeln!(out)?;
        writeln!(out, "[census {}]", c.measure)?;
        let cols: Vec<String> = MqfiRelation::ALL
            .iter()
            .map(|q| format!("mqfi_{}", q.name()))
            .collect();
        writeln!(out, "measure_relation,{}", cols.join(","))?;
        for m in MeasureRelation::ALL {
            let row = c.counts[m.index()].map(|n| n.to_string()).join(",");
            writeln!(out, "{},{row}", m.name())?;
        }
        writeln!(out, "total,{}", c.total())?;
        writeln!(out)?;
        writeln!(out, "[witnesses {}]", c.measure)?;
        writeln!(
            out,
            "measure_relation,mqfi_relation,id_1,id_2,measure_1,measure_2,mqfi_1,mqfi_2"
        )?;
        for w in result.witnesses_for(c.measure) {
            writeln!(
                out,
                "{},{},{},{},{}",
                w.class.measure_relation.name(),
                w.class.mqfi_relation.name(),
                w.id_1,
                w.id_2,
                w.values.map(format_value).join(",")
            )?;
        }
    }
    let join = |ids: Vec<usize>| {
        ids.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    writeln!(out)?;
    writeln!(out, "[refinement]")?;
    let refined = result.refined_ids();
    let unresolved = result.unresolved_ids();
    writeln!(out, "refined,{}", refined.len())?;
    writeln!(out, "refined_ids,{}", join(refined))?;
    writeln!(out, "unresolved,{}", unresolved.len())?;
    writeln!(out, "unresolved_ids,{}", join(unresolved))?;
    Ok(())
}

/// Count tables per measure in the layout of the ordering table, the
/// discordant-cell witnesses, and the states whose grid search never moved
/// one of the extremes off the raw value.
pub fn emit_census_report(result: &ExperimentResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_report(result, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn emit_config(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut json = serde_json::to_string_pretty(&result.config).expect("config serializes");
    json.push('\n');
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Loads a config echo written by [`emit_config`].
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Writes every output file into `dir`, creating it if needed.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    emit_state_csv(result, &dir.join(STATES_CSV))?;
    emit_plot_data(result, dir)?;
    emit_census_report(result, &dir.join(CENSUS_REPORT))?;
    emit_config(result, &dir.join(CONFIG_JSON))
}
