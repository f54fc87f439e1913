//! File-level commands behind the `kycrec` binary: generate a world snapshot,
//! run conditions over it, and report the resulting tables.
//!
//! Run directory layout:
//!
//! ```text
//! <out>/run.manifest.json
//! <out>/plot_data.csv
//! <out>/tables/<metric>_at_<k>.csv
//! <out>/logs/<Condition>.interactions.jsonl
//! <out>/logs/<Condition>.lists.jsonl
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::info;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::Condition;
use crate::error::{Error, Result};
use crate::io::{file_sha256, load_world, save_jsonl, save_world};
use crate::metrics::{plot_data_csv, Metric, MetricTable};
use crate::simulator::{generate_world, run_conditions, ClickModel, ScenarioConfig};

pub const MANIFEST_FILE: &str = "run.manifest.json";
pub const PLOT_DATA_FILE: &str = "plot_data.csv";
pub const TABLES_DIR: &str = "tables";
pub const LOGS_DIR: &str = "logs";

/// Binds a command's outputs to the exact inputs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Derived from the command, config hash and inputs, so equal inputs give equal ids.
    pub run_id: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub finished_at: u64,
    /// Input file path and its SHA-256.
    pub inputs: Vec<(String, String)>,
    /// Output paths relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub conditions: Vec<Condition>,
    pub ks: Vec<usize>,
}

impl RunManifest {
    fn new(command: &str, cfg: &ScenarioConfig, inputs: Vec<(String, String)>) -> Self {
        let config_sha256 = cfg.hash();
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(config_sha256.as_bytes());
        for (_, sha) in &inputs {
            h.update(sha.as_bytes());
        }
        RunManifest {
            run_id: hex::encode(h.finalize())[..16].to_string(),
            command: command.to_string(),
            config_sha256,
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: now(),
            finished_at: 0,
            inputs,
            outputs: Vec::new(),
            conditions: cfg.conditions.clone(),
            ks: cfg.ks.clone(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
    }

    fn save(&mut self, path: &Path) -> Result<()> {
        self.finished_at = now();
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Process exit code for an error: 1 for usage and config problems, 2 for data.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig { .. } | Error::InvalidArgument(_) | Error::UnknownCondition(_) => 1,
        _ => 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Text,
    Csv,
}

impl TableFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(TableFormat::Text),
            "csv" => Ok(TableFormat::Csv),
            _ => Err(Error::InvalidArgument(format!(
                "unknown format `{s}` (expected csv or text)"
            ))),
        }
    }

    pub fn render(self, tables: &[MetricTable]) -> String {
        let mut out = String::new();
        for t in tables {
            match self {
                TableFormat::Text => {
                    let _ = writeln!(out, "{}", t.to_text());
                }
                TableFormat::Csv => {
                    let _ = writeln!(out, "# {}\n{}", t.file_stem(), t.to_csv());
                }
            }
        }
        out
    }
}

/// Manifest path written next to a world snapshot.
pub fn snapshot_manifest_path(snapshot: &Path) -> PathBuf {
    let stem = snapshot
        .file_stem()
        .map_or_else(|| "world".into(), |s| s.to_string_lossy().into_owned());
    snapshot.with_file_name(format!("{stem}.manifest.json"))
}

/// Loads (or defaults) the scenario, applies a seed override and writes the
/// snapshot plus its manifest.
pub fn cmd_generate(config: Option<&Path>, seed: Option<u64>, out: &Path) -> Result<RunManifest> {
    let mut cfg = match config {
        Some(p) => ScenarioConfig::load(p).map_err(|e| match e {
            Error::Io(io) => Error::config("--config", format!("{}: {io}", p.display())),
            other => other,
        })?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let inputs = config
        .map(|p| Ok::<_, Error>(vec![(p.display().to_string(), file_sha256(p)?)]))
        .transpose()?
        .unwrap_or_default();
    let mut manifest = RunManifest::new("generate", &cfg, inputs);
    let world = generate_world(&cfg)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    save_world(&world, out)?;
    info!(
        "wrote {} ({} users, {} items, {} accounts)",
        out.display(),
        world.observables.users.len(),
        world.observables.catalog.len(),
        world.observables.graph.len()
    );
    manifest.outputs.push(
        out.file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
    );
    manifest.save(&snapshot_manifest_path(out))?;
    Ok(manifest)
}

/// Overrides applied on top of the snapshot's scenario for one run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub conditions: Option<Vec<Condition>>,
    pub ks: Option<Vec<usize>>,
    pub click_model: Option<ClickModel>,
    /// Reseeds the click stream only; the world is fixed by the snapshot.
    pub seed: Option<u64>,
}

/// Runs conditions over a snapshot and writes tables, plot data, logs and a manifest.
pub fn cmd_run(
    world_path: &Path,
    opts: &RunOptions,
    out: &Path,
) -> Result<(RunManifest, Vec<MetricTable>)> {
    if !world_path.is_file() {
        return Err(Error::Data(format!(
            "world snapshot {} not found",
            world_path.display()
        )));
    }
    let mut world = load_world(world_path)
        .map_err(|e| Error::Data(format!("{}: {e}", world_path.display())))?;
    let cfg = &mut world.config;
    if let Some(c) = &opts.conditions {
        cfg.conditions = c.clone();
    }
    if let Some(ks) = &opts.ks {
        cfg.ks = ks.clone();
    }
    if let Some(m) = opts.click_model {
        cfg.click_model = m;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    cfg.validate()?;

    let inputs = vec![(world_path.display().to_string(), file_sha256(world_path)?)];
    let mut manifest = RunManifest::new("run", &world.config, inputs);
    let conditions = world.config.conditions.clone();
    let experiment = run_conditions(&world, &conditions)?;

    let tables_dir = out.join(TABLES_DIR);
    let logs_dir = out.join(LOGS_DIR);
    std::fs::create_dir_all(&tables_dir)?;
    std::fs::create_dir_all(&logs_dir)?;
    for t in &experiment.tables {
        let rel = format!("{TABLES_DIR}/{}.csv", t.file_stem());
        std::fs::write(out.join(&rel), t.to_csv())?;
        manifest.outputs.push(rel);
    }
    std::fs::write(out.join(PLOT_DATA_FILE), plot_data_csv(&experiment.tables))?;
    manifest.outputs.push(PLOT_DATA_FILE.into());
    for run in &experiment.runs {
        let interactions = format!("{LOGS_DIR}/{}.interactions.jsonl", run.condition.name());
        save_jsonl(&out.join(&interactions), &run.log)?;
        let lists = format!("{LOGS_DIR}/{}.lists.jsonl", run.condition.name());
        save_jsonl(&out.join(&lists), &run.lists)?;
        manifest.outputs.extend([interactions, lists]);
        info!(
            "{}: {} lists, {} log records",
            run.condition,
            run.lists.len(),
            run.log.len()
        );
    }
    manifest.save(&out.join(MANIFEST_FILE))?;
    Ok((manifest, experiment.tables))
}

/// Table files a run over `ks` is expected to contain.
pub fn expected_tables(ks: &[usize]) -> Vec<(Metric, usize, String)> {
    Metric::ALL
        .into_iter()
        .flat_map(|m| {
            ks.iter()
                .map(move |&k| (m, k, format!("{TABLES_DIR}/{}_at_{k}.csv", m.name())))
        })
        .collect()
}

/// Reads every metric table of a run directory, in metric then k order.
pub fn load_tables(run_dir: &Path) -> Result<Vec<MetricTable>> {
    let manifest_path = run_dir.join(MANIFEST_FILE);
    let ks = if manifest_path.is_file() {
        RunManifest::load(&manifest_path)?.ks
    } else {
        ScenarioConfig::default().ks
    };
    let expected = expected_tables(&ks);
    let missing: Vec<&str> = expected
        .iter()
        .filter(|(_, _, rel)| !run_dir.join(rel).is_file())
        .map(|(_, _, rel)| rel.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Data(format!(
            "{} is missing metric files: {}",
            run_dir.display(),
            missing.join(", ")
        )));
    }
    expected
        .iter()
        .map(|(m, k, rel)| {
            let path = run_dir.join(rel);
            let text = std::fs::read_to_string(&path)?;
            MetricTable::from_csv(*m, *k, &text)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Renders every table of a run directory.
pub fn cmd_report(run_dir: &Path, format: TableFormat) -> Result<String> {
    Ok(format.render(&load_tables(run_dir)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::config("users", "bad")), 1);
        assert_eq!(exit_code(&Error::UnknownCondition("x".into())), 1);
        assert_eq!(exit_code(&Error::Data("x".into())), 2);
    }

    #[test]
    fn expected_tables_cover_every_metric_and_k() {
        let t = expected_tables(&[1, 3, 5]);
        assert_eq!(t.len(), 9);
        assert!(t.iter().any(|(_, _, p)| p == "tables/ndcg_at_3.csv"));
    }

    #[test]
    fn manifest_beside_snapshot() {
        assert_eq!(
            snapshot_manifest_path(Path::new("out/world.jsonl")),
            PathBuf::from("out/world.manifest.json")
        );
    }

    #[test]
    fn format_parse() {
        assert_eq!(TableFormat::parse("CSV").unwrap(), TableFormat::Csv);
        assert!(TableFormat::parse("xml").is_err());
    }
}
