//! The file workflow the `kycrec` binary wraps: generate a snapshot, run two
//! conditions over it, and report the tables read back from disk.

use kycrec::domain::Condition;
use kycrec::harness::{cmd_generate, cmd_report, cmd_run, RunOptions, TableFormat};
use kycrec::io::load_world;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("kycrec-example-{}", std::process::id()));
    let snapshot = dir.join("world.jsonl");

    let manifest = cmd_generate(None, Some(3), &snapshot)?;
    println!("generated {} (run {})", snapshot.display(), manifest.run_id);
    let world = load_world(&snapshot)?;
    println!(
        "reloaded {} users, {} items",
        world.observables.users.len(),
        world.observables.catalog.len()
    );

    let opts = RunOptions {
        conditions: Some(vec![Condition::Baseline, Condition::AdvancedKycCircles]),
        ks: Some(vec![1, 5]),
        ..RunOptions::default()
    };
    let (run, _) = cmd_run(&snapshot, &opts, &dir.join("run"))?;
    println!("run wrote {} files", run.outputs.len());
    print!("{}", cmd_report(&dir.join("run"), TableFormat::Text)?);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
