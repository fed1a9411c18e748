//! Run every scripted scenario with its defaults and print the verdicts.
//! Pass a directory to also write frames, series.csv and report.json.

use std::collections::BTreeMap;
use std::path::PathBuf;

use perivar::experiments::{run_named, write_scenario, SCENARIOS};

fn main() -> perivar::error::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    for name in SCENARIOS {
        let mut report = run_named(name, &BTreeMap::new())?;
        println!("{name}: {} rows", report.rows.len());
        for (k, v) in &report.verdicts {
            println!("  {k}: {v}");
        }
        if let Some(dir) = &out {
            write_scenario(&mut report, &dir.join(name))?;
        }
    }
    Ok(())
}
