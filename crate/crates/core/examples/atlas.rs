//! Verdict counts over the default grid, per setting.

use std::collections::BTreeMap;

use besov_embeddings::cli::{atlas_rows, AtlasArgs};
use besov_embeddings::classifier::Setting;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = AtlasArgs {
        setting: None,
        p: ["1/2", "1", "2", "4", "inf"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
        q: ["1/2", "1", "2", "4", "inf"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
        n: vec![1, 2],
        shifts: ["-1/2", "0", "1/2"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
        filter: Vec::new(),
    };
    let rows = atlas_rows(&args).map_err(|e| e.to_string())?;
    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for r in &rows {
        *counts.entry((r.setting.to_string(), r.verdict.to_string())).or_default() += 1;
    }
    for setting in Setting::ALL {
        println!("{setting}:");
        for ((s, verdict), n) in &counts {
            if *s == setting.to_string() {
                println!("  {verdict:<14} {n}");
            }
        }
    }
    let broken = rows.iter().filter(|r| r.partition != "ok").count();
    println!("{} rows, {broken} failing the partition check", rows.len());
    Ok(())
}
