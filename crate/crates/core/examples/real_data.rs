// Fixed-depth and pruned trees on the benchmark CSVs found in `data/` (or
// the directory named by COVRT_DATA_DIR). Missing files are reported with
// the instructions for fetching them.

use std::path::PathBuf;

use covrt::experiments::{run_table2, Table2Config, SELECTED, TABLE2_DATASETS};

pub fn run_example() -> covrt::Result<()> {
    let dir = std::env::var("COVRT_DATA_DIR").map_or_else(|_| PathBuf::from("data"), PathBuf::from);
    let mut present = Vec::new();
    for dataset in TABLE2_DATASETS {
        let path = dataset.path_in(&dir);
        if path.is_file() {
            present.push((dataset, path));
        } else {
            println!("{}: not found at {}\n  {}", dataset.name, path.display(), dataset.fetch);
        }
    }
    if present.is_empty() {
        return Ok(());
    }
    let report = run_table2(&Table2Config { reps: 10, ..Default::default() }, &present)?;
    println!("{:<10} {:<18} {:>8} {:>8}", "dataset", "method", "L2", "R²");
    for (dataset, _) in &present {
        for method in ["covrt_fixed_depth", "cart_fixed_depth", "covrt_pruned", "cart_pruned"] {
            let get = |metric| report.mean(dataset.name, method, SELECTED, metric).unwrap_or(f64::NAN);
            println!("{:<10} {method:<18} {:>8.3} {:>8.3}", dataset.name, get("l2_risk"), get("r2"));
        }
    }
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
