// Fixed-depth and validation-pruned test risk on the four additive models.
// The full run uses 500 replications; this one uses 20.

use covrt::experiments::{format_table1, run_table1, Table1Config};

pub fn run_example() -> covrt::Result<()> {
    let config = Table1Config { reps: 20, ..Default::default() };
    let report = run_table1(&config)?;
    print!("{}", format_table1(&report, &config));
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
