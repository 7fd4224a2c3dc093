// How often a depth-1 tree splits on the one informative covariate out of
// five, as the signal strength grows.

use covrt::experiments::{run_fig_accuracy, signal_label, AccuracyConfig};

pub fn run_example() -> covrt::Result<()> {
    let config = AccuracyConfig { reps: 1000, ..Default::default() };
    let report = run_fig_accuracy(&config)?;
    println!("{:>4} {:>8} {:>8} {:>8}", "c1", "random", "cart", "covrt");
    for &c1 in &config.c1_values {
        let acc = |m: &str| report.mean(&signal_label(c1), &format!("{m}_fixed_depth"), 1, "accuracy").unwrap_or(f64::NAN);
        println!("{c1:>4} {:>8.3} {:>8.3} {:>8.3}", acc("random"), acc("cart"), acc("covrt"));
    }
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
