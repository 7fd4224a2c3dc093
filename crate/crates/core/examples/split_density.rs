// Where depth-1 trees put their split on y = 1 + c1·x + ε: CART drifts to the
// edges on pure noise, CovRT stays central.

use covrt::experiments::{run_fig_density, signal_label, DensityConfig};

const BARS: [char; 9] = [' ', '▁', '▂', '▃', '▄', '▅', '▆', '▇', '█'];

pub fn run_example() -> covrt::Result<()> {
    let config = DensityConfig { reps: 1000, ..Default::default() };
    let report = run_fig_density(&config)?;
    println!("{:<6} {:<8} {:>6} {:>6}  histogram over (0, 1] in tenths", "c1", "method", "edge", "centre");
    for &c1 in &config.c1_values {
        for method in ["random", "cart", "covrt"] {
            let splits = report.values(&signal_label(c1), &format!("{method}_fixed_depth"), 1, "split_point");
            let mut bins = [0usize; 10];
            for &s in &splits {
                bins[((s * 10.0).ceil() as usize).clamp(1, 10) - 1] += 1;
            }
            let share = |lo: usize, hi: usize| bins[lo..hi].iter().sum::<usize>() as f64 / splits.len() as f64;
            let top = *bins.iter().max().unwrap_or(&1) as f64;
            let bars: String = bins.iter().map(|&b| BARS[(b as f64 / top * 8.0).round() as usize]).collect();
            println!("{c1:<6} {method:<8} {:>6.3} {:>6.3}  {bars}", share(0, 1) + share(9, 10), share(4, 6));
        }
    }
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
