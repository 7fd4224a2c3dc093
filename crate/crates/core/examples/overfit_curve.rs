// Training and test risk along the pruning path of fully grown trees on a
// heteroskedastic model; the test curves bottom out and turn up again.

use covrt::experiments::{run_fig_overfit, OverfitConfig};

pub fn run_example() -> covrt::Result<()> {
    let config = OverfitConfig { reps: 20, n_train: 1500, n_test: 1500, ..Default::default() };
    let report = run_fig_overfit(&config)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "leaves", "covrt train", "covrt test", "cart train", "cart test");
    for leaves in 1..=config.max_leaves as i64 {
        let get = |set: &str, m: &str| report.mean(set, &format!("{m}_pruned"), leaves, "l2_risk").unwrap_or(f64::NAN);
        println!(
            "{leaves:>6} {:>12.3} {:>12.3} {:>12.3} {:>12.3}",
            get("overfit5/train", "covrt"),
            get("overfit5/test", "covrt"),
            get("overfit5/train", "cart"),
            get("overfit5/test", "cart")
        );
    }
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
