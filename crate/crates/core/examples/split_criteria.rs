// Score every split of a small node under both criteria and check the
// identity linking them: IG = ĈS / (P_L P_R).

use covrt::split::{candidate_thresholds, evaluate_split, SideStats};
use covrt::{best_split, cart_impurity_gain, covrt_criterion, ig_cs_identity_check, CriterionKind, Dataset};
use rand::SeedableRng;

pub fn run_example() -> covrt::Result<()> {
    // A noisy step at 0.3 plus one outlier at the right edge.
    let x = vec![0.05, 0.1, 0.2, 0.25, 0.35, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];
    let y = vec![0.1, -0.2, 0.0, 0.2, 1.1, 0.9, 1.0, 1.2, 0.8, 1.0, 1.1, 4.0];
    let data = Dataset::univariate(x, y.clone())?;
    let region = data.root_region();
    let parent = SideStats::from_values(y.iter().copied());
    let parent_risk = parent.sum_sq / parent.n as f64 - (parent.sum / parent.n as f64).powi(2);

    println!("{:>6} {:>4} {:>10} {:>10} {:>10}", "s", "n_L", "CART IG", "CovRT ĈS", "residual");
    for s in candidate_thresholds(&data, &region, 0) {
        let c = evaluate_split(&data, &region, 0, s)?;
        let left = SideStats::from_values(y.iter().zip(data.column(0)).filter(|(_, &x)| x <= s).map(|(&y, _)| y));
        let right = SideStats::from_values(y.iter().zip(data.column(0)).filter(|(_, &x)| x > s).map(|(&y, _)| y));
        let ig = cart_impurity_gain(parent_risk, left, right)?;
        let cs = covrt_criterion(c.n_left, c.n_right, c.sum_left, c.sum_right)?;
        let identity = ig_cs_identity_check(&data, &region, 0, s)?;
        println!("{s:>6.3} {:>4} {ig:>10.5} {cs:>10.5} {:>10.1e}", c.n_left, identity.residual);
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for criterion in [CriterionKind::Cart, CriterionKind::Covrt] {
        let best = best_split(&data, &region, criterion, &mut rng)?.best.expect("non-constant response");
        println!("{criterion} splits at {} ({} | {})", best.threshold, best.n_left, best.n_right);
    }
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
