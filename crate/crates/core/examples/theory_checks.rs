// Numerical checks of the guarantees behind the covariance criterion on one
// sample: the per-node lower bound on the best ĈS, the depth-K risk bound,
// and the inner-product form of ĈS.

use covrt::theory::{check_lemma1, check_prop1, check_thm1, check_thm3, NodeStatus};
use covrt::{generate, grow, tv_norm, CriterionKind, DgpName, DgpSpec, GrowConfig};

pub fn run_example() -> covrt::Result<()> {
    let (data, g) = generate(&DgpSpec::new(DgpName::Model4, 300, 5))?;
    println!("‖g‖_TV = {}", tv_norm(&g)?);

    for k in 1..=5 {
        let prefix = grow(&data, &GrowConfig::new(CriterionKind::Covrt, k - 1).min_node_size(1))?;
        let lemma = check_lemma1(&prefix, &data, &g)?;
        let checked = lemma.nodes.iter().filter(|n| n.status == NodeStatus::Checked).count();
        let bound = check_thm3(&data, &g, k, 1)?;
        println!(
            "K={k}: {checked} leaves checked, {} violations; risk {:.3} ≤ {:.3} + {:.3} = {:.3}: {}",
            lemma.violations(),
            bound.tree_risk,
            bound.g_risk,
            bound.bound - bound.g_risk,
            bound.bound,
            bound.holds()
        );
    }

    let c = check_prop1(&data, &data.root_region(), 1, 0.5)?;
    println!("inner product² {:.6e} vs ĈS {:.6e}", c.inner_product_squared, c.covariance_squared);

    let linear = check_thm1(1.0, 100_000, 7)?;
    println!(
        "linear model: max ĈS {:.6} vs 1/64, split at {:.4}",
        linear.fit.covariance_squared, linear.fit.split_point
    );
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
