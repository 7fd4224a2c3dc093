// Grow CovRT and CART trees on a simulated additive model, predict a few
// points and compare held-out risk.

use covrt::{evaluate, generate, grow, CriterionKind, DgpName, DgpSpec, GrowConfig};

pub fn run_example() -> covrt::Result<()> {
    let (train, _) = generate(&DgpSpec::new(DgpName::Model3, 300, 1))?;
    let (test, _) = generate(&DgpSpec::new(DgpName::Model3, 1000, 2))?;

    for criterion in [CriterionKind::Covrt, CriterionKind::Cart] {
        let tree = grow(&train, &GrowConfig::new(criterion, 4))?;
        let result = evaluate(&tree, &test)?;
        println!(
            "{criterion:>5}: {} leaves, train risk {:.3}, test risk {:.3}, R² {:.3}",
            tree.n_leaves(),
            tree.training_risk(),
            result.l2_risk,
            result.r_squared
        );
        let point = test.row(0);
        println!("       prediction at {:.2?}: {:.3}", &point[..4], tree.predict(&point)?);
    }
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
