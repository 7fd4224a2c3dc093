// Weakest-link pruning of a fully grown tree: the nested subtree sequence,
// its α intervals, and the subtree chosen on validation data.

use covrt::{generate, grow_full, prune_sequence, select_alpha, CriterionKind, DgpName, DgpSpec};

pub fn run_example() -> covrt::Result<()> {
    let (train, _) = generate(&DgpSpec::new(DgpName::Model1, 300, 10))?;
    let (validation, _) = generate(&DgpSpec::new(DgpName::Model1, 300, 11))?;
    let tree = grow_full(&train, CriterionKind::Covrt, 5, 0)?;
    let seq = prune_sequence(&tree, &train)?;

    println!("{} subtrees from {} leaves down to the root", seq.len(), tree.n_leaves());
    println!("{:>6} {:>12} {:>12} {:>12}", "leaves", "train risk", "alpha from", "alpha to");
    for k in (0..seq.len()).rev().take(12) {
        let (lo, hi) = seq.alpha_interval(k);
        println!("{:>6} {:>12.4} {:>12.5} {:>12.5}", seq.leaves(k), seq.train_risk(k), lo, hi);
    }

    let chosen = select_alpha(&tree, &train, &validation)?;
    println!(
        "validation picks {} leaves at alpha {:.5} (validation risk {:.3})",
        chosen.tree.n_leaves(),
        chosen.alpha,
        chosen.validation_risk
    );
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
