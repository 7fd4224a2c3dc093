// Save a tree as a versioned JSON model file, load it back and show that
// the copy predicts identically.

use covrt::io::{read_csv, write_model};
use covrt::{grow, load_model, save_model, CategoricalPolicy, CriterionKind, GrowConfig};

const CSV: &str = "\
size,rooms,district,price
52,2,north,210
75,3,north,265
40,1,south,150
98,4,south,330
63,2,east,220
120,5,east,410
85,3,north,300
45,2,south,170
";

pub fn run_example() -> covrt::Result<()> {
    // The `district` column is one-hot encoded into district=east, ...
    let data = read_csv(CSV.as_bytes(), "price", CategoricalPolicy::OneHot)?;
    println!("columns: {:?}", data.column_names());
    let tree = grow(&data, &GrowConfig::new(CriterionKind::Covrt, 2).min_node_size(1))?;

    let path = std::env::temp_dir().join(format!("covrt-example-{}.json", std::process::id()));
    save_model(&tree, &path)?;
    let loaded = load_model(&path)?;
    std::fs::remove_file(&path)?;
    assert_eq!(loaded, tree);
    assert_eq!(loaded.predict_dataset(&data)?, tree.predict_dataset(&data)?);

    let mut json = Vec::new();
    write_model(&tree, &mut json)?;
    println!("{}", String::from_utf8_lossy(&json));
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
