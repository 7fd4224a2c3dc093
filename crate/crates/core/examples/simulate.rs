// Draw from each simulation model and compare the sample against the
// noiseless regression function returned alongside it.

use covrt::io::write_dataset_csv;
use covrt::{generate, tv_norm, DgpName, DgpSpec};

pub fn run_example() -> covrt::Result<()> {
    for name in DgpName::ALL {
        let spec = match name {
            DgpName::SimpleLinear => DgpSpec::simple_linear(1.0, 0.5, 2000, 3),
            _ => DgpSpec::new(name, 2000, 3),
        };
        let (data, g) = generate(&spec)?;
        let residual: f64 = (0..data.n_rows())
            .map(|i| (data.response()[i] - g.eval(&data.row(i))).powi(2))
            .sum::<f64>()
            / data.n_rows() as f64;
        println!(
            "{name:<14} p = {:>2}, ‖g‖_TV = {:>5.2}, mean squared noise {residual:.3}",
            data.n_features(),
            tv_norm(&g)?
        );
    }

    let (small, _) = generate(&DgpSpec::new(DgpName::Cubic1d, 4, 0))?;
    let mut out = Vec::new();
    write_dataset_csv(&small, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

fn main() -> covrt::Result<()> {
    run_example()
}
