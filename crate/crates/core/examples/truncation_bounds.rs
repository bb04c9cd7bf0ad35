//! Actual truncation error against the relaxed and sharp bounds.

use marcumq::laguerre_series::{
    laguerre_partial_sums, required_terms, required_terms_tail, truncation_bound,
    truncation_bound_tail,
};
use marcumq::oracle::quadrature_q;
use marcumq::MarcumArgs;

fn main() -> marcumq::Result<()> {
    let args = MarcumArgs::new(3.0, 1.2, 1.6)?;
    let exact = quadrature_q(&args, 1e-13)?.value;
    let partial = laguerre_partial_sums(&args, 20)?;
    println!("{:>3} {:>10} {:>10} {:>10}", "n0", "actual", "sharp", "relaxed");
    for (n0, value) in partial.iter().enumerate().skip(1) {
        println!(
            "{n0:>3} {:>10.2e} {:>10.2e} {:>10.2e}",
            (value - exact).abs(),
            truncation_bound_tail(&args, n0),
            truncation_bound(&args, n0)
        );
    }
    for eps in [1e-3, 1e-6, 1e-13] {
        let relaxed = match required_terms(&args, eps) {
            Ok(n) => n.to_string(),
            Err(e) => e.to_string(),
        };
        println!(
            "eps {eps:.0e}: sharp {} terms, relaxed {relaxed}",
            required_terms_tail(&args, eps, 500)?
        );
    }
    Ok(())
}
