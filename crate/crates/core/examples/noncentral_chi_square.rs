//! Noncentral chi-square survival function via Q_{k/2}(√λ, √t).

use marcumq::alt_series::eval_canonical;
use marcumq::{MarcumArgs, TruncationPolicy};

/// P(X > t) for X ~ χ'²(k, λ).
fn ncx2_sf(k: f64, lambda: f64, t: f64) -> marcumq::Result<f64> {
    let args = MarcumArgs::new(0.5 * k, lambda.sqrt(), t.sqrt())?;
    Ok(eval_canonical(&args, &TruncationPolicy::default())?.value)
}

fn main() -> marcumq::Result<()> {
    for (k, lambda, t) in [(2.0, 1.0, 3.0), (5.0, 2.5, 8.0), (3.0, 400.0, 400.0)] {
        println!("k = {k}, lambda = {lambda}, t = {t}: P(X > t) = {:.15}", ncx2_sf(k, lambda, t)?);
    }
    Ok(())
}
