//! Evaluate Q_ν(a, b) at one point with the Laguerre series.
//!
//! cargo run --example point_value -- 7.7 2.2 2.6

use marcumq::laguerre_series::eval_laguerre_series;
use marcumq::{MarcumArgs, TruncationPolicy};

fn main() -> marcumq::Result<()> {
    let v: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("number")).collect();
    let (nu, a, b) = match v[..] {
        [nu, a, b] => (nu, a, b),
        _ => (7.7, 2.2, 2.6),
    };
    let args = MarcumArgs::new(nu, a, b)?;
    let report = eval_laguerre_series(&args, &TruncationPolicy::default(), None)?;
    println!("Q_{nu}({a}, {b}) = {:.15}", report.value);
    println!("terms used: {}, error bound: {:.2e}", report.terms_used, report.error_bound);
    Ok(())
}
