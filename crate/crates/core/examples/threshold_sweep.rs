//! Detection probability over a sweep of thresholds b at fixed (ν, a).
//!
//! The Laguerre coefficients depend only on (ν, a), so one cache serves
//! the whole sweep. Where the series refuses the arguments as
//! ill-conditioned the sweep falls back to quadrature.

use marcumq::laguerre_series::{cache_build, eval_laguerre_series};
use marcumq::oracle::quadrature_q;
use marcumq::{Error, MarcumArgs, TruncationPolicy};

fn main() -> marcumq::Result<()> {
    let (nu, a) = (4.0, 2.0);
    let policy = TruncationPolicy::default();
    let cache = cache_build(nu, a, 120)?;
    println!("{:>6} {:>18} {:>6} method", "b", "Q", "terms");
    for k in 0..=24 {
        let b = 0.25 * k as f64;
        let args = MarcumArgs::new(nu, a, b)?;
        let r = match eval_laguerre_series(&args, &policy, Some(&cache)) {
            Err(Error::IllConditioned(_)) => quadrature_q(&args, 1e-13)?,
            other => other?,
        };
        println!("{b:>6.2} {:>18.15} {:>6} {}", r.value, r.terms_used, r.method);
    }
    Ok(())
}
