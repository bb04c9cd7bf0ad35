//! Evaluate one point with all four methods and print their spread.

use marcumq::cli::{evaluate, max_spread};
use marcumq::{MarcumArgs, Method};

fn main() -> marcumq::Result<()> {
    let args = MarcumArgs::new(0.5, 2.2, 1.6)?;
    let mut values = Vec::new();
    for method in Method::ALL {
        let r = evaluate(method, &args, 1e-13, 500, false, None)?;
        println!(
            "{:<15} {:.15}  terms {:>3}  bound {:.1e}",
            method, r.value, r.terms_used, r.error_bound
        );
        values.push(r.value);
    }
    println!("spread {:.1e}", max_spread(&values));
    Ok(())
}
