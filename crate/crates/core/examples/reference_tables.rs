//! Reproduce the three reference tables and report the largest deviation.

use marcumq::laguerre_series::eval_laguerre_series;
use marcumq::reference::{TABLE_ORDERS, TABLE_ROWS};
use marcumq::{MarcumArgs, TruncationPolicy};

fn main() -> marcumq::Result<()> {
    let policy = TruncationPolicy::new(1e-16, 500)?;
    let mut worst: f64 = 0.0;
    for (a, b, expected) in TABLE_ROWS {
        println!("a = {a}, b = {b}");
        for (nu, want) in TABLE_ORDERS.into_iter().zip(expected) {
            let got = eval_laguerre_series(&MarcumArgs::new(nu, a, b)?, &policy, None)?.value;
            worst = worst.max((got - want).abs());
            println!("  nu = {nu:<4} {got:.15}  (table {want:.15})");
        }
    }
    println!("max |diff| = {worst:.2e}");
    Ok(())
}
