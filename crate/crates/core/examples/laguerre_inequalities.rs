//! Uniform Laguerre bounds and the exponential tail inequality, checked on a sweep.

use marcumq::bounds::{love_bound, sewell_gap, szego_bound, szego_small_order_bound};
use marcumq::special::{laguerre, LaguerreIndex};

fn main() -> marcumq::Result<()> {
    let mut tightest = [f64::INFINITY; 3];
    for n in 0..=80 {
        for step in 1..=60 {
            let x = 0.5 * step as f64;
            let idx = LaguerreIndex::new(n, 1.0)?;
            let l = laguerre(idx, x).abs();
            tightest[0] = tightest[0].min(szego_bound(idx, x)? / l);
            tightest[1] = tightest[1].min(love_bound(idx, x)? / l);
            let idx = LaguerreIndex::new(n, -0.5)?;
            tightest[2] =
                tightest[2].min(szego_small_order_bound(idx, x)? / laguerre(idx, x).abs());
        }
    }
    println!(
        "smallest bound/|L| ratio: szego {:.3}, love {:.3}, small order {:.3}",
        tightest[0], tightest[1], tightest[2]
    );
    for n in [1, 5, 10, 20, 40] {
        let (gap, bound) = sewell_gap(10.0, n)?;
        println!("x = 10, n = {n:>2}: gap {gap:.3e} <= {bound:.3e}");
    }
    Ok(())
}
