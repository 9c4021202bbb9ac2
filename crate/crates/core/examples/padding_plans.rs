//! Per-sender bucket bounds for shuffles and expansion.
//!
//! ```bash
//! cargo run -p oblijoin --example padding_plans
//! ```

use oblijoin::padding::{pad_expansion, pad_shuffle_by_key, shuffle_by_key_bound};

fn main() {
    for sigma in [10, 40, 80] {
        let (c, u) = shuffle_by_key_bound(1 << 20, 16, sigma);
        println!("n=2^20 p=16 sigma={sigma:<3} slack c={c:.4}  bucket bound U={u}");
    }

    let plan = pad_shuffle_by_key(&[1000, 10, 0, 400], 4, 40);
    println!("\nuneven senders {:?}", plan.sizes);
    for i in 0..plan.p {
        println!(
            "  sender {i}: c={:.3} closed form {:>5} on the wire {:>5}",
            plan.slack[i], plan.closed_form[i], plan.bounds[i]
        );
    }
    println!("  padded volume {} for {} real elements", plan.volume(), plan.sizes.iter().sum::<usize>());

    let plan = pad_expansion(&[100; 10], 1000, 100_000, 10, 40);
    println!(
        "\nexpansion n_i=100 N=1000 M=1e5 p=10: closed form {} capped to {}",
        plan.closed_form[0], plan.bounds[0]
    );
}
