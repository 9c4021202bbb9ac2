//! Distributed sorting in four fixed all-to-all rounds.
//!
//! ```bash
//! cargo run -p oblijoin --example column_sort
//! ```

use oblijoin::cluster::{Cluster, ClusterConfig, DistTable};
use oblijoin::relops::{layout, sort_distributed};

fn main() -> oblijoin::Result<()> {
    let p = 4;
    let rows: Vec<(u64, u64)> = (0..72).map(|i| (i, (i * 37) % 101)).collect();
    let table = DistTable::left(&rows, p);
    let r = layout::column_rows(&table.sizes());
    let mut cluster = Cluster::new(ClusterConfig::new(p, 40, 1))?;
    let sorted = sort_distributed(&mut cluster, table, |r| r.key);

    for (i, part) in sorted.parts.iter().enumerate() {
        let keys: Vec<u64> = part.iter().filter(|r| r.is_real()).map(|r| r.key).collect();
        println!("server {}: {keys:?}", i + 1);
    }
    let t = cluster.transcript();
    println!("\nrows per column r = {r}, N = 72 = p·r");
    for round in &t.rounds {
        println!("  {:<16} {:>4} elements", round.label, round.elements());
    }
    println!("total {} = 3N", t.comm_elements());
    Ok(())
}
