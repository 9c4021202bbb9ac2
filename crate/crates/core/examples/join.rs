//! The general many-to-many join, with the output size inferred or given.
//!
//! ```bash
//! cargo run -p oblijoin --example join
//! ```

use oblijoin::cluster::{Cluster, ClusterConfig, DistTable};
use oblijoin::relops::{join, Bound};

fn main() -> oblijoin::Result<()> {
    let r = [(1, 1), (2, 1), (3, 2)];
    let s = [(1, 10), (2, 20), (2, 21), (3, 30)];
    let config = ClusterConfig::new(2, 40, 3);

    let mut cluster = Cluster::new(config.clone())?;
    let out = join(&mut cluster, DistTable::left(&r, 2), DistTable::right(&s, 2), Bound::Infer)?;
    println!("inferred M = {}", out.bound);
    for (a, b, c) in out.table.rows().filter_map(|r| r.joined()) {
        println!("  ({a}, {b}, {})", c.unwrap());
    }
    println!("rows per server: {:?}", out.table.sizes());

    // A larger public bound hides the true output size behind dummies.
    let mut cluster = Cluster::new(config)?;
    let out = join(&mut cluster, DistTable::left(&r, 2), DistTable::right(&s, 2), Bound::Given(10))?;
    let real = out.table.real_rows().count();
    println!("\nwith M = 10: {real} real rows in {} slots", out.table.len());
    let t = cluster.transcript();
    println!("{} rounds, {} elements sent, {} nominal", t.rounds.len(), t.comm_elements(), t.nominal());
    Ok(())
}
