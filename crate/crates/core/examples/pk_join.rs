//! Joining against a primary-key table. Duplicate left keys travel as one
//! representative each; the rest follow at random.
//!
//! ```bash
//! cargo run -p oblijoin --example pk_join
//! ```

use oblijoin::cluster::{Cluster, ClusterConfig, DistTable};
use oblijoin::relops::pk_join;

fn main() -> oblijoin::Result<()> {
    let orders: Vec<(u64, u64)> = (0..12).map(|i| (100 + i, i % 5)).collect();
    let customers = [(0, 1000), (1, 1001), (2, 1002), (4, 1004)];
    let mut cluster = Cluster::new(ClusterConfig::new(3, 40, 5))?;
    let out = pk_join(&mut cluster, DistTable::left(&orders, 3), DistTable::right(&customers, 3))?;

    for (i, part) in out.parts.iter().enumerate() {
        println!("server {}:", i + 1);
        for (a, b, c) in part.iter().filter_map(|r| r.joined()) {
            println!("  order {a} customer {b} -> {}", c.map_or("none".to_string(), |c| c.to_string()));
        }
    }
    let n1 = orders.len() as u64;
    let n2 = customers.len() as u64;
    println!(
        "\nelements sent {} (nominal {} = 2N1 + N2 = {})",
        cluster.transcript().comm_elements(),
        cluster.transcript().nominal(),
        2 * n1 + n2
    );

    let mut cluster = Cluster::new(ClusterConfig::new(3, 40, 5))?;
    let err = pk_join(&mut cluster, DistTable::left(&orders, 3), DistTable::right(&[(1, 1), (1, 2)], 3)).unwrap_err();
    println!("duplicate primary key: {err}");
    Ok(())
}
