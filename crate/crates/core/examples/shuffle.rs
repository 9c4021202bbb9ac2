//! Shuffling by key under public padding, and what the network sees.
//!
//! ```bash
//! cargo run -p oblijoin --example shuffle
//! ```

use oblijoin::cluster::{Cluster, ClusterConfig, DistTable};
use oblijoin::relops::{shuffle_by_key, shuffle_random, FnRouter, KeyHasher};

fn main() -> oblijoin::Result<()> {
    // Keys 2 and 3 go to server 1, keys 1 and 4 to server 2.
    let table = DistTable::left(&[(10, 1), (20, 2), (30, 3), (40, 4)], 2);
    let mut cluster = Cluster::new(ClusterConfig::new(2, 40, 7))?;
    let router = FnRouter(|k: u64, _| if k == 2 || k == 3 { 1 } else { 2 });
    let out = shuffle_by_key(&mut cluster, table, |r| (r.key, 0), &router)?;
    for (i, part) in out.parts.iter().enumerate() {
        let keys: Vec<u64> = part.iter().filter(|r| r.is_real()).map(|r| r.key).collect();
        println!("server {}: keys {keys:?} among {} slots", i + 1, part.len());
    }
    println!("sizes seen on the wire: {:?}", cluster.transcript().rounds[0].sizes);

    // A seeded hash over more data, then a uniform random shuffle.
    let rows: Vec<(u64, u64)> = (0..4000).map(|i| (i, i * 31 + 7)).collect();
    let mut cluster = Cluster::new(ClusterConfig::new(4, 40, 7))?;
    let hasher = KeyHasher::new(99, 4);
    let t = shuffle_by_key(&mut cluster, DistTable::left(&rows, 4), |r| (r.key, 0), &hasher)?;
    let t = shuffle_random(&mut cluster, t);
    println!("\nafter shuffle-by-key and a random shuffle: sizes {:?}", t.sizes());
    for round in &cluster.transcript().rounds {
        println!("  {:<16} {:>6} elements ({} nominal)", round.label, round.elements(), round.nominal);
    }
    Ok(())
}
