//! Prefix and keyed scans across servers with 2(p-1) messages.
//!
//! ```bash
//! cargo run -p oblijoin --example prefix_scan
//! ```

use oblijoin::cluster::{Cluster, ClusterConfig};
use oblijoin::oprims::{Direction, KeyValue, Keyed, Max, Sum};
use oblijoin::relops::scan_distributed;

fn main() -> oblijoin::Result<()> {
    let mut cluster = Cluster::new(ClusterConfig::new(3, 40, 1))?;
    let parts = vec![vec![1u64, 3, 1], vec![0, 5, 2], vec![1, 1, 2]];
    let sums = scan_distributed(&mut cluster, parts, Direction::Prefix, &Sum);
    println!("prefix sums: {sums:?}");
    println!("messages: {}", cluster.transcript().comm_elements());

    // Degree of every key: ranks inside key runs, then the run maximum
    // spread backwards.
    let keys = vec![vec![1u64, 1, 2], vec![2, 2, 3], vec![3, 3, 3]];
    let ones: Vec<Vec<_>> = keys.iter().map(|p| p.iter().map(|&k| KeyValue::new(k, 1u64)).collect()).collect();
    let ranks = scan_distributed(&mut cluster, ones, Direction::Prefix, &Keyed::prefix(Sum));
    let degrees = scan_distributed(&mut cluster, ranks.clone(), Direction::Suffix, &Keyed::suffix(Max));
    let show = |v: &Vec<Vec<KeyValue<u64>>>| -> Vec<Vec<u64>> { v.iter().map(|p| p.iter().map(|x| x.value).collect()).collect() };
    println!("keys:    {keys:?}");
    println!("ranks:   {:?}", show(&ranks));
    println!("degrees: {:?}", show(&degrees));
    Ok(())
}
