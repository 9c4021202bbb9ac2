//! Repeating rows by a count into an output of public size M.
//!
//! ```bash
//! cargo run -p oblijoin --example expansion
//! ```

use oblijoin::cluster::{Cluster, ClusterConfig, DistTable};
use oblijoin::relops::expand;
use oblijoin::Record;

fn main() -> oblijoin::Result<()> {
    let counts = [1, 3, 1, 0, 5, 2, 1, 1, 2];
    let rows: Vec<Record> = counts.iter().enumerate().map(|(i, &d)| Record::counted(i as u64 + 1, 0, d)).collect();
    let table = DistTable::from_rows(vec!["X".into(), "D".into()], rows, 3);
    let mut cluster = Cluster::new(ClusterConfig::new(3, 40, 11))?;
    let out = expand(&mut cluster, table, 18)?;

    for (i, part) in out.parts.iter().enumerate() {
        let cells: Vec<String> = part.iter().map(|r| if r.dummy { "_".into() } else { format!("x{}", r.a) }).collect();
        println!("server {}: {}", i + 1, cells.join(" "));
    }
    for round in &cluster.transcript().rounds {
        println!("  {:<12} {:>3} elements", round.label, round.elements());
    }
    Ok(())
}
