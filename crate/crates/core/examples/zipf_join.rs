//! Skewed joins: generate Zipf tables, join them, and compare with the
//! nested-loop result and the cost formula.
//!
//! ```bash
//! cargo run --release -p oblijoin --example zipf_join
//! ```

use oblijoin::audit::oracle_join;
use oblijoin::cluster::{Cluster, ClusterConfig, DatasetStats, DistTable};
use oblijoin::io::gen_zipf;
use oblijoin::relops::{join, Bound};
use oblijoin::runner::join_check;

fn main() -> oblijoin::Result<()> {
    let p = 4;
    for z in [0.0, 0.5, 1.0, 1.5] {
        let (left, _) = gen_zipf(1000, 200, z, 1)?;
        let (right, _) = gen_zipf(800, 200, z, 2)?;
        let rk = left.keys(0)?;
        let sk = right.keys(0)?;
        let r: Vec<(u64, u64)> = rk.iter().enumerate().map(|(i, &k)| (i as u64, k)).collect();
        let s: Vec<(u64, u64)> = sk.iter().enumerate().map(|(i, &k)| (k, i as u64)).collect();

        let mut cluster = Cluster::new(ClusterConfig::new(p, 40, 9))?;
        let out = join(&mut cluster, DistTable::left(&r, p), DistTable::right(&s, p), Bound::Infer)?;
        let mut got: Vec<(u64, u64, u64)> = out.table.real_rows().map(|x| (x.a, x.key, x.c)).collect();
        got.sort_unstable();

        let stats = DatasetStats::from_keys(&rk, &sk);
        let t = cluster.transcript();
        let check = join_check((r.len() + s.len()) as u64, out.bound, p, t.nominal());
        println!(
            "z={z:<3} M={:<6} alpha=({},{}) phi={:.3} oracle match: {}  sent {} (nominal {} vs formula {}) [{}]",
            out.bound,
            stats.alpha1,
            stats.alpha2,
            stats.phi,
            got == oracle_join(&r, &s),
            t.comm_elements(),
            check.measured,
            check.bound,
            if check.ok { "ok" } else { "over" }
        );
    }
    Ok(())
}
