//! The local oblivious primitives, and the access traces that show their
//! memory pattern ignores the data.
//!
//! ```bash
//! cargo run -p oblijoin --example primitives
//! ```

use oblijoin::oprims::{ocompact, odistribute, opartition_quick, osort, scan_local, split_buckets, Direction, Sum, TracedBuffer};
use oblijoin::Record;

fn keys(v: &[Record]) -> Vec<String> {
    v.iter().map(|r| if r.dummy { "_".into() } else { r.key.to_string() }).collect()
}

fn main() {
    let data: Vec<Record> = [5, 1, 4, 1, 3].iter().map(|&k| Record::left(0, k)).collect();

    let mut v = data.clone();
    osort(&mut v, |r: &Record| r.key);
    println!("osort:       {:?}", keys(&v));

    let mut v = data.clone();
    let kept = ocompact(&mut v, &[false, true, false, true, true]);
    println!("ocompact:    {:?} ({kept} kept)", keys(&v));

    let mut v: Vec<Record> = [(7, 4), (8, 1), (9, 3)].iter().map(|&(k, t)| Record { target: t, ..Record::left(0, k) }).collect();
    odistribute(&mut v, |r: &Record| r.target as usize, 5).unwrap();
    println!("odistribute: {:?}", keys(&v));

    let mut v: Vec<Record> = (0..6).map(|k| Record { target: 1 + k % 2, ..Record::left(0, k) }).collect();
    opartition_quick(&mut v, |r: &Record| r.target as usize, &[4, 4]).unwrap();
    for (j, bucket) in split_buckets(v, &[4, 4]).iter().enumerate() {
        println!("bucket {}:    {:?}", j + 1, keys(bucket));
    }

    let mut v = vec![1u64, 3, 1, 0, 5];
    scan_local(&mut v, Direction::Prefix, &Sum);
    println!("prefix sum:  {v:?}");

    // Two inputs of the same length leave identical traces.
    let trace = |ks: &[u64]| {
        let mut b = TracedBuffer::new(ks.iter().map(|&k| Record::left(0, k)).collect());
        osort(&mut b, |r: &Record| r.key);
        b.into_parts().1
    };
    let (a, b) = (trace(&[9, 8, 7, 6, 5, 4, 3, 2]), trace(&[1, 1, 1, 1, 2, 2, 2, 2]));
    println!("osort traces: {} accesses each, identical = {}", a.len(), a == b);
}
