//! Checking obliviousness: same-size inputs must look identical to the
//! network and to memory, and the leaky controls must be caught.
//!
//! ```bash
//! cargo run --release -p oblijoin --example audit
//! ```

use oblijoin::audit::{check_comm_oblivious, check_comp_oblivious, failure_probe, CommOperator, Primitive, ProbeConfig, SizeProfile, SlackMode};
use oblijoin::cluster::ClusterConfig;

fn main() {
    let config = ClusterConfig::new(4, 40, 2024);
    let profile = SizeProfile::balanced(4, 400, 300, 1200);
    for op in CommOperator::PADDED.into_iter().chain([CommOperator::LeakyShuffle]) {
        let v = check_comm_oblivious(op, &profile, 10, &config, 1);
        println!("{:<36} {}", v.check_id, if v.passed { "pass" } else { "FAIL" });
        if let Some(w) = v.witness {
            println!("    witness: {}", serde_json::to_string(&w).unwrap());
        }
    }

    for prim in Primitive::OBLIVIOUS.into_iter().chain([Primitive::NaiveQuicksort]) {
        let v = check_comp_oblivious(prim, 256, 10, 1);
        println!("{:<36} {}", v.check_id, if v.passed { "pass" } else { "FAIL" });
    }

    for mode in [SlackMode::Theorem, SlackMode::Zero] {
        let out = failure_probe(&ProbeConfig {
            servers: 4,
            per_server: 256,
            sigma: 10,
            trials: 1000,
            seed: 3,
            mode,
        });
        println!("probe {mode:?}: {} overflows in {} trials (budget 2^-10)", out.overflows, out.trials);
    }
}
