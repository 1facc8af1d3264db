//! Block-length planner on arbitrary velocities and timing.

#![no_main]
use libfuzzer_sys::fuzz_target;
use starcf::experiments::plan_block_length;

fuzz_target!(|data: &[u8]| {
    if data.len() < 24 {
        return;
    }
    let f = |i: usize| f64::from_le_bytes(data[i..i + 8].try_into().unwrap());
    let (v, fc, ts) = (f(0), f(8), f(16));
    let Ok(plans) = plan_block_length(&[v], fc, ts) else { return };
    if let Some(n) = plans[0].first_zero {
        assert!(n >= 1);
    }
});
