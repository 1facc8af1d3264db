//! Config loader on arbitrary bytes: never panics, and accepted configs
//! survive a JSON round trip. Small accepted configs are built end to end.

#![no_main]
use libfuzzer_sys::fuzz_target;
use starcf::closed_form::ClosedForm;
use starcf::scenario::{Scenario, SystemConfig};
use starcf::system::SystemModel;

const MAX_INPUT_SIZE: usize = 16 * 1024;

fuzz_target!(|data: &[u8]| {
    if data.len() > MAX_INPUT_SIZE {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = SystemConfig::from_json_str(text) else { return };
    let back = SystemConfig::from_json_str(&cfg.to_json()).expect("echoed config parses");
    assert_eq!(back.hash_hex(), cfg.hash_hex());

    let size = cfg.num_aps * cfg.antennas_per_ap * cfg.num_users();
    if size > 64 || cfg.num_elements() > 16 || cfg.block_length > 256 {
        return;
    }
    let Ok(scen) = Scenario::from_seed(&cfg) else { return };
    let Ok(model) = SystemModel::new(scen) else { return };
    if let Ok(se) = ClosedForm::new(&model).se_all() {
        assert!(se.iter().all(|s| *s >= 0.0));
    }
});
