//! Command-line parser on arbitrary argument vectors (NUL separated).

#![no_main]
use libfuzzer_sys::fuzz_target;
use starcf::cli;
use starcf::scenario::SystemConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let args = std::iter::once("starcf").chain(text.split('\0'));
    if let Ok(parsed) = cli::parse_args(args) {
        let opts = parsed.options(&SystemConfig::default());
        if parsed.common.trials.is_none() {
            assert_eq!(opts.trials, parsed.command.default_trials());
        }
    }
});
