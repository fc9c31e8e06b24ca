#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| weakconc_cli::fuzzing::cli_args(data));
