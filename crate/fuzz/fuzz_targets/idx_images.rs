#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Must never panic, and an accepted payload must be internally
    // consistent.
    if let Ok(images) = fluxsnn::data::parse_idx_images(data) {
        assert_eq!(images.pixels.len(), images.count * images.rows * images.cols);
    }
});
