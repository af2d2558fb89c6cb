#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ckpt) = fluxsnn::data::parse_checkpoint(text) {
        // Accepted checkpoints are well-formed and re-render stably.
        assert_eq!(ckpt.levels.len(), ckpt.k * ckpt.n);
        let max = ckpt.config.max_level();
        assert!(ckpt.levels.iter().all(|&l| l <= max));

        let mut matrix = fluxsnn::plasticity::SynapseMatrix::new(
            ckpt.k,
            ckpt.n,
            ckpt.config.weight_levels,
        )
        .unwrap();
        for s in 0..ckpt.k {
            for i in 0..ckpt.n {
                matrix.set_level(s, i, ckpt.levels[s * ckpt.n + i]).unwrap();
            }
        }
        let rendered = fluxsnn::data::format_checkpoint(&ckpt.config, &matrix);
        let again = fluxsnn::data::parse_checkpoint(&rendered).expect("round trip parses");
        assert_eq!(again.levels, ckpt.levels);
        assert_eq!(again.config, ckpt.config);
    }
});
