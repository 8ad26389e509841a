//! Exhaustive check, over every outcome of small experiments, that the
//! p-values are valid and the α-cuts keep their coverage.

use fuzzy_pvalue::inference::{BergerBoosConfig, InferenceConfig, Variant};
use fuzzy_pvalue::verify::{verify, VerifyGrids, DEFAULT_OUTCOME_GUARD};

fn main() -> fuzzy_pvalue::Result<()> {
    let cfg = InferenceConfig::default();
    let grids = VerifyGrids::default();
    let runs = [
        (3, 3, Variant::Plain),
        (4, 2, Variant::Plain),
        (5, 5, Variant::BergerBoos(BergerBoosConfig::new(0.01)?)),
    ];
    for (m, n, variant) in runs {
        let r = verify(m, n, &variant, &cfg, &grids, Some(DEFAULT_OUTCOME_GUARD))?;
        println!(
            "m = {m}, n = {n}, {:<11} cells {:>5}  worst excess {:+.3e}  worst coverage deficit {:+.3e}  {}",
            variant.name(),
            r.cells.len(),
            r.worst_excess.0,
            r.worst_coverage_deficit.0,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}
