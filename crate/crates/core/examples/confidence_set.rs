//! Strong α-cuts of the membership function are confidence sets for θ.
//! Smaller α gives wider, nested sets.

use fuzzy_pvalue::inference::{confidence_cut_refined, default_theta_grid, mu_curve, InferenceConfig, Variant};
use fuzzy_pvalue::tail::TwoSampleData;

fn main() -> fuzzy_pvalue::Result<()> {
    let data = TwoSampleData::new(4, 10, 17, 20)?;
    let cfg = InferenceConfig::default();
    let curve = mu_curve(&data, default_theta_grid(), &cfg)?;

    for alpha in [0.01, 0.05, 0.1, 0.25, 0.5] {
        let cut = confidence_cut_refined(&data, &curve, alpha, &Variant::Plain, &cfg)?;
        let pieces: Vec<String> = cut.intervals.iter().map(|i| format!("({:.4}, {:.4})", i.lo, i.hi)).collect();
        println!("{:>4.0}% set: {}", 100.0 * (1.0 - alpha), pieces.join(" u "));
    }
    Ok(())
}
