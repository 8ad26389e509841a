//! p-values of composite hypotheses about θ, taken as the supremum of the
//! membership function over the hypothesis set.

use fuzzy_pvalue::inference::{extended_pvalue, HypothesisSet, InferenceConfig};
use fuzzy_pvalue::tail::TwoSampleData;

fn main() -> fuzzy_pvalue::Result<()> {
    let data = TwoSampleData::new(4, 10, 17, 20)?;
    let cfg = InferenceConfig::default();

    let hypotheses = [
        HypothesisSet::interval(0.0, 0.0)?,
        HypothesisSet::interval(-0.5, 0.0)?,
        HypothesisSet::interval(0.0, 0.2)?,
        HypothesisSet::interval(0.3, 0.6)?,
        HypothesisSet::Points(vec![-0.2, 0.1, 0.7]),
    ];
    for h in &hypotheses {
        let p = extended_pvalue(&data, h, &cfg)?;
        println!(
            "H0 on [{:+.2}, {:+.2}]: p = {:.6} attained at theta = {:+.4}",
            p.theta_lo, p.theta_hi, p.p_value, p.argmax_theta
        );
    }
    Ok(())
}
