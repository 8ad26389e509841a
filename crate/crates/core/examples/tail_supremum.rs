//! The exact tail probability as a function of the nuisance parameter and
//! its supremum over the nuisance range.

use fuzzy_pvalue::nuisance::{sup_tail, NuisanceSet, SupConfig};
use fuzzy_pvalue::tail::{joint_tail, tie_points, RejectionSet, ThetaPoint, TwoSampleData};

fn main() -> fuzzy_pvalue::Result<()> {
    let data = TwoSampleData::new(4, 10, 17, 20)?;
    let theta = ThetaPoint::new(0.2)?;
    let c = RejectionSet::new(&data, theta);
    println!("{} of {} outcomes are at least as extreme as the observed one", c.len(), data.outcomes());

    let (lo, hi) = theta.omega_range();
    for i in 0..=8 {
        let omega = lo + (hi - lo) * i as f64 / 8.0;
        println!("omega {omega:.3}: tail {:.6}", joint_tail(&data, theta, omega)?);
    }

    let sup = sup_tail(&data, theta, NuisanceSet::full(theta), &SupConfig::default())?;
    println!("sup = {:.10} at omega = {:.6}", sup.sup_value, sup.arg_omega);

    let ties = tie_points(&data);
    let mn = (2 * data.m * data.n) as f64;
    let near: Vec<String> = ties.iter().filter(|&&k| (0..=40).contains(&k)).map(|&k| format!("{:.3}", k as f64 / mn)).collect();
    println!("tie points in [0, 0.1]: {}", near.join(", "));
    Ok(())
}
