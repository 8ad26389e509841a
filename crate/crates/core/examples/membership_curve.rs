//! The membership function of θ = p2 − p1 for x = 4 of 10 and y = 17 of 20,
//! written as CSV and drawn to an SVG next to the working directory.

use fuzzy_pvalue::fuzzy::height;
use fuzzy_pvalue::inference::{default_theta_grid, mu_at, mu_curve, InferenceConfig};
use fuzzy_pvalue::svg::{Plot, Series};
use fuzzy_pvalue::tail::{ThetaPoint, TwoSampleData};

fn main() -> fuzzy_pvalue::Result<()> {
    let data = TwoSampleData::new(4, 10, 17, 20)?;
    let cfg = InferenceConfig::default();
    let curve = mu_curve(&data, default_theta_grid(), &cfg)?;

    let peak = curve.argmax().expect("nonempty grid");
    println!("observed difference {:.3}", data.theta_hat());
    println!("height {} at theta = {:.4}", height(&curve)?, curve.grid()[peak]);
    for t in [-0.2, 0.0, 0.2, 0.4, 0.6, 0.8] {
        // exact evaluation; the curve jumps between grid points
        println!("mu({t:+.1}) = {:.6}", mu_at(&data, ThetaPoint::new(t)?, &cfg)?);
    }

    let path = std::env::temp_dir().join("membership_curve.csv");
    curve.write_csv(std::fs::File::create(&path)?, ("theta", "mu"))?;
    println!("wrote {}", path.display());

    let plot = Plot {
        title: "mu(theta) for x = 4/10, y = 17/20".into(),
        x_label: "theta".into(),
        x_range: (-1.0, 1.0),
        series: vec![Series { label: "mu".into(), xs: curve.grid().to_vec(), ys: curve.values().to_vec() }],
        level: Some(0.05),
        ..Plot::default()
    };
    let svg = std::env::temp_dir().join("membership_curve.svg");
    std::fs::write(&svg, plot.render())?;
    println!("wrote {}", svg.display());
    Ok(())
}
