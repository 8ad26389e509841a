//! Two fuzzy sets for "about 10": a narrow triangle A and a wide one B.
//! A is included in B, so every strong α-cut of A sits inside B's.

use fuzzy_pvalue::fuzzy::{height, included_in, strong_cut, triangular, GridSpec, MembershipCurve};

fn main() -> fuzzy_pvalue::Result<()> {
    let spec = GridSpec::new(7.0, 13.0, 601)?;
    let a = MembershipCurve::sample(spec, triangular(10.0, 1.0))?;
    let b = MembershipCurve::sample(spec, triangular(10.0, 2.0))?;

    println!("height(A) = {}, height(B) = {}", height(&a)?, height(&b)?);
    println!("A included in B: {}", included_in(&a, &b)?);
    println!("B included in A: {}", included_in(&b, &a)?);

    for alpha in [0.1, 0.25, 0.5, 0.75] {
        let ca = strong_cut(&a, alpha)?;
        let cb = strong_cut(&b, alpha)?;
        let show = |c: &fuzzy_pvalue::fuzzy::AlphaCut| match c.hull {
            Some(h) => format!("({:.3}, {:.3})", h.lo, h.hi),
            None => "empty".to_string(),
        };
        println!("alpha {alpha:.2}: A {}  B {}", show(&ca), show(&cb));
    }
    Ok(())
}
