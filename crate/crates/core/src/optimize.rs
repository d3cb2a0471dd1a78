//! One-dimensional golden-section search.

/// 1/phi, the fraction kept at every step.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]`, assuming it is unimodal there. The bracket is
/// shrunk until its width falls below `xtol`; both end points are evaluated
/// too, so a maximum sitting on the edge of the bracket is still returned.
/// Returns the best `(x, f(x))` seen.
pub fn golden_section_max<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Result<(f64, f64), E> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = (a, f(a)?);
    let fb = f(b)?;
    if fb > best.1 {
        best = (b, fb);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    // 200 iterations shrink any bracket below f64 resolution
    for _ in 0..200 {
        if b - a <= xtol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        if x1 >= x2 {
            break;
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    Ok(best)
}
