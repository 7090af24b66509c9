use crate::error::{CastError, Result};

pub const MAX_DEPTH: usize = 40;

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Exceeding `MAX_DEPTH` bisections yields a quadrature error
/// carrying the partial estimate.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    let mut ok = true;
    let v = recurse(f, a, b, fa, fm, fb, whole, tol, 0, &mut ok);
    if ok {
        Ok(v)
    } else {
        Err(CastError::Quadrature { partial: v })
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    // a minimum depth keeps narrow peaks from hiding between the first samples
    if depth >= 6 && delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth >= MAX_DEPTH {
        *ok = false;
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1, ok)
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1, ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = adaptive_simpson(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-10).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass() {
        let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = adaptive_simpson(&f, -10.0, 10.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn discontinuity_reports_partial() {
        let f = |x: f64| if x < 0.3 { 0.0 } else { 1e12 };
        match adaptive_simpson(&f, 0.0, 1.0, 1e-30) {
            Err(CastError::Quadrature { partial }) => assert!(partial.is_finite()),
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }
}
