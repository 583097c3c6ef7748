//! Test-only reference computations, independent of the library solvers.

#![allow(dead_code)]

/// Real roots of `c3·x³ + c1·x + c0` by sign-change bisection on the
/// monotone pieces between the critical points, within the Cauchy bound.
pub fn bisection_roots(c3: f64, c1: f64, c0: f64) -> Vec<f64> {
    let f = |x: f64| c3 * x * x * x + c1 * x + c0;
    let bound = 1.0 + c1.abs().max(c0.abs()) / c3.abs();
    let mut knots = vec![-bound];
    let crit = -c1 / (3.0 * c3);
    if crit > 0.0 {
        let r = crit.sqrt();
        knots.extend([-r, r]);
    }
    knots.push(bound);

    let mut roots: Vec<f64> = Vec::new();
    for seg in knots.windows(2) {
        let (mut a, mut b) = (seg[0], seg[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        let sa = fa.signum();
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = f(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if f(bound) == 0.0 {
        roots.push(bound);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}
