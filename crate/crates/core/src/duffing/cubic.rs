//! Real roots of the depressed cubic `c3·X³ + c1·X + c0 = 0`.
//!
//! Closed form first (trigonometric when three real roots exist, Cardano
//! otherwise), then a few Newton steps on the original coefficients.

use std::f64::consts::PI;

use crate::error::{Result, RwaError};

const NEWTON_STEPS: usize = 5;

/// Steady-state condition in the signed displacement amplitude `X`. The
/// quadratic coefficient is identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCondition {
    pub c3: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CubicCondition {
    pub fn new(c3: f64, c1: f64, c0: f64) -> Self {
        Self { c3, c1, c0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.c3 * x * x + self.c1) * x + self.c0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        3.0 * self.c3 * x * x + self.c1
    }

    /// Largest magnitude among the three terms at `x`; the scale against
    /// which the residual is judged.
    pub fn term_scale(&self, x: f64) -> f64 {
        (self.c3 * x * x * x)
            .abs()
            .max((self.c1 * x).abs())
            .max(self.c0.abs())
    }

    /// `|residual| / term_scale`, with the scale floored at the smallest
    /// positive normal.
    pub fn relative_residual(&self, x: f64) -> f64 {
        self.eval(x).abs() / self.term_scale(x).max(f64::MIN_POSITIVE)
    }
}

/// One real steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyBranch {
    pub x: f64,
    pub stable: bool,
    pub multiplicity: u8,
}

impl SteadyBranch {
    fn simple(x: f64) -> Self {
        Self {
            x,
            stable: true,
            multiplicity: 1,
        }
    }
}

/// `−4·c3·c1³ − 27·c3²·c0²`: positive for three distinct real roots, zero at
/// a fold, negative for a single real root.
pub fn discriminant(cond: &CubicCondition) -> f64 {
    let CubicCondition { c3, c1, c0 } = *cond;
    -4.0 * c3 * c1 * c1 * c1 - 27.0 * c3 * c3 * c0 * c0
}

fn polish(cond: &CubicCondition, mut x: f64) -> f64 {
    let mut best = cond.eval(x).abs();
    for _ in 0..NEWTON_STEPS {
        if best == 0.0 {
            break;
        }
        let d = cond.derivative(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - cond.eval(x) / d;
        let r = cond.eval(next).abs();
        if !(r < best) {
            break;
        }
        x = next;
        best = r;
    }
    x
}

/// All real roots in ascending order. Stability is left at its default
/// (`true`); see [`classify_stability`].
pub fn solve_cubic(cond: &CubicCondition) -> Result<Vec<SteadyBranch>> {
    let CubicCondition { c3, c1, c0 } = *cond;
    if c3 == 0.0 {
        if c1 == 0.0 {
            return Err(RwaError::DegenerateCubic { c0 });
        }
        return Ok(vec![SteadyBranch::simple(-c0 / c1)]);
    }

    let p = c1 / c3;
    let q = c0 / c3;
    let disc = discriminant(cond);

    let mut branches = if p == 0.0 && q == 0.0 {
        vec![SteadyBranch {
            x: 0.0,
            stable: true,
            multiplicity: 3,
        }]
    } else if disc > 0.0 {
        // p < 0 here.
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| {
                SteadyBranch::simple(polish(cond, r * (phi - 2.0 * PI * k as f64 / 3.0).cos()))
            })
            .collect()
    } else if disc == 0.0 {
        let simple = 3.0 * q / p;
        let double = -1.5 * q / p;
        vec![
            SteadyBranch::simple(polish(cond, simple)),
            SteadyBranch {
                x: double,
                stable: true,
                multiplicity: 2,
            },
        ]
    } else {
        let s = (0.25 * q * q + p * p * p / 27.0).sqrt();
        let t = (-0.5 * q - q.signum() * s).cbrt();
        let x = if t == 0.0 { 0.0 } else { t - p / (3.0 * t) };
        vec![SteadyBranch::simple(polish(cond, x))]
    };
    branches.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(branches)
}

/// With a single real root it is stable. With three distinct roots the one of
/// middle `|X|` is the saddle. At a fold the doubled root is unstable.
pub fn classify_stability(branches: &[SteadyBranch]) -> Vec<SteadyBranch> {
    let mut out = branches.to_vec();
    match out.len() {
        0 | 1 => {
            for b in &mut out {
                b.stable = true;
            }
        }
        2 => {
            for b in &mut out {
                b.stable = b.multiplicity == 1;
            }
        }
        _ => {
            let mut order: Vec<usize> = (0..out.len()).collect();
            order.sort_by(|&i, &j| out[i].x.abs().total_cmp(&out[j].x.abs()));
            let middle = order[order.len() / 2];
            for (i, b) in out.iter_mut().enumerate() {
                b.stable = i != middle;
            }
        }
    }
    out
}

/// Number of stable steady states implied by the root structure.
pub fn stable_count(branches: &[SteadyBranch]) -> usize {
    branches.iter().filter(|b| b.stable).count()
}
