//! Univariate derivative stacks `phi(x0), phi'(x0), ..., phi^(n)(x0)`.

use super::MAX_JET1_ORDER;
use crate::expr::{EvalError, Func};

pub(super) type Stack = [f64; MAX_JET1_ORDER + 1];

pub(super) fn func_stack(f: Func, x: f64, order: usize) -> Result<Stack, EvalError> {
    let mut s = [0.0; MAX_JET1_ORDER + 1];
    match f {
        Func::Sin | Func::Cos => {
            let (sn, cs) = (x.sin(), x.cos());
            let cycle = if f == Func::Sin { [sn, cs, -sn, -cs] } else { [cs, -sn, -cs, sn] };
            for (k, slot) in s.iter_mut().enumerate().take(order + 1) {
                *slot = cycle[k % 4];
            }
        }
        Func::Sinh | Func::Cosh => {
            let (sh, ch) = (x.sinh(), x.cosh());
            let pair = if f == Func::Sinh { [sh, ch] } else { [ch, sh] };
            for (k, slot) in s.iter_mut().enumerate().take(order + 1) {
                *slot = pair[k % 2];
            }
        }
        Func::Exp => {
            let ex = x.exp();
            s[..=order].fill(ex);
        }
        Func::Log => {
            if x <= 0.0 {
                return Err(EvalError::Domain { op: "log", value: x });
            }
            s[0] = x.ln();
            // (-1)^(k-1) (k-1)! / x^k
            let mut term = 1.0 / x;
            for (k, sk) in s.iter_mut().enumerate().take(order + 1).skip(1) {
                *sk = term;
                term *= -(k as f64) / x;
            }
        }
        Func::Sqrt => {
            if x < 0.0 || (x == 0.0 && order > 0) {
                return Err(EvalError::Domain { op: "sqrt", value: x });
            }
            s[0] = x.sqrt();
            falling_power_tail(&mut s, 0.5, x, order);
        }
        Func::Abs => {
            if x == 0.0 && order > 0 {
                return Err(EvalError::Domain { op: "abs", value: x });
            }
            s[0] = x.abs();
            if order > 0 {
                s[1] = x.signum();
            }
        }
        Func::Tan => tangent_like(&mut s, x.tan(), 1.0, order),
        Func::Tanh => tangent_like(&mut s, x.tanh(), -1.0, order),
    }
    Ok(s)
}

/// Stack of `x^p` for a real constant `p`; requires `x > 0`.
pub(super) fn powf_stack(x: f64, p: f64, order: usize) -> Result<Stack, EvalError> {
    if x <= 0.0 {
        return Err(EvalError::Domain { op: "power", value: x });
    }
    let mut s = [0.0; MAX_JET1_ORDER + 1];
    s[0] = x.powf(p);
    falling_power_tail(&mut s, p, x, order);
    Ok(s)
}

/// Fills `s[1..=order]` with `p (p-1) ... (p-k+1) x^(p-k)` given `s[0] = x^p`.
fn falling_power_tail(s: &mut Stack, p: f64, x: f64, order: usize) {
    let mut coeff = 1.0;
    for k in 1..=order {
        coeff *= p - (k - 1) as f64;
        s[k] = coeff * s[0] / x.powi(k as i32);
    }
}

/// Derivatives of tan (`sign = 1`) or tanh (`sign = -1`), which satisfy
/// `T' = 1 + sign * T^2`; each derivative is a polynomial in `T`.
fn tangent_like(s: &mut Stack, t: f64, sign: f64, order: usize) {
    // poly[i] is the coefficient of T^i
    let mut poly = vec![0.0, 1.0];
    s[0] = t;
    for slot in s.iter_mut().take(order + 1).skip(1) {
        let deriv: Vec<f64> = (1..poly.len()).map(|i| i as f64 * poly[i]).collect();
        let mut next = vec![0.0; deriv.len() + 2];
        for (i, c) in deriv.iter().enumerate() {
            next[i] += c;
            next[i + 2] += sign * c;
        }
        poly = next;
        *slot = poly.iter().rev().fold(0.0, |acc, c| acc * t + c);
    }
}
