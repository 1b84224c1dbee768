use std::ops::{Add, Mul, Neg, Sub};

use super::stack::{func_stack, powf_stack, Stack};
use super::{binom, FACTORIAL, MAX_JET1_ORDER};
use crate::expr::{EvalError, Func, Ring};

/// Value and raw derivatives `f, f', ..., f^(N)` of a function of one
/// variable, `N <= 6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    order: usize,
    d: [f64; MAX_JET1_ORDER + 1],
}

impl Jet1 {
    pub fn constant(order: usize, c: f64) -> Jet1 {
        assert!(order <= MAX_JET1_ORDER, "Jet1 order {order} exceeds {MAX_JET1_ORDER}");
        let mut d = [0.0; MAX_JET1_ORDER + 1];
        d[0] = c;
        Jet1 { order, d }
    }

    /// The identity function expanded at `t0`.
    pub fn variable(order: usize, t0: f64) -> Jet1 {
        let mut j = Jet1::constant(order, t0);
        if order > 0 {
            j.d[1] = 1.0;
        }
        j
    }

    /// Builds a jet from `[f, f', ...]`; the order is `derivs.len() - 1`.
    pub fn from_derivs(derivs: &[f64]) -> Jet1 {
        assert!(!derivs.is_empty());
        let mut j = Jet1::constant(derivs.len() - 1, 0.0);
        j.d[..derivs.len()].copy_from_slice(derivs);
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The k-th derivative; zero beyond the order.
    pub fn deriv(&self, k: usize) -> f64 {
        if k <= self.order {
            self.d[k]
        } else {
            0.0
        }
    }

    pub fn derivs(&self) -> &[f64] {
        &self.d[..=self.order]
    }

    pub fn truncate(&self, order: usize) -> Jet1 {
        let order = order.min(self.order);
        let mut j = Jet1::constant(order, 0.0);
        j.d[..=order].copy_from_slice(&self.d[..=order]);
        j
    }

    /// Jet of the k-th derivative, of order `N - k`.
    pub fn shift(&self, k: usize) -> Jet1 {
        assert!(k <= self.order);
        Jet1::from_derivs(&self.d[k..=self.order])
    }

    pub fn scale(&self, c: f64) -> Jet1 {
        let mut j = *self;
        j.d.iter_mut().for_each(|x| *x *= c);
        j
    }

    /// The jet minus its value: zero constant term.
    pub(super) fn delta(&self) -> Jet1 {
        let mut j = *self;
        j.d[0] = 0.0;
        j
    }

    /// `phi(self)` where `stack` holds the derivatives of `phi` at
    /// `self.value()`.
    pub(super) fn compose_stack(&self, stack: &Stack) -> Jet1 {
        let n = self.order;
        let delta = self.delta();
        let mut acc = Jet1::constant(n, stack[n] / FACTORIAL[n]);
        for k in (0..n).rev() {
            acc = acc * delta;
            acc.d[0] += stack[k] / FACTORIAL[k];
        }
        acc
    }

    /// `outer ∘ inner`, where `outer` is expanded at `inner.value()`.
    pub fn compose(outer: &Jet1, inner: &Jet1) -> Jet1 {
        let order = outer.order.min(inner.order);
        let mut stack = [0.0; MAX_JET1_ORDER + 1];
        stack[..=order].copy_from_slice(&outer.d[..=order]);
        inner.truncate(order).compose_stack(&stack)
    }

    /// Jet of the inverse function, expanded at `self.value()`, given that
    /// `self` is expanded at `at`. Requires a nonzero first derivative.
    pub fn invert(&self, at: f64) -> Option<Jet1> {
        let n = self.order;
        let slope = self.deriv(1);
        if n == 0 || slope == 0.0 || !slope.is_finite() {
            return None;
        }
        let mut inv = Jet1::constant(n, at);
        inv.d[1] = 1.0 / slope;
        // the k-th derivative of self∘inv is slope * inv^(k) plus terms in
        // lower derivatives of inv, and must vanish for k >= 2
        for k in 2..=n {
            let id = Jet1::compose(self, &inv);
            inv.d[k] = -id.d[k] / slope;
        }
        Some(inv)
    }

    fn leibniz(a: &Jet1, b: &Jet1) -> Jet1 {
        let n = a.order.min(b.order);
        let mut out = Jet1::constant(n, 0.0);
        for k in 0..=n {
            let mut s = 0.0;
            for i in 0..=k {
                s += binom(k, i) * a.d[i] * b.d[k - i];
            }
            out.d[k] = s;
        }
        out
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        let n = self.order.min(rhs.order);
        let mut out = Jet1::constant(n, 0.0);
        for k in 0..=n {
            out.d[k] = self.d[k] + rhs.d[k];
        }
        out
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        let n = self.order.min(rhs.order);
        let mut out = Jet1::constant(n, 0.0);
        for k in 0..=n {
            out.d[k] = self.d[k] - rhs.d[k];
        }
        out
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        Jet1::leibniz(&self, &rhs)
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        self.scale(-1.0)
    }
}

impl Ring for Jet1 {
    type Ctx = usize;

    fn constant(order: usize, c: f64) -> Jet1 {
        Jet1::constant(order, c)
    }
    fn value(&self) -> f64 {
        self.d[0]
    }
    fn is_constant(&self) -> bool {
        self.d[1..=self.order].iter().all(|&x| x == 0.0)
    }
    fn ctx(&self) -> usize {
        self.order
    }
    fn add(&self, rhs: &Jet1) -> Jet1 {
        *self + *rhs
    }
    fn sub(&self, rhs: &Jet1) -> Jet1 {
        *self - *rhs
    }
    fn mul(&self, rhs: &Jet1) -> Jet1 {
        *self * *rhs
    }
    fn neg(&self) -> Jet1 {
        -*self
    }
    fn div(&self, rhs: &Jet1) -> Result<Jet1, EvalError> {
        let g0 = rhs.d[0];
        if g0 == 0.0 {
            return Err(EvalError::Domain { op: "division", value: g0 });
        }
        let n = self.order.min(rhs.order);
        let mut h = Jet1::constant(n, 0.0);
        for k in 0..=n {
            let mut s = self.d[k];
            for i in 0..k {
                s -= binom(k, i) * h.d[i] * rhs.d[k - i];
            }
            h.d[k] = s / g0;
        }
        Ok(h)
    }
    fn powf(&self, p: f64) -> Result<Jet1, EvalError> {
        let stack = powf_stack(self.d[0], p, self.order)?;
        Ok(self.compose_stack(&stack))
    }
    fn apply(&self, f: Func) -> Result<Jet1, EvalError> {
        let stack = func_stack(f, self.d[0], self.order)?;
        Ok(self.compose_stack(&stack))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sin_of_seed() {
        let s = Jet1::variable(3, 0.0).apply(Func::Sin).unwrap();
        assert_eq!(s.derivs(), &[0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn cube_of_seed() {
        let t = Jet1::variable(3, 2.0);
        assert_eq!((t * t * t).derivs(), &[8.0, 12.0, 12.0, 6.0]);
        assert_eq!(t.powi(3).unwrap().derivs(), &[8.0, 12.0, 12.0, 6.0]);
    }

    #[test]
    fn exp_is_its_own_derivative() {
        let e = Jet1::variable(4, 1.0).apply(Func::Exp).unwrap();
        for k in 0..=4 {
            assert_relative_eq!(e.deriv(k), std::f64::consts::E, max_relative = 1e-15);
        }
    }

    #[test]
    fn division_and_log() {
        // 1/t at t=2: 1/2, -1/4, 2/8, -6/16
        let t = Jet1::variable(3, 2.0);
        let r = Jet1::constant(3, 1.0).div(&t).unwrap();
        let expect = [0.5, -0.25, 0.25, -0.375];
        for k in 0..=3 {
            assert_relative_eq!(r.deriv(k), expect[k], max_relative = 1e-15);
        }
        let l = t.apply(Func::Log).unwrap();
        assert_relative_eq!(l.deriv(1), 0.5);
        assert_relative_eq!(l.deriv(2), -0.25);
        assert_relative_eq!(l.deriv(3), 0.25);
        assert!(Jet1::variable(2, 0.0).apply(Func::Log).is_err());
        assert!(Jet1::variable(2, 1.0).div(&Jet1::constant(2, 0.0)).is_err());
    }

    #[test]
    fn tan_and_tanh_derivatives() {
        let x = 0.4_f64;
        let t = Jet1::variable(3, x).apply(Func::Tan).unwrap();
        let sec2 = 1.0 / x.cos().powi(2);
        assert_relative_eq!(t.deriv(1), sec2, max_relative = 1e-14);
        assert_relative_eq!(t.deriv(2), 2.0 * sec2 * x.tan(), max_relative = 1e-14);
        let th = Jet1::variable(2, x).apply(Func::Tanh).unwrap();
        let sech2 = 1.0 - x.tanh().powi(2);
        assert_relative_eq!(th.deriv(1), sech2, max_relative = 1e-14);
        assert_relative_eq!(th.deriv(2), -2.0 * x.tanh() * sech2, max_relative = 1e-14);
    }

    #[test]
    fn sqrt_and_real_power() {
        let t = Jet1::variable(2, 4.0);
        let s = t.apply(Func::Sqrt).unwrap();
        assert_eq!(s.deriv(0), 2.0);
        assert_relative_eq!(s.deriv(1), 0.25);
        assert_relative_eq!(s.deriv(2), -1.0 / 32.0);
        let p = t.powf(1.5).unwrap();
        assert_relative_eq!(p.deriv(0), 8.0);
        assert_relative_eq!(p.deriv(1), 3.0);
        assert_relative_eq!(p.deriv(2), 0.375);
        assert!(Jet1::variable(2, -1.0).powf(0.5).is_err());
    }

    #[test]
    fn inverse_of_exp_is_log() {
        let t0 = 0.3;
        let e = Jet1::variable(5, t0).apply(Func::Exp).unwrap();
        let inv = e.invert(t0).unwrap();
        let log = Jet1::variable(5, t0.exp()).apply(Func::Log).unwrap();
        for k in 0..=5 {
            assert_relative_eq!(inv.deriv(k), log.deriv(k), max_relative = 1e-12);
        }
    }

    #[test]
    fn composition_chain_rule() {
        // sin(t^2) at t = 0.7
        let t = Jet1::variable(4, 0.7);
        let inner = t * t;
        let outer = Jet1::variable(4, inner.deriv(0)).apply(Func::Sin).unwrap();
        let direct = inner.apply(Func::Sin).unwrap();
        let composed = Jet1::compose(&outer, &inner);
        for k in 0..=4 {
            assert_relative_eq!(composed.deriv(k), direct.deriv(k), max_relative = 1e-13);
        }
    }
}
