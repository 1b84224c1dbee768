use std::ops::{Add, Mul, Neg, Sub};

use super::stack::{func_stack, powf_stack, Stack};
use super::{binom, FACTORIAL, MAX_JET2_ORDER};
use crate::expr::{EvalError, Func, Ring};

const LEN: usize = (MAX_JET2_ORDER + 1) * (MAX_JET2_ORDER + 2) / 2;

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Value and raw partials `d^(i+j) f / du^i dv^j`, `i + j <= N <= 4`.
///
/// Storage is by total degree; mixed partials are stored once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: usize,
    c: [f64; LEN],
}

impl Jet2 {
    pub fn constant(order: usize, c: f64) -> Jet2 {
        assert!(order <= MAX_JET2_ORDER, "Jet2 order {order} exceeds {MAX_JET2_ORDER}");
        let mut arr = [0.0; LEN];
        arr[0] = c;
        Jet2 { order, c: arr }
    }

    /// `c0 + cu (u - u0) + cv (v - v0)` expanded at `(u0, v0)`.
    pub fn affine(order: usize, c0: f64, cu: f64, cv: f64) -> Jet2 {
        let mut j = Jet2::constant(order, c0);
        if order > 0 {
            j.c[idx(1, 0)] = cu;
            j.c[idx(0, 1)] = cv;
        }
        j
    }

    pub fn var_u(order: usize, u0: f64) -> Jet2 {
        Jet2::affine(order, u0, 1.0, 0.0)
    }

    pub fn var_v(order: usize, v0: f64) -> Jet2 {
        Jet2::affine(order, v0, 0.0, 1.0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored coefficients, `(N+1)(N+2)/2`.
    pub fn len(&self) -> usize {
        (self.order + 1) * (self.order + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `d^(i+j) f / du^i dv^j`; zero beyond the order.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        if i + j <= self.order {
            self.c[idx(i, j)]
        } else {
            0.0
        }
    }

    pub fn scale(&self, k: f64) -> Jet2 {
        let mut j = *self;
        j.c.iter_mut().for_each(|x| *x *= k);
        j
    }

    fn zip(self, rhs: Jet2, f: impl Fn(f64, f64) -> f64) -> Jet2 {
        let n = self.order.min(rhs.order);
        let mut out = Jet2::constant(n, 0.0);
        for k in 0..out.len() {
            out.c[k] = f(self.c[k], rhs.c[k]);
        }
        out
    }

    fn delta(&self) -> Jet2 {
        let mut j = *self;
        j.c[0] = 0.0;
        j
    }

    fn compose_stack(&self, stack: &Stack) -> Jet2 {
        let n = self.order;
        let delta = self.delta();
        let mut acc = Jet2::constant(n, stack[n] / FACTORIAL[n]);
        for k in (0..n).rev() {
            acc = acc * delta;
            acc.c[0] += stack[k] / FACTORIAL[k];
        }
        acc
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let n = self.order.min(rhs.order);
        let mut out = Jet2::constant(n, 0.0);
        for d in 0..=n {
            for i in 0..=d {
                let j = d - i;
                let mut s = 0.0;
                for a in 0..=i {
                    for b in 0..=j {
                        s += binom(i, a) * binom(j, b) * self.c[idx(a, b)] * rhs.c[idx(i - a, j - b)];
                    }
                }
                out.c[idx(i, j)] = s;
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Ring for Jet2 {
    type Ctx = usize;

    fn constant(order: usize, c: f64) -> Jet2 {
        Jet2::constant(order, c)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn is_constant(&self) -> bool {
        self.c[1..self.len()].iter().all(|&x| x == 0.0)
    }
    fn ctx(&self) -> usize {
        self.order
    }
    fn add(&self, rhs: &Jet2) -> Jet2 {
        *self + *rhs
    }
    fn sub(&self, rhs: &Jet2) -> Jet2 {
        *self - *rhs
    }
    fn mul(&self, rhs: &Jet2) -> Jet2 {
        *self * *rhs
    }
    fn neg(&self) -> Jet2 {
        -*self
    }
    fn div(&self, rhs: &Jet2) -> Result<Jet2, EvalError> {
        let g0 = rhs.c[0];
        if g0 == 0.0 {
            return Err(EvalError::Domain { op: "division", value: g0 });
        }
        let n = self.order.min(rhs.order);
        let mut h = Jet2::constant(n, 0.0);
        for d in 0..=n {
            for i in 0..=d {
                let j = d - i;
                let mut s = self.c[idx(i, j)];
                for a in 0..=i {
                    for b in 0..=j {
                        if a == i && b == j {
                            continue;
                        }
                        s -= binom(i, a) * binom(j, b) * h.c[idx(a, b)] * rhs.c[idx(i - a, j - b)];
                    }
                }
                h.c[idx(i, j)] = s / g0;
            }
        }
        Ok(h)
    }
    fn powf(&self, p: f64) -> Result<Jet2, EvalError> {
        let stack = powf_stack(self.c[0], p, self.order)?;
        Ok(self.compose_stack(&stack))
    }
    fn apply(&self, f: Func) -> Result<Jet2, EvalError> {
        let stack = func_stack(f, self.c[0], self.order)?;
        Ok(self.compose_stack(&stack))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_product() {
        let p = Jet2::var_u(2, 1.0) * Jet2::var_v(2, 2.0);
        assert_eq!(p.partial(0, 0), 2.0);
        assert_eq!(p.partial(1, 0), 2.0);
        assert_eq!(p.partial(0, 1), 1.0);
        assert_eq!(p.partial(2, 0), 0.0);
        assert_eq!(p.partial(1, 1), 1.0);
        assert_eq!(p.partial(0, 2), 0.0);
    }

    #[test]
    fn cos_of_u() {
        let c = Jet2::var_u(2, 0.0).apply(Func::Cos).unwrap();
        assert_eq!(c.partial(0, 0), 1.0);
        assert_eq!(c.partial(1, 0), 0.0);
        assert_eq!(c.partial(2, 0), -1.0);
        assert_eq!(c.partial(0, 1), 0.0);
        assert_eq!(c.partial(1, 1), 0.0);
        assert_eq!(c.partial(0, 2), 0.0);
    }

    #[test]
    fn coefficient_count() {
        for n in 0..=4 {
            assert_eq!(Jet2::constant(n, 0.0).len(), (n + 1) * (n + 2) / 2);
        }
    }

    #[test]
    fn quotient_times_divisor_recovers_dividend() {
        let u = Jet2::var_u(4, 0.4);
        let v = Jet2::var_v(4, -1.1);
        let f = u * v * v + u.apply(Func::Sin).unwrap();
        let g = (u * u + v * v + Jet2::constant(4, 1.0)).apply(Func::Sqrt).unwrap();
        let back = f.div(&g).unwrap() * g;
        for d in 0..=4 {
            for i in 0..=d {
                assert!((back.partial(i, d - i) - f.partial(i, d - i)).abs() < 1e-13);
            }
        }
    }
}
