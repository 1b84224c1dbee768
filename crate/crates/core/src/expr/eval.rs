use super::ast::{Ast, BinOp, Func};
use super::EvalError;

/// Arithmetic needed to evaluate an [`Ast`]: plain reals and the jet types.
///
/// `Ctx` carries whatever a constant needs to be lifted into the ring (the
/// jet order, for jets).
pub trait Ring: Clone {
    type Ctx: Copy;

    fn constant(ctx: Self::Ctx, c: f64) -> Self;
    /// The order-0 (value) slot.
    fn value(&self) -> f64;
    /// True when every derivative slot is zero.
    fn is_constant(&self) -> bool;
    fn ctx(&self) -> Self::Ctx;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self, EvalError>;
    /// `self^p` for a real constant exponent; requires a positive base.
    fn powf(&self, p: f64) -> Result<Self, EvalError>;
    fn apply(&self, f: Func) -> Result<Self, EvalError>;

    /// Integer power by repeated squaring; negative bases are fine.
    fn powi(&self, n: i32) -> Result<Self, EvalError> {
        let mut acc = Self::constant(self.ctx(), 1.0);
        let mut base = self.clone();
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        if n < 0 {
            Self::constant(self.ctx(), 1.0).div(&acc)
        } else {
            Ok(acc)
        }
    }
}

impl Ring for f64 {
    type Ctx = ();

    fn constant(_: (), c: f64) -> f64 {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn ctx(&self) {}
    fn add(&self, rhs: &f64) -> f64 {
        self + rhs
    }
    fn sub(&self, rhs: &f64) -> f64 {
        self - rhs
    }
    fn mul(&self, rhs: &f64) -> f64 {
        self * rhs
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn div(&self, rhs: &f64) -> Result<f64, EvalError> {
        if *rhs == 0.0 {
            return Err(EvalError::Domain { op: "division", value: *rhs });
        }
        Ok(self / rhs)
    }
    fn powf(&self, p: f64) -> Result<f64, EvalError> {
        if *self < 0.0 || (*self == 0.0 && p <= 0.0) {
            return Err(EvalError::Domain { op: "power", value: *self });
        }
        Ok(f64::powf(*self, p))
    }
    fn apply(&self, f: Func) -> Result<f64, EvalError> {
        let x = *self;
        Ok(match f {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(EvalError::Domain { op: "log", value: x });
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(EvalError::Domain { op: "sqrt", value: x });
                }
                x.sqrt()
            }
            Func::Abs => x.abs(),
        })
    }
}

const MAX_INT_EXPONENT: f64 = 64.0;

impl Ast {
    /// Evaluates the tree over any [`Ring`], looking variables up in
    /// `bindings`.
    pub fn eval<R: Ring>(&self, ctx: R::Ctx, bindings: &[(&str, R)]) -> Result<R, EvalError> {
        match self {
            Ast::Num(x) => Ok(R::constant(ctx, *x)),
            Ast::Const(c) => Ok(R::constant(ctx, c.value())),
            Ast::Var(name) => bindings
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, r)| r.clone())
                .ok_or_else(|| EvalError::Unbound(name.clone())),
            Ast::Neg(a) => Ok(a.eval(ctx, bindings)?.neg()),
            Ast::Call(f, a) => a.eval(ctx, bindings)?.apply(*f),
            Ast::Binary(op, a, b) => {
                let lhs = a.eval(ctx, bindings)?;
                let rhs = b.eval(ctx, bindings)?;
                match op {
                    BinOp::Add => Ok(lhs.add(&rhs)),
                    BinOp::Sub => Ok(lhs.sub(&rhs)),
                    BinOp::Mul => Ok(lhs.mul(&rhs)),
                    BinOp::Div => lhs.div(&rhs),
                    BinOp::Pow => power(&lhs, &rhs),
                }
            }
        }
    }

    /// Scalar evaluation with named real bindings.
    pub fn eval_real(&self, bindings: &[(&str, f64)]) -> Result<f64, EvalError> {
        self.eval((), bindings)
    }
}

fn power<R: Ring>(base: &R, exponent: &R) -> Result<R, EvalError> {
    if exponent.is_constant() {
        let p = exponent.value();
        if p.fract() == 0.0 && p.abs() <= MAX_INT_EXPONENT {
            return base.powi(p as i32);
        }
        return base.powf(p);
    }
    // variable exponent: exp(p log b)
    base.apply(Func::Log)?.mul(exponent).apply(Func::Exp)
}
