use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// The fixed set of one-argument functions an expression may call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Reserved constant identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
            NamedConst::E => "e",
        }
    }

    pub fn from_name(name: &str) -> Option<NamedConst> {
        match name {
            "pi" => Some(NamedConst::Pi),
            "e" => Some(NamedConst::E),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    Const(NamedConst),
    Var(String),
    Neg(Box<Ast>),
    Binary(BinOp, Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

impl Ast {
    pub fn var(name: &str) -> Ast {
        Ast::Var(name.to_string())
    }

    pub fn binary(op: BinOp, lhs: Ast, rhs: Ast) -> Ast {
        Ast::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: Ast) -> Ast {
        Ast::Call(f, Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(arg: Ast) -> Ast {
        Ast::Neg(Box::new(arg))
    }

    /// Replaces every occurrence of variable `name` with `with`.
    pub fn substitute(&self, name: &str, with: &Ast) -> Ast {
        match self {
            Ast::Var(v) if v == name => with.clone(),
            Ast::Num(_) | Ast::Const(_) | Ast::Var(_) => self.clone(),
            Ast::Neg(a) => Ast::neg(a.substitute(name, with)),
            Ast::Binary(op, a, b) => Ast::binary(*op, a.substitute(name, with), b.substitute(name, with)),
            Ast::Call(f, a) => Ast::call(*f, a.substitute(name, with)),
        }
    }

    /// Names of the free variables, in first-occurrence order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Ast::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Ast::Num(_) | Ast::Const(_) => {}
            Ast::Neg(a) | Ast::Call(_, a) => a.collect_vars(out),
            Ast::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// Components of `A x + b` where `x` has components `comps`. Negative
/// coefficients become negations so the result prints and reparses cleanly.
pub fn affine_combination(comps: &[Ast; 3], a: &[[f64; 3]; 3], b: &[f64; 3]) -> [Ast; 3] {
    let literal = |c: f64| {
        if c < 0.0 {
            Ast::neg(Ast::Num(-c))
        } else {
            Ast::Num(c)
        }
    };
    std::array::from_fn(|r| {
        let mut acc = literal(b[r]);
        for (k, comp) in comps.iter().enumerate() {
            if a[r][k] != 0.0 {
                acc = Ast::binary(BinOp::Add, acc, Ast::binary(BinOp::Mul, literal(a[r][k]), comp.clone()));
            }
        }
        acc
    })
}

/// Fully parenthesized rendering; reparses to a structurally identical tree
/// as long as numeric leaves are nonnegative (the parser never produces
/// negative literals).
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(x) => write!(f, "{x}"),
            Ast::Const(c) => f.write_str(c.name()),
            Ast::Var(v) => f.write_str(v),
            Ast::Neg(a) => write!(f, "(-{a})"),
            Ast::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Ast::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
