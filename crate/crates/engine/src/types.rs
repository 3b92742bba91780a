use std::fmt;
use std::ops::Not;

/// A propositional variable, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }

    /// 1-based DIMACS index.
    pub fn to_dimacs(self) -> i32 {
        self.0 as i32 + 1
    }
}

/// A literal: a variable together with a polarity.
///
/// Encoded as `2 * var + negated`, so literals of the same variable are
/// adjacent and `!lit` is a bit flip.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit((var.0 << 1) | (!positive as u32))
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Parses a non-zero DIMACS literal.
    pub fn from_dimacs(lit: i32) -> Lit {
        assert!(lit != 0, "0 is not a DIMACS literal");
        Lit::new(Var(lit.unsigned_abs() - 1), lit > 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().to_dimacs();
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Three-valued truth value of a variable or literal under a partial assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LBool {
    True,
    False,
    #[default]
    Undef,
}

impl LBool {
    #[inline]
    pub fn from_bool(b: bool) -> LBool {
        if b {
            LBool::True
        } else {
            LBool::False
        }
    }

    #[inline]
    pub fn is_true(self) -> bool {
        self == LBool::True
    }

    #[inline]
    pub fn is_false(self) -> bool {
        self == LBool::False
    }

    #[inline]
    pub fn is_undef(self) -> bool {
        self == LBool::Undef
    }
}

impl Not for LBool {
    type Output = LBool;

    fn not(self) -> LBool {
        match self {
            LBool::True => LBool::False,
            LBool::False => LBool::True,
            LBool::Undef => LBool::Undef,
        }
    }
}

/// Read-only view of a (partial) assignment, indexed by variable.
#[derive(Debug, Clone, Copy)]
pub struct Assignment<'a> {
    values: &'a [LBool],
}

impl<'a> Assignment<'a> {
    pub fn new(values: &'a [LBool]) -> Self {
        Assignment { values }
    }

    #[inline]
    pub fn var_value(&self, v: Var) -> LBool {
        self.values[v.index()]
    }

    #[inline]
    pub fn lit_value(&self, l: Lit) -> LBool {
        let v = self.values[l.var().index()];
        if l.is_positive() {
            v
        } else {
            !v
        }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &'a [LBool] {
        self.values
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|v| !v.is_undef())
    }
}
