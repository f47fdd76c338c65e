//! CTL over partition-membership atoms: `p<id>` holds exactly in partition `id`.

mod checker;
mod parser;

use std::fmt;

pub use checker::{check, check_kripke, check_suite, formula_lines, Kripke, Outcome, SuiteReport, SuiteRow};
pub use parser::{parse_ctl, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CtlFormula {
    True,
    False,
    Atom(usize),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Box<CtlFormula>, Box<CtlFormula>),
    EX(Box<CtlFormula>),
    AX(Box<CtlFormula>),
    EF(Box<CtlFormula>),
    AF(Box<CtlFormula>),
    EG(Box<CtlFormula>),
    AG(Box<CtlFormula>),
    EU(Box<CtlFormula>, Box<CtlFormula>),
    AU(Box<CtlFormula>, Box<CtlFormula>),
}

impl CtlFormula {
    pub fn atom(id: usize) -> Self {
        CtlFormula::Atom(id)
    }

    pub fn not(f: CtlFormula) -> Self {
        CtlFormula::Not(Box::new(f))
    }

    pub fn and(a: CtlFormula, b: CtlFormula) -> Self {
        CtlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: CtlFormula, b: CtlFormula) -> Self {
        CtlFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: CtlFormula, b: CtlFormula) -> Self {
        CtlFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn ex(f: CtlFormula) -> Self {
        CtlFormula::EX(Box::new(f))
    }

    pub fn ax(f: CtlFormula) -> Self {
        CtlFormula::AX(Box::new(f))
    }

    pub fn ef(f: CtlFormula) -> Self {
        CtlFormula::EF(Box::new(f))
    }

    pub fn af(f: CtlFormula) -> Self {
        CtlFormula::AF(Box::new(f))
    }

    pub fn eg(f: CtlFormula) -> Self {
        CtlFormula::EG(Box::new(f))
    }

    pub fn ag(f: CtlFormula) -> Self {
        CtlFormula::AG(Box::new(f))
    }

    pub fn eu(a: CtlFormula, b: CtlFormula) -> Self {
        CtlFormula::EU(Box::new(a), Box::new(b))
    }

    pub fn au(a: CtlFormula, b: CtlFormula) -> Self {
        CtlFormula::AU(Box::new(a), Box::new(b))
    }

    /// Operator nesting depth; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        use CtlFormula::*;
        match self {
            True | False | Atom(_) => 0,
            Not(a) | EX(a) | AX(a) | EF(a) | AF(a) | EG(a) | AG(a) => 1 + a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Atom ids in first-occurrence order, without duplicates.
    pub fn atoms(&self) -> Vec<usize> {
        fn walk(f: &CtlFormula, out: &mut Vec<usize>) {
            use CtlFormula::*;
            match f {
                True | False => {}
                Atom(i) => {
                    if !out.contains(i) {
                        out.push(*i);
                    }
                }
                Not(a) | EX(a) | AX(a) | EF(a) | AF(a) | EG(a) | AG(a) => walk(a, out),
                And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// Binary connectives are printed fully parenthesized so the output
/// reparses to the same tree.
impl fmt::Display for CtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CtlFormula::*;
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(i) => write!(f, "p{i}"),
            Not(a) => write!(f, "!{a}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            EX(a) => write!(f, "EX {a}"),
            AX(a) => write!(f, "AX {a}"),
            EF(a) => write!(f, "EF {a}"),
            AF(a) => write!(f, "AF {a}"),
            EG(a) => write!(f, "EG {a}"),
            AG(a) => write!(f, "AG {a}"),
            EU(a, b) => write!(f, "E[{a} U {b}]"),
            AU(a, b) => write!(f, "A[{a} U {b}]"),
        }
    }
}
