//! Operator expressions over the elementary operators: parsing, classification, shift
//! bounds, interpretation on jets and empirical shift probes.

mod eval;
mod expr;
mod parse;
mod probe;
mod shift;

use std::fmt;

pub use eval::{apply_expr, Env};
pub use expr::{poly_sexpr, ExprBuilder, Node, NodeId, NodeKind, OperatorExpr, PolyLeaf};
pub use parse::{parse_expr, parse_poly_text};
pub use probe::{
    certified_lower_bound, measure_shift_lower_bound, vanishing_stability_test, StabilityConfig,
    StabilityReport, TailSource,
};
pub use shift::{required_orders, shift_bound, ShiftAtom, ShiftBound};

/// `B*`: polynomial, Schwarz, composition, partial derivative and implicit function
/// operators. `C*` adds monomial division, `D*` adds deramification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorClass {
    B,
    C,
    D,
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorClass::B => "B*",
            OperatorClass::C => "C*",
            OperatorClass::D => "D*",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Classification {
    pub class: OperatorClass,
    /// Every polynomial operator is a Gaussian one.
    pub gaussian: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gaussian {
            write!(f, "{} (∅)", self.class)
        } else {
            write!(f, "{}", self.class)
        }
    }
}

pub fn classify(e: &OperatorExpr) -> Classification {
    let mut class = OperatorClass::B;
    let mut gaussian = true;
    for (_, node) in e.nodes() {
        match node.kind {
            NodeKind::MonomialDiv => class = class.max(OperatorClass::C),
            NodeKind::Deram(_) => class = OperatorClass::D,
            NodeKind::Poly(_) => gaussian = false,
            _ => {}
        }
    }
    Classification { class, gaussian }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class_of(text: &str) -> Classification {
        classify(&parse_expr(text).unwrap())
    }

    #[test]
    fn classes() {
        assert_eq!(
            class_of("(schwarz (partial 1 (germ f 0)))").class,
            OperatorClass::B
        );
        let a = class_of("(mdiv (poly-apply (- y 1) (germ exp 0)))");
        assert_eq!(
            a,
            Classification {
                class: OperatorClass::C,
                gaussian: true
            }
        );
        assert_eq!(a.to_string(), "C* (∅)");
        assert_eq!(class_of("(deram 2 (germ g 0))").class, OperatorClass::D);
        assert_eq!(
            class_of("(mdiv (deram 2 (germ g 0)))").class,
            OperatorClass::D
        );
    }

    #[test]
    fn plain_polynomials_lose_the_gaussian_flag() {
        assert!(!class_of("(compose (germ f 0) (poly (^ z 2) 0))").gaussian);
        assert!(class_of("(compose (germ f 0) (gpoly (^ z 2) 0))").gaussian);
    }
}
