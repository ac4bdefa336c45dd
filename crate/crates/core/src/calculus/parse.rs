use num_traits::One;

use crate::error::ParseError;
use crate::gaussian::GaussianRational;
use crate::jet::Point;
use crate::poly::Polynomial;

use super::expr::{ExprBuilder, NodeId, OperatorExpr};

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
    Bracket(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) | Sexp::Bracket(_, p) => *p,
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.text[start..].chars().next() else {
            return Err(syntax(start, "unexpected end of input"));
        };
        match c {
            '(' | '[' => {
                let close = if c == '(' { ')' } else { ']' };
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.text[self.pos..].chars().next() {
                        None => return Err(syntax(start, format!("unclosed `{c}`"))),
                        Some(d) if d == close => {
                            self.pos += 1;
                            break;
                        }
                        Some(d @ (')' | ']')) => {
                            return Err(syntax(self.pos, format!("unexpected `{d}`")))
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
                Ok(if c == '(' {
                    Sexp::List(items, start)
                } else {
                    Sexp::Bracket(items, start)
                })
            }
            ')' | ']' => Err(syntax(start, format!("unexpected `{c}`"))),
            _ => {
                let len = self.text[start..]
                    .find(|ch: char| ch.is_whitespace() || "()[]".contains(ch))
                    .unwrap_or(self.text.len() - start);
                self.pos += len;
                Ok(Sexp::Atom(self.text[start..self.pos].to_string(), start))
            }
        }
    }
}

/// Parses an operator expression.
///
/// ```text
/// EXPR     := (germ NAME BASE) | (poly POLY BASE) | (gpoly POLY BASE)
///           | (schwarz EXPR) | (compose EXPR EXPR+) | (partial J EXPR)
///           | (implicit EXPR) | (mdiv EXPR) | (deram M EXPR)
///           | (poly-apply POLY EXPR+)
/// BASE     := LITERAL | [LITERAL+]
/// POLY     := LITERAL | VAR | (+ POLY+) | (- POLY+) | (* POLY+) | (^ POLY K)
/// ```
///
/// Literals are Gaussian rationals written without spaces (`1/2+3/4i`). Variables are
/// `x`, `y` or `z` followed by an optional 1-based index; `y` alone is variable 1.
/// `(poly-apply P E1 … En)` composes the Gaussian polynomial `P` in `n` variables with the
/// germs `E1 … En`, taking `P` at their common value.
pub fn parse_expr(text: &str) -> Result<OperatorExpr, ParseError> {
    let mut reader = Reader { text, pos: 0 };
    let sexp = reader.read()?;
    reader.skip_ws();
    if reader.pos != text.len() {
        return Err(syntax(reader.pos, "trailing input"));
    }
    let mut builder = ExprBuilder::new();
    let root = build(&mut builder, &sexp)?;
    builder.finish(root).map_err(|e| syntax(0, e.to_string()))
}

fn arity(head: &str, pos: usize, expected: &str, found: usize) -> ParseError {
    ParseError::Arity {
        pos,
        head: head.to_string(),
        expected: expected.to_string(),
        found,
    }
}

fn build(b: &mut ExprBuilder, sexp: &Sexp) -> Result<NodeId, ParseError> {
    let (items, pos) = match sexp {
        Sexp::List(items, pos) => (items, *pos),
        other => return Err(syntax(other.pos(), "expected a parenthesised operator")),
    };
    let Some(Sexp::Atom(head, head_pos)) = items.first() else {
        return Err(syntax(pos, "expected an operator name"));
    };
    let args = &items[1..];
    let exact = |n: usize| -> Result<(), ParseError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(arity(head, pos, &n.to_string(), args.len()))
        }
    };
    let at_least = |n: usize| -> Result<(), ParseError> {
        if args.len() >= n {
            Ok(())
        } else {
            Err(arity(head, pos, &format!("at least {n}"), args.len()))
        }
    };
    let domain = |e: crate::error::GermError| syntax(pos, e.to_string());
    match head.as_str() {
        "germ" => {
            exact(2)?;
            let Sexp::Atom(name, _) = &args[0] else {
                return Err(syntax(args[0].pos(), "expected a germ name"));
            };
            let base = parse_base(&args[1])?;
            b.germ(name.clone(), base).map_err(domain)
        }
        "poly" | "gpoly" => {
            exact(2)?;
            let base = parse_base(&args[1])?;
            let poly = parse_poly(&args[0], base.dim())?;
            if head == "poly" {
                b.poly(poly, base).map_err(domain)
            } else {
                b.gpoly(poly, base).map_err(domain)
            }
        }
        "poly-apply" => {
            at_least(2)?;
            let poly = parse_poly(&args[0], args.len() - 1)?;
            let inner = args[1..]
                .iter()
                .map(|a| build(b, a))
                .collect::<Result<Vec<_>, _>>()?;
            b.poly_apply(poly, inner).map_err(domain)
        }
        "schwarz" | "implicit" | "mdiv" => {
            exact(1)?;
            let child = build(b, &args[0])?;
            match head.as_str() {
                "schwarz" => b.schwarz(child),
                "implicit" => b.implicit(child),
                _ => b.mdiv(child),
            }
            .map_err(domain)
        }
        "compose" => {
            at_least(2)?;
            let outer = build(b, &args[0])?;
            let inner = args[1..]
                .iter()
                .map(|a| build(b, a))
                .collect::<Result<Vec<_>, _>>()?;
            b.compose(outer, inner).map_err(domain)
        }
        "partial" | "deram" => {
            exact(2)?;
            let k = parse_count(&args[0])?;
            let child = build(b, &args[1])?;
            if head == "partial" {
                if k == 0 {
                    return Err(syntax(args[0].pos(), "partial derivative axes are 1-based"));
                }
                b.partial(k as usize - 1, child).map_err(domain)
            } else {
                b.deram(k, child).map_err(domain)
            }
        }
        _ => Err(ParseError::UnknownHead {
            pos: *head_pos,
            head: head.clone(),
        }),
    }
}

fn parse_count(sexp: &Sexp) -> Result<u32, ParseError> {
    match sexp {
        Sexp::Atom(s, pos) => s
            .parse::<u32>()
            .map_err(|_| syntax(*pos, format!("expected a nonnegative integer, found `{s}`"))),
        other => Err(syntax(other.pos(), "expected a nonnegative integer")),
    }
}

fn parse_literal(s: &str) -> Result<GaussianRational, ParseError> {
    s.parse::<GaussianRational>()
}

fn parse_base(sexp: &Sexp) -> Result<Point, ParseError> {
    match sexp {
        Sexp::Atom(s, _) => Ok(Point(vec![parse_literal(s)?])),
        Sexp::Bracket(items, pos) => {
            if items.is_empty() {
                return Err(syntax(*pos, "empty base point"));
            }
            items
                .iter()
                .map(|it| match it {
                    Sexp::Atom(s, _) => parse_literal(s),
                    other => Err(syntax(other.pos(), "expected a coordinate literal")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Point)
        }
        Sexp::List(_, pos) => Err(syntax(*pos, "expected a base point")),
    }
}

fn variable_index(s: &str) -> Option<usize> {
    let mut chars = s.chars();
    let first = chars.next()?;
    if !matches!(first, 'x' | 'y' | 'z') {
        return None;
    }
    let rest = chars.as_str();
    if rest.is_empty() {
        return Some(1);
    }
    if !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&i: &usize| i >= 1)
}

/// Parses a polynomial in `nvars` variables.
pub fn parse_poly_text(text: &str, nvars: usize) -> Result<Polynomial, ParseError> {
    let mut reader = Reader { text, pos: 0 };
    let sexp = reader.read()?;
    reader.skip_ws();
    if reader.pos != text.len() {
        return Err(syntax(reader.pos, "trailing input"));
    }
    parse_poly(&sexp, nvars)
}

fn parse_poly(sexp: &Sexp, nvars: usize) -> Result<Polynomial, ParseError> {
    match sexp {
        Sexp::Atom(s, pos) => {
            if let Some(i) = variable_index(s) {
                if i > nvars {
                    return Err(syntax(
                        *pos,
                        format!("variable `{s}` exceeds the {nvars} available"),
                    ));
                }
                return Ok(Polynomial::var(nvars, i - 1));
            }
            Ok(Polynomial::constant(nvars, parse_literal(s)?))
        }
        Sexp::Bracket(_, pos) => Err(syntax(*pos, "unexpected `[` in polynomial")),
        Sexp::List(items, pos) => {
            let Some(Sexp::Atom(head, head_pos)) = items.first() else {
                return Err(syntax(*pos, "expected a polynomial operator"));
            };
            let args = &items[1..];
            let parts = |args: &[Sexp]| {
                args.iter()
                    .map(|a| parse_poly(a, nvars))
                    .collect::<Result<Vec<_>, _>>()
            };
            match head.as_str() {
                "+" | "*" | "-" if args.is_empty() => Err(arity(head, *pos, "at least 1", 0)),
                "+" => Ok(parts(args)?
                    .iter()
                    .fold(Polynomial::zero(nvars), |acc, p| acc.add(p))),
                "*" => Ok(parts(args)?.iter().fold(
                    Polynomial::constant(nvars, GaussianRational::one()),
                    |acc, p| acc.mul(p),
                )),
                "-" => {
                    let ps = parts(args)?;
                    if ps.len() == 1 {
                        return Ok(ps[0].neg());
                    }
                    Ok(ps[1..].iter().fold(ps[0].clone(), |acc, p| acc.sub(p)))
                }
                "^" => {
                    if args.len() != 2 {
                        return Err(arity(head, *pos, "2", args.len()));
                    }
                    let base = parse_poly(&args[0], nvars)?;
                    let e = parse_count(&args[1])?;
                    Ok(base.pow(e))
                }
                _ => Err(ParseError::UnknownHead {
                    pos: *head_pos,
                    head: head.clone(),
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::expr::NodeKind;
    use num_traits::Zero;

    #[test]
    fn parses_input_germ() {
        let e = parse_expr("(germ f 0)").unwrap();
        assert_eq!(e.len(), 1);
        assert!(matches!(&e.node(e.root()).kind, NodeKind::InputGerm { name, .. } if name == "f"));
        assert_eq!(e.dim(), 1);
    }

    #[test]
    fn parses_bracketed_base() {
        let e = parse_expr("(implicit (germ f [0 1/2+i]))").unwrap();
        assert_eq!(e.dim(), 1);
        assert_eq!(
            e.inputs()[0].1,
            Point(vec![GaussianRational::zero(), "1/2+i".parse().unwrap()])
        );
    }

    #[test]
    fn shares_repeated_subexpressions() {
        let e = parse_expr("(poly-apply (- z1 z2) (germ f 0) (germ f 0))").unwrap();
        // f, the deferred polynomial and the composition
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "(mdiv (poly-apply (- y 1) (germ exp 0)))",
            "(deram 2 (compose (germ f 0) (poly (^ z1 2) 0)))",
            "(schwarz (partial 2 (gpoly (+ (* 3 z1 z2) -i) [1 0])))",
        ] {
            let e = parse_expr(text).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            assert_eq!(e, again, "{text}");
        }
    }

    #[test]
    fn reports_errors_with_positions() {
        assert!(matches!(
            parse_expr("(frob (germ f 0))"),
            Err(ParseError::UnknownHead { pos: 1, .. })
        ));
        assert!(matches!(
            parse_expr("(mdiv)"),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_expr("(germ f 1/0)"),
            Err(ParseError::MalformedRational(_))
        ));
        assert!(matches!(
            parse_expr("(germ f 0"),
            Err(ParseError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse_expr("(germ f 0))"),
            Err(ParseError::Syntax { pos: 10, .. })
        ));
        assert!(matches!(
            parse_expr("(poly z2 0)"),
            Err(ParseError::Syntax { .. })
        ));
    }
}
