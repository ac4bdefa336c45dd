use std::collections::{BTreeMap, HashMap};

use crate::error::{GermError, Result};
use crate::jet::{Jet, Point};
use crate::operators;

use super::expr::{NodeId, NodeKind, OperatorExpr, PolyLeaf};
use super::shift::{child_order, required_orders};

/// Input germs keyed by name and base point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    germs: BTreeMap<(String, Point), Jet>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `name` at the base point of `jet`, replacing any previous binding there.
    pub fn bind(&mut self, name: impl Into<String>, jet: Jet) -> &mut Self {
        self.germs.insert((name.into(), jet.base().clone()), jet);
        self
    }

    pub fn with(mut self, name: impl Into<String>, jet: Jet) -> Self {
        self.bind(name, jet);
        self
    }

    pub fn get(&self, name: &str, base: &Point) -> Option<&Jet> {
        self.germs.get(&(name.to_string(), base.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, Point), &Jet)> {
        self.germs.iter()
    }
}

/// Evaluates `e` on `env` to order `k_out`, exactly.
///
/// Every input germ must be bound with order at least the order the expression's structure
/// requires of it; otherwise the error reports that order.
pub fn apply_expr(e: &OperatorExpr, env: &Env, k_out: usize) -> Result<Jet> {
    for ((name, base), need) in required_orders(e, k_out) {
        let jet = env
            .get(&name, &base)
            .ok_or_else(|| GermError::UnboundGerm {
                name: name.clone(),
                base: base.to_string(),
            })?;
        if jet.dim() != base.dim() {
            return Err(GermError::DimensionMismatch {
                expected: base.dim(),
                found: jet.dim(),
            });
        }
        if jet.order() < need {
            return Err(GermError::InsufficientOrder {
                have: jet.order(),
                need,
            });
        }
    }
    let mut eval = Evaluator {
        expr: e,
        env,
        memo: HashMap::new(),
    };
    eval.eval(e.root(), k_out)
}

struct Evaluator<'a> {
    expr: &'a OperatorExpr,
    env: &'a Env,
    memo: HashMap<(NodeId, usize), Jet>,
}

impl Evaluator<'_> {
    fn eval(&mut self, id: NodeId, k: usize) -> Result<Jet> {
        if let Some(j) = self.memo.get(&(id, k)) {
            return Ok(j.clone());
        }
        let node = self.expr.node(id);
        let ck = child_order(&node.kind, k);
        let out = match &node.kind {
            NodeKind::InputGerm { name, base } => {
                let jet = self
                    .env
                    .get(name, base)
                    .ok_or_else(|| GermError::UnboundGerm {
                        name: name.clone(),
                        base: base.to_string(),
                    })?;
                jet.truncate(k)?
            }
            NodeKind::Poly(leaf) | NodeKind::GaussianPoly(leaf) => {
                let base = leaf.base.clone().ok_or_else(|| {
                    GermError::Malformed("polynomial without a base point".into())
                })?;
                operators::embed_polynomial(&leaf.poly, base, k)?
            }
            NodeKind::Schwarz => operators::schwarz(&self.eval(node.children[0], ck)?),
            NodeKind::Compose => {
                let inner = node.children[1..]
                    .iter()
                    .map(|&c| self.eval(c, ck))
                    .collect::<Result<Vec<_>>>()?;
                let outer_node = self.expr.node(node.children[0]);
                let outer = match &outer_node.kind {
                    NodeKind::GaussianPoly(PolyLeaf { poly, base: None }) => {
                        let at = Point(inner.iter().map(Jet::value).collect());
                        operators::embed_polynomial(poly, at, ck)?
                    }
                    _ => self.eval(node.children[0], ck)?,
                };
                operators::compose(&outer, &inner)?
            }
            NodeKind::Partial(axis) => {
                operators::partial_derivative(&self.eval(node.children[0], ck)?, *axis)?
            }
            NodeKind::Implicit => operators::implicit_fn(&self.eval(node.children[0], ck)?, k)?,
            NodeKind::MonomialDiv => operators::monomial_div(&self.eval(node.children[0], ck)?)?,
            NodeKind::Deram(m) => operators::deramify(&self.eval(node.children[0], ck)?, *m)?,
        };
        let out = out.truncate(k)?;
        self.memo.insert((id, k), out.clone());
        Ok(out)
    }
}
