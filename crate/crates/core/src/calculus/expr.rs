use std::collections::HashMap;
use std::fmt;

use crate::error::{GermError, Result};
use crate::jet::Point;
use crate::poly::Polynomial;

/// Index of a node inside an [`OperatorExpr`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) usize);

/// A polynomial operator. `base: None` means the polynomial is re-centred at the values of
/// the germs it is composed with, which is only meaningful as the outer part of a
/// composition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyLeaf {
    pub poly: Polynomial,
    pub base: Option<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Poly(PolyLeaf),
    GaussianPoly(PolyLeaf),
    Schwarz,
    Compose,
    /// 0-based axis.
    Partial(usize),
    Implicit,
    MonomialDiv,
    Deram(u32),
    InputGerm {
        name: String,
        base: Point,
    },
}

impl NodeKind {
    pub fn head(&self) -> &'static str {
        match self {
            NodeKind::Poly(_) => "poly",
            NodeKind::GaussianPoly(_) => "gpoly",
            NodeKind::Schwarz => "schwarz",
            NodeKind::Compose => "compose",
            NodeKind::Partial(_) => "partial",
            NodeKind::Implicit => "implicit",
            NodeKind::MonomialDiv => "mdiv",
            NodeKind::Deram(_) => "deram",
            NodeKind::InputGerm { .. } => "germ",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    /// Number of variables of the germ this node produces.
    pub dim: usize,
}

/// A DAG of elementary operators. Structurally equal sub-expressions are shared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorExpr {
    nodes: Vec<Node>,
    root: NodeId,
}

impl OperatorExpr {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Dimension of the output germ.
    pub fn dim(&self) -> usize {
        self.node(self.root).dim
    }

    /// Distinct input germs `(name, base)` in first-occurrence order.
    pub fn inputs(&self) -> Vec<(String, Point)> {
        let mut out: Vec<(String, Point)> = Vec::new();
        for node in &self.nodes {
            if let NodeKind::InputGerm { name, base } = &node.kind {
                let key = (name.clone(), base.clone());
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        }
        out
    }

    /// The sub-expression rooted at `id`, as a standalone expression.
    ///
    /// Fails for the deferred polynomial of a `poly-apply`, which has no meaning on its own.
    pub fn subexpr(&self, id: NodeId) -> Result<OperatorExpr> {
        let mut b = ExprBuilder::new();
        let root = b.copy_from(self, id);
        b.finish(root)
    }

    fn write_node(&self, id: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let node = self.node(id);
        let poly_text = |p: &Polynomial| poly_sexpr(p);
        match &node.kind {
            NodeKind::InputGerm { name, base } => write!(f, "(germ {name} {})", base_text(base)),
            NodeKind::Poly(leaf) | NodeKind::GaussianPoly(leaf) => match &leaf.base {
                Some(base) => write!(
                    f,
                    "({} {} {})",
                    node.kind.head(),
                    poly_text(&leaf.poly),
                    base_text(base)
                ),
                None => write!(f, "{}", poly_text(&leaf.poly)),
            },
            NodeKind::Compose => {
                let outer = self.node(node.children[0]);
                let deferred = matches!(
                    &outer.kind,
                    NodeKind::GaussianPoly(PolyLeaf { base: None, .. })
                );
                if deferred {
                    write!(f, "(poly-apply ")?;
                } else {
                    write!(f, "(compose ")?;
                }
                for (i, c) in node.children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    self.write_node(*c, f)?;
                }
                write!(f, ")")
            }
            NodeKind::Partial(axis) => {
                write!(f, "(partial {} ", axis + 1)?;
                self.write_node(node.children[0], f)?;
                write!(f, ")")
            }
            NodeKind::Deram(m) => {
                write!(f, "(deram {m} ")?;
                self.write_node(node.children[0], f)?;
                write!(f, ")")
            }
            kind => {
                write!(f, "({} ", kind.head())?;
                self.write_node(node.children[0], f)?;
                write!(f, ")")
            }
        }
    }
}

fn base_text(base: &Point) -> String {
    if base.dim() == 1 {
        base.coords()[0].to_string()
    } else {
        base.to_string()
    }
}

/// Polynomial in the s-expression syntax, with variables `z1..zn`.
pub fn poly_sexpr(p: &Polynomial) -> String {
    let terms: Vec<String> = p
        .terms()
        .map(|(a, c)| {
            let mut factors = vec![c.to_string()];
            for (j, &e) in a.entries().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("z{}", j + 1)),
                    _ => factors.push(format!("(^ z{} {e})", j + 1)),
                }
            }
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                format!("(* {})", factors.join(" "))
            }
        })
        .collect();
    match terms.len() {
        0 => "0".into(),
        1 => terms.into_iter().next().unwrap(),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

/// S-expression form, re-parseable by [`super::parse_expr`].
impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(self.root, f)
    }
}

/// Incremental, hash-consing constructor for [`OperatorExpr`].
#[derive(Default)]
pub struct ExprBuilder {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl ExprBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len());
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn dim_of(&self, id: NodeId) -> usize {
        self.nodes[id.0].dim
    }

    fn unary(&mut self, kind: NodeKind, child: NodeId, dim: usize) -> NodeId {
        self.intern(Node {
            kind,
            children: vec![child],
            dim,
        })
    }

    fn check_not_deferred(&self, id: NodeId) -> Result<()> {
        match &self.nodes[id.0].kind {
            NodeKind::Poly(PolyLeaf { base: None, .. })
            | NodeKind::GaussianPoly(PolyLeaf { base: None, .. }) => Err(GermError::Malformed(
                "a polynomial without a base point can only be composed".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn germ(&mut self, name: impl Into<String>, base: Point) -> Result<NodeId> {
        if base.dim() == 0 {
            return Err(GermError::Malformed(
                "germ base points need at least one coordinate".into(),
            ));
        }
        let dim = base.dim();
        Ok(self.intern(Node {
            kind: NodeKind::InputGerm {
                name: name.into(),
                base,
            },
            children: vec![],
            dim,
        }))
    }

    fn poly_leaf(
        &mut self,
        poly: Polynomial,
        base: Option<Point>,
        gaussian: bool,
    ) -> Result<NodeId> {
        if let Some(b) = &base {
            if b.dim() != poly.nvars() {
                return Err(GermError::DimensionMismatch {
                    expected: b.dim(),
                    found: poly.nvars(),
                });
            }
        }
        if poly.nvars() == 0 {
            return Err(GermError::Malformed(
                "polynomial operators need at least one variable".into(),
            ));
        }
        let dim = poly.nvars();
        let leaf = PolyLeaf { poly, base };
        let kind = if gaussian {
            NodeKind::GaussianPoly(leaf)
        } else {
            NodeKind::Poly(leaf)
        };
        Ok(self.intern(Node {
            kind,
            children: vec![],
            dim,
        }))
    }

    /// The polynomial operator `P_a`.
    pub fn poly(&mut self, poly: Polynomial, base: Point) -> Result<NodeId> {
        self.poly_leaf(poly, Some(base), false)
    }

    /// The Gaussian polynomial operator `P_a`.
    pub fn gpoly(&mut self, poly: Polynomial, base: Point) -> Result<NodeId> {
        self.poly_leaf(poly, Some(base), true)
    }

    /// `P ∘ (inner…)` with the Gaussian polynomial re-centred at the inner values.
    pub fn poly_apply(&mut self, poly: Polynomial, inner: Vec<NodeId>) -> Result<NodeId> {
        let outer = self.poly_leaf(poly, None, true)?;
        self.compose_unchecked(outer, inner)
    }

    pub fn schwarz(&mut self, child: NodeId) -> Result<NodeId> {
        self.check_not_deferred(child)?;
        let dim = self.dim_of(child);
        Ok(self.unary(NodeKind::Schwarz, child, dim))
    }

    pub fn compose(&mut self, outer: NodeId, inner: Vec<NodeId>) -> Result<NodeId> {
        self.check_not_deferred(outer)?;
        self.compose_unchecked(outer, inner)
    }

    fn compose_unchecked(&mut self, outer: NodeId, inner: Vec<NodeId>) -> Result<NodeId> {
        let n = self.dim_of(outer);
        if inner.len() != n {
            return Err(GermError::DimensionMismatch {
                expected: n,
                found: inner.len(),
            });
        }
        let m = self.dim_of(inner[0]);
        for &g in &inner {
            self.check_not_deferred(g)?;
            if self.dim_of(g) != m {
                return Err(GermError::DimensionMismatch {
                    expected: m,
                    found: self.dim_of(g),
                });
            }
        }
        let mut children = vec![outer];
        children.extend(inner);
        Ok(self.intern(Node {
            kind: NodeKind::Compose,
            children,
            dim: m,
        }))
    }

    /// `∂/∂z_axis` with a 0-based axis.
    pub fn partial(&mut self, axis: usize, child: NodeId) -> Result<NodeId> {
        self.check_not_deferred(child)?;
        let dim = self.dim_of(child);
        if axis >= dim {
            return Err(GermError::AxisOutOfRange { axis, dim });
        }
        Ok(self.unary(NodeKind::Partial(axis), child, dim))
    }

    pub fn implicit(&mut self, child: NodeId) -> Result<NodeId> {
        self.check_not_deferred(child)?;
        let dim = self.dim_of(child);
        if dim < 2 {
            return Err(GermError::DimensionMismatch {
                expected: 2,
                found: dim,
            });
        }
        Ok(self.unary(NodeKind::Implicit, child, dim - 1))
    }

    pub fn mdiv(&mut self, child: NodeId) -> Result<NodeId> {
        self.check_not_deferred(child)?;
        let dim = self.dim_of(child);
        Ok(self.unary(NodeKind::MonomialDiv, child, dim))
    }

    pub fn deram(&mut self, m: u32, child: NodeId) -> Result<NodeId> {
        self.check_not_deferred(child)?;
        if m == 0 {
            return Err(GermError::ZeroRamification);
        }
        let dim = self.dim_of(child);
        Ok(self.unary(NodeKind::Deram(m), child, dim))
    }

    /// Copies the sub-expression of `expr` rooted at `id` into this builder.
    pub fn copy_from(&mut self, expr: &OperatorExpr, id: NodeId) -> NodeId {
        let node = expr.node(id);
        let children: Vec<NodeId> = node
            .children
            .iter()
            .map(|&c| self.copy_from(expr, c))
            .collect();
        self.intern(Node {
            kind: node.kind.clone(),
            children,
            dim: node.dim,
        })
    }

    pub fn finish(self, root: NodeId) -> Result<OperatorExpr> {
        let ExprBuilder { nodes, .. } = self;
        let rooted = OperatorExpr { nodes, root };
        if let NodeKind::Poly(PolyLeaf { base: None, .. })
        | NodeKind::GaussianPoly(PolyLeaf { base: None, .. }) = &rooted.node(root).kind
        {
            return Err(GermError::Malformed(
                "a polynomial without a base point can only be composed".into(),
            ));
        }
        Ok(rooted)
    }
}
