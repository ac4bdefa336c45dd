use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::jet::Point;

use super::expr::{NodeId, NodeKind, OperatorExpr};

/// One elementary shift: `n ↦ n`, `n ↦ n + 1` or `n ↦ m·n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShiftAtom {
    Identity,
    Successor,
    Times(u32),
}

impl ShiftAtom {
    pub fn apply(self, n: usize) -> usize {
        match self {
            ShiftAtom::Identity => n,
            ShiftAtom::Successor => n + 1,
            ShiftAtom::Times(m) => m as usize * n,
        }
    }

    /// The shift of the node kind itself.
    pub fn of(kind: &NodeKind) -> ShiftAtom {
        match kind {
            NodeKind::Partial(_) | NodeKind::MonomialDiv => ShiftAtom::Successor,
            NodeKind::Deram(m) => ShiftAtom::Times(*m),
            _ => ShiftAtom::Identity,
        }
    }
}

/// Structural upper bound for the shift function of an expression.
///
/// Stored as the set of atom chains along root-to-input paths, outermost operator first.
/// The bound at `n` is the largest value of a chain applied to `n`, and `0` when the
/// expression reads no input germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftBound {
    paths: BTreeSet<Vec<ShiftAtom>>,
}

impl ShiftBound {
    pub fn paths(&self) -> &BTreeSet<Vec<ShiftAtom>> {
        &self.paths
    }

    pub fn eval(&self, n: usize) -> usize {
        self.paths
            .iter()
            .map(|p| p.iter().fold(n, |acc, a| a.apply(acc)))
            .max()
            .unwrap_or(0)
    }

    /// `N_L` with `d(n) <= n + N_L`, when no multiplicative atom occurs.
    pub fn constant(&self) -> Option<usize> {
        let mut worst = 0;
        for p in &self.paths {
            let mut steps = 0;
            for a in p {
                match a {
                    ShiftAtom::Identity => {}
                    ShiftAtom::Successor => steps += 1,
                    ShiftAtom::Times(1) => {}
                    ShiftAtom::Times(_) => return None,
                }
            }
            worst = worst.max(steps);
        }
        Some(worst)
    }
}

impl fmt::Display for ShiftBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let forms: BTreeSet<String> = self
            .paths
            .iter()
            .map(|p| {
                // every chain is affine: a·n + b
                let (a, b) = p.iter().fold((1usize, 0usize), |(a, b), atom| match atom {
                    ShiftAtom::Identity => (a, b),
                    ShiftAtom::Successor => (a, b + 1),
                    ShiftAtom::Times(m) => (a * *m as usize, b * *m as usize),
                });
                match (a, b) {
                    (1, 0) => "n".to_string(),
                    (1, b) => format!("n+{b}"),
                    (a, 0) => format!("{a}n"),
                    (a, b) => format!("{a}n+{b}"),
                }
            })
            .collect();
        match forms.len() {
            0 => write!(f, "0"),
            1 => write!(f, "{}", forms.iter().next().unwrap()),
            _ => write!(
                f,
                "max({})",
                forms.into_iter().collect::<Vec<_>>().join(", ")
            ),
        }
    }
}

/// The composition rule `d_L(n) = max_i d_{N_i}(d_M(n))` applied over the whole DAG.
pub fn shift_bound(e: &OperatorExpr) -> ShiftBound {
    let mut memo: BTreeMap<NodeId, BTreeSet<Vec<ShiftAtom>>> = BTreeMap::new();
    ShiftBound {
        paths: paths_of(e, e.root(), &mut memo),
    }
}

fn paths_of(
    e: &OperatorExpr,
    id: NodeId,
    memo: &mut BTreeMap<NodeId, BTreeSet<Vec<ShiftAtom>>>,
) -> BTreeSet<Vec<ShiftAtom>> {
    if let Some(p) = memo.get(&id) {
        return p.clone();
    }
    let node = e.node(id);
    let mut out = BTreeSet::new();
    match &node.kind {
        NodeKind::InputGerm { .. } => {
            out.insert(Vec::new());
        }
        NodeKind::Poly(_) | NodeKind::GaussianPoly(_) => {}
        kind => {
            let atom = ShiftAtom::of(kind);
            for &c in &node.children {
                for tail in paths_of(e, c, memo) {
                    let mut p = Vec::with_capacity(tail.len() + 1);
                    if atom != ShiftAtom::Identity {
                        p.push(atom);
                    }
                    p.extend(tail);
                    out.insert(p);
                }
            }
        }
    }
    memo.insert(id, out.clone());
    out
}

/// Order requested of a child when its parent must produce order `k`.
pub(crate) fn child_order(kind: &NodeKind, k: usize) -> usize {
    match kind {
        // the implicit function needs the slope ∂f/∂z_n(a) even at order 0
        NodeKind::Implicit => k.max(1),
        kind => ShiftAtom::of(kind).apply(k),
    }
}

/// Orders at which every node is evaluated to produce order `k_out` at the root.
pub(crate) fn node_orders(e: &OperatorExpr, k_out: usize) -> BTreeMap<NodeId, BTreeSet<usize>> {
    let mut orders: BTreeMap<NodeId, BTreeSet<usize>> = BTreeMap::new();
    let mut stack = vec![(e.root(), k_out)];
    while let Some((id, k)) = stack.pop() {
        if !orders.entry(id).or_default().insert(k) {
            continue;
        }
        let node = e.node(id);
        let ck = child_order(&node.kind, k);
        for &c in &node.children {
            stack.push((c, ck));
        }
    }
    orders
}

/// Input order needed for every input germ `(name, base)` to produce order `k_out`.
pub fn required_orders(e: &OperatorExpr, k_out: usize) -> BTreeMap<(String, Point), usize> {
    let mut out = BTreeMap::new();
    for (id, ks) in node_orders(e, k_out) {
        if let NodeKind::InputGerm { name, base } = &e.node(id).kind {
            let k = *ks.iter().next_back().expect("nonempty");
            out.insert((name.clone(), base.clone()), k);
        }
    }
    out
}
