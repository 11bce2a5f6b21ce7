//! Tree decompositions of the bipartite graph of a matrix.
//!
//! Row and column ids live in separate namespaces. Every node stores its
//! row set `ρ` and column set `κ` as sorted vectors, and its children in
//! ascending id order so that traversals are deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::linalg::{Bandwidths, Matrix, StructuralMask, DEFAULT_ZERO_TOL};
use crate::scalar::Scalar;

pub type NodeId = usize;

/// First axiom or structural rule a decomposition fails, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("malformed tree: {0}")]
    Structure(String),
    #[error("row {0} is not in the graph")]
    UnknownRow(usize),
    #[error("column {0} is not in the graph")]
    UnknownCol(usize),
    #[error("T1: row {0} is not covered")]
    UncoveredRow(usize),
    #[error("T1: column {0} is not covered")]
    UncoveredCol(usize),
    #[error("T2: edge ({row}, {col}) is not covered")]
    UncoveredEdge { row: usize, col: usize },
    #[error("T3: nodes holding row {0} are disconnected")]
    DisconnectedRow(usize),
    #[error("T3: nodes holding column {0} are disconnected")]
    DisconnectedCol(usize),
}

/// Bipartite graph of a matrix: one vertex per row and per column and one
/// weighted edge per structurally nonzero entry.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph<S> {
    pub rows: BTreeSet<usize>,
    pub cols: BTreeSet<usize>,
    pub edges: BTreeMap<(usize, usize), S>,
}

impl<S> BipartiteGraph<S> {
    pub fn is_isolated_row(&self, r: usize) -> bool {
        !self.edges.keys().any(|&(i, _)| i == r)
    }

    pub fn is_isolated_col(&self, c: usize) -> bool {
        !self.edges.keys().any(|&(_, j)| j == c)
    }
}

/// Graph of `m` keyed by its row and column labels. An entry is an edge when
/// the mask marks it, or, without a mask, when its magnitude exceeds
/// [`DEFAULT_ZERO_TOL`].
pub fn graph_of<S: Scalar>(m: &Matrix<S>, mask: Option<&StructuralMask>) -> BipartiteGraph<S> {
    let mut edges = BTreeMap::new();
    for i in 0..m.n_rows() {
        for j in 0..m.n_cols() {
            let v = m.get(i, j);
            let present = match mask {
                Some(mask) => mask.get(i, j),
                None => v.magnitude() > DEFAULT_ZERO_TOL,
            };
            if present {
                edges.insert((m.row_labels()[i], m.col_labels()[j]), v);
            }
        }
    }
    BipartiteGraph {
        rows: m.row_labels().iter().copied().collect(),
        cols: m.col_labels().iter().copied().collect(),
        edges,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    rows: Vec<usize>,
    cols: Vec<usize>,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
}

impl Node {
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn size(&self) -> usize {
        self.rows.len() + self.cols.len()
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .copied()
        .filter(|x| b.binary_search(x).is_ok())
        .collect()
}

/// Rooted tree with row and column label sets on every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    nodes: BTreeMap<NodeId, Node>,
    root: NodeId,
}

impl TreeDecomposition {
    /// Build from `(id, rows, cols, parent)` tuples. Exactly one node must
    /// have no parent and every node must be reachable from it.
    pub fn from_nodes(
        nodes: impl IntoIterator<Item = (NodeId, Vec<usize>, Vec<usize>, Option<NodeId>)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, rows, cols, parent) in nodes {
            let node = Node {
                rows: sorted(rows),
                cols: sorted(cols),
                parent,
                children: Vec::new(),
            };
            if map.insert(id, node).is_some() {
                return Err(structure(format!("duplicate node id {id}")));
            }
        }
        let roots: Vec<NodeId> = map
            .iter()
            .filter(|(_, n)| n.parent.is_none())
            .map(|(&id, _)| id)
            .collect();
        let [root] = roots[..] else {
            return Err(structure(format!(
                "expected one root, found {}",
                roots.len()
            )));
        };
        let links: Vec<(NodeId, NodeId)> = map
            .iter()
            .filter_map(|(&id, n)| n.parent.map(|p| (p, id)))
            .collect();
        for (p, c) in links {
            map.get_mut(&p)
                .ok_or_else(|| structure(format!("node {c} has unknown parent {p}")))?
                .children
                .push(c);
        }
        let t = Self { nodes: map, root };
        if t.postorder().len() != t.nodes.len() {
            return Err(structure("the parent links contain a cycle".into()));
        }
        Ok(t)
    }

    /// Path rooted at node 0 where node `i` has parent `i - 1`.
    pub fn path(contents: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        Self::from_nodes(
            contents
                .into_iter()
                .enumerate()
                .map(|(i, (rows, cols))| (i, rows, cols, i.checked_sub(1))),
        )
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().map(|(&id, n)| (id, n))
    }

    pub fn max_id(&self) -> NodeId {
        self.nodes.keys().next_back().copied().unwrap_or(0)
    }

    /// Children before parents, siblings in ascending id order.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        let mut seen = BTreeSet::new();
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
                continue;
            }
            if !seen.insert(id) {
                continue;
            }
            stack.push((id, true));
            if let Some(n) = self.nodes.get(&id) {
                for &c in n.children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Node ids from the root down, if the tree is a path.
    pub fn path_order(&self) -> Result<Vec<NodeId>> {
        let mut out = vec![self.root];
        let mut cur = self.root;
        loop {
            match self.nodes[&cur].children[..] {
                [] => return Ok(out),
                [c] => {
                    out.push(c);
                    cur = c;
                }
                _ => {
                    return Err(Error::Domain(format!(
                        "node {cur} branches; expected a path"
                    )))
                }
            }
        }
    }

    pub fn row_union(&self) -> BTreeSet<usize> {
        self.nodes
            .values()
            .flat_map(|n| n.rows.iter().copied())
            .collect()
    }

    pub fn col_union(&self) -> BTreeSet<usize> {
        self.nodes
            .values()
            .flat_map(|n| n.cols.iter().copied())
            .collect()
    }

    /// One line per node: `id: rho=[..] kappa=[..] parent=id`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (id, n) in &self.nodes {
            let parent = n
                .parent
                .map_or_else(|| "none".to_string(), |p| p.to_string());
            let _ = writeln!(
                s,
                "{id}: rho={:?} kappa={:?} parent={parent}",
                n.rows, n.cols
            );
        }
        s
    }

    fn set_children_sorted(&mut self, id: NodeId) {
        if let Some(n) = self.nodes.get_mut(&id) {
            n.children.sort_unstable();
        }
    }
}

fn structure(msg: String) -> Error {
    Error::Validation(Violation::Structure(msg))
}

fn check_labels<S>(
    t: &TreeDecomposition,
    g: &BipartiteGraph<S>,
) -> std::result::Result<(), Violation> {
    for n in t.nodes.values() {
        if let Some(&r) = n.rows.iter().find(|r| !g.rows.contains(r)) {
            return Err(Violation::UnknownRow(r));
        }
        if let Some(&c) = n.cols.iter().find(|c| !g.cols.contains(c)) {
            return Err(Violation::UnknownCol(c));
        }
    }
    Ok(())
}

fn check_cover<S>(
    t: &TreeDecomposition,
    g: &BipartiteGraph<S>,
) -> std::result::Result<(), Violation> {
    let (rows, cols) = (t.row_union(), t.col_union());
    if let Some(&r) = g.rows.iter().find(|r| !rows.contains(r)) {
        return Err(Violation::UncoveredRow(r));
    }
    if let Some(&c) = g.cols.iter().find(|c| !cols.contains(c)) {
        return Err(Violation::UncoveredCol(c));
    }
    Ok(())
}

fn check_edges<S>(
    t: &TreeDecomposition,
    g: &BipartiteGraph<S>,
) -> std::result::Result<(), Violation> {
    for &(row, col) in g.edges.keys() {
        let covered = t
            .nodes
            .values()
            .any(|n| n.rows.binary_search(&row).is_ok() && n.cols.binary_search(&col).is_ok());
        if !covered {
            return Err(Violation::UncoveredEdge { row, col });
        }
    }
    Ok(())
}

/// A label's nodes form a connected subtree iff exactly one of them has a
/// parent that lacks the label.
fn check_connected(t: &TreeDecomposition) -> std::result::Result<(), Violation> {
    let mut tops: BTreeMap<(bool, usize), usize> = BTreeMap::new();
    for n in t.nodes.values() {
        let parent = n.parent.map(|p| &t.nodes[&p]);
        for &r in &n.rows {
            if parent.is_none_or(|p| p.rows.binary_search(&r).is_err()) {
                *tops.entry((false, r)).or_default() += 1;
            }
        }
        for &c in &n.cols {
            if parent.is_none_or(|p| p.cols.binary_search(&c).is_err()) {
                *tops.entry((true, c)).or_default() += 1;
            }
        }
    }
    match tops.into_iter().find(|&(_, count)| count > 1) {
        Some(((false, r), _)) => Err(Violation::DisconnectedRow(r)),
        Some(((true, c), _)) => Err(Violation::DisconnectedCol(c)),
        None => Ok(()),
    }
}

/// Check the three axioms against `g`, reporting the first failure in
/// axiom order.
pub fn validate<S>(
    t: &TreeDecomposition,
    g: &BipartiteGraph<S>,
) -> std::result::Result<(), Violation> {
    check_labels(t, g)?;
    check_cover(t, g)?;
    check_edges(t, g)?;
    check_connected(t)
}

/// Same as [`validate`] without the vertex-cover axiom. Used where an
/// uncovered vertex is known to be isolated.
pub(crate) fn validate_without_cover<S>(
    t: &TreeDecomposition,
    g: &BipartiteGraph<S>,
) -> std::result::Result<(), Violation> {
    check_labels(t, g)?;
    check_edges(t, g)?;
    check_connected(t)
}

/// Largest node size minus one (zero for a tree of empty nodes).
pub fn treewidth(t: &TreeDecomposition) -> usize {
    t.nodes
        .values()
        .map(Node::size)
        .max()
        .unwrap_or(0)
        .saturating_sub(1)
}

/// Path `t_1 .. t_n` over the columns of `m`, rooted at the first column.
/// Node `i` holds column label `i` and every row label inside the band of
/// that column.
pub fn linear_banded_decomposition<S: Scalar>(
    m: &Matrix<S>,
    bw: Bandwidths,
) -> Result<TreeDecomposition> {
    TreeDecomposition::path(
        (0..m.n_cols())
            .map(|j| {
                let rows = bw
                    .rows_of_column(j, m.n_rows())
                    .map(|i| m.row_labels()[i])
                    .collect();
                (rows, vec![m.col_labels()[j]])
            })
            .collect(),
    )
}

/// Path decomposition from an exact sparsity pattern. Node `j` holds the
/// nonzero rows of column `j`, widened so that each row occupies a
/// contiguous run of nodes.
pub fn linear_mask_decomposition<S: Scalar>(
    m: &Matrix<S>,
    mask: &StructuralMask,
) -> Result<TreeDecomposition> {
    if mask.n_rows() != m.n_rows() || mask.n_cols() != m.n_cols() {
        return Err(Error::SizeMismatch(format!(
            "{}x{} mask for a {}x{} matrix",
            mask.n_rows(),
            mask.n_cols(),
            m.n_rows(),
            m.n_cols()
        )));
    }
    let mut contents: Vec<(Vec<usize>, Vec<usize>)> = (0..m.n_cols())
        .map(|j| (Vec::new(), vec![m.col_labels()[j]]))
        .collect();
    for i in 0..m.n_rows() {
        let cols: Vec<usize> = (0..m.n_cols()).filter(|&j| mask.get(i, j)).collect();
        if let (Some(&lo), Some(&hi)) = (cols.first(), cols.last()) {
            for node in &mut contents[lo..=hi] {
                node.0.push(m.row_labels()[i]);
            }
        }
    }
    TreeDecomposition::path(contents)
}

/// Relabel columns by `α`: a node holding column `j` afterwards holds
/// `α⁻¹(j)`. `alpha[i]` is `α(i)` over the column universe `0..alpha.len()`.
pub fn permute_columns(t: &TreeDecomposition, alpha: &[usize]) -> Result<TreeDecomposition> {
    let mut inverse = vec![usize::MAX; alpha.len()];
    for (i, &a) in alpha.iter().enumerate() {
        if a >= alpha.len() || inverse[a] != usize::MAX {
            return Err(Error::Domain(format!("{alpha:?} is not a permutation")));
        }
        inverse[a] = i;
    }
    let mut out = t.clone();
    for n in out.nodes.values_mut() {
        let relabelled = n
            .cols
            .iter()
            .map(|&j| {
                inverse
                    .get(j)
                    .copied()
                    .ok_or_else(|| Error::Domain(format!("column {j} outside the permutation")))
            })
            .collect::<Result<Vec<_>>>()?;
        n.cols = sorted(relabelled);
    }
    Ok(out)
}

/// Same tree with every node intersected with the given row and column sets.
pub fn restrict(
    t: &TreeDecomposition,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
) -> TreeDecomposition {
    let mut out = t.clone();
    for n in out.nodes.values_mut() {
        n.rows.retain(|r| rows.contains(r));
        n.cols.retain(|c| cols.contains(c));
    }
    out
}

/// Drop rows that appear only in column-free nodes. Such rows have no
/// nonzero entry in the represented matrix.
pub fn prune_orphan_rows(t: &TreeDecomposition) -> TreeDecomposition {
    let anchored: BTreeSet<usize> = t
        .nodes
        .values()
        .filter(|n| !n.cols.is_empty())
        .flat_map(|n| n.rows.iter().copied())
        .collect();
    let mut out = t.clone();
    for n in out.nodes.values_mut() {
        n.rows.retain(|r| anchored.contains(r));
    }
    out
}

/// Remove a column-free node whose rows all appear elsewhere, joining its
/// parent to its child. Only nodes with at most one child are supported.
pub fn remove_redundant(t: &TreeDecomposition, id: NodeId) -> Result<TreeDecomposition> {
    let redundancy = |reason: String| Error::Redundancy { node: id, reason };
    let node = t.nodes.get(&id).ok_or(Error::Lookup(id))?;
    if !node.cols.is_empty() {
        return Err(redundancy(format!("holds columns {:?}", node.cols)));
    }
    if node.children.len() > 1 {
        return Err(redundancy("has more than one child".into()));
    }
    let elsewhere: BTreeSet<usize> = t
        .nodes
        .iter()
        .filter(|(&other, _)| other != id)
        .flat_map(|(_, n)| n.rows.iter().copied())
        .collect();
    if let Some(r) = node.rows.iter().find(|r| !elsewhere.contains(r)) {
        return Err(redundancy(format!("row {r} appears nowhere else")));
    }
    let child = node.children.first().copied();
    if node.parent.is_none() && child.is_none() {
        return Err(redundancy("is the only node".into()));
    }

    let mut out = t.clone();
    let removed = out.nodes.remove(&id).expect("node exists");
    if let Some(c) = child {
        out.nodes.get_mut(&c).expect("child exists").parent = removed.parent;
    }
    match removed.parent {
        Some(p) => {
            let parent = out.nodes.get_mut(&p).expect("parent exists");
            parent.children.retain(|&x| x != id);
            parent.children.extend(child);
            out.set_children_sorted(p);
        }
        None => out.root = child.expect("non-leaf root"),
    }
    Ok(out)
}

/// Remove every column-free node of a path, in root-to-leaf order.
pub fn remove_all_redundant(t: &TreeDecomposition) -> Result<TreeDecomposition> {
    let mut out = t.clone();
    for id in t.path_order()? {
        if out.nodes[&id].cols.is_empty() && out.len() > 1 {
            out = remove_redundant(&out, id)?;
        }
    }
    Ok(out)
}

/// Replace the node at 0-based path position `pos` with a fresh column-free
/// root. Its children are the two neighbours: the left segment is reversed
/// so that the left neighbour hangs directly below the new root. The new
/// root holds the rows shared by both neighbours, or nothing when only one
/// neighbour exists. Returns the tree and the id of the new root.
pub fn replace_with_dummy(
    t: &TreeDecomposition,
    pos: usize,
) -> Result<(TreeDecomposition, NodeId)> {
    let order = t.path_order()?;
    if pos >= order.len() {
        return Err(Error::Domain(format!(
            "position {pos} outside a path of {} nodes",
            order.len()
        )));
    }
    let dummy = t.max_id() + 1;
    let left = pos.checked_sub(1).map(|p| order[p]);
    let right = order.get(pos + 1).copied();
    let rows = match (left, right) {
        (Some(a), Some(b)) => intersect(&t.nodes[&a].rows, &t.nodes[&b].rows),
        _ => Vec::new(),
    };

    let mut specs = vec![(dummy, rows, Vec::new(), None)];
    for p in (0..pos).rev() {
        let parent = if p + 1 == pos { dummy } else { order[p + 1] };
        let n = &t.nodes[&order[p]];
        specs.push((order[p], n.rows.clone(), n.cols.clone(), Some(parent)));
    }
    for p in pos + 1..order.len() {
        let parent = if p == pos + 1 { dummy } else { order[p - 1] };
        let n = &t.nodes[&order[p]];
        specs.push((order[p], n.rows.clone(), n.cols.clone(), Some(parent)));
    }
    Ok((TreeDecomposition::from_nodes(specs)?, dummy))
}
