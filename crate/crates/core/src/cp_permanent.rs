//! Permanents from a tree decomposition by dynamic programming over subsets.
//!
//! Every node `t` owns two tables indexed by pairs `(R, C)` with
//! `R ⊆ ρ(t)` and `C ⊆ κ(t)`:
//!
//! * `Q[t](R, C)` is the permanent of the submatrix with rows `R` and
//!   columns `C`;
//! * `P[t](R, C)` is the permanent of the submatrix with rows
//!   `R ∪ Δρ̄(t)` and columns `C ∪ Δκ̄(t)`, where the `Δ̄` sets hold the
//!   labels found only strictly below `t`.
//!
//! Tables are dense: a pair is stored at `rmask | cmask << |ρ(t)|`, with
//! bit `i` of a mask standing for the `i`-th smallest label. Pairs whose
//! sizes differ are stored as literal zeros in `Q`. `P` may be nonzero
//! there, because the hidden `Δ̄` labels need not balance.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::treedec::{graph_of, validate_without_cover, NodeId, TreeDecomposition};

/// Largest `|ρ(t)| + |κ(t)|` a node may have.
pub const MAX_NODE_LABELS: usize = 22;

#[derive(Debug, Clone, PartialEq)]
pub struct DpTable<S> {
    rows: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> DpTable<S> {
    /// All-zero table over sorted label sets.
    pub fn zeros(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let bits = rows.len() + cols.len();
        if bits > MAX_NODE_LABELS {
            return Err(Error::Capacity(format!(
                "node with {bits} labels exceeds the table limit of {MAX_NODE_LABELS}"
            )));
        }
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]) && cols.windows(2).all(|w| w[0] < w[1]));
        Ok(Self {
            rows,
            cols,
            values: vec![S::zero(); 1 << bits],
        })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn n_bits(&self) -> usize {
        self.rows.len() + self.cols.len()
    }

    #[inline]
    pub fn index(&self, rmask: usize, cmask: usize) -> usize {
        rmask | cmask << self.rows.len()
    }

    #[inline]
    pub fn get(&self, rmask: usize, cmask: usize) -> S {
        self.values[self.index(rmask, cmask)]
    }

    /// Entry for explicit label subsets.
    pub fn get_labels(&self, rows: &[usize], cols: &[usize]) -> Result<S> {
        Ok(self.values[self.mask_of(rows, cols)?])
    }

    /// Entry for all rows and all columns.
    pub fn full(&self) -> S {
        *self.values.last().expect("tables are never empty")
    }

    fn mask_of(&self, rows: &[usize], cols: &[usize]) -> Result<usize> {
        let bit =
            |labels: &[usize], x: usize| labels.binary_search(&x).map_err(|_| Error::Lookup(x));
        let mut mask = 0;
        for &r in rows {
            mask |= 1 << bit(&self.rows, r)?;
        }
        for &c in cols {
            mask |= 1 << (self.rows.len() + bit(&self.cols, c)?);
        }
        Ok(mask)
    }

    /// Bit positions in `self` of the labels of a sub-universe.
    fn positions_of(&self, rows: &[usize], cols: &[usize]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(rows.len() + cols.len());
        for &r in rows {
            out.push(self.rows.binary_search(&r).map_err(|_| Error::Lookup(r))?);
        }
        for &c in cols {
            out.push(self.rows.len() + self.cols.binary_search(&c).map_err(|_| Error::Lookup(c))?);
        }
        Ok(out)
    }
}

/// Map every mask over `positions.len()` local bits to the corresponding
/// mask over the larger universe.
fn deposit_table(positions: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; 1 << positions.len()];
    for (b, &p) in positions.iter().enumerate() {
        let half = 1 << b;
        for x in 0..half {
            out[x | half] = out[x] | 1 << p;
        }
    }
    out
}

/// Instrumentation: number of tables computed since the last reset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableStats {
    pub q_tables: u64,
    pub p_tables: u64,
}

impl TableStats {
    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn total(&self) -> u64 {
        self.q_tables + self.p_tables
    }
}

/// Local permanents of the submatrix of `m` on the given row and column
/// labels, by Laplace expansion along the smallest row.
pub fn compute_q<S: Scalar>(rows: &[usize], cols: &[usize], m: &Matrix<S>) -> Result<DpTable<S>> {
    let mut t = DpTable::zeros(rows.to_vec(), cols.to_vec())?;
    let rp = rows
        .iter()
        .map(|&r| m.row_position(r).ok_or(Error::Lookup(r)))
        .collect::<Result<Vec<_>>>()?;
    let cp = cols
        .iter()
        .map(|&c| m.col_position(c).ok_or(Error::Lookup(c)))
        .collect::<Result<Vec<_>>>()?;
    let nr = rows.len();
    let row_all = (1usize << nr) - 1;
    t.values[0] = S::one();
    // Removing bits lowers the index, so ascending order sees every
    // dependency first.
    for x in 1..t.values.len() {
        let (rmask, cmask) = (x & row_all, x >> nr);
        if rmask == 0 || rmask.count_ones() != cmask.count_ones() {
            continue;
        }
        let r = rmask.trailing_zeros() as usize;
        let mut acc = S::zero();
        let mut rest = cmask;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let a = m.get(rp[r], cp[c]);
            if a != S::zero() {
                acc += a * t.values[x ^ (1 << r) ^ (1 << (nr + c))];
            }
        }
        t.values[x] = acc;
    }
    Ok(t)
}

/// Table over a subset of the labels of `table`.
pub fn restrict_table<S: Scalar>(
    table: &DpTable<S>,
    rows: &[usize],
    cols: &[usize],
) -> Result<DpTable<S>> {
    let deposit = deposit_table(&table.positions_of(rows, cols)?);
    let mut out = DpTable::zeros(rows.to_vec(), cols.to_vec())?;
    for (v, &x) in out.values.iter_mut().zip(&deposit) {
        *v = table.values[x];
    }
    Ok(out)
}

/// Labels a child shares with its parent (`Λ`) and labels only the child
/// holds (`Δ`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildLink {
    pub child: NodeId,
    pub shared_rows: Vec<usize>,
    pub shared_cols: Vec<usize>,
    pub own_rows: Vec<usize>,
    pub own_cols: Vec<usize>,
}

impl ChildLink {
    pub fn new<S: Scalar>(child: NodeId, parent: &DpTable<S>, child_table: &DpTable<S>) -> Self {
        let split = |child_labels: &[usize], parent_labels: &[usize]| -> (Vec<usize>, Vec<usize>) {
            child_labels
                .iter()
                .partition(|x| parent_labels.binary_search(x).is_ok())
        };
        let (shared_rows, own_rows) = split(&child_table.rows, &parent.rows);
        let (shared_cols, own_cols) = split(&child_table.cols, &parent.cols);
        Self {
            child,
            shared_rows,
            shared_cols,
            own_rows,
            own_cols,
        }
    }
}

/// `(−1)^{|R|} Q[t](R, C)` over the shared labels.
pub fn helper_qprime<S: Scalar>(q: &DpTable<S>, link: &ChildLink) -> Result<DpTable<S>> {
    let mut out = restrict_table(q, &link.shared_rows, &link.shared_cols)?;
    let row_all = (1usize << link.shared_rows.len()) - 1;
    for (x, v) in out.values.iter_mut().enumerate() {
        if (x & row_all).count_ones() % 2 == 1 {
            *v = -*v;
        }
    }
    Ok(out)
}

/// `P[c](R ∪ Δρ, C ∪ Δκ)` over the shared labels.
pub fn helper_qdoubleprime<S: Scalar>(
    p_child: &DpTable<S>,
    link: &ChildLink,
) -> Result<DpTable<S>> {
    let own = p_child.mask_of(&link.own_rows, &link.own_cols)?;
    let deposit = deposit_table(&p_child.positions_of(&link.shared_rows, &link.shared_cols)?);
    let mut out = DpTable::zeros(link.shared_rows.clone(), link.shared_cols.clone())?;
    for (v, &x) in out.values.iter_mut().zip(&deposit) {
        *v = p_child.values[x | own];
    }
    Ok(out)
}

/// Disjoint-union convolution `(a ⊛ b)(X) = Σ_{Y ⊆ X} a(X ∖ Y) b(Y)`,
/// where the labels of `b` are a subset of those of `a`. The result lives
/// on the labels of `a`.
pub fn convolve<S: Scalar>(a: &DpTable<S>, b: &DpTable<S>) -> Result<DpTable<S>> {
    let positions = a.positions_of(&b.rows, &b.cols)?;
    let deposit = deposit_table(&positions);
    let mut out = DpTable::zeros(a.rows.clone(), a.cols.clone())?;
    for (x, slot) in out.values.iter_mut().enumerate() {
        let mut local = 0usize;
        for (bit, &p) in positions.iter().enumerate() {
            local |= (x >> p & 1) << bit;
        }
        // Walk every submask `y` of `local`, including zero.
        let mut acc = S::zero();
        let mut y = local;
        loop {
            let bv = b.values[y];
            if bv != S::zero() {
                acc += a.values[x ^ deposit[y]] * bv;
            }
            if y == 0 {
                break;
            }
            y = (y - 1) & local;
        }
        *slot = acc;
    }
    Ok(out)
}

/// `P[t]` from `Q[t]` and the finished `P` tables of the children, given in
/// ascending node-id order:
/// `P[t] = Q[t] ⊛ Π_j (Q′_j ⊛ Q″_j)`.
pub fn subset_convolution<S: Scalar>(
    q: &DpTable<S>,
    children: &[(NodeId, &DpTable<S>)],
) -> Result<DpTable<S>> {
    if children.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Ordering(
            "children must be given in ascending id order".into(),
        ));
    }
    let mut acc = q.clone();
    for &(id, p_child) in children {
        let link = ChildLink::new(id, q, p_child);
        let join = convolve(
            &helper_qprime(q, &link)?,
            &helper_qdoubleprime(p_child, &link)?,
        )?;
        acc = convolve(&acc, &join)?;
    }
    Ok(acc)
}

/// Permanent of `m` from the decomposition `t`.
pub fn permanent_from_tree<S: Scalar>(t: &TreeDecomposition, m: &Matrix<S>) -> Result<S> {
    permanent_from_tree_counted(t, m, &mut TableStats::default())
}

/// [`permanent_from_tree`] that also records every table it computes.
///
/// The decomposition must satisfy the edge and connectivity axioms against
/// the graph of `m`. A row or column missing from every node is isolated,
/// so the permanent is zero.
pub fn permanent_from_tree_counted<S: Scalar>(
    t: &TreeDecomposition,
    m: &Matrix<S>,
    stats: &mut TableStats,
) -> Result<S> {
    let g = graph_of(m, None);
    validate_without_cover(t, &g).map_err(Error::Validation)?;
    if t.row_union().len() != g.rows.len() || t.col_union().len() != g.cols.len() {
        return Ok(S::zero());
    }
    let mut done: std::collections::BTreeMap<NodeId, DpTable<S>> = Default::default();
    for id in t.postorder() {
        let node = t.node(id).expect("postorder yields known ids");
        let q = compute_q(node.rows(), node.cols(), m)?;
        stats.q_tables += 1;
        let mut kids = Vec::with_capacity(node.children().len());
        for &c in node.children() {
            let table = done
                .remove(&c)
                .ok_or_else(|| Error::Ordering(format!("child {c} of {id} has no table")))?;
            kids.push((c, table));
        }
        let refs: Vec<(NodeId, &DpTable<S>)> = kids.iter().map(|(c, tab)| (*c, tab)).collect();
        let p = subset_convolution(&q, &refs)?;
        stats.p_tables += 1;
        done.insert(id, p);
    }
    Ok(done[&t.root()].full())
}
