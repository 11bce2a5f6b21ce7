//! Sampler for shallow nearest-neighbour circuits.
//!
//! The occupied input columns of the unitary have a path decomposition
//! whose nodes each hold one column and the few rows coupled to it. At step
//! `k` the matrix `W` (rows: the photons drawn so far, columns: the first
//! `k` permuted inputs) is represented by restricting that path. The `k`
//! column-deleted permanents of `W` are then read off by sliding a
//! column-free root along the path: with the root at position `j`, the two
//! neighbours hang below it and only the left neighbour's table is new.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex;
use rand::Rng;

use super::chain::check_setting;
use super::{draw_from_weights, random_permutation, MarginalWeights, Sample, SamplerStats};
use crate::cp_permanent::{compute_q, restrict_table, subset_convolution, DpTable, TableStats};
use crate::error::{Error, Result};
use crate::fock::QuditVector;
use crate::linalg::{laplace_extend, Matrix};
use crate::photonics::CompiledCircuit;
use crate::scalar::{norm_sqr, Real};
use crate::treedec::{
    linear_mask_decomposition, permute_columns, prune_orphan_rows, remove_all_redundant,
    replace_with_dummy, restrict, NodeId, TreeDecomposition,
};

/// Per-circuit preparation: the path over the occupied input columns and
/// the local permanent tables of its nodes. Node `p` holds input column `p`.
#[derive(Debug, Clone)]
pub struct ShallowPlan<F: Real> {
    unitary: Matrix<Complex<F>>,
    n: usize,
    tree: TreeDecomposition,
    q_tables: BTreeMap<NodeId, DpTable<Complex<F>>>,
}

impl<F: Real> ShallowPlan<F> {
    /// Build the plan for `n` photons in the first `n` input modes.
    pub fn new(circuit: &CompiledCircuit<F>, n: usize) -> Result<Self> {
        let u = &circuit.unitary;
        let m = u.n_rows();
        check_setting(u, n, usize::MAX)?;
        if circuit.mask.n_rows() != m || circuit.mask.n_cols() != m {
            return Err(Error::Domain(
                "structural mask does not match the unitary".into(),
            ));
        }
        let width = circuit.structural_width();
        if width >= m {
            return Err(Error::Domain(format!(
                "structural width {width} on {m} modes: the circuit is not shallow"
            )));
        }
        let full = linear_mask_decomposition(u, &circuit.mask)?;
        let occupied = restrict(&full, &(0..m).collect(), &(0..n).collect());
        let tree = remove_all_redundant(&prune_orphan_rows(&occupied))?;
        let q_tables = tree
            .nodes()
            .map(|(id, node)| Ok((id, compute_q(node.rows(), node.cols(), u)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            unitary: u.clone(),
            n,
            tree,
            q_tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.unitary.n_rows()
    }

    pub fn unitary(&self) -> &Matrix<Complex<F>> {
        &self.unitary
    }

    /// The path over the occupied input columns.
    pub fn tree(&self) -> &TreeDecomposition {
        &self.tree
    }

    /// Treewidth of the path.
    pub fn treewidth(&self) -> usize {
        crate::treedec::treewidth(&self.tree)
    }
}

/// A plan combined with one column permutation: column label `i` lives in
/// node `α(i)`.
#[derive(Debug, Clone)]
pub struct PreparedShallow<'a, F: Real> {
    plan: &'a ShallowPlan<F>,
    alpha: Vec<usize>,
    tree: TreeDecomposition,
}

impl<F: Real> PreparedShallow<'_, F> {
    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    /// The relabelled path.
    pub fn tree(&self) -> &TreeDecomposition {
        &self.tree
    }
}

/// Relabel the plan's columns by `alpha`.
pub fn shallow_prepare<'a, F: Real>(
    plan: &'a ShallowPlan<F>,
    alpha: &[usize],
) -> Result<PreparedShallow<'a, F>> {
    if alpha.len() != plan.n {
        return Err(Error::Domain(format!(
            "permutation of {} for {} photons",
            alpha.len(),
            plan.n
        )));
    }
    let tree = permute_columns(&plan.tree, alpha)?;
    Ok(PreparedShallow {
        plan,
        alpha: alpha.to_vec(),
        tree,
    })
}

/// `Q` table of path node `id` restricted to its current contents. Node ids
/// are input columns, so the table keeps the original column label.
fn q_view<F: Real>(
    plan: &ShallowPlan<F>,
    id: NodeId,
    rows: &[usize],
    has_col: bool,
) -> Result<DpTable<Complex<F>>> {
    let cols: &[usize] = if has_col {
        std::slice::from_ref(&id)
    } else {
        &[]
    };
    restrict_table(&plan.q_tables[&id], rows, cols)
}

/// Unnormalised weights for the `k`-th photon given the first `k - 1`.
///
/// Every candidate's weight equals `|per W^{(i)}|²`, where `W^{(i)}` has
/// rows `prefix ++ [i]` and columns `α(0..k)` of the unitary. Modes already
/// in the prefix are excluded, and so are modes with no structural entry in
/// those columns, whose weight is exactly zero.
pub fn shallow_marginal_weights<F: Real>(
    prepared: &PreparedShallow<'_, F>,
    prefix: &[usize],
    k: usize,
    stats: &mut TableStats,
) -> Result<MarginalWeights<F>> {
    let plan = prepared.plan;
    if k == 0 || k > plan.n || prefix.len() + 1 != k {
        return Err(Error::Domain(format!(
            "step {k} with a prefix of {} photons",
            prefix.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for &r in prefix {
        if r >= plan.m() {
            return Err(Error::Domain(format!("mode {r} outside 0..{}", plan.m())));
        }
        if !seen.insert(r) {
            return Err(Error::Collision(r));
        }
    }

    let restricted = restrict(&prepared.tree, &seen, &(0..k).collect());
    let path = remove_all_redundant(&prune_orphan_rows(&restricted))?;
    let order = path.path_order()?;
    debug_assert_eq!(order.len(), k);

    // P tables of path nodes keyed by (node, child); valid across head
    // positions because a table depends only on the subtree below it.
    let mut cache: HashMap<(NodeId, Option<NodeId>), DpTable<Complex<F>>> = HashMap::new();
    let mut subperms = Vec::with_capacity(k);
    for j in 0..k {
        let (tree, dummy) = replace_with_dummy(&path, j)?;
        for id in tree.postorder() {
            if id == dummy {
                continue;
            }
            let node = tree.node(id).expect("known node");
            let child = node.children().first().copied();
            if cache.contains_key(&(id, child)) {
                continue;
            }
            let q = q_view(plan, id, node.rows(), !node.cols().is_empty())?;
            let p = match child {
                Some(c) => {
                    let below = tree.node(c).expect("known node");
                    let key = (c, below.children().first().copied());
                    subset_convolution(&q, &[(c, &cache[&key])])?
                }
                None => subset_convolution(&q, &[])?,
            };
            stats.p_tables += 1;
            cache.insert((id, child), p);
        }

        let root = tree.node(dummy).expect("dummy exists");
        let q_d = compute_q(root.rows(), &[], &plan.unitary)?;
        stats.q_tables += 1;
        let kids: Vec<(NodeId, &DpTable<Complex<F>>)> = root
            .children()
            .iter()
            .map(|&c| {
                let grandchild = tree
                    .node(c)
                    .expect("known node")
                    .children()
                    .first()
                    .copied();
                (c, &cache[&(c, grandchild)])
            })
            .collect();
        let p_d = subset_convolution(&q_d, &kids)?;
        stats.p_tables += 1;
        subperms.push(p_d.full());
    }

    let support: Vec<usize> = order
        .iter()
        .flat_map(|id| {
            plan.tree
                .node(*id)
                .expect("plan node")
                .rows()
                .iter()
                .copied()
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|r| !seen.contains(r))
        .collect();
    let mut coeff = vec![Complex::new(F::zero(), F::zero()); k];
    let weights = support
        .iter()
        .map(|&i| {
            for (c, &col) in coeff.iter_mut().zip(&order) {
                *c = plan.unitary.get(i, col);
            }
            Ok(norm_sqr(laplace_extend(&coeff, &subperms)?))
        })
        .collect::<Result<Vec<F>>>()?;
    if !weights.iter().any(|&w| w > F::zero()) {
        return Err(Error::DegenerateDistribution);
    }
    Ok(MarginalWeights { support, weights })
}

/// Draw one collision-free sample.
pub fn sample_shallow<F: Real, R: Rng + ?Sized>(
    plan: &ShallowPlan<F>,
    rng: &mut R,
) -> Result<Sample> {
    sample_shallow_with_stats(plan, rng, &mut SamplerStats::default())
}

pub fn sample_shallow_with_stats<F: Real, R: Rng + ?Sized>(
    plan: &ShallowPlan<F>,
    rng: &mut R,
    stats: &mut SamplerStats,
) -> Result<Sample> {
    let alpha = random_permutation(plan.n, rng);
    let prepared = shallow_prepare(plan, &alpha)?;
    let mut prefix = Vec::with_capacity(plan.n);
    for k in 1..=plan.n {
        let w = shallow_marginal_weights(&prepared, &prefix, k, &mut stats.tables)?;
        prefix.push(draw_from_weights(&w, rng)?);
    }
    Sample::new(QuditVector(prefix), alpha, plan.m())
}
