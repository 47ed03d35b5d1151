//! Linear patterns: combination trees with one marked leaf, their associated
//! matrices, and the certified lower-bound machinery built on them.
//!
//! A linear pattern `P` is a combination tree in which exactly one leaf is
//! replaced by a vector variable `u`. Evaluating the tree then depends
//! linearly on `u`, through the *matrix associated with* `P`: `v = M(P)·u`.
//! The size `|P|` counts the unmarked leaves. Substituting one pattern into
//! another's mark (`P ⊕ Q`) multiplies the matrices, so diagonal entries of
//! pattern matrices feed two certified quantities:
//!
//! * the sequence `x_n = max_i max_{|P|=n} M(P)_{i,i}`, whose `n`-th roots
//!   are sound lower bounds on the growth rate λ and converge to it, and
//! * per-pattern rates `ρ(M(P))^{1/|P|} ≤ λ`.
//!
//! Search is exact: Pareto fronts of pattern matrices (with witness patterns)
//! are closed under the one-step extension rule, so the per-size maxima equal
//! the maxima over all patterns, not just over a sampled family.

use std::collections::VecDeque;

use num_traits::Zero;

use crate::core::{
    enumerate_trees, live_dimensions, prune_with, BilinearSystem, CompositionTree, FrontEntry,
};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{nth_root_below, Scalar};
use crate::spectra::{radius_scan, Enclosure};

/// Iteration cap for [`pattern_rate`] enclosures.
const RATE_CAP: usize = 1024;

/// A combination tree in which exactly one leaf is the marked variable `u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTree {
    /// The marked leaf, holding the vector variable.
    Marked,
    /// An ordinary seed leaf.
    Leaf { seed: usize },
    /// An operator application.
    Node {
        op: usize,
        left: Box<PatternTree>,
        right: Box<PatternTree>,
    },
}

impl PatternTree {
    pub fn marked() -> Self {
        PatternTree::Marked
    }

    pub fn leaf(seed: usize) -> Self {
        PatternTree::Leaf { seed }
    }

    pub fn node(op: usize, left: PatternTree, right: PatternTree) -> Self {
        PatternTree::Node {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Number of marked leaves in the subtree.
    fn marks(&self) -> usize {
        match self {
            PatternTree::Marked => 1,
            PatternTree::Leaf { .. } => 0,
            PatternTree::Node { left, right, .. } => left.marks() + right.marks(),
        }
    }

    /// Number of unmarked leaves in the subtree.
    fn unmarked_leaves(&self) -> usize {
        match self {
            PatternTree::Marked => 0,
            PatternTree::Leaf { .. } => 1,
            PatternTree::Node { left, right, .. } => {
                left.unmarked_leaves() + right.unmarked_leaves()
            }
        }
    }

    /// Replaces the marked leaf by `replacement`.
    fn substitute(&self, replacement: &PatternTree) -> PatternTree {
        match self {
            PatternTree::Marked => replacement.clone(),
            PatternTree::Leaf { seed } => PatternTree::leaf(*seed),
            PatternTree::Node { op, left, right } => PatternTree::node(
                *op,
                left.substitute(replacement),
                right.substitute(replacement),
            ),
        }
    }
}

impl From<&CompositionTree> for PatternTree {
    fn from(tree: &CompositionTree) -> Self {
        match tree {
            CompositionTree::Leaf { seed } => PatternTree::leaf(*seed),
            CompositionTree::Node { op, left, right } => {
                PatternTree::node(*op, PatternTree::from(&**left), PatternTree::from(&**right))
            }
        }
    }
}

/// A linear pattern: a tree with exactly one marked leaf, sized by its
/// unmarked leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearPattern {
    tree: PatternTree,
    leaf_count: usize,
}

impl LinearPattern {
    /// Wraps a tree after checking the one-mark invariant.
    pub fn new(tree: PatternTree) -> Result<Self> {
        let marks = tree.marks();
        if marks != 1 {
            return Err(Error::InvalidArgument(format!(
                "a linear pattern has exactly one marked leaf, found {marks}"
            )));
        }
        let leaf_count = tree.unmarked_leaves();
        Ok(LinearPattern { tree, leaf_count })
    }

    /// The size-0 pattern: the bare mark, whose matrix is the identity.
    pub fn marked() -> Self {
        LinearPattern {
            tree: PatternTree::Marked,
            leaf_count: 0,
        }
    }

    /// Internal constructor for trees whose invariant is known to hold.
    pub(crate) fn from_parts(tree: PatternTree, leaf_count: usize) -> Self {
        debug_assert_eq!(tree.marks(), 1);
        debug_assert_eq!(tree.unmarked_leaves(), leaf_count);
        LinearPattern { tree, leaf_count }
    }

    pub fn tree(&self) -> &PatternTree {
        &self.tree
    }

    /// `|P|`: the number of leaves excluding the marked one.
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    /// Evaluates the pattern with the marked leaf bound to `u`.
    pub fn eval_with(&self, system: &BilinearSystem, u: &Vector) -> Result<Vector> {
        if u.dim() != system.dim() {
            return Err(Error::DimensionMismatch {
                context: "marked-leaf value",
                expected: system.dim(),
                found: u.dim(),
            });
        }
        fn go(t: &PatternTree, system: &BilinearSystem, u: &Vector) -> Result<Vector> {
            match t {
                PatternTree::Marked => Ok(u.clone()),
                PatternTree::Leaf { seed } => Ok(system.seed(*seed)?.clone()),
                PatternTree::Node { op, left, right } => {
                    let x = go(left, system, u)?;
                    let y = go(right, system, u)?;
                    Ok(system.operator(*op)?.apply(&x, &y))
                }
            }
        }
        go(&self.tree, system, u)
    }

    /// Parenthesized rendering with `u` at the marked leaf, mirroring
    /// [`CompositionTree::render`].
    pub fn render(&self, seed_names: &[String], op_names: &[String]) -> String {
        fn go(t: &PatternTree, seeds: &[String], ops: &[String], top: bool) -> String {
            match t {
                PatternTree::Marked => "u".to_string(),
                PatternTree::Leaf { seed } => seeds
                    .get(*seed)
                    .cloned()
                    .unwrap_or_else(|| format!("s{}", seed + 1)),
                PatternTree::Node { op, left, right } => {
                    let l = go(left, seeds, ops, false);
                    let r = go(right, seeds, ops, false);
                    let infix = if ops.len() > 1 {
                        format!(
                            " *{} ",
                            ops.get(*op).cloned().unwrap_or_else(|| (op + 1).to_string())
                        )
                    } else {
                        "*".to_string()
                    };
                    if top {
                        format!("{l}{infix}{r}")
                    } else {
                        format!("({l}{infix}{r})")
                    }
                }
            }
        }
        go(&self.tree, seed_names, op_names, true)
    }

    /// Rendering for single-seed, single-operator contexts.
    pub fn render_plain(&self) -> String {
        self.render(&["s".to_string()], &["*".to_string()])
    }
}

/// Intermediate result while folding a pattern tree: either a fully concrete
/// vector (no mark below) or a linear map of the mark (mark below).
enum Part {
    Value(Vector),
    Linear(Matrix),
}

/// The matrix `M` with `eval(P with mark := u) = M·u` for every `u`.
///
/// Computed by propagating a linear form up the marked path: an unmarked
/// subtree evaluates to a concrete vector `v`, and combining a linear part
/// with `v` multiplies by the one-sided operator matrix for `v`.
pub fn pattern_matrix(system: &BilinearSystem, pattern: &LinearPattern) -> Result<Matrix> {
    fn go(t: &PatternTree, system: &BilinearSystem) -> Result<Part> {
        match t {
            PatternTree::Marked => Ok(Part::Linear(Matrix::identity(system.dim()))),
            PatternTree::Leaf { seed } => Ok(Part::Value(system.seed(*seed)?.clone())),
            PatternTree::Node { op, left, right } => {
                let operator = system.operator(*op)?;
                match (go(left, system)?, go(right, system)?) {
                    (Part::Value(x), Part::Value(y)) => Ok(Part::Value(operator.apply(&x, &y))),
                    (Part::Linear(m), Part::Value(y)) => {
                        Ok(Part::Linear(operator.right_matrix(&y).mul(&m)))
                    }
                    (Part::Value(x), Part::Linear(m)) => {
                        Ok(Part::Linear(operator.left_matrix(&x).mul(&m)))
                    }
                    (Part::Linear(_), Part::Linear(_)) => Err(Error::InvalidArgument(
                        "pattern has more than one marked leaf".to_string(),
                    )),
                }
            }
        }
    }
    match go(pattern.tree(), system)? {
        Part::Linear(m) => Ok(m),
        Part::Value(_) => Err(Error::InvalidArgument(
            "pattern has no marked leaf".to_string(),
        )),
    }
}

/// `P ⊕ Q`: replaces the marked leaf of `P` by the tree of `Q`.
///
/// Matrices compose contravariantly with substitution order:
/// `M(P ⊕ Q) = M(P)·M(Q)`, and sizes add.
pub fn compose(p: &LinearPattern, q: &LinearPattern) -> LinearPattern {
    LinearPattern::from_parts(
        p.tree().substitute(q.tree()),
        p.leaf_count() + q.leaf_count(),
    )
}

/// `P^m = P ⊕ … ⊕ P` (`m` copies). `m = 0` is refused: the empty power would
/// be the bare mark of a different size class.
pub fn pattern_power(p: &LinearPattern, m: usize) -> Result<LinearPattern> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "pattern power needs an exponent of at least 1".to_string(),
        ));
    }
    let mut acc = p.clone();
    for _ in 1..m {
        acc = compose(&acc, p);
    }
    Ok(acc)
}

/// Every linear pattern with exactly `n` unmarked leaves, each exactly once:
/// all tree shapes, seed labelings, operator labelings, and mark positions.
///
/// Patterns decompose uniquely at the root by which side holds the mark and
/// the split of unmarked leaves, so the recursion below produces no
/// duplicates.
pub fn enumerate_patterns(system: &BilinearSystem, n: usize) -> Result<Vec<LinearPattern>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "pattern enumeration needs size at least 1 (size 0 is the bare mark)".to_string(),
        ));
    }
    let num_seeds = system.seeds().len();
    let num_ops = system.operators().len();
    let trees: Vec<Vec<CompositionTree>> = (0..=n)
        .map(|k| {
            if k == 0 {
                Ok(Vec::new())
            } else {
                enumerate_trees(k, num_seeds, num_ops)
            }
        })
        .collect::<Result<_>>()?;
    // patterns[k] = all pattern trees with k unmarked leaves
    let mut patterns: Vec<Vec<PatternTree>> = vec![vec![PatternTree::Marked]];
    for m in 1..=n {
        let mut level = Vec::new();
        // Mark in the left subtree: left pattern of size n1, right tree of
        // size m − n1 ≥ 1.
        for n1 in 0..m {
            for left in &patterns[n1] {
                for right in &trees[m - n1] {
                    for op in 0..num_ops {
                        level.push(PatternTree::node(op, left.clone(), PatternTree::from(right)));
                    }
                }
            }
        }
        // Mark in the right subtree: left tree of size n1 ≥ 1, right pattern
        // of size m − n1.
        for n1 in 1..=m {
            for left in &trees[n1] {
                for right in &patterns[m - n1] {
                    for op in 0..num_ops {
                        level.push(PatternTree::node(op, PatternTree::from(left), right.clone()));
                    }
                }
            }
        }
        patterns.push(level);
    }
    Ok(patterns
        .pop()
        .expect("levels 0..=n were built")
        .into_iter()
        .map(|tree| LinearPattern::from_parts(tree, n))
        .collect())
}

/// Certified enclosure of the pattern rate `ρ(M(P))^{1/|P|}`, a sound lower
/// bound on the growth rate λ of the system.
///
/// Runs the spectral scan on `M(P)` with every root order scaled by `|P|`,
/// so the endpoints (and their witnesses) live directly on the λ scale: a
/// lower witness of order `k·|P|` is the diagonal entry of `M(P^k) = M(P)^k`,
/// i.e. an `x`-value at size `k·|P|`.
pub fn pattern_rate(
    system: &BilinearSystem,
    pattern: &LinearPattern,
    tol: f64,
) -> Result<Enclosure> {
    if pattern.leaf_count() == 0 {
        return Err(Error::InvalidArgument(
            "the bare mark has no rate: pattern size must be at least 1".to_string(),
        ));
    }
    let scale = u32::try_from(pattern.leaf_count())
        .map_err(|_| Error::InvalidArgument("pattern size overflows the root order".into()))?;
    let m = pattern_matrix(system, pattern)?;
    radius_scan(&m, tol, RATE_CAP, scale)
}

/// A pattern-matrix front entry: an entrywise-maximal matrix together with a
/// pattern realizing it.
#[derive(Debug, Clone)]
pub struct MatrixFrontEntry {
    pub matrix: Matrix,
    pub pattern: LinearPattern,
}

/// One row of the certified lower-bound sequence.
#[derive(Debug, Clone)]
pub struct LowerBoundRow {
    /// Pattern size `n`.
    pub n: usize,
    /// `x_n = max_i max_{|P|=n} M(P)_{i,i}`, exact.
    pub x: Scalar,
    /// Verified downward rounding of `x_n^{1/n}`; a sound lower bound on λ.
    pub root: f64,
    /// `a_n^(i) = max_{|P|=n} M(P)_{i,i}` per coordinate, exact.
    pub per_index: Vec<Scalar>,
    /// A pattern and diagonal index attaining `x_n` (first in search order).
    pub witness: (LinearPattern, usize),
}

/// Incremental exact search over pattern matrices, one size per step.
///
/// Maintains two Pareto fronts with witnesses: maximal combination values per
/// size (as in the growth table) and maximal pattern matrices per size. The
/// matrix front at size `t` is closed under the root decomposition
/// `M(P) = side_matrix(op, value)·M(P′)`, and entrywise domination is
/// preserved by extension on nonnegative data, so per-size diagonal maxima
/// over the front equal the maxima over all patterns.
pub struct PatternSearch<'a> {
    system: &'a BilinearSystem,
    /// `vec_fronts[k]` = value front at size `k+1`.
    vec_fronts: Vec<Vec<FrontEntry>>,
    /// `mat_fronts[t]` = matrix front at size `t`; size 0 holds the identity.
    mat_fronts: Vec<Vec<MatrixFrontEntry>>,
}

impl<'a> PatternSearch<'a> {
    pub fn new(system: &'a BilinearSystem) -> Result<Self> {
        system.require_nonnegative("pattern search")?;
        let identity = MatrixFrontEntry {
            matrix: Matrix::identity(system.dim()),
            pattern: LinearPattern::marked(),
        };
        Ok(PatternSearch {
            system,
            vec_fronts: Vec::new(),
            mat_fronts: vec![vec![identity]],
        })
    }

    /// Largest pattern size the search has reached.
    pub fn max_size(&self) -> usize {
        self.mat_fronts.len() - 1
    }

    /// The matrix front at size `n`, if already computed.
    pub fn matrix_front(&self, n: usize) -> Option<&[MatrixFrontEntry]> {
        self.mat_fronts.get(n).map(|f| f.as_slice())
    }

    /// Extends both fronts by one size and returns the new matrix front.
    pub fn step(&mut self) -> Result<&[MatrixFrontEntry]> {
        let t = self.mat_fronts.len();
        self.extend_vec_front(t)?;
        let mut candidates: Vec<(Vector, (Matrix, LinearPattern))> = Vec::new();
        for dt in 1..=t {
            let value_front = &self.vec_fronts[dt - 1];
            let matrix_front = &self.mat_fronts[t - dt];
            for entry in matrix_front {
                for value_entry in value_front {
                    for (op_idx, op) in self.system.operators().iter().enumerate() {
                        let sibling = PatternTree::from(&value_entry.witness);
                        // Mark on the left: v = op(P′(u), value).
                        let m = op.right_matrix(&value_entry.value).mul(&entry.matrix);
                        let tree = PatternTree::node(
                            op_idx,
                            entry.pattern.tree().clone(),
                            sibling.clone(),
                        );
                        candidates.push((
                            flatten(&m),
                            (m, LinearPattern::from_parts(tree, t)),
                        ));
                        // Mark on the right: v = op(value, P′(u)).
                        let m = op.left_matrix(&value_entry.value).mul(&entry.matrix);
                        let tree =
                            PatternTree::node(op_idx, sibling, entry.pattern.tree().clone());
                        candidates.push((
                            flatten(&m),
                            (m, LinearPattern::from_parts(tree, t)),
                        ));
                    }
                }
            }
        }
        let front = prune_with(candidates)
            .into_iter()
            .map(|(_, (matrix, pattern))| MatrixFrontEntry { matrix, pattern })
            .collect();
        self.mat_fronts.push(front);
        Ok(self.mat_fronts[t].as_slice())
    }

    /// Lower-bound row at size `n`, if the search has reached it.
    pub fn row(&self, n: usize) -> Option<LowerBoundRow> {
        if n == 0 {
            return None;
        }
        let front = self.mat_fronts.get(n)?;
        let dim = self.system.dim();
        let mut per_index = vec![Scalar::zero(); dim];
        let mut best: Option<(Scalar, usize, usize)> = None; // (value, entry, coord)
        for (entry_idx, entry) in front.iter().enumerate() {
            for (i, slot) in per_index.iter_mut().enumerate() {
                let v = entry.matrix.get(i, i);
                if *v > *slot {
                    *slot = v.clone();
                }
                let improves = match &best {
                    None => true,
                    Some((current, _, _)) => v > current,
                };
                if improves {
                    best = Some((v.clone(), entry_idx, i));
                }
            }
        }
        let (x, entry_idx, coord) = best?;
        let root = if x.is_zero() {
            0.0
        } else {
            nth_root_below(&x, n as u32)
        };
        Some(LowerBoundRow {
            n,
            x,
            root,
            per_index,
            witness: (front[entry_idx].pattern.clone(), coord),
        })
    }

    /// Extends the combination-value front to size `t` (sizes grow one at a
    /// time, mirroring the growth-table recurrence).
    fn extend_vec_front(&mut self, t: usize) -> Result<()> {
        while self.vec_fronts.len() < t {
            let n = self.vec_fronts.len() + 1;
            let candidates: Vec<(Vector, CompositionTree)> = if n == 1 {
                self.system
                    .seeds()
                    .iter()
                    .enumerate()
                    .map(|(idx, seed)| (seed.clone(), CompositionTree::leaf(idx)))
                    .collect()
            } else {
                let mut all = Vec::new();
                for n1 in 1..n {
                    let n2 = n - n1;
                    for left in &self.vec_fronts[n1 - 1] {
                        for right in &self.vec_fronts[n2 - 1] {
                            for (op_idx, op) in self.system.operators().iter().enumerate() {
                                all.push((
                                    op.apply(&left.value, &right.value),
                                    CompositionTree::node(
                                        op_idx,
                                        left.witness.clone(),
                                        right.witness.clone(),
                                    ),
                                ));
                            }
                        }
                    }
                }
                all
            };
            let front = prune_with(candidates)
                .into_iter()
                .map(|(value, witness)| FrontEntry { value, witness })
                .collect();
            self.vec_fronts.push(front);
        }
        Ok(())
    }
}

/// Matrix entries flattened row-major, for entrywise Pareto comparison.
fn flatten(m: &Matrix) -> Vector {
    let d = m.dim();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            entries.push(m.get(i, j).clone());
        }
    }
    Vector::new(entries)
}

/// The certified lower-bound sequence `x_n` for `n = 1..=n_max`, with exact
/// per-coordinate maxima and replayable witnesses.
///
/// Each `root` is a verified lower bound on λ, and the positive subsequence
/// of roots converges to λ as `n_max` grows.
pub fn lower_bound_sequence(
    system: &BilinearSystem,
    n_max: usize,
) -> Result<Vec<LowerBoundRow>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument(
            "lower-bound sequence needs at least one size".to_string(),
        ));
    }
    let mut search = PatternSearch::new(system)?;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        search.step()?;
        rows.push(search.row(n).expect("row exists after stepping to n"));
    }
    Ok(rows)
}

/// Searches for a pattern `P` with `M(P)_{i,j} > 0` — a connector routing the
/// mark's coordinate `j` into coordinate `i`.
///
/// Edges of the dependency graph are coefficient entries with a live sibling
/// coordinate; breadth-first search over them yields a pattern with boundedly
/// many leaves (each step contributes one liveness-witness subtree). Returns
/// `Ok(None)` when no path exists. Indices are 0-based.
pub fn connector_pattern(
    system: &BilinearSystem,
    i: usize,
    j: usize,
) -> Result<Option<LinearPattern>> {
    system.require_nonnegative("connector search")?;
    let dim = system.dim();
    for (name, idx) in [("target coordinate", i), ("source coordinate", j)] {
        if idx >= dim {
            return Err(Error::IndexOutOfRange {
                context: name,
                index: idx,
                dim,
            });
        }
    }
    let live = live_dimensions(system)?;
    for idx in [i, j] {
        if !live.is_live(idx) {
            return Err(Error::NotLive { index: idx });
        }
    }
    if i == j {
        return Ok(Some(LinearPattern::marked()));
    }

    struct Step {
        from: usize,
        op: usize,
        mark_left: bool,
        sibling: usize,
    }
    let mut parent: Vec<Option<Step>> = (0..dim).map(|_| None).collect();
    let mut visited = vec![false; dim];
    visited[j] = true;
    let mut queue = VecDeque::from([j]);
    'search: while let Some(a) = queue.pop_front() {
        for (op_idx, op) in system.operators().iter().enumerate() {
            for (k, left_in, right_in, _) in op.iter() {
                // Coefficients are positive (zeros are dropped on
                // construction and the system is nonnegative).
                let candidates = [
                    (left_in == a, true, right_in),
                    (right_in == a, false, left_in),
                ];
                for (applies, mark_left, sibling) in candidates {
                    if applies && !visited[k] && live.is_live(sibling) {
                        visited[k] = true;
                        parent[k] = Some(Step {
                            from: a,
                            op: op_idx,
                            mark_left,
                            sibling,
                        });
                        if k == i {
                            break 'search;
                        }
                        queue.push_back(k);
                    }
                }
            }
        }
    }
    if !visited[i] {
        return Ok(None);
    }
    // Reconstruct the path and compose step patterns outward from `j`.
    let mut chain = Vec::new();
    let mut cursor = i;
    while cursor != j {
        let step = parent[cursor]
            .take()
            .expect("every visited coordinate has a parent step");
        cursor = step.from;
        chain.push(step);
    }
    let mut pattern = LinearPattern::marked();
    for step in chain.into_iter().rev() {
        let sibling_tree = PatternTree::from(
            live.witness(step.sibling)
                .expect("sibling was checked live"),
        );
        let size = sibling_tree.unmarked_leaves();
        let tree = if step.mark_left {
            PatternTree::node(step.op, PatternTree::Marked, sibling_tree)
        } else {
            PatternTree::node(step.op, sibling_tree, PatternTree::Marked)
        };
        pattern = compose(&LinearPattern::from_parts(tree, size), &pattern);
    }
    Ok(Some(pattern))
}
