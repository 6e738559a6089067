//! Input hypergraphs, their structural parameters, and the dummy-vertex
//! machinery that uniformizes them.
//!
//! Vertices are the integers 1..=n. A hyperedge is a nonempty subset of
//! them; the family of hyperedges is the universe of candidate defective
//! sets. Two quantities drive everything downstream:
//!
//! - `p`: the minimum of |e' \ e| over ordered pairs of distinct edges;
//! - `chi(q)`: the minimum of |union(e'_1..e'_q) \ e| over a
//!   distinguished edge and q distinct others.
//!
//! Non-uniform hypergraphs are padded to the maximum edge size with dummy
//! vertices drawn from a single shared pool with ids n+1, n+2, ...; the
//! same pool tops up S-sets whose union difference falls short of chi.
//! Dummy vertices are bookkeeping for the analysis only and are never
//! tested by any protocol.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::{for_each_combination, Bitset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// Edge with no vertices (0-based edge index).
    EmptyEdge { edge: usize },
    /// Vertex id outside [1, n].
    VertexOutOfRange { edge: usize, vertex: usize },
    /// Two edges are equal as sets.
    DuplicateEdge { first: usize, second: usize },
    /// A vertex of [1, n] belongs to no edge. Such a vertex can never be
    /// part of the defective set; compaction is offered but not applied.
    UncoveredVertex { vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
}

impl core::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.kind {
            DiagnosticKind::EmptyEdge { edge } => write!(f, "edge {} is empty", edge + 1),
            DiagnosticKind::VertexOutOfRange { edge, vertex } => {
                write!(f, "edge {} contains out-of-range vertex {}", edge + 1, vertex)
            }
            DiagnosticKind::DuplicateEdge { first, second } => {
                write!(f, "edge {} duplicates edge {}", second + 1, first + 1)
            }
            DiagnosticKind::UncoveredVertex { vertex } => {
                write!(f, "vertex {vertex} is in no edge (consider compaction)")
            }
        }
    }
}

/// A hypergraph on vertex set [1, n] with a fixed edge list.
///
/// Edges are kept as strictly increasing id sequences. Construction
/// rejects structurally unusable input (empty edges, ids outside the
/// universe); duplicate edges and uncovered vertices are reported by
/// [`Hypergraph::validate`] so callers decide how strict to be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    d: usize,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Hypergraph> {
        if n == 0 {
            return Err(Error::ParamOutOfRange { name: "n", value: 0, min: 1, max: usize::MAX });
        }
        let mut sorted = Vec::with_capacity(edges.len());
        for (i, edge) in edges.into_iter().enumerate() {
            let mut e = edge;
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::EmptyEdge { edge: i });
            }
            if let Some(&v) = e.iter().find(|&&v| v == 0 || v > n) {
                return Err(Error::VertexOutOfRange { edge: i, vertex: v, n });
            }
            sorted.push(e);
        }
        let d = sorted.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Hypergraph { n, edges: sorted, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Maximum edge size; 0 when there are no edges.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    pub fn is_uniform(&self) -> bool {
        self.edges.iter().all(|e| e.len() == self.d)
    }

    /// Edge as a bitset over `width` columns (vertex v at bit v-1).
    pub fn edge_bits(&self, i: usize, width: usize) -> Bitset {
        Bitset::from_positions(width, self.edges[i].iter().map(|&v| v - 1))
    }

    /// One diagnostic per invariant violation; empty iff all hold.
    /// Duplicate edges are errors, uncovered vertices warnings.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                if self.edges[i] == self.edges[j] {
                    out.push(Diagnostic {
                        severity: Severity::Error,
                        kind: DiagnosticKind::DuplicateEdge { first: i, second: j },
                    });
                }
            }
        }
        let mut covered = vec![false; self.n + 1];
        for e in &self.edges {
            for &v in e {
                covered[v] = true;
            }
        }
        for v in 1..=self.n {
            if !covered[v] {
                out.push(Diagnostic {
                    severity: Severity::Warning,
                    kind: DiagnosticKind::UncoveredVertex { vertex: v },
                });
            }
        }
        out
    }

    /// Copy with uncovered vertices removed and the rest renumbered to
    /// 1..=n'. Returns the new hypergraph and, for each new id, the old
    /// id it came from. Never applied automatically: renumbering changes
    /// user-facing ids.
    pub fn compact(&self) -> (Hypergraph, Vec<usize>) {
        let mut covered = vec![false; self.n + 1];
        for e in &self.edges {
            for &v in e {
                covered[v] = true;
            }
        }
        let old_of_new: Vec<usize> = (1..=self.n).filter(|&v| covered[v]).collect();
        let mut new_of_old = vec![0usize; self.n + 1];
        for (new_minus_1, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new_minus_1 + 1;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| new_of_old[v]).collect())
            .collect();
        let h = Hypergraph::new(old_of_new.len().max(1), edges).expect("compaction preserves validity");
        (h, old_of_new)
    }

    /// min |e' \ e| over ordered pairs of distinct edges. 0 for nested
    /// edges; callers that need p >= 1 must check.
    pub fn compute_p(&self) -> Result<usize> {
        if self.edges.len() < 2 {
            return Err(Error::TooFewEdges { need: 2, have: self.edges.len() });
        }
        let bits: Vec<Bitset> = (0..self.edges.len()).map(|i| self.edge_bits(i, self.n)).collect();
        let mut best = usize::MAX;
        for (i, e) in bits.iter().enumerate() {
            for (j, ep) in bits.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut diff = ep.clone();
                diff.difference_with(e);
                best = best.min(diff.count_ones());
            }
        }
        Ok(best)
    }

    /// min |union(e'_1..e'_q) \ e| over a distinguished edge e and q
    /// distinct others; the others are unordered.
    pub fn compute_chi(&self, q: usize) -> Result<usize> {
        let m = self.edges.len();
        if m < 2 {
            return Err(Error::TooFewEdges { need: 2, have: m });
        }
        if q < 1 || q > m - 1 {
            return Err(Error::ParamOutOfRange { name: "q", value: q, min: 1, max: m - 1 });
        }
        let bits: Vec<Bitset> = (0..m).map(|i| self.edge_bits(i, self.n)).collect();
        let mut best = usize::MAX;
        for e in 0..m {
            let others: Vec<usize> = (0..m).filter(|&j| j != e).collect();
            for_each_combination::<()>(others.len(), q, |combo| {
                let mut union = Bitset::new(self.n);
                for &c in combo {
                    union.union_with(&bits[others[c]]);
                }
                union.difference_with(&bits[e]);
                best = best.min(union.count_ones());
                None
            });
        }
        Ok(best)
    }

    /// Uniformize to edges of size exactly d, sharing one dummy pool of
    /// max(chi_pool, d-1) vertices with ids n+1 upward. `chi_pool` is the
    /// largest chi the caller will ever pass to [`AugmentedHypergraph::s_set`]
    /// against this augmentation.
    pub fn augment(&self, chi_pool: usize) -> AugmentedHypergraph {
        let dummy_count = chi_pool.max(self.d.saturating_sub(1));
        let width = self.n + dummy_count;
        let mut edges_tilde = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let mut t = e.clone();
            t.extend(self.n + 1..=self.n + (self.d - e.len()));
            t.sort_unstable();
            edges_tilde.push(t);
        }
        let bits_tilde = edges_tilde
            .iter()
            .map(|e| Bitset::from_positions(width, e.iter().map(|&v| v - 1)))
            .collect();
        AugmentedHypergraph {
            base: self.clone(),
            d: self.d,
            chi_pool,
            dummy_count,
            edges_tilde,
            bits_tilde,
        }
    }
}

/// A uniformized hypergraph: every edge padded to size d with the shared
/// dummy pool. Carries its base so real and padded views stay paired.
#[derive(Debug, Clone)]
pub struct AugmentedHypergraph {
    base: Hypergraph,
    d: usize,
    chi_pool: usize,
    dummy_count: usize,
    edges_tilde: Vec<Vec<usize>>,
    bits_tilde: Vec<Bitset>,
}

/// The d+chi column ids a selector check inspects for one tuple of
/// hyperedges: the distinguished (padded) edge plus the chi smallest
/// elements of the others' union difference, topped up from the dummy
/// pool when that difference is smaller than chi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSet {
    /// Strictly increasing 1-based column ids, d+chi of them.
    pub tuple: Vec<usize>,
    pub chi: usize,
    /// True iff the chi complement slots needed any dummy vertex, i.e.
    /// iff the union difference of the underlying real edges is < chi.
    pub contains_dummy: bool,
}

impl SSet {
    pub fn len(&self) -> usize {
        self.tuple.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuple.is_empty()
    }
}

impl AugmentedHypergraph {
    pub fn base(&self) -> &Hypergraph {
        &self.base
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn chi_pool(&self) -> usize {
        self.chi_pool
    }

    pub fn dummy_count(&self) -> usize {
        self.dummy_count
    }

    /// Total column count: real vertices plus the dummy pool.
    pub fn width(&self) -> usize {
        self.base.n + self.dummy_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges_tilde.len()
    }

    pub fn edges_tilde(&self) -> &[Vec<usize>] {
        &self.edges_tilde
    }

    pub fn edge_tilde_bits(&self, i: usize) -> &Bitset {
        &self.bits_tilde[i]
    }

    /// S-set for the distinguished edge `e_index` against `others`
    /// (distinct edge indices, none equal to e_index), at the given chi.
    pub fn s_set(&self, e_index: usize, others: &[usize], chi: usize) -> Result<SSet> {
        let m = self.edges_tilde.len();
        if e_index >= m {
            return Err(Error::ParamOutOfRange { name: "e_index", value: e_index, min: 0, max: m - 1 });
        }
        for &o in others {
            if o >= m || o == e_index {
                return Err(Error::ParamOutOfRange { name: "others", value: o, min: 0, max: m - 1 });
            }
        }
        if chi < 1 {
            return Err(Error::ParamOutOfRange { name: "chi", value: chi, min: 1, max: self.chi_pool });
        }
        if chi > self.chi_pool {
            return Err(Error::PoolCapacity { chi, declared: self.chi_pool });
        }
        let width = self.width();
        let n = self.base.n;
        let mut union = Bitset::new(width);
        for &o in others {
            union.union_with(&self.bits_tilde[o]);
        }
        union.difference_with(&self.bits_tilde[e_index]);

        let mut members = self.bits_tilde[e_index].clone();
        let mut taken = 0usize;
        let mut real_taken = 0usize;
        for pos in union.iter_ones() {
            if taken == chi {
                break;
            }
            members.set(pos);
            taken += 1;
            if pos < n {
                real_taken += 1;
            }
        }
        // top up with the smallest pool ids not already present
        let mut short = chi - taken;
        let mut pos = n;
        while short > 0 {
            if pos >= width {
                return Err(Error::PoolExhausted { capacity: self.dummy_count });
            }
            if !members.test(pos) {
                members.set(pos);
                short -= 1;
            }
            pos += 1;
        }
        let tuple: Vec<usize> = members.iter_ones().map(|p| p + 1).collect();
        debug_assert_eq!(tuple.len(), self.d + chi);
        Ok(SSet { tuple, chi, contains_dummy: real_taken < chi })
    }
}

/// Smallest pool declaration that lets every S-set at this (q, chi) form
/// without exhausting the pool. Equals chi whenever no tuple needs a
/// top-up past the padding already inside its edges; larger only when
/// chi exceeds some tuple's union difference on a non-uniform input.
pub fn required_chi_pool(h: &Hypergraph, q: usize, chi: usize) -> Result<usize> {
    let m = h.edge_count();
    if m < 2 {
        return Err(Error::TooFewEdges { need: 2, have: m });
    }
    if q < 1 || q > m - 1 {
        return Err(Error::ParamOutOfRange { name: "q", value: q, min: 1, max: m - 1 });
    }
    if chi < 1 {
        return Err(Error::ParamOutOfRange { name: "chi", value: chi, min: 1, max: usize::MAX });
    }
    // A pool of chi + d - 1 always suffices: an edge holds at most d-1
    // pool ids and the top-up skips them.
    let probe = h.augment(chi + h.d());
    let n = h.n();
    let mut needed = chi;
    for e in 0..m {
        let others: Vec<usize> = (0..m).filter(|&j| j != e).collect();
        let res = for_each_combination(others.len(), q, |combo| {
            let picked: Vec<usize> = combo.iter().map(|&c| others[c]).collect();
            match probe.s_set(e, &picked, chi) {
                Ok(s) => {
                    let max_dummy = s.tuple.iter().rev().find(|&&v| v > n).map_or(0, |&v| v - n);
                    needed = needed.max(max_dummy);
                    None
                }
                Err(err) => Some(err),
            }
        });
        if let Some(err) = res {
            return Err(err);
        }
    }
    Ok(needed)
}
