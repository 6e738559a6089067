//! Verification oracles for test matrices.
//!
//! A t x width binary matrix encodes a non-adaptive strategy: row i is
//! the pool tested at step i, column j the membership pattern of vertex
//! j. The checks here decide whether a matrix is a separable code for a
//! hypergraph (all pairs of edges produce distinct column-ORs) or a
//! selector (every S-set submatrix realizes enough identity rows), and
//! report a witness when it is not.
//!
//! Verdicts are deterministic: tuples are enumerated in lexicographic
//! order and the first failure wins, so a failing check reproduces
//! identically across runs and platforms.

use alloc::vec::Vec;

use crate::bitset::{for_each_combination, Bitset};
use crate::error::{Error, Result};
use crate::hypergraph::{AugmentedHypergraph, Hypergraph, SSet};

/// Binary test matrix: rows are pools, columns are (real + dummy)
/// vertices. Columns 1..=real_columns are real; the rest belong to the
/// dummy pool and are never tested, only inspected by selector checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestMatrix {
    width: usize,
    real_columns: usize,
    rows: Vec<Bitset>,
}

impl TestMatrix {
    pub fn new(width: usize, real_columns: usize) -> Result<TestMatrix> {
        if real_columns == 0 || real_columns > width {
            return Err(Error::WidthMismatch { expected: real_columns, got: width });
        }
        Ok(TestMatrix { width, real_columns, rows: Vec::new() })
    }

    pub fn from_rows(width: usize, real_columns: usize, rows: Vec<Bitset>) -> Result<TestMatrix> {
        let mut m = TestMatrix::new(width, real_columns)?;
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    /// k x k identity matrix, all columns real.
    pub fn identity(k: usize) -> TestMatrix {
        let rows = (0..k).map(|i| Bitset::from_positions(k, [i])).collect();
        TestMatrix { width: k, real_columns: k, rows }
    }

    pub fn push_row(&mut self, row: Bitset) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::WidthMismatch { expected: self.width, got: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Row count t: the number of pools.
    pub fn t(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn real_columns(&self) -> usize {
        self.real_columns
    }

    pub fn row(&self, r: usize) -> &Bitset {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[Bitset] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].test(c)
    }

    /// Column c (0-based) as a bitset over the t rows.
    pub fn column(&self, c: usize) -> Bitset {
        Bitset::from_positions(self.rows.len(), self.rows.iter().enumerate().filter_map(|(r, row)| row.test(c).then_some(r)))
    }

    /// Bitwise OR of the columns selected by `verts` (1-based vertex
    /// ids), as a bitset over rows. This is the response the matrix
    /// would produce if exactly those vertices were defective.
    pub fn or_of_columns(&self, verts: &Bitset) -> Bitset {
        Bitset::from_positions(
            self.rows.len(),
            self.rows.iter().enumerate().filter_map(|(r, row)| row.intersects(verts).then_some(r)),
        )
    }
}

/// Outcome of a separability or selector check. `witness` is present
/// exactly when the property fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// First failing tuple, in lexicographic order: the distinguished edge
/// followed by the q others (or the indistinguishable pair, for
/// separability). `identity_rows_found` lists the unit indices the
/// failing submatrix does realize, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub edges: Vec<usize>,
    pub found: usize,
    pub required: usize,
    pub identity_rows_found: Vec<usize>,
}

impl SelectorVerdict {
    fn ok() -> SelectorVerdict {
        SelectorVerdict { holds: true, witness: None }
    }

    fn fail(witness: Witness) -> SelectorVerdict {
        SelectorVerdict { holds: false, witness: Some(witness) }
    }
}

impl core::fmt::Display for SelectorVerdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.witness {
            None => write!(f, "holds"),
            Some(w) => write!(
                f,
                "fails: edges {:?} realize {} of {} required identity rows {:?}",
                w.edges, w.found, w.required, w.identity_rows_found
            ),
        }
    }
}

/// Unit indices realized by the submatrix on the S-set columns: the set
/// of j in [1, d+chi] such that some row restricted to the columns is
/// the j-th identity row. Rows whose restriction has weight != 1 are
/// skipped outright.
pub fn count_identity_rows(m: &TestMatrix, cols: &SSet) -> Result<Vec<usize>> {
    count_identity_rows_at(m, &cols.tuple)
}

fn count_identity_rows_at(m: &TestMatrix, tuple: &[usize]) -> Result<Vec<usize>> {
    for &c in tuple {
        if c == 0 || c > m.width() {
            return Err(Error::ColumnOutOfRange { column: c, width: m.width() });
        }
    }
    let mask = Bitset::from_positions(m.width(), tuple.iter().map(|&c| c - 1));
    let mut realized = Bitset::new(tuple.len());
    for row in m.rows() {
        if row.intersection_count(&mask) != 1 {
            continue;
        }
        let pos = row.first_common(&mask).expect("weight-1 intersection");
        let j = tuple.binary_search(&(pos + 1)).expect("position is in tuple");
        realized.set(j);
    }
    Ok(realized.iter_ones().map(|j| j + 1).collect())
}

/// Is `m` a separable code for `h`: do all pairs of distinct hyperedges
/// produce distinct column-ORs? Defined over real columns only; the
/// matrix must have exactly h.n() real columns.
pub fn is_separable(m: &TestMatrix, h: &Hypergraph) -> Result<SelectorVerdict> {
    if m.real_columns() != h.n() {
        return Err(Error::WidthMismatch { expected: h.n(), got: m.real_columns() });
    }
    let count = h.edge_count();
    let ors: Vec<Bitset> = (0..count).map(|i| m.or_of_columns(&h.edge_bits(i, m.width()))).collect();
    for i in 0..count {
        for j in i + 1..count {
            if ors[i] == ors[j] {
                return Ok(SelectorVerdict::fail(Witness {
                    edges: alloc::vec![i, j],
                    found: 0,
                    required: 0,
                    identity_rows_found: Vec::new(),
                }));
            }
        }
    }
    Ok(SelectorVerdict::ok())
}

/// Is `m` a selector for the augmented hypergraph at (q, mm, chi): does
/// every S-set submatrix realize at least mm identity rows? Enumerates
/// the q others as unordered subsets, since permuting them leaves the
/// S-set unchanged.
pub fn is_selector(
    m: &TestMatrix,
    ah: &AugmentedHypergraph,
    q: usize,
    mm: usize,
    chi: usize,
) -> Result<SelectorVerdict> {
    let count = ah.edge_count();
    if count < 2 {
        return Err(Error::TooFewEdges { need: 2, have: count });
    }
    if q < 1 || q > count - 1 {
        return Err(Error::ParamOutOfRange { name: "q", value: q, min: 1, max: count - 1 });
    }
    if mm > ah.d() + chi {
        return Err(Error::ParamOutOfRange { name: "m", value: mm, min: 0, max: ah.d() + chi });
    }
    if mm == 0 {
        return Ok(SelectorVerdict::ok());
    }
    for e in 0..count {
        let others: Vec<usize> = (0..count).filter(|&j| j != e).collect();
        let early = for_each_combination(others.len(), q, |combo| {
            let picked: Vec<usize> = combo.iter().map(|&c| others[c]).collect();
            let result = ah.s_set(e, &picked, chi).and_then(|s| {
                let found = count_identity_rows(m, &s)?;
                if found.len() < mm {
                    let mut edges = alloc::vec![e];
                    edges.extend_from_slice(&picked);
                    Ok(Some(SelectorVerdict::fail(Witness {
                        edges,
                        found: found.len(),
                        required: mm,
                        identity_rows_found: found,
                    })))
                } else {
                    Ok(None)
                }
            });
            match result {
                Ok(None) => None,
                Ok(Some(verdict)) => Some(Ok(verdict)),
                Err(err) => Some(Err(err)),
            }
        });
        if let Some(outcome) = early {
            return outcome;
        }
    }
    Ok(SelectorVerdict::ok())
}

/// The q = 1, chi = p specialization: every pairwise S-set submatrix
/// must realize at least mm identity rows.
pub fn is_p_selector(
    m: &TestMatrix,
    ah: &AugmentedHypergraph,
    p: usize,
    mm: usize,
) -> Result<SelectorVerdict> {
    is_selector(m, ah, 1, mm, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;

    fn h(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    fn matrix(width: usize, real: usize, rows: &[&[usize]]) -> TestMatrix {
        TestMatrix::from_rows(
            width,
            real,
            rows.iter().map(|r| Bitset::from_positions(width, r.iter().map(|&c| c - 1))).collect(),
        )
        .unwrap()
    }

    fn sset(tuple: &[usize], chi: usize) -> SSet {
        SSet { tuple: tuple.to_vec(), chi, contains_dummy: false }
    }

    #[test]
    fn identity_rows_examples() {
        let id4 = TestMatrix::identity(4);
        assert_eq!(count_identity_rows(&id4, &sset(&[1, 2, 3, 4], 2)).unwrap(), vec![1, 2, 3, 4]);

        let ones = matrix(4, 4, &[&[1, 2, 3, 4], &[1, 2, 3, 4], &[1, 2, 3, 4]]);
        assert!(count_identity_rows(&ones, &sset(&[1, 2, 3, 4], 2)).unwrap().is_empty());

        let m = matrix(4, 4, &[&[1, 2], &[3]]);
        assert_eq!(count_identity_rows(&m, &sset(&[1, 2, 3, 4], 2)).unwrap(), vec![3]);

        assert_eq!(
            count_identity_rows(&id4, &sset(&[1, 5], 1)).unwrap_err(),
            Error::ColumnOutOfRange { column: 5, width: 4 }
        );
    }

    #[test]
    fn separable_examples() {
        let disjoint = h(4, &[&[1, 2], &[3, 4]]);
        assert!(is_separable(&TestMatrix::identity(4), &disjoint).unwrap().holds);

        let ones = matrix(4, 4, &[&[1, 2, 3, 4], &[1, 2, 3, 4]]);
        let v = is_separable(&ones, &disjoint).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap().edges, vec![0, 1]);

        // identical columns 1 and 3 make {1,2} and {2,3} indistinguishable
        let twin = matrix(4, 4, &[&[1, 3], &[2], &[4]]);
        let g = h(4, &[&[1, 2], &[2, 3]]);
        assert!(!is_separable(&twin, &g).unwrap().holds);

        assert!(matches!(
            is_separable(&TestMatrix::identity(3), &disjoint),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn selector_examples() {
        let g = h(4, &[&[1, 2], &[3, 4]]);
        let ah = g.augment(2);
        let id4 = TestMatrix::identity(4);
        assert!(is_selector(&id4, &ah, 1, 3, 2).unwrap().holds);

        let trimmed = matrix(4, 4, &[&[1], &[2], &[3]]);
        assert!(is_selector(&trimmed, &ah, 1, 3, 2).unwrap().holds);
        let v = is_selector(&trimmed, &ah, 1, 4, 2).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.found, 3);
        assert_eq!(w.required, 4);
        assert_eq!(w.identity_rows_found, vec![1, 2, 3]);

        // vacuous at mm = 0
        let empty = TestMatrix::new(4, 4).unwrap();
        assert!(is_selector(&empty, &ah, 1, 0, 2).unwrap().holds);
    }

    #[test]
    fn p_selector_examples() {
        let g = h(4, &[&[1, 2], &[2, 3]]);
        let ah = g.augment(1);
        assert!(is_p_selector(&TestMatrix::identity(4), &ah, 1, 3).unwrap().holds);

        let zeros = TestMatrix::from_rows(4, 4, alloc::vec![Bitset::new(4), Bitset::new(4)]).unwrap();
        assert!(!is_p_selector(&zeros, &ah, 1, 1).unwrap().holds);
    }

    #[test]
    fn monotone_in_mm_and_rows() {
        let g = h(5, &[&[1, 2], &[2, 3], &[4, 5]]);
        let ah = g.augment(2);
        let m = matrix(6, 5, &[&[1], &[2], &[3], &[4], &[5, 6]]);
        let holds: Vec<bool> =
            (0..=4).map(|mm| is_selector(&m, &ah, 1, mm, 2).unwrap().holds).collect();
        for mm in 1..holds.len() {
            assert!(!holds[mm] || holds[mm - 1]);
        }
        assert!(holds[0]);
        // adding a row never flips holds -> fails
        let mut bigger = m.clone();
        bigger.push_row(Bitset::from_positions(6, [0, 1])).unwrap();
        for mm in 0..=4 {
            let before = is_selector(&m, &ah, 1, mm, 2).unwrap().holds;
            let after = is_selector(&bigger, &ah, 1, mm, 2).unwrap().holds;
            assert!(!before || after);
        }
    }

    #[test]
    fn witness_is_lexicographically_first() {
        let g = h(4, &[&[1, 2], &[2, 3], &[3, 4]]);
        let ah = g.augment(1);
        let zeros = TestMatrix::from_rows(5, 4, alloc::vec![Bitset::new(5)]).unwrap();
        let v = is_selector(&zeros, &ah, 1, 1, 1).unwrap();
        assert_eq!(v.witness.unwrap().edges, vec![0, 1]);
    }

    #[test]
    fn parameter_errors() {
        let g = h(4, &[&[1, 2], &[3, 4]]);
        let ah = g.augment(1);
        let id4 = TestMatrix::identity(4);
        assert!(matches!(is_selector(&id4, &ah, 0, 1, 1), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(is_selector(&id4, &ah, 2, 1, 1), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(is_selector(&id4, &ah, 1, 9, 1), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(is_selector(&id4, &ah, 1, 1, 3), Err(Error::PoolCapacity { .. })));
    }
}
