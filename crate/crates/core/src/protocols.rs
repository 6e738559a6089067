//! Executable identification strategies with full transcripts.
//!
//! Every protocol drives a [`TestOracle`] hiding one defective hyperedge:
//! a pool answers positive iff it meets that edge. Stage one of each
//! strategy tests the rows of a freshly built selector and decodes by
//! discarding: a vertex seen in a negative pool eliminates every edge
//! containing it. What remains depends on the selector's parameters;
//! later stages (individual tests, a second discard round on the
//! residual instance) finish the identification.
//!
//! Transcripts record every pool, response bit, and survivor set, plus
//! any guarantee the run was observed to violate. Dummy vertices never
//! appear in a pool: they exist only inside the analysis.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bitset::Bitset;
use crate::construction::{build, BuilderConfig};
use crate::error::{Error, Result};
use crate::hypergraph::{required_chi_pool, Hypergraph};
use crate::selector::TestMatrix;

/// Answers pool queries against a hidden defective set and counts them.
/// Strict oracles require the hidden set to be a hyperedge; the
/// permissive constructor waives that for robustness experiments, which
/// voids every guarantee and marks the transcript.
#[derive(Debug, Clone)]
pub struct TestOracle {
    n: usize,
    defective: Bitset,
    defective_ids: Vec<usize>,
    strict: bool,
    calls: u64,
}

impl TestOracle {
    /// Oracle hiding the given edge of `h`.
    pub fn for_edge(h: &Hypergraph, edge: usize) -> Result<TestOracle> {
        if edge >= h.edge_count() {
            return Err(Error::ParamOutOfRange {
                name: "edge",
                value: edge,
                min: 0,
                max: h.edge_count().saturating_sub(1),
            });
        }
        Ok(TestOracle {
            n: h.n(),
            defective: h.edge_bits(edge, h.n()),
            defective_ids: h.edge(edge).to_vec(),
            strict: true,
            calls: 0,
        })
    }

    /// Oracle hiding an explicit vertex set, which must equal some edge.
    pub fn for_set(h: &Hypergraph, verts: &[usize]) -> Result<TestOracle> {
        let mut sorted = verts.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        match h.edges().iter().position(|e| *e == sorted) {
            Some(i) => TestOracle::for_edge(h, i),
            None => Err(Error::DefectiveNotInHypergraph),
        }
    }

    /// Oracle hiding an arbitrary subset of [1, n]. All protocol
    /// guarantees are void; transcripts carry strict = false.
    pub fn permissive(n: usize, verts: &[usize]) -> Result<TestOracle> {
        for &v in verts {
            if v == 0 || v > n {
                return Err(Error::VertexOutOfRange { edge: 0, vertex: v, n });
            }
        }
        let mut sorted = verts.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(TestOracle {
            n,
            defective: Bitset::from_positions(n, sorted.iter().map(|&v| v - 1)),
            defective_ids: sorted,
            strict: false,
            calls: 0,
        })
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn call_count(&self) -> u64 {
        self.calls
    }

    /// The hidden set, for post-run assertions; protocols must not
    /// consult it to decide anything.
    pub fn defective_ids(&self) -> &[usize] {
        &self.defective_ids
    }

    /// Test one pool of real vertex ids.
    pub fn query(&mut self, pool: &[usize]) -> bool {
        self.calls += 1;
        pool.iter().any(|&v| v >= 1 && v <= self.n && self.defective.test(v - 1))
    }
}

/// Pools of a matrix: one per row, real columns only, dummy columns
/// dropped.
pub fn real_pools(m: &TestMatrix) -> Vec<Vec<usize>> {
    m.rows()
        .iter()
        .map(|row| row.iter_ones().filter(|&p| p < m.real_columns()).map(|p| p + 1).collect())
        .collect()
}

/// Response vector: bit r is the oracle's answer on row r's real pool.
pub fn respond(oracle: &mut TestOracle, m: &TestMatrix) -> Vec<bool> {
    real_pools(m).iter().map(|pool| oracle.query(pool)).collect()
}

/// Discard decoding: a real vertex whose column has a 1 in some
/// position where the response has 0 lies in a negative pool, so every
/// edge containing such a vertex is eliminated. Returns surviving edge
/// indices.
pub fn decode_discard(m: &TestMatrix, h: &Hypergraph, resp: &[bool]) -> Result<Vec<usize>> {
    if resp.len() != m.t() {
        return Err(Error::ResponseLength { expected: m.t(), got: resp.len() });
    }
    let n = h.n().min(m.real_columns());
    let mut negative = Bitset::new(n);
    for (r, &bit) in resp.iter().enumerate() {
        if !bit {
            for pos in m.row(r).iter_ones() {
                if pos < n {
                    negative.set(pos);
                }
            }
        }
    }
    Ok((0..h.edge_count())
        .filter(|&i| !h.edge_bits(i, n).intersects(&negative))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolKind {
    NonAdaptive { p: usize },
    TwoStage { q: usize, chi: usize },
    ThreeStage { b: usize },
}

/// One non-adaptive round: the pools tested in parallel, their response
/// bits, and the candidate edges left after decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub pools: Vec<Vec<usize>>,
    pub responses: Vec<bool>,
    pub survivors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolTranscript {
    pub protocol: ProtocolKind,
    pub strict: bool,
    /// Set when the run can only narrow the candidates, not single one
    /// out (p above the instance's minimum difference).
    pub partial: bool,
    pub stages: Vec<Stage>,
    /// Edge whose vertices were individually probed (three-stage).
    pub focus_edge: Option<usize>,
    /// Vertices confirmed defective and removed before the last stage.
    pub stripped: Vec<usize>,
    /// Final candidate edge ids; a single id when identification is
    /// exact.
    pub answer: Vec<usize>,
    pub total_tests: usize,
    /// Observed guarantee violations; empty on every healthy run.
    pub violations: Vec<String>,
}

impl ProtocolTranscript {
    fn new(protocol: ProtocolKind, strict: bool) -> ProtocolTranscript {
        ProtocolTranscript {
            protocol,
            strict,
            partial: false,
            stages: Vec::new(),
            focus_edge: None,
            stripped: Vec::new(),
            answer: Vec::new(),
            total_tests: 0,
            violations: Vec::new(),
        }
    }

    fn push_stage(&mut self, stage: Stage) {
        self.total_tests += stage.pools.len();
        self.stages.push(stage);
    }
}

fn set_difference_size(a: &[usize], b: &Bitset) -> usize {
    a.iter().filter(|&&v| !b.test(v - 1)).count()
}

/// Build an (E~, q, d+1, chi)-selector for `h`, sized so every S-set can
/// form, and run one discard round against the oracle.
fn discard_stage(
    h: &Hypergraph,
    oracle: &mut TestOracle,
    q: usize,
    chi: usize,
    cfg: &BuilderConfig,
) -> Result<(TestMatrix, Stage)> {
    let pool = required_chi_pool(h, q, chi)?;
    let ah = h.augment(pool);
    let matrix = build(&ah, q, ah.d() + 1, chi, cfg)?;
    let pools = real_pools(&matrix);
    let responses = respond(oracle, &matrix);
    let survivors = decode_discard(&matrix, h, &responses)?;
    Ok((matrix, Stage { pools, responses, survivors }))
}

fn singleton_stage(verts: &[usize], oracle: &mut TestOracle) -> (Stage, Vec<usize>) {
    let pools: Vec<Vec<usize>> = verts.iter().map(|&v| alloc::vec![v]).collect();
    let responses: Vec<bool> = pools.iter().map(|pool| oracle.query(pool)).collect();
    let positives: Vec<usize> =
        verts.iter().zip(&responses).filter_map(|(&v, &r)| r.then_some(v)).collect();
    (Stage { pools, responses, survivors: Vec::new() }, positives)
}

/// Non-adaptive identification: one selector round with parameters
/// (q=1, m=d+1, chi=p). With p at most the instance's minimum pairwise
/// difference, the sole survivor is the defective edge; with larger p
/// the transcript is flagged partial and survivors still satisfy
/// |e' \ e*| < p.
pub fn run_non_adaptive(
    h: &Hypergraph,
    oracle: &mut TestOracle,
    p: usize,
    cfg: &BuilderConfig,
) -> Result<ProtocolTranscript> {
    if p < 1 {
        return Err(Error::ParamOutOfRange { name: "p", value: p, min: 1, max: h.d() });
    }
    if h.edge_count() == 0 {
        return Err(Error::TooFewEdges { need: 1, have: 0 });
    }
    let mut tr = ProtocolTranscript::new(ProtocolKind::NonAdaptive { p }, oracle.is_strict());
    if h.edge_count() == 1 {
        tr.push_stage(Stage { pools: Vec::new(), responses: Vec::new(), survivors: alloc::vec![0] });
        tr.answer = alloc::vec![0];
        return Ok(tr);
    }
    tr.partial = p > h.compute_p()?;
    let (_, stage) = discard_stage(h, oracle, 1, p, cfg)?;
    let survivors = stage.survivors.clone();
    tr.push_stage(stage);
    check_discard_guarantees(h, oracle, p, &survivors, &mut tr);
    if !tr.partial && survivors.len() != 1 && oracle.is_strict() {
        tr.violations.push(alloc::format!(
            "expected a unique survivor, found {}",
            survivors.len()
        ));
    }
    tr.answer = survivors;
    Ok(tr)
}

fn check_discard_guarantees(
    h: &Hypergraph,
    oracle: &TestOracle,
    p: usize,
    survivors: &[usize],
    tr: &mut ProtocolTranscript,
) {
    if !oracle.is_strict() {
        return;
    }
    let hidden = Bitset::from_positions(h.n(), oracle.defective_ids().iter().map(|&v| v - 1));
    let mut hidden_survives = false;
    for &i in survivors {
        let diff = set_difference_size(h.edge(i), &hidden);
        if diff == 0 && h.edge(i).len() == oracle.defective_ids().len() {
            hidden_survives = true;
        }
        if diff >= p {
            tr.violations.push(alloc::format!(
                "survivor {i} differs from the hidden edge in {diff} >= p = {p} vertices"
            ));
        }
    }
    if !hidden_survives {
        tr.violations.push(String::from("the hidden edge was discarded"));
    }
}

/// Trivial two-stage identification: a (q, d+1, chi)-selector round
/// leaves at most q+1 candidates, then one individual test per distinct
/// candidate vertex pins down the defective edge as the largest
/// candidate whose vertices all answered positive.
pub fn run_two_stage(
    h: &Hypergraph,
    oracle: &mut TestOracle,
    q: usize,
    cfg: &BuilderConfig,
) -> Result<ProtocolTranscript> {
    let count = h.edge_count();
    if count < 2 {
        return Err(Error::TooFewEdges { need: 2, have: count });
    }
    if q < 1 || q > count - 1 {
        return Err(Error::ParamOutOfRange { name: "q", value: q, min: 1, max: count - 1 });
    }
    let chi = h.compute_chi(q)?;
    if chi == 0 {
        return Err(Error::ChiZero);
    }
    let mut tr = ProtocolTranscript::new(ProtocolKind::TwoStage { q, chi }, oracle.is_strict());
    let (_, stage1) = discard_stage(h, oracle, q, chi, cfg)?;
    let survivors = stage1.survivors.clone();
    tr.push_stage(stage1);
    if survivors.len() > q + 1 {
        tr.violations.push(alloc::format!(
            "stage 1 left {} survivors, cap is q+1 = {}",
            survivors.len(),
            q + 1
        ));
    }
    if survivors.is_empty() {
        tr.violations.push(String::from("stage 1 discarded every edge"));
        return Ok(tr);
    }

    let mut verts: Vec<usize> = survivors.iter().flat_map(|&i| h.edge(i).iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    let (mut stage2, positives) = singleton_stage(&verts, oracle);
    let positive_bits = Bitset::from_positions(h.n(), positives.iter().map(|&v| v - 1));
    let consistent: Vec<usize> = survivors
        .iter()
        .copied()
        .filter(|&i| h.edge(i).iter().all(|&v| positive_bits.test(v - 1)))
        .collect();
    stage2.survivors = consistent.clone();
    tr.push_stage(stage2);

    match pick_largest(h, &consistent) {
        Some((winner, tie)) => {
            if tie {
                tr.violations.push(String::from("two largest consistent survivors tied"));
            }
            tr.answer = alloc::vec![winner];
        }
        None => tr.violations.push(String::from("no survivor is consistent with the individual tests")),
    }
    check_final_answer(h, oracle, &tr.answer.clone(), &mut tr);
    Ok(tr)
}

/// Largest edge among `candidates` by |edge|; `true` when the maximum is
/// not unique (the smaller index wins then).
fn pick_largest(h: &Hypergraph, candidates: &[usize]) -> Option<(usize, bool)> {
    let mut best: Option<usize> = None;
    let mut tie = false;
    for &i in candidates {
        match best {
            None => best = Some(i),
            Some(b) => {
                if h.edge(i).len() > h.edge(b).len() {
                    best = Some(i);
                    tie = false;
                } else if h.edge(i).len() == h.edge(b).len() {
                    tie = true;
                }
            }
        }
    }
    best.map(|b| (b, tie))
}

fn check_final_answer(
    h: &Hypergraph,
    oracle: &TestOracle,
    answer: &[usize],
    tr: &mut ProtocolTranscript,
) {
    if !oracle.is_strict() || tr.partial {
        return;
    }
    let matches = answer.len() == 1 && h.edge(answer[0]) == oracle.defective_ids();
    if !matches {
        tr.violations.push(String::from("answer differs from the hidden edge"));
    }
}

/// Three-stage identification. Stage 1 discards with threshold b, so
/// every survivor differs from the defective edge in fewer than b
/// vertices. Stage 2 individually tests a maximum-size survivor,
/// keeping only candidates whose overlap with it is exactly the
/// confirmed vertices, then strips those vertices, leaving candidate
/// residuals of size at most b-1. Stage 3 repeats the discard with
/// p = 1 on the residual instance; the largest remaining candidate
/// (with the stripped vertices re-added) is the answer.
pub fn run_three_stage(
    h: &Hypergraph,
    oracle: &mut TestOracle,
    b: usize,
    cfg: &BuilderConfig,
) -> Result<ProtocolTranscript> {
    if h.edge_count() == 0 {
        return Err(Error::TooFewEdges { need: 1, have: 0 });
    }
    let mut tr = ProtocolTranscript::new(ProtocolKind::ThreeStage { b }, oracle.is_strict());
    if h.edge_count() == 1 {
        tr.push_stage(Stage { pools: Vec::new(), responses: Vec::new(), survivors: alloc::vec![0] });
        tr.answer = alloc::vec![0];
        return Ok(tr);
    }
    if b < 1 || b >= h.d() {
        return Err(Error::ParamOutOfRange { name: "b", value: b, min: 1, max: h.d().saturating_sub(1) });
    }

    // stage 1: discard everything that differs from the defective edge
    // in at least b vertices
    let (_, stage1) = discard_stage(h, oracle, 1, b, cfg)?;
    let survivors = stage1.survivors.clone();
    tr.push_stage(stage1);
    check_discard_guarantees(h, oracle, b, &survivors, &mut tr);
    if survivors.is_empty() {
        return Ok(tr);
    }
    if survivors.len() == 1 {
        tr.answer = survivors;
        check_final_answer(h, oracle, &tr.answer.clone(), &mut tr);
        return Ok(tr);
    }

    // stage 2: unless every survivor is already small, probe a
    // maximum-size survivor vertex by vertex
    let mut candidates = survivors.clone();
    let mut stripped: Vec<usize> = Vec::new();
    if survivors.iter().any(|&i| h.edge(i).len() >= b) {
        let (focus, _) = pick_largest(h, &survivors).expect("nonempty survivors");
        tr.focus_edge = Some(focus);
        let focus_verts = h.edge(focus).to_vec();
        let (mut stage2, positives) = singleton_stage(&focus_verts, oracle);
        let focus_bits = Bitset::from_positions(h.n(), focus_verts.iter().map(|&v| v - 1));
        let positive_bits = Bitset::from_positions(h.n(), positives.iter().map(|&v| v - 1));
        candidates.retain(|&i| {
            let mut overlap = h.edge_bits(i, h.n());
            overlap.intersect_with(&focus_bits);
            overlap == positive_bits
        });
        stage2.survivors = candidates.clone();
        tr.push_stage(stage2);
        stripped = positives;
        tr.stripped = stripped.clone();
        if candidates.is_empty() {
            tr.violations.push(String::from("stage 2 discarded every candidate"));
            return Ok(tr);
        }
        if candidates.len() == 1 {
            tr.answer = candidates;
            check_final_answer(h, oracle, &tr.answer.clone(), &mut tr);
            return Ok(tr);
        }
    }

    // stage 3: discard with p = 1 on the residual instance (candidates
    // minus the stripped vertices, on a compacted universe)
    let stripped_bits = Bitset::from_positions(h.n(), stripped.iter().map(|&v| v - 1));
    let residuals: Vec<Vec<usize>> = candidates
        .iter()
        .map(|&i| h.edge(i).iter().copied().filter(|&v| !stripped_bits.test(v - 1)).collect())
        .collect();
    let nonempty: Vec<usize> = (0..candidates.len()).filter(|&ci| !residuals[ci].is_empty()).collect();
    for (ci, r) in residuals.iter().enumerate() {
        if r.len() > b.saturating_sub(1) && tr.focus_edge.is_some() {
            tr.violations.push(alloc::format!(
                "residual candidate {} kept {} vertices, cap is b-1 = {}",
                candidates[ci],
                r.len(),
                b - 1
            ));
        }
    }

    let mut final_candidates: Vec<usize> = Vec::new();
    if nonempty.len() >= 2 {
        let full = Hypergraph::new(h.n(), nonempty.iter().map(|&ci| residuals[ci].clone()).collect())?;
        let (h3, old_of_new) = full.compact();
        let pool = required_chi_pool(&h3, 1, 1)?;
        let ah3 = h3.augment(pool);
        let matrix3 = build(&ah3, 1, ah3.d() + 1, 1, cfg)?;
        let pools: Vec<Vec<usize>> = real_pools(&matrix3)
            .into_iter()
            .map(|pool| pool.into_iter().map(|v| old_of_new[v - 1]).collect())
            .collect();
        let responses: Vec<bool> = pools.iter().map(|pool| oracle.query(pool)).collect();
        let kept3 = decode_discard(&matrix3, &h3, &responses)?;
        for &ci in &nonempty {
            let pos_in_h3 = nonempty.iter().position(|&x| x == ci).expect("present");
            if kept3.contains(&pos_in_h3) {
                final_candidates.push(candidates[ci]);
            }
        }
        // a candidate reduced to nothing survives every pool
        final_candidates.extend(
            (0..candidates.len()).filter(|ci| residuals[*ci].is_empty()).map(|ci| candidates[ci]),
        );
        final_candidates.sort_unstable();
        tr.push_stage(Stage { pools, responses, survivors: final_candidates.clone() });
    } else if nonempty.len() == 1 {
        // one real candidate left (plus possibly an empty residual):
        // individual tests on its vertices realize the p = 1 discard
        let ci = nonempty[0];
        let (mut stage3, positives) = singleton_stage(&residuals[ci], oracle);
        if positives.len() == residuals[ci].len() {
            final_candidates.push(candidates[ci]);
        }
        final_candidates.extend(
            (0..candidates.len()).filter(|c| residuals[*c].is_empty()).map(|c| candidates[c]),
        );
        final_candidates.sort_unstable();
        stage3.survivors = final_candidates.clone();
        tr.push_stage(stage3);
    } else {
        final_candidates = candidates.clone();
    }

    if final_candidates.is_empty() {
        tr.violations.push(String::from("stage 3 discarded every candidate"));
        return Ok(tr);
    }
    // the largest residual wins; re-adding the stripped vertices turns
    // it back into its original edge
    let by_residual: Vec<(usize, usize)> = final_candidates
        .iter()
        .map(|&i| {
            let ci = candidates.iter().position(|&x| x == i).expect("candidate");
            (residuals[ci].len(), i)
        })
        .collect();
    let max_len = by_residual.iter().map(|&(l, _)| l).max().expect("nonempty");
    let winners: Vec<usize> =
        by_residual.iter().filter(|&&(l, _)| l == max_len).map(|&(_, i)| i).collect();
    if winners.len() > 1 {
        tr.violations.push(String::from("two largest residual candidates tied"));
    }
    tr.answer = alloc::vec![winners[0]];
    check_final_answer(h, oracle, &tr.answer.clone(), &mut tr);
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selector::is_selector;

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

    #[test]
    fn respond_examples() {
        let g = h(4, &[&[1, 2], &[3, 4]]);
        let mut o = TestOracle::for_edge(&g, 0).unwrap();
        assert_eq!(respond(&mut o, &TestMatrix::identity(4)), vec![true, true, false, false]);
        assert_eq!(o.call_count(), 4);

        let zeros = TestMatrix::from_rows(4, 4, vec![Bitset::new(4); 3]).unwrap();
        assert_eq!(respond(&mut o, &zeros), vec![false, false, false]);

        let g2 = h(4, &[&[2, 3], &[1, 4]]);
        let mut o2 = TestOracle::for_edge(&g2, 0).unwrap();
        let m = matrix(4, 4, &[&[1, 2], &[2, 3], &[3, 4]]);
        assert_eq!(respond(&mut o2, &m), vec![true, true, true]);
    }

    #[test]
    fn decode_examples() {
        let g = h(4, &[&[1, 2], &[3, 4]]);
        let id4 = TestMatrix::identity(4);
        assert_eq!(decode_discard(&id4, &g, &[true, true, false, false]).unwrap(), vec![0]);
        assert_eq!(decode_discard(&id4, &g, &[true, true, true, true]).unwrap(), vec![0, 1]);

        let g2 = h(4, &[&[1, 2], &[1, 3]]);
        let mut o = TestOracle::for_edge(&g2, 0).unwrap();
        let resp = respond(&mut o, &id4);
        assert_eq!(decode_discard(&id4, &g2, &resp).unwrap(), vec![0]);

        assert!(matches!(
            decode_discard(&id4, &g, &[true]),
            Err(Error::ResponseLength { expected: 4, got: 1 })
        ));
    }

    #[test]
    fn non_adaptive_identifies() {
        let g = h(4, &[&[1, 2], &[3, 4]]);
        let cfg = BuilderConfig::default();
        for defective in 0..2 {
            let mut o = TestOracle::for_edge(&g, defective).unwrap();
            let tr = run_non_adaptive(&g, &mut o, 2, &cfg).unwrap();
            assert_eq!(tr.answer, vec![defective]);
            assert!(!tr.partial);
            assert!(tr.violations.is_empty());
            assert_eq!(tr.total_tests as u64, o.call_count());
            let bound = eval_bound_for(&g, 2);
            assert!(tr.total_tests <= bound);
        }
    }

    fn eval_bound_for(g: &Hypergraph, p: usize) -> usize {
        let pool = required_chi_pool(g, 1, p).unwrap();
        let ah = g.augment(pool);
        crate::bounds::eval_selector_bound(ah.width(), g.d(), 1, g.d() + 1, p, g.edge_count())
            .unwrap()
            .ceil()
    }

    #[test]
    fn non_adaptive_single_edge() {
        let g = h(3, &[&[1, 2, 3]]);
        let mut o = TestOracle::for_edge(&g, 0).unwrap();
        let tr = run_non_adaptive(&g, &mut o, 1, &BuilderConfig::default()).unwrap();
        assert_eq!(tr.total_tests, 0);
        assert_eq!(tr.answer, vec![0]);
    }

    #[test]
    fn non_adaptive_partial_on_nested_edges() {
        let g = h(3, &[&[1, 2, 3], &[1, 2]]);
        let mut o = TestOracle::for_edge(&g, 0).unwrap();
        let tr = run_non_adaptive(&g, &mut o, 1, &BuilderConfig::default()).unwrap();
        assert!(tr.partial);
        assert!(tr.violations.is_empty());
        // survivors satisfy the partial guarantee |e' \ e*| < 1
        for &i in &tr.answer {
            let hidden = Bitset::from_positions(3, [0, 1, 2]);
            assert_eq!(set_difference_size(g.edge(i), &hidden), 0);
        }
    }

    #[test]
    fn two_stage_identifies_star() {
        let g = h(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        assert_eq!(g.compute_chi(1).unwrap(), 1);
        let cfg = BuilderConfig::default();
        for defective in 0..3 {
            let mut o = TestOracle::for_edge(&g, defective).unwrap();
            let tr = run_two_stage(&g, &mut o, 1, &cfg).unwrap();
            assert_eq!(tr.answer, vec![defective]);
            assert!(tr.violations.is_empty());
            assert_eq!(tr.stages.len(), 2);
            assert!(tr.stages[0].survivors.len() <= 2);
            // stage 2 is singleton pools over survivor vertices
            assert!(tr.stages[1].pools.iter().all(|p| p.len() == 1));
            assert!(tr.stages[1].pools.len() <= 2 * g.d());
        }
    }

    #[test]
    fn two_stage_survivor_cap_exhaustive() {
        let g = h(6, &[&[1, 2, 3], &[3, 4, 5], &[1, 5, 6], &[2, 4, 6]]);
        let cfg = BuilderConfig::default();
        for q in 1..=3 {
            let chi = g.compute_chi(q).unwrap();
            if chi == 0 {
                continue;
            }
            for defective in 0..g.edge_count() {
                let mut o = TestOracle::for_edge(&g, defective).unwrap();
                let tr = run_two_stage(&g, &mut o, q, &cfg).unwrap();
                assert!(tr.violations.is_empty(), "q={q} defective={defective}: {:?}", tr.violations);
                assert!(tr.stages[0].survivors.len() <= q + 1);
                assert_eq!(tr.answer, vec![defective]);
            }
        }
    }

    #[test]
    fn two_stage_rejects_chi_zero() {
        let g = h(3, &[&[1, 2, 3], &[1, 2]]);
        let mut o = TestOracle::for_edge(&g, 0).unwrap();
        assert_eq!(run_two_stage(&g, &mut o, 1, &BuilderConfig::default()).unwrap_err(), Error::ChiZero);
    }

    #[test]
    fn three_stage_example() {
        let g = h(5, &[&[1, 2, 3, 4], &[1, 2, 3, 5], &[1, 2]]);
        let cfg = BuilderConfig::default();
        for defective in 0..3 {
            let mut o = TestOracle::for_edge(&g, defective).unwrap();
            let tr = run_three_stage(&g, &mut o, 2, &cfg).unwrap();
            assert_eq!(tr.answer, vec![defective], "defective {defective}");
            assert!(tr.violations.is_empty(), "defective {defective}: {:?}", tr.violations);
            assert_eq!(tr.total_tests as u64, o.call_count());
        }
    }

    #[test]
    fn three_stage_far_apart_edges_resolve_in_stage_one() {
        let g = h(9, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let mut o = TestOracle::for_edge(&g, 1).unwrap();
        let tr = run_three_stage(&g, &mut o, 2, &BuilderConfig::default()).unwrap();
        assert_eq!(tr.answer, vec![1]);
        assert!(tr.violations.is_empty());
        assert_eq!(tr.stages.len(), 1);
    }

    #[test]
    fn three_stage_handles_nested_chains() {
        // proper subset chain at every edge
        let g = h(6, &[&[1, 2, 3, 4, 5], &[1, 2, 3], &[1, 2], &[4, 5, 6]]);
        let cfg = BuilderConfig::default();
        for defective in 0..g.edge_count() {
            let mut o = TestOracle::for_edge(&g, defective).unwrap();
            let tr = run_three_stage(&g, &mut o, 2, &cfg).unwrap();
            assert_eq!(tr.answer, vec![defective], "defective {defective}");
            assert!(tr.violations.is_empty(), "defective {defective}: {:?}", tr.violations);
        }
    }

    #[test]
    fn three_stage_parameter_range() {
        let g = h(5, &[&[1, 2, 3, 4], &[1, 2, 3, 5], &[1, 2]]);
        let mut o = TestOracle::for_edge(&g, 0).unwrap();
        assert!(matches!(
            run_three_stage(&g, &mut o, 0, &BuilderConfig::default()),
            Err(Error::ParamOutOfRange { .. })
        ));
        assert!(matches!(
            run_three_stage(&g, &mut o, 4, &BuilderConfig::default()),
            Err(Error::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn oracle_soundness_never_discards_hidden_edge() {
        // for any matrix and any hidden edge, decoding keeps the hidden edge
        let g = h(5, &[&[1, 2], &[2, 3], &[3, 4, 5], &[1, 5]]);
        let matrices = [
            TestMatrix::identity(5),
            matrix(5, 5, &[&[1, 2, 3], &[3, 4], &[2, 5], &[1, 4, 5]]),
            TestMatrix::from_rows(5, 5, vec![Bitset::new(5); 2]).unwrap(),
        ];
        for m in &matrices {
            for defective in 0..g.edge_count() {
                let mut o = TestOracle::for_edge(&g, defective).unwrap();
                let resp = respond(&mut o, m);
                let survivors = decode_discard(m, &g, &resp).unwrap();
                assert!(survivors.contains(&defective));
            }
        }
    }

    #[test]
    fn pools_never_contain_dummy_vertices() {
        let g = h(5, &[&[1], &[2, 3], &[3, 4, 5]]);
        let mut o = TestOracle::for_edge(&g, 2).unwrap();
        let tr = run_non_adaptive(&g, &mut o, 1, &BuilderConfig::default()).unwrap();
        for stage in &tr.stages {
            for pool in &stage.pools {
                assert!(pool.iter().all(|&v| v >= 1 && v <= g.n()));
            }
        }
    }

    #[test]
    fn permissive_oracle_marks_transcript() {
        let g = h(4, &[&[1, 2], &[3, 4]]);
        let mut o = TestOracle::permissive(4, &[1, 3]).unwrap();
        let tr = run_non_adaptive(&g, &mut o, 2, &BuilderConfig::default()).unwrap();
        assert!(!tr.strict);
        assert!(tr.violations.is_empty());
        assert!(matches!(TestOracle::for_set(&g, &[1, 3]), Err(Error::DefectiveNotInHypergraph)));
    }

    #[test]
    fn stage_one_matrix_is_a_selector() {
        let g = h(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        let pool = required_chi_pool(&g, 1, 1).unwrap();
        let ah = g.augment(pool);
        let m = build(&ah, 1, 3, 1, &BuilderConfig::default()).unwrap();
        assert!(is_selector(&m, &ah, 1, 3, 1).unwrap().holds);
        // the identity on 4 columns is also a valid stage-1 matrix here
        assert!(is_selector(&TestMatrix::identity(4), &ah, 1, 3, 1).unwrap().holds);
    }
}
