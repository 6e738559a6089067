//! Brute-force reference implementations used as test oracles.
//!
//! Everything in this crate favours obviousness over speed: plain
//! `BTreeSet` arithmetic, explicit submatrix materialization, textbook
//! greedy cover on fully materialized set systems, and a double-double
//! float type for high-precision bound evaluation. None of it shares
//! code with `hgt-core`; that independence is the point.

pub mod dd;

use std::collections::BTreeSet;

/// C(n, k) in u128, `None` on overflow.
pub fn binom_u128(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// All k-subsets of `items`, in lexicographic order.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn to_set(edge: &[usize]) -> BTreeSet<usize> {
    edge.iter().copied().collect()
}

/// min over ordered pairs (e, e') of distinct hyperedges of |e' \ e|.
pub fn min_difference(edges: &[Vec<usize>]) -> usize {
    let sets: Vec<_> = edges.iter().map(|e| to_set(e)).collect();
    let mut best = usize::MAX;
    for (i, e) in sets.iter().enumerate() {
        for (j, ep) in sets.iter().enumerate() {
            if i == j {
                continue;
            }
            best = best.min(ep.difference(e).count());
        }
    }
    best
}

/// min over (e; q distinct others) of |union(others) \ e|.
pub fn min_union_difference(edges: &[Vec<usize>], q: usize) -> usize {
    let sets: Vec<_> = edges.iter().map(|e| to_set(e)).collect();
    let mut best = usize::MAX;
    for i in 0..sets.len() {
        let others: Vec<usize> = (0..sets.len()).filter(|&j| j != i).collect();
        for combo in combinations(&others, q) {
            let mut union = BTreeSet::new();
            for &j in &combo {
                union.extend(sets[j].iter().copied());
            }
            best = best.min(union.difference(&sets[i]).count());
        }
    }
    best
}

/// Uniformized copy of `edges`: every edge padded to size `d` with the
/// dummy ids n+1, n+2, ... (one shared pool).
pub fn tilde_edges(edges: &[Vec<usize>], n: usize, d: usize) -> Vec<Vec<usize>> {
    edges
        .iter()
        .map(|e| {
            let mut t: Vec<usize> = e.clone();
            let mut next = n + 1;
            while t.len() < d {
                t.push(next);
                next += 1;
            }
            t.sort_unstable();
            t
        })
        .collect()
}

/// The d+chi column ids of one S-set over the uniformized edges, or
/// `None` when the shared dummy pool (ids n+1 ..= n+pool_cap) runs out.
pub fn s_set(
    tilde: &[Vec<usize>],
    n: usize,
    pool_cap: usize,
    e: usize,
    others: &[usize],
    chi: usize,
) -> Option<Vec<usize>> {
    let e_set = to_set(&tilde[e]);
    let mut union = BTreeSet::new();
    for &j in others {
        union.extend(tilde[j].iter().copied());
    }
    let diff: Vec<usize> = union.difference(&e_set).copied().collect();
    let mut picked: BTreeSet<usize> = e_set.clone();
    for &v in diff.iter().take(chi) {
        picked.insert(v);
    }
    let mut short = chi.saturating_sub(diff.len());
    let mut next = n + 1;
    while short > 0 {
        if next > n + pool_cap {
            return None;
        }
        if !picked.contains(&next) {
            picked.insert(next);
            short -= 1;
        }
        next += 1;
    }
    Some(picked.into_iter().collect())
}

/// Unit indices realized in the submatrix of `rows` on `cols` (1-based
/// column ids), found by comparing every submatrix row against every
/// explicit unit vector.
pub fn count_unit_rows(rows: &[Vec<u8>], cols: &[usize]) -> BTreeSet<usize> {
    let k = cols.len();
    let mut found = BTreeSet::new();
    for row in rows {
        let sub: Vec<u8> = cols.iter().map(|&c| row[c - 1]).collect();
        for j in 1..=k {
            let unit: Vec<u8> = (1..=k).map(|i| u8::from(i == j)).collect();
            if sub == unit {
                found.insert(j);
            }
        }
    }
    found
}

/// Does `rows` satisfy the selector property (every S-set submatrix
/// realizes at least `m` unit rows) over the given hypergraph?
/// Returns `Err` if some S-set cannot be formed within the pool.
pub fn is_selector(
    rows: &[Vec<u8>],
    width: usize,
    edges: &[Vec<usize>],
    n: usize,
    d: usize,
    pool_cap: usize,
    q: usize,
    m: usize,
    chi: usize,
) -> Result<bool, String> {
    let tilde = tilde_edges(edges, n, d);
    for e in 0..edges.len() {
        let others: Vec<usize> = (0..edges.len()).filter(|&j| j != e).collect();
        for combo in combinations(&others, q) {
            let cols = s_set(&tilde, n, pool_cap, e, &combo, chi)
                .ok_or_else(|| format!("pool exhausted for e={e} others={combo:?}"))?;
            if cols.iter().any(|&c| c > width) {
                return Err(format!("column {:?} outside matrix", cols));
            }
            if count_unit_rows(rows, &cols).len() < m {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Does `rows` separate every pair of hyperedges by column-OR?
pub fn is_separable(rows: &[Vec<u8>], edges: &[Vec<usize>]) -> bool {
    let or_of = |e: &Vec<usize>| -> Vec<u8> {
        rows.iter()
            .map(|row| e.iter().map(|&v| row[v - 1]).max().unwrap_or(0))
            .collect()
    };
    let ors: Vec<Vec<u8>> = edges.iter().map(or_of).collect();
    for i in 0..ors.len() {
        for j in i + 1..ors.len() {
            if ors[i] == ors[j] {
                return false;
            }
        }
    }
    true
}

/// Max degree of the auxiliary cover hypergraph, found by scanning every
/// weight-w vector of length n_prime against every S-set tuple.
/// `s` is the A-set size; tuples hold 1-based column ids.
pub fn exhaustive_delta(n_prime: usize, w: usize, tuples: &[Vec<usize>], s: usize) -> u128 {
    let k = tuples.first().map_or(0, Vec::len);
    let per_unit = binom_u128((k - 1) as u128, (s - 1) as u128).expect("small binomial");
    let positions: Vec<usize> = (1..=n_prime).collect();
    let mut best: u128 = 0;
    for support in combinations(&positions, w) {
        let sup: BTreeSet<usize> = support.into_iter().collect();
        let mut hits: u128 = 0;
        for tuple in tuples {
            if tuple.iter().filter(|v| sup.contains(v)).count() == 1 {
                hits += 1;
            }
        }
        best = best.max(hits * per_unit);
    }
    best
}

/// Textbook greedy cover of the auxiliary hypergraph, with the target
/// sets fully materialized. Returns the chosen rows (width n_prime).
/// Exponential; for tiny instances only.
pub fn greedy_cover(n_prime: usize, w: usize, tuples: &[Vec<usize>], s: usize, m: usize) -> Vec<Vec<u8>> {
    let k = tuples.first().map_or(0, Vec::len);
    // candidate vectors, indexed
    let positions: Vec<usize> = (1..=n_prime).collect();
    let cands: Vec<Vec<u8>> = combinations(&positions, w)
        .into_iter()
        .map(|sup| {
            let mut v = vec![0u8; n_prime];
            for p in sup {
                v[p - 1] = 1;
            }
            v
        })
        .collect();
    // every B_{A,tuple}: the candidate indices whose restriction to the
    // tuple is a unit vector with its 1-position ranked inside A
    let unit_ranks: Vec<usize> = (0..k).collect();
    let mut targets: Vec<BTreeSet<usize>> = Vec::new();
    for tuple in tuples {
        for a_set in combinations(&unit_ranks, s) {
            let mut b = BTreeSet::new();
            for (ci, cand) in cands.iter().enumerate() {
                let sub: Vec<u8> = tuple.iter().map(|&c| cand[c - 1]).collect();
                if sub.iter().map(|&x| x as usize).sum::<usize>() == 1 {
                    let pos = sub.iter().position(|&x| x == 1).unwrap();
                    if a_set.contains(&pos) {
                        b.insert(ci);
                    }
                }
            }
            targets.push(b);
        }
    }
    let _ = m;
    let mut uncovered: Vec<bool> = vec![true; targets.len()];
    let mut rows = Vec::new();
    while uncovered.iter().any(|&u| u) {
        let mut best_ci = usize::MAX;
        let mut best_score = 0usize;
        for (ci, cand) in cands.iter().enumerate() {
            let score = targets
                .iter()
                .zip(&uncovered)
                .filter(|(b, &u)| u && b.contains(&ci))
                .count();
            let better = score > best_score
                || (score == best_score && best_ci != usize::MAX && cand < &cands[best_ci]);
            if score > 0 && (best_ci == usize::MAX || better) {
                best_ci = ci;
                best_score = score;
            }
        }
        assert_ne!(best_ci, usize::MAX, "uncoverable target set");
        for (b, u) in targets.iter().zip(uncovered.iter_mut()) {
            if b.contains(&best_ci) {
                *u = false;
            }
        }
        rows.push(cands[best_ci].clone());
    }
    rows
}
