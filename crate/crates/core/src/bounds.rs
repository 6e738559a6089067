//! Closed-form upper bounds on selector sizes.
//!
//! Both evaluators share the shape
//!
//! ```text
//! t < 2e(d+chi)/(d+chi-m+1) * (1 + ln( C(d+chi-1, d+chi-m) * A ))
//! ```
//!
//! where A is the smaller of two degree estimates: one counting edge
//! tuples, one counting column patterns. The selector bound takes m and
//! the real column count n as given; the two-stage bound fixes m = d+1,
//! widens n to n+d-1 to account for the dummy pool, and adds the d*q
//! individual tests of its second stage.
//!
//! The log of the bound is accumulated in f64 directly from logarithms
//! of the factors, so the reported value stays finite and accurate even
//! when the branch values themselves overflow.

use libm::{exp, log};

use crate::error::{Error, Result};

/// Evaluated size bound with its ingredients, for reporting achieved
/// sizes against predicted ones.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Right-hand side of the bound.
    pub t_bound: f64,
    /// The min-expression value (alpha or beta); min of the two branches.
    pub min_expr: f64,
    /// Tuple-counting branch: e^q |E| ((|E|-1)/q)^q.
    pub branch_edges: f64,
    /// Column-pattern branch: e^{d+chi-1} (N/(d+chi-1))^{d+chi}.
    pub branch_width: f64,
    /// Additive individual-test term (d*q for the two-stage bound).
    pub additive: f64,
    pub n: usize,
    pub d: usize,
    pub q: usize,
    pub m: usize,
    pub chi: usize,
    pub edge_count: usize,
}

impl BoundReport {
    /// Smallest integer test count consistent with the bound.
    pub fn ceil(&self) -> usize {
        libm::ceil(self.t_bound) as usize
    }
}

impl core::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "bound={:.6}", self.t_bound)?;
        writeln!(f, "bound_ceil={}", self.ceil())?;
        writeln!(f, "min_expr={:.6}", self.min_expr)?;
        writeln!(f, "branch_edges={:.6}", self.branch_edges)?;
        writeln!(f, "branch_width={:.6}", self.branch_width)?;
        writeln!(f, "additive={:.6}", self.additive)?;
        write!(
            f,
            "n={} d={} q={} m={} chi={} edges={}",
            self.n, self.d, self.q, self.m, self.chi, self.edge_count
        )
    }
}

/// ln C(a, b) as a sum of factor logarithms.
fn ln_binomial(a: usize, b: usize) -> f64 {
    let b = b.min(a - b);
    (1..=b).map(|i| log((a - b + i) as f64) - log(i as f64)).sum()
}

fn check_common(n: usize, d: usize, q: usize, chi: usize, edge_count: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::ParamOutOfRange { name: "d", value: d, min: 1, max: n });
    }
    if chi < 1 {
        return Err(Error::ParamOutOfRange { name: "chi", value: chi, min: 1, max: n });
    }
    if edge_count < 2 {
        return Err(Error::TooFewEdges { need: 2, have: edge_count });
    }
    if q < 1 || q > edge_count - 1 {
        return Err(Error::ParamOutOfRange { name: "q", value: q, min: 1, max: edge_count - 1 });
    }
    Ok(())
}

fn bound_report(
    n_cols: usize,
    n_echo: usize,
    d: usize,
    q: usize,
    m: usize,
    chi: usize,
    edge_count: usize,
    additive: f64,
) -> BoundReport {
    let k = d + chi;
    let coeff = 2.0 * core::f64::consts::E * k as f64 / (k - m + 1) as f64;
    let ln_edges = q as f64 + log(edge_count as f64)
        + q as f64 * (log((edge_count - 1) as f64) - log(q as f64));
    let ln_width = (k - 1) as f64 + k as f64 * (log(n_cols as f64) - log((k - 1) as f64));
    let ln_min = if ln_edges <= ln_width { ln_edges } else { ln_width };
    let t_bound = coeff * (1.0 + ln_binomial(k - 1, k - m) + ln_min) + additive;
    BoundReport {
        t_bound,
        min_expr: exp(ln_min),
        branch_edges: exp(ln_edges),
        branch_width: exp(ln_width),
        additive,
        n: n_echo,
        d,
        q,
        m,
        chi,
        edge_count,
    }
}

/// Size bound for an (E, q, m, chi)-selector on n columns.
pub fn eval_selector_bound(
    n: usize,
    d: usize,
    q: usize,
    m: usize,
    chi: usize,
    edge_count: usize,
) -> Result<BoundReport> {
    check_common(n, d, q, chi, edge_count)?;
    if m < 1 || m > d + chi {
        return Err(Error::ParamOutOfRange { name: "m", value: m, min: 1, max: d + chi });
    }
    if d + chi > n {
        return Err(Error::ParamOutOfRange { name: "d+chi", value: d + chi, min: 2, max: n });
    }
    Ok(bound_report(n, n, d, q, m, chi, edge_count, 0.0))
}

/// Test-count bound for the trivial two-stage strategy: the selector
/// bound at m = d+1 on n+d-1 columns, plus d*q individual tests.
pub fn eval_two_stage_bound(
    n: usize,
    d: usize,
    q: usize,
    chi: usize,
    edge_count: usize,
) -> Result<BoundReport> {
    check_common(n, d, q, chi, edge_count)?;
    if d + chi > n + d - 1 {
        return Err(Error::ParamOutOfRange { name: "chi", value: chi, min: 1, max: n - 1 });
    }
    Ok(bound_report(n + d - 1, n, d, q, d + 1, chi, edge_count, (d * q) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn selector_bound_examples() {
        // alpha = min{12e, 27e^2} = 12e; t = 6e(1 + ln 12e)
        let r = eval_selector_bound(6, 2, 1, 3, 1, 4).unwrap();
        close(r.min_expr, 32.619381941508543);
        close(r.branch_edges, 32.619381941508543);
        close(r.branch_width, 199.504514671127566);
        close(r.t_bound, 73.147441490723139);

        // first branch e * 2 * 1 = 2e wins; t = 4e(1 + ln 6e)
        let r = eval_selector_bound(8, 2, 1, 3, 2, 2).unwrap();
        close(r.min_expr, 5.436563656918090);
        close(r.t_bound, 41.228283452360543);
    }

    #[test]
    fn m_equal_one_collapses_binomial() {
        // coefficient 2e and C(d+chi-1, d+chi-1) = 1, so t = 2e(1 + ln alpha)
        let r = eval_selector_bound(9, 3, 2, 1, 2, 5).unwrap();
        let e = core::f64::consts::E;
        close(r.t_bound, 2.0 * e * (1.0 + libm::log(r.min_expr)));
    }

    #[test]
    fn two_stage_bound_example() {
        // beta = min{6e, e^2 (7/2)^3} = 6e; t = 6e(1 + ln 6e) + 2
        let r = eval_two_stage_bound(6, 2, 1, 1, 3).unwrap();
        close(r.min_expr, 16.309690970754271);
        close(r.branch_width, 316.805780241651632);
        close(r.t_bound, 63.842425178540815);
        assert_eq!(r.additive, 2.0);
        assert_eq!(r.m, 3);
    }

    #[test]
    fn two_stage_binomial_collapses_at_chi_one() {
        // C(d+chi-1, chi-1) = C(d, 0) = 1
        let r = eval_two_stage_bound(10, 3, 1, 1, 4).unwrap();
        let e = core::f64::consts::E;
        let expect = 2.0 * e * 4.0 * (1.0 + libm::log(r.min_expr)) + 3.0;
        close(r.t_bound, expect);
    }

    #[test]
    fn doubling_edges_increases_bound() {
        let small = eval_two_stage_bound(12, 3, 1, 2, 4).unwrap();
        let big = eval_two_stage_bound(12, 3, 1, 2, 8).unwrap();
        assert!(small.branch_edges < small.branch_width, "first branch active");
        assert!(big.t_bound > small.t_bound);
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(eval_selector_bound(6, 2, 0, 3, 1, 4), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(eval_selector_bound(6, 2, 4, 3, 1, 4), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(eval_selector_bound(6, 2, 1, 0, 1, 4), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(eval_selector_bound(6, 2, 1, 4, 1, 4), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(eval_selector_bound(3, 2, 1, 3, 2, 4), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(eval_selector_bound(6, 2, 1, 3, 0, 4), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(eval_two_stage_bound(6, 2, 1, 0, 3), Err(Error::ParamOutOfRange { .. })));
        assert!(matches!(eval_two_stage_bound(6, 2, 1, 1, 1), Err(Error::TooFewEdges { .. })));
    }
}
