//! Double-double arithmetic: an unevaluated sum of two f64, giving
//! roughly 106 bits of mantissa. Enough headroom to certify a plain
//! f64 evaluation to 1e-9 relative error with a wide margin.

/// hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const E: Dd = Dd { hi: 2.718281828459045, lo: 1.4456468917292502e-16 };
pub const LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };

impl Dd {
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_usize(x: usize) -> Dd {
        Dd::from_u128(x as u128)
    }

    pub fn from_u128(x: u128) -> Dd {
        let hi = x as f64;
        debug_assert!(hi < 2f64.powi(120));
        let lo = if hi >= 2f64.powi(127) {
            0.0
        } else {
            let back = hi as i128;
            (x as i128 - back) as f64
        };
        Dd::new(hi, lo)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::new(s, e + self.lo + o.lo)
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::new(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r2 = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e).add(Dd::from_f64(q3))
    }

    pub fn powi(self, mut n: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::from_f64(1.0);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }

    /// exp via range reduction x = k ln2 + r and a Taylor series on r.
    pub fn exp(self) -> Dd {
        if self.hi > 700.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -700.0 {
            return Dd::from_f64(0.0);
        }
        let k = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul(Dd::from_f64(k)));
        let mut term = Dd::from_f64(1.0);
        let mut sum = Dd::from_f64(1.0);
        for i in 1..40 {
            term = term.mul(r).div(Dd::from_f64(i as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        let scale = 2f64.powi(k as i32);
        Dd::new(sum.hi * scale, sum.lo * scale)
    }

    /// ln via an f64 seed refined by two Newton steps y += x*exp(-y) - 1.
    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "ln of non-positive value");
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            let corr = self.mul(y.neg().exp()).sub(Dd::from_f64(1.0));
            y = y.add(corr);
        }
        y
    }

    pub fn min(self, o: Dd) -> Dd {
        if self.to_f64() <= o.to_f64() {
            self
        } else {
            o
        }
    }
}

/// C(a, b) as a Dd, multiplied out ratio by ratio.
pub fn binom_dd(a: usize, b: usize) -> Dd {
    if b > a {
        return Dd::from_f64(0.0);
    }
    let b = b.min(a - b);
    let mut acc = Dd::from_f64(1.0);
    for i in 1..=b {
        acc = acc.mul(Dd::from_usize(a - b + i)).div(Dd::from_usize(i));
    }
    acc
}

/// High-precision evaluation of the selector size bound
///   2e(d+chi)/(d+chi-m+1) * (1 + ln( C(d+chi-1, d+chi-m) * alpha ))
/// with alpha = min{ e^q |E| ((|E|-1)/q)^q, e^{d+chi-1} (N/(d+chi-1))^{d+chi} }.
/// Returns (t, alpha, branch_edges, branch_width).
pub fn selector_bound(
    n_cols: usize,
    d: usize,
    q: usize,
    m: usize,
    chi: usize,
    e_size: usize,
) -> (f64, f64, f64, f64) {
    let k = d + chi;
    let coeff = Dd::from_f64(2.0)
        .mul(E)
        .mul(Dd::from_usize(k))
        .div(Dd::from_usize(k - m + 1));
    let b1 = Dd::from_usize(q)
        .exp()
        .mul(Dd::from_usize(e_size))
        .mul(Dd::from_usize(e_size - 1).div(Dd::from_usize(q)).powi(q as u32));
    let b2 = Dd::from_usize(k - 1)
        .exp()
        .mul(Dd::from_usize(n_cols).div(Dd::from_usize(k - 1)).powi(k as u32));
    let alpha = b1.min(b2);
    let c = binom_dd(k - 1, k - m);
    let t = coeff.mul(Dd::from_f64(1.0).add(c.mul(alpha).ln()));
    (t.to_f64(), alpha.to_f64(), b1.to_f64(), b2.to_f64())
}

/// High-precision two-stage bound: the selector bound with m = d+1 and
/// N = n+d-1, plus the d*q individual tests.
pub fn two_stage_bound(n: usize, d: usize, q: usize, chi: usize, e_size: usize) -> (f64, f64, f64, f64) {
    let (t, beta, b1, b2) = selector_bound(n + d - 1, d, q, d + 1, chi, e_size);
    (t + (d * q) as f64, beta, b1, b2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        let x = Dd::from_f64(1.0).exp();
        assert!((x.sub(E)).to_f64().abs() < 1e-30);
        let y = E.ln();
        assert!((y.to_f64() - 1.0).abs() < 1e-30);
        for v in [0.3, 2.0, 17.5, 123.456] {
            let z = Dd::from_f64(v);
            let round = z.ln().exp();
            assert!((round.sub(z)).to_f64().abs() < 1e-28 * v, "roundtrip {v}");
        }
    }

    #[test]
    fn arithmetic() {
        let a = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let b = a.mul(Dd::from_f64(3.0));
        assert!((b.to_f64() - 1.0).abs() < 1e-30);
        assert_eq!(binom_dd(5, 2).to_f64(), 10.0);
        assert_eq!(Dd::from_u128(1u128 << 90).to_f64(), 2f64.powi(90));
    }

    #[test]
    fn powers() {
        let p = Dd::from_f64(3.0).powi(5);
        assert_eq!(p.to_f64(), 243.0);
    }
}
