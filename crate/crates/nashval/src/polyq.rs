//! Dense univariate polynomials over the rationals: just enough exact
//! machinery for initial-form analysis (gcd, squarefree structure, rational
//! roots with multiplicity).

use num_traits::{One, Zero};

use crate::exact::rat_int;
use crate::{Int, Rat};

/// Coefficients in ascending degree; invariant: no trailing zeros unless the
/// polynomial is zero (empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Poly(pub Vec<Rat>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        if self.0.is_empty() {
            0
        } else {
            self.0.len() - 1
        }
    }

    pub fn lead(&self) -> &Rat {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat_int(k as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead().clone();
        Poly::new(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder; divisor must be nonzero.
    pub fn div_rem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let mut rem = self.0.clone();
        if rem.len() < div.0.len() {
            return (Poly::zero(), Poly::new(rem));
        }
        let dlen = div.0.len();
        let dlead = div.lead().clone();
        let mut quot = vec![Rat::zero(); rem.len() - dlen + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dlen - 1] / &dlead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in div.0.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &c * d;
            }
            quot[k] = c;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Extended gcd: returns `(g, s, t)` monic with `s*self + t*other = g`.
    pub fn extended_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Poly::new(vec![Rat::one()]);
        let mut s1 = Poly::zero();
        let mut t0 = Poly::zero();
        let mut t1 = Poly::new(vec![Rat::one()]);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = sub(&s0, &q.mul(&s1));
            let t = sub(&t0, &q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lead().clone();
        let scale = |p: &Poly| Poly::new(p.0.iter().map(|c| c / &l).collect());
        (scale(&r0), scale(&s0), scale(&t0))
    }

    /// Multiplicity of `root`; zero when not a root.
    pub fn root_multiplicity(&self, root: &Rat) -> usize {
        let lin = Poly::new(vec![-root.clone(), Rat::one()]);
        let mut mult = 0;
        let mut p = self.clone();
        loop {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                return mult;
            }
            mult += 1;
            p = q;
            if p.is_zero() {
                return mult;
            }
        }
    }
}

pub(crate) fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.0.len().max(b.0.len());
    let mut out = vec![Rat::zero(); n];
    for (i, c) in a.0.iter().enumerate() {
        out[i] = c.clone();
    }
    for (i, c) in b.0.iter().enumerate() {
        out[i] = &out[i] - c;
    }
    Poly::new(out)
}

/// Bound above which divisor enumeration for the rational-root search is
/// abandoned (the caller then reports an unknown verdict rather than guess).
const ROOT_SEARCH_LIMIT: i64 = 1_000_000_000_000;

fn divisors(n: i64) -> Option<Vec<i64>> {
    let n = n.abs();
    if n == 0 || n > ROOT_SEARCH_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1i64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            out.push(n / d);
        }
        d += 1;
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// All rational roots with multiplicities, and the root-free cofactor.
/// Returns `None` when coefficient size defeats the divisor search.
pub(crate) fn rational_roots(p: &Poly) -> Option<(Vec<(Rat, usize)>, Poly)> {
    if p.is_zero() {
        return Some((Vec::new(), Poly::zero()));
    }
    let mut roots = Vec::new();
    let mut rest = p.clone();

    // pull out the root at zero first
    let zero = Rat::zero();
    let m0 = {
        let mut m = 0;
        while !rest.is_zero() && rest.0.first().is_some_and(|c| c.is_zero()) {
            rest = Poly::new(rest.0[1..].to_vec());
            m += 1;
        }
        m
    };
    if m0 > 0 {
        roots.push((zero, m0));
    }
    if rest.degree() == 0 {
        return Some((roots, rest));
    }

    // clear denominators to a primitive integer polynomial
    let mut den = Int::one();
    for c in &rest.0 {
        den = num_integer::lcm(den, c.denom().clone());
    }
    let ints: Vec<Int> = rest.0.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let a0 = ints.first().unwrap().clone();
    let an = ints.last().unwrap().clone();
    let a0_small = i64::try_from(&a0).ok()?;
    let an_small = i64::try_from(&an).ok()?;
    let ps = divisors(a0_small)?;
    let qs = divisors(an_small)?;

    let mut candidates = Vec::new();
    for &pn in &ps {
        for &qn in &qs {
            candidates.push(Rat::new(Int::from(pn), Int::from(qn)));
            candidates.push(Rat::new(Int::from(-pn), Int::from(qn)));
        }
    }
    candidates.sort();
    candidates.dedup();
    for cand in candidates {
        if rest.degree() == 0 {
            break;
        }
        let mult = rest.root_multiplicity(&cand);
        if mult > 0 {
            let lin = Poly::new(vec![-cand.clone(), Rat::one()]);
            for _ in 0..mult {
                rest = rest.div_rem(&lin).0;
            }
            roots.push((cand, mult));
        }
    }
    Some((roots, rest))
}

/// Yun's squarefree decomposition: monic pairwise-coprime squarefree factors
/// with their exponents, `p = lead * prod f_e^e`.
pub(crate) fn squarefree_decomposition(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let f = p.monic();
    let df = f.derivative();
    let a = f.gcd(&df);
    if a.degree() == 0 {
        out.push((f, 1));
        return out;
    }
    let mut b = f.div_rem(&a).0;
    let mut c = df.div_rem(&a).0;
    let mut d = sub(&c, &b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        let g = b.gcd(&d);
        if g.degree() > 0 {
            out.push((g.clone(), i));
        }
        b = b.div_rem(&g).0;
        c = d.div_rem(&g).0;
        d = sub(&c, &b.derivative());
        i += 1;
    }
    out
}

/// Largest multiplicity among the roots of `p` (0 for constants).
pub(crate) fn max_root_multiplicity(p: &Poly) -> usize {
    let mut mult = 0;
    let mut q = p.clone();
    while q.degree() > 0 {
        q = q.gcd(&q.derivative());
        mult += 1;
    }
    mult
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = p(&[2, 0, -3, 1]); // x^3 - 3x^2 + 2
        let b = p(&[-1, 1]); // x - 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(sub(&a, &q.mul(&b)), r);
        assert!(r.is_zero()); // 1 is a root
    }

    #[test]
    fn gcd_of_square_detects_multiplicity() {
        let lin = p(&[1, 1]); // x + 1
        let sq = lin.mul(&lin).mul(&p(&[2, 1]));
        assert_eq!(sq.gcd(&sq.derivative()).degree(), 1);
        assert_eq!(max_root_multiplicity(&sq), 2);
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (x - 1/2)^2 (x + 3) x
        let f = p(&[0, 1])
            .mul(&p(&[3, 1]))
            .mul(&Poly::new(vec![rat(-1, 2), rat_int(1)]))
            .mul(&Poly::new(vec![rat(-1, 2), rat_int(1)]));
        let (roots, rest) = rational_roots(&f).unwrap();
        assert_eq!(rest.degree(), 0);
        let mut roots: Vec<(String, usize)> = roots
            .into_iter()
            .map(|(r, m)| (crate::exact::format_rat(&r), m))
            .collect();
        roots.sort();
        assert_eq!(
            roots,
            vec![
                ("-3".to_string(), 1),
                ("0".to_string(), 1),
                ("1/2".to_string(), 2)
            ]
        );
    }

    #[test]
    fn extended_gcd_bezout() {
        let a = p(&[1, 0, 1]); // x^2 + 1
        let b = p(&[1, 1]); // x + 1
        let (g, s, t) = a.extended_gcd(&b);
        assert_eq!(g, p(&[1]));
        let combo = sub(&s.mul(&a), &t.mul(&b).mul(&p(&[-1])));
        assert_eq!(combo, g);
    }

    #[test]
    fn irrational_roots_left_in_cofactor() {
        let f = p(&[-2, 0, 1]).mul(&p(&[-1, 1])); // (x^2 - 2)(x - 1)
        let (roots, rest) = rational_roots(&f).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(rest.degree(), 2);
    }
}
