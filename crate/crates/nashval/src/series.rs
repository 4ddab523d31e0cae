//! The defining series `f(z, u)` of a germ, stored as a sparse term map
//! `(i, j) -> c` for the monomial `c * z^(r*i) * u^j`, together with its
//! Newton-weight invariants.
//!
//! Invariants:
//! - all stored coefficients are nonzero, keys unique;
//! - invariance under the `(1/r)(.., 1, 0)` action is structural: only
//!   `z`-exponents divisible by `r` are representable;
//! - the series is known completely up to total `(z, u)`-order `trunc`;
//!   stored terms above `trunc` are extra knowledge, absent ones there are
//!   unknown. Queries whose answer could be changed by an unknown term fail
//!   with `InsufficientTruncation` instead of guessing.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::exact::{rat_int, ceil_div_i64};
use crate::polyq::{self, Poly};
use crate::{Error, Rat, Result};

/// One monomial `c * z^(r*i) * u^j` with `c != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub i: i64,
    pub j: i64,
    pub c: Rat,
}

/// Status of a coordinate-normalization search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeStatus {
    /// The returned series attains the maximal weight-(2,1) order.
    Maximal,
    /// An irrational multiple root of the initial form could beat every
    /// rational substitution; the maximum is undetermined over the rationals.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    r: i64,
    terms: BTreeMap<(i64, i64), Rat>,
    trunc: i64,
}

impl Series {
    /// Strict constructor for user input: every term must lie within the
    /// truncation bound and have nonnegative exponents.
    pub fn new(r: i64, terms: Vec<((i64, i64), Rat)>, trunc: i64) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidGerm(format!("index r must be >= 1, got {r}")));
        }
        if trunc < 1 {
            return Err(Error::InvalidGerm(format!("trunc must be >= 1, got {trunc}")));
        }
        for ((i, j), _) in &terms {
            if *i < 0 || *j < 0 {
                return Err(Error::InvalidGerm(format!("negative exponent in term ({i},{j})")));
            }
            if r * i + j > trunc {
                return Err(Error::InsufficientTruncation(format!(
                    "term z^{}*u^{} has order {} beyond trunc {}",
                    r * i,
                    j,
                    r * i + j,
                    trunc
                )));
            }
        }
        Ok(Self::from_raw(r, terms, trunc))
    }

    /// Internal constructor: merges duplicate keys, drops zero coefficients,
    /// allows terms beyond `trunc` (extra known terms).
    pub(crate) fn from_raw(r: i64, terms: Vec<((i64, i64), Rat)>, trunc: i64) -> Self {
        let mut map: BTreeMap<(i64, i64), Rat> = BTreeMap::new();
        for (key, c) in terms {
            let entry = map.entry(key).or_insert_with(Rat::zero);
            *entry = &*entry + c;
        }
        map.retain(|_, c| !c.is_zero());
        Series { r, terms: map, trunc }
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(&(i, j), c)| Term { i, j, c: c.clone() })
    }

    pub fn support(&self) -> Vec<(i64, i64)> {
        self.terms.keys().copied().collect()
    }

    pub fn coeff(&self, i: i64, j: i64) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn has_term(&self, i: i64, j: i64) -> bool {
        self.terms.contains_key(&(i, j))
    }

    /// Least `j` with a pure-u term `u^j` present.
    pub fn pure_u_order(&self) -> Option<i64> {
        self.terms
            .keys()
            .filter(|(i, _)| *i == 0)
            .map(|&(_, j)| j)
            .min()
    }

    /// Least total `(z, u)`-order `r*i + j` over the support.
    pub fn min_total_order(&self) -> Option<i64> {
        self.terms.keys().map(|&(i, j)| self.r * i + j).min()
    }

    /// Smallest weight a term hidden beyond the truncation bound could have
    /// under the weight `(z, u) -> (k/r, 1)`; any computed minimum at most
    /// this value is certain.
    fn hidden_weight_bound(&self, k: i64) -> i64 {
        let o = self.trunc + 1;
        (k * ceil_div_i64(o, self.r)).min(o)
    }

    /// The Newton weight `m_k = min over terms of (k*i + j)`.
    pub fn weight_order(&self, k: i64) -> Result<i64> {
        if k < 1 {
            return Err(Error::InvalidGerm(format!("weight index k must be >= 1, got {k}")));
        }
        let m = self
            .terms
            .keys()
            .map(|&(i, j)| k * i + j)
            .min()
            .ok_or_else(|| Error::InvalidGerm("weight order of the zero series".into()))?;
        if m > self.hidden_weight_bound(k) {
            return Err(Error::InsufficientTruncation(format!(
                "m_{k} computed as {m} but a term beyond trunc {} could weigh as little as {}",
                self.trunc,
                self.hidden_weight_bound(k)
            )));
        }
        Ok(m)
    }

    /// Minimum of `(r*i)*zw + j*uw` over the support, for positive rational
    /// weights; same certainty guard as `weight_order`.
    pub fn weight_order_rat(&self, zw: &Rat, uw: &Rat) -> Result<Rat> {
        if zw <= &Rat::zero() || uw <= &Rat::zero() {
            return Err(Error::InvalidWeight("weights must be positive".into()));
        }
        let m = self
            .terms
            .keys()
            .map(|&(i, j)| zw * rat_int(self.r * i) + uw * rat_int(j))
            .min()
            .ok_or_else(|| Error::InvalidGerm("weight order of the zero series".into()))?;
        let o = self.trunc + 1;
        let corner_u = uw * rat_int(o);
        let corner_z = zw * rat_int(self.r * ceil_div_i64(o, self.r));
        let bound = corner_u.min(corner_z);
        if m > bound {
            return Err(Error::InsufficientTruncation(format!(
                "weighted order {m} exceeds the hidden-term bound {bound}"
            )));
        }
        Ok(m)
    }

    /// Least `k >= 1` with `m_(k+1) = m_k`. Requires a pure-u term, which
    /// caps the weights and forces stabilization.
    pub fn stabilization_depth(&self) -> Result<i64> {
        let cap = self.pure_u_order().ok_or_else(|| {
            Error::InvalidGerm("stabilization depth needs a pure power of u in the series".into())
        })?;
        let mut prev = self.weight_order(1)?;
        for k in 1..=cap + 1 {
            let next = self.weight_order(k + 1)?;
            if next == prev {
                return Ok(k);
            }
            prev = next;
        }
        unreachable!("weights are bounded by the pure-u order and nondecreasing");
    }

    /// Least `k >= 1` with `m_(k+1) <= m_k + 1`; defined for `r = 1`, where a
    /// term `u^l` or `z*u^l` guarantees the slope eventually drops to one.
    pub fn near_stabilization_depth(&self) -> Result<i64> {
        if self.r != 1 {
            return Err(Error::Unsupported(
                "near-stabilization depth is defined for index-one series".into(),
            ));
        }
        let cap = self
            .terms
            .keys()
            .filter(|(i, _)| *i <= 1)
            .map(|&(i, j)| i + j)
            .min()
            .ok_or_else(|| {
                Error::InvalidGerm(
                    "near-stabilization depth needs a term u^l or z*u^l in the series".into(),
                )
            })?;
        let mut prev = self.weight_order(1)?;
        for k in 1..=cap + 1 {
            let next = self.weight_order(k + 1)?;
            if next <= prev + 1 {
                return Ok(k);
            }
            prev = next;
        }
        unreachable!("slopes are nonincreasing and eventually at most one");
    }

    /// The series seen at the origin of the `u`-chart of the canonical
    /// weighted blow-up: term `(i, j)` maps to `(i, i + j - m)` with
    /// `m = m_1`. Weights satisfy `m_k(self) = m_(k-1)(out) + m_1(self)`.
    pub fn chart_transform(&self) -> Result<Series> {
        let m = self.weight_order(1)?;
        let new_trunc = self.trunc - m;
        if new_trunc < 1 {
            return Err(Error::InsufficientTruncation(format!(
                "chart transform drops the truncation bound to {new_trunc}"
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| ((i, i + j - m), c.clone()))
            .collect();
        Ok(Series::from_raw(self.r, terms, new_trunc))
    }

    /// Expansion of `f(z + phi(u), u)` for `phi = sum c_e u^e`, exact below
    /// the truncation bound. Only the zero substitution is equivariant when
    /// `r > 1`.
    pub fn substitute(&self, phi: &[(i64, Rat)]) -> Result<Series> {
        let phi: Vec<(i64, Rat)> = phi.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
        if phi.is_empty() {
            return Ok(self.clone());
        }
        if self.r != 1 {
            return Err(Error::Unsupported(
                "coordinate substitutions in z are only equivariant for index one".into(),
            ));
        }
        for (e, _) in &phi {
            if *e < 1 {
                return Err(Error::InvalidGerm(format!(
                    "substitution exponent must be >= 1, got {e}"
                )));
            }
        }
        // base polynomial z + phi(u) as a sparse (z-exp, u-exp) map
        let mut base: BTreeMap<(i64, i64), Rat> = BTreeMap::new();
        base.insert((1, 0), Rat::one());
        for (e, c) in &phi {
            let entry = base.entry((0, *e)).or_insert_with(Rat::zero);
            *entry = &*entry + c;
        }
        let trunc = self.trunc;
        let mut powers: Vec<BTreeMap<(i64, i64), Rat>> = Vec::new();
        let mut one = BTreeMap::new();
        one.insert((0, 0), Rat::one());
        powers.push(one);
        let max_i = self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0);
        for k in 1..=max_i {
            let next = sparse_mul(&powers[(k - 1) as usize], &base, trunc);
            powers.push(next);
        }
        let mut out: Vec<((i64, i64), Rat)> = Vec::new();
        for (&(i, j), c) in &self.terms {
            for (&(pi, pj), pc) in &powers[i as usize] {
                if pi + pj + j <= trunc {
                    out.push(((pi, pj + j), c * pc));
                }
            }
        }
        Ok(Series::from_raw(1, out, trunc))
    }

    /// Product of two series over the same index, exact up to the combined
    /// truncation bound.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        if self.r != other.r {
            return Err(Error::InvalidGerm(format!(
                "cannot multiply series of index {} and {}",
                self.r, other.r
            )));
        }
        let oa = self.min_total_order().unwrap_or(0);
        let ob = other.min_total_order().unwrap_or(0);
        let trunc = (self.trunc + ob).min(other.trunc + oa);
        let mut out = Vec::new();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                let (i, j) = (i1 + i2, j1 + j2);
                if self.r * i + j <= trunc {
                    out.push(((i, j), c1 * c2));
                }
            }
        }
        Ok(Series::from_raw(self.r, out, trunc))
    }

    /// Equality of the known parts below `bound`, up to the given scalar.
    pub fn eq_up_to(&self, other: &Series, bound: i64, scale: &Rat) -> bool {
        let keys: std::collections::BTreeSet<(i64, i64)> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|&&(i, j)| self.r * i + j <= bound)
            .copied()
            .collect();
        keys.iter()
            .all(|&(i, j)| self.coeff(i, j) == other.coeff(i, j) * scale)
    }

    /// Terms on the diagonal `i + j = level` (the degree-`level` part for
    /// index one).
    pub fn level_terms(&self, level: i64) -> Vec<Term> {
        self.terms
            .iter()
            .filter(|(&(i, j), _)| i + j == level)
            .map(|(&(i, j), c)| Term { i, j, c: c.clone() })
            .collect()
    }

    /// Searches substitutions `z -> z + phi(u)` maximizing the weight-(2,1)
    /// order `m_2`. Returns the transformed series, the substitution used,
    /// and whether the maximum is certified.
    ///
    /// A degree-one substitution suffices: higher-order terms of `phi`
    /// preserve every weight-(2,1) level. The initial form is a perfect
    /// m-th power only at a rational root, so the `m_2 = 2*m_1` threshold is
    /// always decided; `Unknown` arises only when irrational multiple roots
    /// could still improve a submaximal `m_2`.
    #[allow(clippy::type_complexity)]
    pub fn normalize_coordinates(&self) -> Result<(Series, Vec<(i64, Rat)>, NormalizeStatus)> {
        if self.r != 1 {
            return Err(Error::Unsupported(
                "coordinate normalization is defined for index one".into(),
            ));
        }
        let m = self.weight_order(1)?;
        let init = self.level_terms(m);

        // perfect-power fast path: initial form c*(z + lambda*u)^m
        if let Some(lambda) = perfect_power_root(&init, m) {
            if lambda.is_zero() {
                return Ok((self.clone(), Vec::new(), NormalizeStatus::Maximal));
            }
            let phi = vec![(1i64, -lambda)];
            let g = self.substitute(&phi)?;
            return Ok((g, phi, NormalizeStatus::Maximal));
        }

        // otherwise the best substitution shifts z by a root of the initial
        // form; compare every rational root exactly and bound the irrational
        // ones by their multiplicity
        let poly = init_form_poly(&init, m);
        let current = self.weight_order(2)?;
        let mut best = (current, Rat::zero());
        let searched = polyq::rational_roots(&poly);
        let irrational_bound = match &searched {
            Some((roots, rest)) => {
                for (root, _) in roots {
                    if root.is_zero() {
                        continue;
                    }
                    let cand = self.substitute(&[(1, root.clone())])?;
                    let m2 = cand.weight_order(2)?;
                    if m2 > best.0 {
                        best = (m2, root.clone());
                    }
                }
                if rest.degree() > 0 {
                    m + polyq::max_root_multiplicity(rest) as i64
                } else {
                    i64::MIN
                }
            }
            // coefficient blow-up defeated the root search: anything could hide
            None => m + poly.degree() as i64,
        };
        let status = if best.0 >= irrational_bound {
            NormalizeStatus::Maximal
        } else {
            NormalizeStatus::Unknown
        };
        if best.1.is_zero() {
            Ok((self.clone(), Vec::new(), status))
        } else {
            let phi = vec![(1i64, best.1.clone())];
            let g = self.substitute(&phi)?;
            Ok((g, phi, status))
        }
    }
}

/// Sparse polynomial product truncated at total order `trunc` (index one).
fn sparse_mul(
    a: &BTreeMap<(i64, i64), Rat>,
    b: &BTreeMap<(i64, i64), Rat>,
    trunc: i64,
) -> BTreeMap<(i64, i64), Rat> {
    let mut out: BTreeMap<(i64, i64), Rat> = BTreeMap::new();
    for (&(i1, j1), c1) in a {
        for (&(i2, j2), c2) in b {
            let (i, j) = (i1 + i2, j1 + j2);
            if i + j <= trunc {
                let entry = out.entry((i, j)).or_insert_with(Rat::zero);
                *entry = &*entry + c1 * c2;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// The initial form as a polynomial in the root variable: `P(c) = f_m(c, 1)`.
fn init_form_poly(init: &[Term], m: i64) -> Poly {
    let deg = init.iter().map(|t| t.i).max().unwrap_or(0);
    let mut coeffs = vec![Rat::zero(); (deg + 1) as usize];
    for t in init {
        debug_assert_eq!(t.i + t.j, m);
        coeffs[t.i as usize] = t.c.clone();
    }
    Poly::new(coeffs)
}

/// When the degree-`m` form equals `c*(z + lambda*u)^m`, returns `lambda`
/// (necessarily rational); otherwise `None`.
fn perfect_power_root(init: &[Term], m: i64) -> Option<Rat> {
    let lead = init.iter().find(|t| t.i == m)?;
    if m == 0 {
        return None;
    }
    let next = init
        .iter()
        .find(|t| t.i == m - 1)
        .map(|t| t.c.clone())
        .unwrap_or_else(Rat::zero);
    let lambda = next / (&lead.c * rat_int(m));
    // verify the binomial expansion exactly
    let mut binom = Rat::one();
    for k in 0..=m {
        let idx = m - k;
        let expect = &lead.c * &binom * pow_rat(&lambda, k);
        let got = init
            .iter()
            .find(|t| t.i == idx)
            .map(|t| t.c.clone())
            .unwrap_or_else(Rat::zero);
        if got != expect {
            return None;
        }
        binom = binom * rat_int(m - k) / rat_int(k + 1);
    }
    Some(lambda)
}

fn pow_rat(x: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    pub fn series(r: i64, terms: &[(i64, i64, i64)], trunc: i64) -> Series {
        Series::new(
            r,
            terms
                .iter()
                .map(|&(i, j, c)| ((i, j), rat_int(c)))
                .collect(),
            trunc,
        )
        .unwrap()
    }

    /// (z^6 + u^11)(z^2 + u) over index 2: support (4,0),(3,1),(1,11),(0,12).
    fn sample_product() -> Series {
        series(2, &[(4, 0, 1), (3, 1, 1), (1, 11, 1), (0, 12, 1)], 64)
    }

    #[test]
    fn weight_orders_of_the_product_sample() {
        let f = sample_product();
        assert_eq!(f.weight_order(1).unwrap(), 4);
        assert_eq!(f.weight_order(3).unwrap(), 10);
        assert_eq!(f.weight_order(2).unwrap(), 7);
    }

    #[test]
    fn weight_orders_of_binomial_family() {
        for r in 2..=6 {
            let f = series(r, &[(1, 0, 1), (0, 2 * r, 1)], 64);
            for k in 1..=2 * r {
                assert_eq!(f.weight_order(k).unwrap(), k, "m_k = k up to 2r");
            }
        }
    }

    #[test]
    fn single_term_weight_is_constant() {
        let f = series(3, &[(0, 1, 1)], 64);
        for k in 1..=9 {
            assert_eq!(f.weight_order(k).unwrap(), 1);
        }
    }

    #[test]
    fn truncation_guard_fires() {
        // only u^60 visible with trunc 64: a hidden z-power could weigh less
        let f = series(2, &[(0, 60, 1)], 64);
        assert!(matches!(
            f.weight_order(1),
            Err(Error::InsufficientTruncation(_))
        ));
        // the exact integer bound: m_1 = 10 = ceil(71/7) is still certain
        let g = series(7, &[(10, 0, 1), (0, 12, 1)], 70);
        assert_eq!(g.weight_order(1).unwrap(), 10);
    }

    #[test]
    fn stabilization_depths() {
        for r in 2..=5 {
            let f = series(r, &[(1, 0, 1), (0, 2 * r, 1)], 64);
            assert_eq!(f.stabilization_depth().unwrap(), 2 * r);
        }
        let g = series(2, &[(0, 3, 5)], 64);
        assert_eq!(g.stabilization_depth().unwrap(), 1);
        assert_eq!(sample_product().stabilization_depth().unwrap(), 4);
    }

    #[test]
    fn near_stabilization_depths() {
        let f = series(1, &[(2, 0, 1), (0, 3, 1)], 64);
        assert_eq!(f.near_stabilization_depth().unwrap(), 1);
        let g = series(1, &[(2, 0, 1), (0, 5, 1)], 64);
        assert_eq!(g.near_stabilization_depth().unwrap(), 2);
        let h = series(1, &[(1, 0, 1), (0, 1, 1)], 64);
        assert_eq!(h.near_stabilization_depth().unwrap(), 1);
    }

    #[test]
    fn chart_transform_examples() {
        let f = series(3, &[(1, 0, 1), (0, 6, 1)], 64);
        let g = f.chart_transform().unwrap();
        assert_eq!(g.support(), vec![(0, 5), (1, 0)]);

        let g2 = sample_product().chart_transform().unwrap();
        assert_eq!(g2.support(), vec![(0, 8), (1, 8), (3, 0), (4, 0)]);

        let h = series(1, &[(0, 4, 1)], 64).chart_transform().unwrap();
        assert_eq!(h.support(), vec![(0, 0)]);
    }

    #[test]
    fn chart_transform_weight_identity() {
        let f = sample_product();
        let g = f.chart_transform().unwrap();
        let m = f.weight_order(1).unwrap();
        for k in 2..=9 {
            assert_eq!(
                f.weight_order(k).unwrap(),
                g.weight_order(k - 1).unwrap() + m
            );
        }
        assert_eq!(
            g.stabilization_depth().unwrap(),
            f.stabilization_depth().unwrap() - 1
        );
    }

    #[test]
    fn substitution_cancels_binomial() {
        // (z+u)^2 + u^5 with z -> z - u gives z^2 + u^5
        let f = series(1, &[(2, 0, 1), (1, 1, 2), (0, 2, 1), (0, 5, 1)], 64);
        let g = f.substitute(&[(1, rat_int(-1))]).unwrap();
        assert_eq!(g.support(), vec![(0, 5), (2, 0)]);
        let back = g.substitute(&[(1, rat_int(1))]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn substitution_rejected_for_higher_index() {
        let f = series(2, &[(1, 0, 1), (0, 4, 1)], 64);
        assert!(f.substitute(&[(1, rat_int(1))]).is_err());
        assert_eq!(f.substitute(&[]).unwrap(), f);
    }

    #[test]
    fn normalization_examples() {
        // (z+u)^2 + u^5 normalizes to z^2 + u^5 via phi = -u
        let f = series(1, &[(2, 0, 1), (1, 1, 2), (0, 2, 1), (0, 5, 1)], 64);
        let (g, phi, status) = f.normalize_coordinates().unwrap();
        assert_eq!(status, NormalizeStatus::Maximal);
        assert_eq!(phi, vec![(1, rat_int(-1))]);
        assert_eq!(g.support(), vec![(0, 5), (2, 0)]);
        assert_eq!(g.weight_order(2).unwrap(), 4);

        // z^2 + u^3 is already maximal, condition value stays below 2m
        let f2 = series(1, &[(2, 0, 1), (0, 3, 1)], 64);
        let (g2, phi2, st2) = f2.normalize_coordinates().unwrap();
        assert_eq!((g2, phi2, st2), (f2, vec![], NormalizeStatus::Maximal));

        // z^2 + u^5 already satisfies the threshold
        let f3 = series(1, &[(2, 0, 1), (0, 5, 1)], 64);
        let (g3, _, st3) = f3.normalize_coordinates().unwrap();
        assert_eq!(st3, NormalizeStatus::Maximal);
        assert_eq!(g3.weight_order(2).unwrap(), 4);
    }

    #[test]
    fn normalization_prefers_the_deeper_rational_root() {
        // (z-u)^2 (z-3u)^2 + u^7: shifting to the double root z = u raises m_2
        let a = series(1, &[(1, 0, 1), (0, 1, -1)], 64);
        let b = series(1, &[(1, 0, 1), (0, 1, -3)], 64);
        let f0 = a.mul(&a).unwrap().mul(&b).unwrap().mul(&b).unwrap();
        let mut terms: Vec<((i64, i64), Rat)> =
            f0.terms().map(|t| ((t.i, t.j), t.c)).collect();
        terms.push(((0, 7), rat_int(1)));
        let f = Series::new(1, terms, 40).unwrap();
        let (g, phi, status) = f.normalize_coordinates().unwrap();
        assert_eq!(status, NormalizeStatus::Maximal);
        assert_eq!(phi, vec![(1, rat_int(1))]);
        assert_eq!(g.weight_order(2).unwrap(), 6);
    }

    #[test]
    fn normalization_flags_irrational_multiple_roots() {
        // (z^2 - 2u^2)^2 + u^9: the only multiple roots are irrational
        let f = series(1, &[(4, 0, 1), (2, 2, -4), (0, 4, 4), (0, 9, 1)], 64);
        let (_, phi, status) = f.normalize_coordinates().unwrap();
        assert!(phi.is_empty());
        assert_eq!(status, NormalizeStatus::Unknown);
    }

    #[test]
    fn multiplicativity_of_weight_orders() {
        let a = series(2, &[(3, 0, 1), (0, 11, 1)], 64);
        let b = series(2, &[(1, 0, 1), (0, 1, 1)], 64);
        let prod = a.mul(&b).unwrap();
        for k in 1..=6 {
            assert_eq!(
                prod.weight_order(k).unwrap(),
                a.weight_order(k).unwrap() + b.weight_order(k).unwrap()
            );
        }
        assert_eq!(prod, sample_product_with_trunc(prod.trunc()));
    }

    fn sample_product_with_trunc(trunc: i64) -> Series {
        Series::from_raw(
            2,
            vec![
                ((4, 0), rat_int(1)),
                ((3, 1), rat_int(1)),
                ((1, 11), rat_int(1)),
                ((0, 12), rat_int(1)),
            ],
            trunc,
        )
    }

    #[test]
    fn concavity_of_weights() {
        let f = sample_product();
        let m: Vec<i64> = (1..=8).map(|k| f.weight_order(k).unwrap()).collect();
        for w in m.windows(3) {
            assert!(w[2] - w[1] <= w[1] - w[0], "weights are concave in k");
        }
        for w in m.windows(2) {
            assert!(w[1] >= w[0], "weights are nondecreasing");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_series(r: i64) -> impl Strategy<Value = Series> {
            proptest::collection::vec(((0i64..=6, 0i64..=10), -4i64..=4), 1..6).prop_filter_map(
                "needs a pure power of u and a nonzero support",
                move |entries| {
                    let mut terms: Vec<((i64, i64), Rat)> = entries
                        .into_iter()
                        .filter(|&(_, c)| c != 0)
                        .map(|((i, j), c)| ((i, j.max(1)), rat_int(c)))
                        .collect();
                    terms.push(((0, 5), rat_int(1)));
                    Series::new(r, terms, 64).ok().filter(|f| !f.is_zero())
                },
            )
        }

        proptest! {
            #[test]
            fn weights_multiply_over_products(a in arb_series(2), b in arb_series(2)) {
                let prod = a.mul(&b).unwrap();
                for k in 1..=6 {
                    prop_assert_eq!(
                        prod.weight_order(k).unwrap(),
                        a.weight_order(k).unwrap() + b.weight_order(k).unwrap()
                    );
                }
            }

            #[test]
            fn weights_are_concave_and_nondecreasing(f in arb_series(3)) {
                let m: Vec<i64> = (1..=9).map(|k| f.weight_order(k).unwrap()).collect();
                for w in m.windows(2) {
                    prop_assert!(w[1] >= w[0]);
                }
                for w in m.windows(3) {
                    prop_assert!(w[2] - w[1] <= w[1] - w[0]);
                }
            }

            #[test]
            fn chart_transform_satisfies_the_weight_identity(f in arb_series(2)) {
                let g = f.chart_transform().unwrap();
                let m = f.weight_order(1).unwrap();
                for k in 2..=6 {
                    prop_assert_eq!(
                        f.weight_order(k).unwrap(),
                        g.weight_order(k - 1).unwrap() + m
                    );
                }
            }

            #[test]
            fn substitution_roundtrips(
                f in arb_series(1),
                c1 in -3i64..=3,
                c2 in -2i64..=2,
            ) {
                let phi = vec![(1, rat_int(c1)), (2, rat_int(c2))];
                let inv = vec![(1, rat_int(-c1)), (2, rat_int(-c2))];
                let there = f.substitute(&phi).unwrap();
                let back = there.substitute(&inv).unwrap();
                // the round trip is the identity on the whole known region
                prop_assert!(back.eq_up_to(&f, f.trunc(), &rat_int(1)));
            }
        }
    }

    #[test]
    fn coefficients_stay_exact() {
        let f = Series::new(1, vec![((1, 0), rat(1, 3)), ((0, 2), rat(2, 3))], 16).unwrap();
        let g = f.mul(&f).unwrap();
        assert_eq!(g.coeff(2, 0), rat(1, 9));
        assert_eq!(g.coeff(1, 2), rat(4, 9));
        assert_eq!(g.coeff(0, 4), rat(4, 9));
    }
}
