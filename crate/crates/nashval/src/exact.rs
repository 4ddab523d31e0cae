//! Exact arithmetic kernel: residue arithmetic, rational exponent vectors
//! and monomial coordinate-change maps.
//!
//! Invariants:
//! - every `Rat` is in lowest terms with positive denominator;
//! - `ExpVec` length is fixed at construction, componentwise operations
//!   require equal lengths;
//! - a `MonomialMap` is an invertible square rational matrix whose rows are
//!   indexed by upstream coordinates and columns by chart coordinates.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::{Error, Int, Rat, Result};

/// `num / den` as an exact rational. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    // reduce on machine integers before touching big integers
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let g = gcd_i64(num, den).max(1);
    Rat::new_raw(Int::from(num / g), Int::from(den / g))
}

/// Integer as an exact rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// The representative of `n` modulo `r` in `[0, r)`, i.e. `n - floor(n/r)*r`.
pub fn residue(n: &Int, r: &Int) -> Int {
    assert!(r > &Int::zero(), "residue modulus must be positive");
    n.mod_floor(r)
}

/// `residue` on machine integers.
pub fn residue_i64(n: i64, r: i64) -> i64 {
    assert!(r > 0, "residue modulus must be positive");
    n.rem_euclid(r)
}

/// Inverse of `a` modulo `r` when `gcd(a, r) = 1`.
pub fn mod_inverse(a: i64, r: i64) -> Option<i64> {
    assert!(r > 0);
    let (mut old_r, mut cur_r) = (a.rem_euclid(r), r);
    let (mut old_s, mut cur_s) = (1i64, 0i64);
    while cur_r != 0 {
        let q = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - q * cur_r);
        (old_s, cur_s) = (cur_s, old_s - q * cur_s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(r))
}

/// Fixed-length vector of exact rationals; the carrier for valuations and
/// blow-up weights.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpVec(Vec<Rat>);

impl ExpVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        ExpVec(entries)
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        ExpVec(entries.iter().map(|&n| rat_int(n)).collect())
    }

    /// `(e_1, ..., e_n) / den`.
    pub fn from_scaled(entries: &[i64], den: i64) -> Self {
        ExpVec(entries.iter().map(|&n| rat(n, den)).collect())
    }

    pub fn zero(n: usize) -> Self {
        ExpVec(vec![Rat::zero(); n])
    }

    /// Unit vector with a one in slot `i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![Rat::zero(); n];
        v[i] = Rat::one();
        ExpVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rat {
        &self.0[i]
    }

    pub fn set(&mut self, i: usize, v: Rat) {
        self.0[i] = v;
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn sum(&self) -> Rat {
        self.0.iter().fold(Rat::zero(), |acc, e| acc + e)
    }

    pub fn add(&self, other: &ExpVec) -> Result<ExpVec> {
        self.check_len(other.len())?;
        Ok(ExpVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn scaled(&self, c: &Rat) -> ExpVec {
        ExpVec(self.0.iter().map(|e| e * c).collect())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: n,
            });
        }
        Ok(())
    }

    /// Renders the vector over a common denominator, e.g. `1/2*(9,11,3,2)`
    /// or `(1,2,1,1)` when all entries are integers.
    pub fn display_scaled(&self) -> String {
        let mut den = Int::one();
        for e in &self.0 {
            den = den.lcm(e.denom());
        }
        let nums: Vec<String> = self
            .0
            .iter()
            .map(|e| (e.numer() * (&den / e.denom())).to_string())
            .collect();
        if den.is_one() {
            format!("({})", nums.join(","))
        } else {
            format!("1/{}*({})", den, nums.join(","))
        }
    }
}

impl std::fmt::Display for ExpVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.display_scaled())
    }
}

/// Exponent table of a monomial coordinate change: upstream coordinate `j`
/// equals the product over chart coordinates `c` of `y_c^(row_j[c])`.
///
/// Applying the matrix to a valuation on chart coordinates yields the induced
/// valuation on upstream coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMap {
    rows: Vec<Vec<Rat>>,
}

impl MonomialMap {
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Ok(MonomialMap { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        MonomialMap { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        &self.rows[i][j]
    }

    /// `m * v`: transports a chart-coordinate valuation upstream.
    pub fn apply(&self, v: &ExpVec) -> Result<ExpVec> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(ExpVec(
            self.rows
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(v.iter())
                        .fold(Rat::zero(), |acc, (m, x)| acc + m * x)
                })
                .collect(),
        ))
    }

    /// Matrix product `self * other`, the composite substitution: applying
    /// the result equals applying `other` first, then `self`.
    pub fn compose(&self, other: &MonomialMap) -> Result<MonomialMap> {
        let n = self.dim();
        if other.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: other.dim(),
            });
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(Rat::zero(), |acc, k| {
                            acc + &self.rows[i][k] * &other.rows[k][j]
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(MonomialMap { rows })
    }

    /// Exact inverse by Gauss-Jordan elimination; errors when singular.
    pub fn inverse(&self) -> Result<MonomialMap> {
        let n = self.dim();
        let mut a: Vec<Vec<Rat>> = self.rows.clone();
        let mut b: Vec<Vec<Rat>> = MonomialMap::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::InvalidWeight("singular monomial map".into()))?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
                b[col][j] = &b[col][j] / &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let factor = a[r][col].clone();
                    for j in 0..n {
                        let av = &a[col][j] * &factor;
                        let bv = &b[col][j] * &factor;
                        a[r][j] = &a[r][j] - av;
                        b[r][j] = &b[r][j] - bv;
                    }
                }
            }
        }
        Ok(MonomialMap { rows: b })
    }
}

/// Parses an exact rational from `"p/q"`, `"p"`, or a plain integer string.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: Int = num.trim().parse().map_err(|_| bad())?;
        let d: Int = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator: {s:?}")));
        }
        Ok(Rat::new(n, d))
    } else {
        let n: Int = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

/// Renders a rational as `"p/q"` or `"p"`.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floor of a rational as `Int`.
pub fn rat_floor(r: &Rat) -> Int {
    r.floor().to_integer()
}

/// Ceiling of a rational as `Int`.
pub fn rat_ceil(r: &Rat) -> Int {
    r.ceil().to_integer()
}

/// `ceil(a/b)` on machine integers, `b > 0`.
pub fn ceil_div_i64(a: i64, b: i64) -> i64 {
    assert!(b > 0);
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}

/// `floor(a/b)` on machine integers, `b > 0`.
pub fn floor_div_i64(a: i64, b: i64) -> i64 {
    assert!(b > 0);
    a.div_euclid(b)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.abs().gcd(&b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn residue_matches_floor_definition() {
        assert_eq!(residue_i64(7, 5), 2);
        assert_eq!(residue_i64(-3, 5), 2);
        assert_eq!(residue_i64(10, 5), 0);
        assert_eq!(residue(&Int::from(-3), &Int::from(5)), Int::from(2));
    }

    #[test]
    fn identity_map_fixes_vectors() {
        let m = MonomialMap::identity(3);
        let v = ExpVec::new(vec![rat(1, 2), rat_int(3), rat_int(0)]);
        assert_eq!(m.apply(&v).unwrap(), v);
    }

    #[test]
    fn ordinary_blowup_chart_transport() {
        // chart U_x of the weight-(2,1,1,1) blow-up of smooth 4-space:
        // x = x1^2, y = y1 x1, z = z1 x1, u = u1 x1.
        let m = MonomialMap::from_rows(vec![
            vec![rat_int(2), rat_int(0), rat_int(0), rat_int(0)],
            vec![rat_int(1), rat_int(1), rat_int(0), rat_int(0)],
            vec![rat_int(1), rat_int(0), rat_int(1), rat_int(0)],
            vec![rat_int(1), rat_int(0), rat_int(0), rat_int(1)],
        ])
        .unwrap();
        let v = ExpVec::new(vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]);
        let out = m.apply(&v).unwrap();
        assert_eq!(out, ExpVec::from_i64(&[1, 1, 1, 1]));
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rat("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rat("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rat("4/6").unwrap(), rat(2, 3));
        assert_eq!(format_rat(&rat(2, 3)), "2/3");
        assert_eq!(format_rat(&rat(4, 2)), "2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn display_scaled_uses_common_denominator() {
        let v = ExpVec::new(vec![rat(9, 2), rat(11, 2), rat(3, 2), rat_int(1)]);
        assert_eq!(v.display_scaled(), "1/2*(9,11,3,2)");
        assert_eq!(ExpVec::from_i64(&[1, 2, 1, 1]).display_scaled(), "(1,2,1,1)");
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    fn small_map(n: usize) -> impl Strategy<Value = MonomialMap> {
        proptest::collection::vec(small_rat(), n * n).prop_map(move |vals| {
            let mut rows: Vec<Vec<Rat>> = vals.chunks(n).map(|c| c.to_vec()).collect();
            // nudge the diagonal so the map stays invertible often enough
            for (i, row) in rows.iter_mut().enumerate() {
                row[i] = &row[i] + rat_int(7);
            }
            MonomialMap::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn residue_reconstructs(n in -1000i64..1000, r in 1i64..200) {
            let q = floor_div_i64(n, r);
            prop_assert_eq!(residue_i64(n, r) + q * r, n);
            prop_assert!((0..r).contains(&residue_i64(n, r)));
        }

        #[test]
        fn apply_is_linear(
            m in small_map(3),
            a in proptest::collection::vec(small_rat(), 3),
            b in proptest::collection::vec(small_rat(), 3),
            c in small_rat(),
        ) {
            let va = ExpVec::new(a);
            let vb = ExpVec::new(b);
            let sum = va.add(&vb).unwrap();
            let lhs = m.apply(&sum).unwrap();
            let rhs = m.apply(&va).unwrap().add(&m.apply(&vb).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lhs2 = m.apply(&va.scaled(&c)).unwrap();
            let rhs2 = m.apply(&va).unwrap().scaled(&c);
            prop_assert_eq!(lhs2, rhs2);
        }

        #[test]
        fn composition_is_associative_and_matches_application(
            a in small_map(3),
            b in small_map(3),
            c in small_map(3),
            v in proptest::collection::vec(small_rat(), 3),
        ) {
            let v = ExpVec::new(v);
            let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
            let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            let lhs = ab_c.apply(&v).unwrap();
            let rhs = a.apply(&b.apply(&c.apply(&v).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_roundtrips(m in small_map(3)) {
            // random maps are occasionally singular; the property is about
            // the invertible ones
            prop_assume!(m.inverse().is_ok());
            let inv = m.inverse().unwrap();
            prop_assert_eq!(m.compose(&inv).unwrap(), MonomialMap::identity(3));
            prop_assert_eq!(inv.compose(&m).unwrap(), MonomialMap::identity(3));
        }
    }
}
