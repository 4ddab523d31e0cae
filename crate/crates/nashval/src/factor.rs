//! Newton polygons of the defining series viewed over `w = z^r`, exact
//! factorization into irreducible components via slope separation and Hensel
//! lifting, and the Q-factoriality verdict derived from it.
//!
//! The series ring is formally a power-series ring in `(w, u)`; factor
//! counts come from the polygon and the per-segment characteristic
//! polynomials, and factors are exhibited over the rationals whenever slope
//! separation or simple rational roots allow. Degenerate data that would
//! require irrational branch recursion reports an unknown count instead of
//! guessing. Every certified split is verified by multiplication.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::catalog::{DivisorialValuation, Label, Verdict};
use crate::exact::{gcd_i64, rat, rat_int, ExpVec};
use crate::polyq::{self, Poly};
use crate::resolve::{validate_germ, Germ};
use crate::series::Series;
use crate::{Error, Rat, Result};

/// One compact edge of the polygon, listed with its right vertex first
/// (larger `w`-degree, smaller `u`-order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub right: (i64, i64),
    pub left: (i64, i64),
    /// Rise over width, in lowest terms.
    pub slope: Rat,
    /// Width in `w`-degree, the degree of the segment's factor.
    pub length: i64,
    pub rise: i64,
    /// Number of lattice steps on the segment: `gcd(length, rise)`.
    pub lattice_gcd: i64,
}

/// Lower convex hull of the support in `(w-degree, u-order)` coordinates;
/// vertices ordered by decreasing `w`-degree, slopes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, i64)>,
    pub segments: Vec<Segment>,
}

/// The polygon of a series' support.
pub fn newton_polygon(f: &Series) -> NewtonPolygon {
    polygon_of(&f.support())
}

fn polygon_of(support: &[(i64, i64)]) -> NewtonPolygon {
    let mut min_j: BTreeMap<i64, i64> = BTreeMap::new();
    for &(i, j) in support {
        min_j
            .entry(i)
            .and_modify(|m| *m = (*m).min(j))
            .or_insert(j);
    }
    if min_j.is_empty() {
        return NewtonPolygon { vertices: Vec::new(), segments: Vec::new() };
    }
    let j_floor = *min_j.values().min().unwrap();
    let right_i = *min_j
        .iter()
        .filter(|(_, &j)| j == j_floor)
        .map(|(i, _)| i)
        .min()
        .unwrap();
    let pts: Vec<(i64, i64)> = min_j.range(..=right_i).map(|(&i, &j)| (i, j)).collect();
    let mut chain: Vec<(i64, i64)> = vec![*pts.last().unwrap()];
    for &p in pts.iter().rev().skip(1) {
        while chain.len() >= 2 {
            let a = chain[chain.len() - 2];
            let b = chain[chain.len() - 1];
            // keep b only when slope(a,b) < slope(a,p), i.e. b is a strict
            // vertex below the chord from a to p
            if (b.1 - a.1) * (a.0 - p.0) < (p.1 - a.1) * (a.0 - b.0) {
                break;
            }
            chain.pop();
        }
        chain.push(p);
    }
    let segments = chain
        .windows(2)
        .map(|w| {
            let (right, left) = (w[0], w[1]);
            let length = right.0 - left.0;
            let rise = left.1 - right.1;
            Segment {
                right,
                left,
                slope: rat(rise, length),
                length,
                rise,
                lattice_gcd: gcd_i64(length, rise),
            }
        })
        .collect();
    NewtonPolygon { vertices: chain, segments }
}

/// Hard budget for a single Hensel lift, in twisted levels.
const LIFT_TARGET: i64 = 2048;

/// Confidence of a factorization result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    /// Every factor is exhibited and certified irreducible.
    Certified,
    /// The count is exact but some block is not separated over the rationals.
    CountOnly,
    /// Some block's count would need irrational branch recursion.
    Unknown,
}

/// One block of the factorization: either a certified irreducible factor or
/// a product block with a known (or unknown) number of irreducible factors.
#[derive(Debug, Clone)]
pub struct FactorPiece {
    pub series: Series,
    /// Number of irreducible factors in this block; `None` when undecided.
    pub count: Option<i64>,
    /// Exhibited as a single certified irreducible factor.
    pub irreducible: bool,
}

#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub pieces: Vec<FactorPiece>,
    /// Total number of irreducible factors, when every block is counted.
    pub n: Option<i64>,
    pub certainty: Certainty,
    /// Shape of the local class group away from the point.
    pub picard: String,
    /// Scalar unit with `scale * product(pieces) = f`.
    pub scale: Rat,
    /// Order up to which the product identity was verified.
    pub verified_to: i64,
}

impl FactorizationResult {
    /// The certified irreducible factors.
    pub fn factors(&self) -> Vec<&Series> {
        self.pieces
            .iter()
            .filter(|p| p.irreducible)
            .map(|p| &p.series)
            .collect()
    }
}

fn picard_string(r: i64, n: Option<i64>) -> String {
    match n {
        None => "undetermined".into(),
        Some(n) => {
            let mut parts = Vec::new();
            if r > 1 {
                parts.push(format!("Z/{r}Z"));
            }
            if n > 1 {
                parts.push(format!("Z^{}", n - 1));
            }
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" (+) ")
            }
        }
    }
}

/// Sparse bivariate support with a knowledge half-plane: coefficients are
/// complete exactly where `kp*i + kq*j <= kb`. The input series starts with
/// the half-plane `r*i + j <= trunc`; Hensel lifts and recenterings replace
/// it by the half-plane their construction actually controls.
#[derive(Debug, Clone)]
struct Work {
    supp: BTreeMap<(i64, i64), Rat>,
    r: i64,
    kp: i64,
    kq: i64,
    kb: i64,
}

/// Effectively-complete supports (exhibited exact factors) use this bound.
const FULL_KNOWLEDGE: i64 = i64::MAX / 8;

impl Work {
    fn from_series(f: &Series) -> Work {
        Work {
            supp: f.terms().map(|t| ((t.i, t.j), t.c)).collect(),
            r: f.r(),
            kp: f.r(),
            kq: 1,
            kb: f.trunc(),
        }
    }

    /// Largest `B` with the total-order ball `r*i + j <= B` inside the
    /// knowledge region.
    fn total_order_bound(&self) -> i64 {
        let by_w = (self.kb as i128 * self.r as i128) / self.kp as i128;
        let by_u = self.kb as i128 / self.kq as i128;
        i64::try_from(by_w.min(by_u).min(FULL_KNOWLEDGE as i128)).unwrap_or(FULL_KNOWLEDGE)
    }

    fn to_series(&self) -> Series {
        Series::from_raw(
            self.r,
            self.supp.iter().map(|(&k, c)| (k, c.clone())).collect(),
            self.total_order_bound(),
        )
    }

    fn support(&self) -> Vec<(i64, i64)> {
        self.supp.keys().copied().collect()
    }

    fn max_w_degree(&self) -> i64 {
        self.supp.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    fn inside(&self, i: i64, j: i64) -> bool {
        self.kp as i128 * i as i128 + self.kq as i128 * j as i128 <= self.kb as i128
    }

    /// Strips common `u`- and `w`-powers, returning their exponents.
    fn strip(&mut self) -> (i64, i64) {
        if self.supp.is_empty() {
            return (0, 0);
        }
        let cu = self.supp.keys().map(|&(_, j)| j).min().unwrap();
        let cw = self.supp.keys().map(|&(i, _)| i).min().unwrap();
        if cu > 0 || cw > 0 {
            self.supp = self
                .supp
                .iter()
                .map(|(&(i, j), c)| ((i - cw, j - cu), c.clone()))
                .collect();
            self.kb -= self.kp * cw + self.kq * cu;
        }
        (cu, cw)
    }

    /// Substitutes `w -> w + c*u^p`. Images of known terms stay known where
    /// the transformed half-plane says so; everything outside is dropped.
    fn shift_w(&self, c: &Rat, p: i64) -> Result<Work> {
        assert!(p >= 1);
        // a source term at (i, j) spreads to (t, j + p*(i - t)); the old
        // functional bounds the images through the steeper of the two slopes
        let (kp, kq, kb) = if p * self.kq >= self.kp {
            (self.kp, self.kq, self.kb)
        } else {
            let g = gcd_i64(self.kp * p, self.kp).max(1);
            (self.kp * p / g, self.kp / g, Work::scale_bound(self.kb, p, g)?)
        };
        if kb < kq {
            return Err(Error::InsufficientTruncation(
                "branch recursion exhausted the truncation budget".into(),
            ));
        }
        let max_i = self.max_w_degree();
        // powers of (w + c*u^p)
        let mut powers: Vec<BTreeMap<(i64, i64), Rat>> = Vec::new();
        let mut one = BTreeMap::new();
        one.insert((0i64, 0i64), Rat::one());
        powers.push(one);
        let mut base = BTreeMap::new();
        base.insert((1i64, 0i64), Rat::one());
        base.insert((0i64, p), c.clone());
        for k in 1..=max_i {
            let prev = &powers[(k - 1) as usize];
            let mut next: BTreeMap<(i64, i64), Rat> = BTreeMap::new();
            for (&(i1, j1), c1) in prev {
                for (&(i2, j2), c2) in &base {
                    let key = (i1 + i2, j1 + j2);
                    let e = next.entry(key).or_insert_with(Rat::zero);
                    *e = &*e + c1 * c2;
                }
            }
            next.retain(|_, v| !v.is_zero());
            powers.push(next);
        }
        let mut out = Work { supp: BTreeMap::new(), r: self.r, kp, kq, kb };
        let mut acc: BTreeMap<(i64, i64), Rat> = BTreeMap::new();
        for (&(i, j), cf) in &self.supp {
            for (&(pi, pj), pc) in &powers[i as usize] {
                let key = (pi, pj + j);
                if out.inside(key.0, key.1) {
                    let e = acc.entry(key).or_insert_with(Rat::zero);
                    *e = &*e + cf * pc;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        out.supp = acc;
        Ok(out)
    }

    fn scale_bound(kb: i64, p: i64, g: i64) -> Result<i64> {
        let scaled = kb as i128 * p as i128 / g as i128;
        Ok(i64::try_from(scaled.min(FULL_KNOWLEDGE as i128))
            .unwrap_or(FULL_KNOWLEDGE))
    }
}

/// A raw block produced by the recursion.
enum RawPiece {
    Irreducible(Work),
    Counted(Work, i64),
    Undecided(Work),
    PrimeU,
    PrimeW,
}

/// Splits `work` along a weight `(pstar, qstar)` whose bottom form factors
/// as `g0 * h0` with monic `g0` coprime to `h0`; returns the two exact
/// cofactors with their completeness bounds.
fn hensel_split(work: &Work, pstar: i64, qstar: i64, g0: &Poly) -> Result<(Work, Work)> {
    let r = work.r;
    let d_max = work.max_w_degree();
    let nu = |i: i64, j: i64| pstar * i + qstar * j;
    let nu0 = work.supp.keys().map(|&(i, j)| nu(i, j)).min().expect("nonempty support");
    // hidden terms satisfy kp*i + kq*j > kb; the least twisted order they
    // can reach is attained on an axis of that boundary, and everything
    // strictly below it lifts exactly
    let beyond = work.kb as i128 + 1;
    let corner_u = qstar as i128 * beyond / work.kq as i128;
    let corner_w = pstar as i128 * beyond / work.kp as i128;
    let n_avail = corner_u.min(corner_w) - nu0 as i128;
    // lifting deeper than the parent's own completeness ball is wasted work
    let target = work.total_order_bound().min(4 * LIFT_TARGET);
    let n_cap = qstar as i128 * target as i128 + pstar as i128 * d_max as i128 - nu0 as i128;
    let n = n_avail.min(n_cap).min(LIFT_TARGET as i128);
    if n < 0 {
        return Err(Error::InsufficientTruncation(
            "the truncation bound cannot support the requested split".into(),
        ));
    }
    let n = n as usize;

    // twisted levels: coefficient polynomials in w' per nu-order
    let mut levels: Vec<Vec<Rat>> = vec![vec![Rat::zero(); (d_max + 1) as usize]; n + 1];
    for (&(i, j), c) in &work.supp {
        let e = nu(i, j) - nu0;
        if e <= n as i64 {
            levels[e as usize][i as usize] = c.clone();
        }
    }
    let levels: Vec<Poly> = levels.into_iter().map(Poly::new).collect();

    let phi = levels[0].clone();
    let (h0, rem) = phi.div_rem(g0);
    if !rem.is_zero() {
        return Err(Error::Factorization(
            "the chosen bottom factor does not divide the bottom form".into(),
        ));
    }
    let (gcd, _s, t) = g0.extended_gcd(&h0);
    if gcd.degree() != 0 {
        return Err(Error::Factorization(
            "bottom factors are not coprime; cannot lift the split".into(),
        ));
    }

    let mut g_levels: Vec<Poly> = vec![g0.clone()];
    let mut h_levels: Vec<Poly> = vec![h0.clone()];
    for k in 1..=n {
        // E_k = F_k - sum_{a+b=k, a,b<k} G_a * H_b
        let mut e_k = levels[k].clone();
        for a in 1..k {
            e_k = polyq::sub(&e_k, &g_levels[a].mul(&h_levels[k - a]));
        }
        // solve G_0*H_k + G_k*H_0 = E_k with deg G_k < deg G_0
        let te = t.mul(&e_k);
        let dg_k = te.div_rem(g0).1;
        let num = polyq::sub(&e_k, &dg_k.mul(&h_levels[0]));
        let (dh_k, rem2) = num.div_rem(g0);
        debug_assert!(rem2.is_zero(), "lift correction must divide exactly");
        g_levels.push(dg_k);
        h_levels.push(dh_k);
    }

    let collect = |parts: &[Poly]| -> BTreeMap<(i64, i64), Rat> {
        let mut m = BTreeMap::new();
        for (e, poly) in parts.iter().enumerate() {
            for (k, c) in poly.0.iter().enumerate() {
                if !c.is_zero() {
                    m.insert((k as i64, e as i64), c.clone());
                }
            }
        }
        m
    };
    let g_raw = collect(&g_levels);
    let h_raw = collect(&h_levels);
    let left = untwist(g_raw, pstar, qstar, r, n as i64)?;
    let right = untwist(h_raw, pstar, qstar, r, n as i64)?;

    // exactness check on the overlap of the completeness bounds
    let product = left.to_series().mul(&right.to_series())?;
    let bound = product.trunc().min(work.total_order_bound());
    if !work.to_series().eq_up_to(&product, bound, &Rat::one()) {
        return Err(Error::Factorization(
            "lifted split failed the multiplication check".into(),
        ));
    }
    Ok((left, right))
}

/// Maps a lifted twisted part `(k, e) -> c` back to `(w, u)` exponents:
/// `j = (e + delta - pstar*k)/qstar` with the offset fixed by primitivity.
/// The part is complete exactly on the lifted twisted levels, which become
/// its knowledge half-plane.
fn untwist(
    raw: BTreeMap<(i64, i64), Rat>,
    pstar: i64,
    qstar: i64,
    r: i64,
    n: i64,
) -> Result<Work> {
    if raw.is_empty() {
        return Err(Error::Factorization("empty factor after lifting".into()));
    }
    let delta = raw.keys().map(|&(k, e)| pstar * k - e).max().unwrap();
    let mut supp = BTreeMap::new();
    for (&(k, e), c) in &raw {
        let num = e + delta - pstar * k;
        if num < 0 || num % qstar != 0 {
            return Err(Error::Factorization(
                "lifted factor does not descend to integral exponents".into(),
            ));
        }
        supp.insert((k, num / qstar), c.clone());
    }
    // the lift controls exactly the twisted levels up to n, which is the
    // part's knowledge half-plane
    Ok(Work { supp, r, kp: pstar, kq: qstar, kb: n + delta })
}

/// Characteristic polynomial of a single-segment polygon after stripping:
/// coefficients read along the lattice points of the segment.
fn char_poly(work: &Work, seg: &Segment) -> Poly {
    let g = seg.lattice_gcd;
    let q = seg.length / g;
    let p = seg.rise / g;
    let coeffs = (0..=g)
        .map(|t| {
            work.supp
                .get(&(seg.left.0 + t * q, seg.left.1 - t * p))
                .cloned()
                .unwrap_or_else(Rat::zero)
        })
        .collect();
    Poly::new(coeffs)
}

enum Chunk {
    RationalRoot { rho: Rat, mult: usize, poly: Poly },
    SimpleBlock { count: i64, poly: Poly },
    IrrationalMultiple { poly: Poly },
    SearchDefeated { poly: Poly },
}

impl Chunk {
    fn poly(&self) -> &Poly {
        match self {
            Chunk::RationalRoot { poly, .. }
            | Chunk::SimpleBlock { poly, .. }
            | Chunk::IrrationalMultiple { poly }
            | Chunk::SearchDefeated { poly } => poly,
        }
    }
}

fn chunks_of(a: &Poly) -> Vec<Chunk> {
    let am = a.monic();
    match polyq::rational_roots(&am) {
        None => vec![Chunk::SearchDefeated { poly: am }],
        Some((roots, rest)) => {
            let mut out = Vec::new();
            for (rho, mult) in roots {
                let mut poly = Poly::new(vec![Rat::one()]);
                let lin = Poly::new(vec![-rho.clone(), Rat::one()]);
                for _ in 0..mult {
                    poly = poly.mul(&lin);
                }
                out.push(Chunk::RationalRoot { rho, mult, poly });
            }
            if rest.degree() > 0 {
                for (sq, e) in polyq::squarefree_decomposition(&rest) {
                    let mut poly = Poly::new(vec![Rat::one()]);
                    for _ in 0..e {
                        poly = poly.mul(&sq);
                    }
                    if e == 1 {
                        out.push(Chunk::SimpleBlock { count: sq.degree() as i64, poly });
                    } else {
                        out.push(Chunk::IrrationalMultiple { poly });
                    }
                }
            }
            out
        }
    }
}

/// Composes a monic polynomial with `T = w^q`.
fn inflate(p: &Poly, q: i64) -> Poly {
    let mut coeffs = vec![Rat::zero(); p.degree() * q as usize + 1];
    for (t, c) in p.0.iter().enumerate() {
        coeffs[t * q as usize] = c.clone();
    }
    Poly::new(coeffs)
}

fn split_rec(work: Work, out: &mut Vec<RawPiece>, scale: &mut Rat, depth: usize) -> Result<()> {
    if depth > 200 {
        return Err(Error::Factorization("factor recursion exceeded its depth bound".into()));
    }
    let mut work = work;
    if work.supp.is_empty() {
        return Err(Error::Factorization("cannot factor the zero series".into()));
    }
    let (cu, cw) = work.strip();
    for _ in 0..cu {
        out.push(RawPiece::PrimeU);
    }
    for _ in 0..cw {
        out.push(RawPiece::PrimeW);
    }
    if work.supp.len() == 1 {
        let ((i, j), c) = work.supp.iter().next().map(|(&k, c)| (k, c.clone())).unwrap();
        debug_assert_eq!((i, j), (0, 0), "stripped monomial is a constant");
        *scale = &*scale * c;
        return Ok(());
    }
    let poly = polygon_of(&work.support());
    if poly.segments.is_empty() {
        // constant plus terms above the hull floor cannot happen for a
        // stripped nonconstant support
        return Err(Error::Factorization("degenerate polygon".into()));
    }
    // the computed hull is the true hull only when its span lies inside the
    // knowledge region (everything below the hull is then known)
    let right = poly.vertices.first().unwrap();
    let left = poly.vertices.last().unwrap();
    if !work.inside(right.0, right.1) || !work.inside(left.0, left.1) {
        return Err(Error::InsufficientTruncation(
            "polygon extends beyond the known region of a factor block".into(),
        ));
    }
    if poly.segments.len() >= 2 {
        // separate the shallowest segment from the rest at their shared
        // vertex; the mediant weight isolates the vertex monomial
        let s0 = &poly.segments[0];
        let s1 = &poly.segments[1];
        let pstar = i64::try_from(s0.slope.numer() + s1.slope.numer()).unwrap();
        let qstar = i64::try_from(s0.slope.denom() + s1.slope.denom()).unwrap();
        let i_v = s0.left.0;
        let mut coeffs = vec![Rat::zero(); i_v as usize];
        coeffs.push(Rat::one());
        let g0 = Poly::new(coeffs);
        let (left, right) = hensel_split(&work, pstar, qstar, &g0)?;
        split_rec(left, out, scale, depth + 1)?;
        split_rec(right, out, scale, depth + 1)?;
        return Ok(());
    }

    let seg = &poly.segments[0];
    if seg.lattice_gcd == 1 {
        out.push(RawPiece::Irreducible(work));
        return Ok(());
    }
    let a = char_poly(&work, seg);
    let q = seg.length / seg.lattice_gcd;
    let chunks = chunks_of(&a);
    if chunks.len() == 1 {
        match &chunks[0] {
            Chunk::RationalRoot { rho, mult, .. } => {
                debug_assert_eq!(*mult as i64, seg.lattice_gcd);
                if q == 1 {
                    // the whole segment sits on one rational branch: recenter
                    // and recurse, then shift the factors back
                    let p_slope = i64::try_from(seg.slope.to_integer()).unwrap();
                    let shifted = work.shift_w(rho, p_slope)?;
                    let mut inner: Vec<RawPiece> = Vec::new();
                    split_rec(shifted, &mut inner, scale, depth + 1)?;
                    let minus = -rho.clone();
                    for piece in inner {
                        out.push(unshift_piece(piece, &minus, p_slope, work.r)?);
                    }
                } else {
                    // branches carry q-th roots of the center: undecidable
                    // without an extension field
                    out.push(RawPiece::Undecided(work));
                }
            }
            Chunk::SimpleBlock { count, .. } => {
                out.push(RawPiece::Counted(work, *count));
            }
            Chunk::IrrationalMultiple { .. } | Chunk::SearchDefeated { .. } => {
                out.push(RawPiece::Undecided(work));
            }
        }
        return Ok(());
    }
    // several coprime chunks: lift the first against the rest
    let g0 = inflate(&chunks[0].poly().monic(), q);
    let p_seg = seg.rise / seg.lattice_gcd;
    let (left, right) = hensel_split(&work, p_seg, q, &g0)?;
    split_rec(left, out, scale, depth + 1)?;
    split_rec(right, out, scale, depth + 1)?;
    Ok(())
}

/// Applies `w -> w + c*u^p` to the series of a piece (undoing a recentering).
fn unshift_piece(piece: RawPiece, c: &Rat, p: i64, r: i64) -> Result<RawPiece> {
    let map = |w: Work| -> Result<Work> { w.shift_w(c, p) };
    Ok(match piece {
        RawPiece::Irreducible(w) => RawPiece::Irreducible(map(w)?),
        RawPiece::Counted(w, n) => RawPiece::Counted(map(w)?, n),
        RawPiece::Undecided(w) => RawPiece::Undecided(map(w)?),
        RawPiece::PrimeU => RawPiece::PrimeU,
        RawPiece::PrimeW => {
            // the factor w of the shifted series is w + c*u^p upstream
            let mut supp = BTreeMap::new();
            supp.insert((1i64, 0i64), Rat::one());
            supp.insert((0i64, p), c.clone());
            RawPiece::Irreducible(Work { supp, r, kp: r, kq: 1, kb: FULL_KNOWLEDGE })
        }
    })
}

/// Factors the series into irreducible components of its power-series ring.
pub fn factor_series(f: &Series) -> Result<FactorizationResult> {
    if f.is_zero() {
        return Err(Error::Factorization("cannot factor the zero series".into()));
    }
    let work = Work::from_series(f);
    let mut raw: Vec<RawPiece> = Vec::new();
    let mut scale = Rat::one();
    split_rec(work, &mut raw, &mut scale, 0)?;

    let mut pieces: Vec<FactorPiece> = Vec::new();
    for piece in raw {
        match piece {
            RawPiece::PrimeU => pieces.push(FactorPiece {
                series: Series::from_raw(f.r(), vec![((0, 1), Rat::one())], f.trunc()),
                count: Some(1),
                irreducible: true,
            }),
            RawPiece::PrimeW => pieces.push(FactorPiece {
                series: Series::from_raw(f.r(), vec![((1, 0), Rat::one())], f.trunc()),
                count: Some(1),
                irreducible: true,
            }),
            RawPiece::Irreducible(w) => pieces.push(FactorPiece {
                series: w.to_series(),
                count: Some(1),
                irreducible: true,
            }),
            RawPiece::Counted(w, n) => pieces.push(FactorPiece {
                series: w.to_series(),
                count: Some(n),
                irreducible: false,
            }),
            RawPiece::Undecided(w) => pieces.push(FactorPiece {
                series: w.to_series(),
                count: None,
                irreducible: false,
            }),
        }
    }

    // verify the product against f on the common completeness bound
    let mut product = Series::from_raw(f.r(), vec![((0, 0), Rat::one())], i64::MAX / 4);
    for p in &pieces {
        product = product.mul(&p.series)?;
    }
    let bound = product.trunc().min(f.trunc());
    if !f.eq_up_to(&product, bound, &scale) {
        return Err(Error::Factorization(format!(
            "factor product does not reproduce the series (bound {bound}, scale {scale}, product {:?}, f {:?})",
            product.support(), f.support()
        )));
    }

    let n = pieces.iter().map(|p| p.count).try_fold(0i64, |acc, c| c.map(|c| acc + c));
    let certainty = if n.is_none() {
        Certainty::Unknown
    } else if pieces.iter().all(|p| p.irreducible) {
        Certainty::Certified
    } else {
        Certainty::CountOnly
    };
    Ok(FactorizationResult {
        picard: picard_string(f.r(), n),
        pieces,
        n,
        certainty,
        scale,
        verified_to: bound,
    })
}

/// Q-factoriality verdict: decided exactly when the factor count is certain.
pub fn is_q_factorial(germ: &Germ) -> Result<(Verdict, FactorizationResult)> {
    let fr = factor_series(germ.f())?;
    let verdict = match (fr.certainty, fr.n) {
        (Certainty::Unknown, _) | (_, None) => Verdict::Unknown,
        (_, Some(1)) => Verdict::Yes,
        (_, Some(_)) => Verdict::No,
    };
    Ok((verdict, fr))
}

/// Verifies a user-supplied factor list: each factor must be certified
/// irreducible by its own polygon data and the product must reproduce the
/// series up to a scalar.
pub fn verify_supplied_factors(f: &Series, factors: &[Series]) -> Result<FactorizationResult> {
    if factors.is_empty() {
        return Err(Error::FactorsUnavailable("empty factor list".into()));
    }
    let mut pieces = Vec::new();
    for (idx, factor) in factors.iter().enumerate() {
        let own = factor_series(factor)?;
        if own.certainty != Certainty::Certified || own.n != Some(1) {
            return Err(Error::FactorsUnavailable(format!(
                "supplied factor #{idx} is not certified irreducible"
            )));
        }
        pieces.push(FactorPiece { series: factor.clone(), count: Some(1), irreducible: true });
    }
    let mut product = Series::from_raw(f.r(), vec![((0, 0), Rat::one())], i64::MAX / 4);
    for p in &pieces {
        product = product.mul(&p.series)?;
    }
    let bound = product.trunc().min(f.trunc());
    // allow an overall scalar: match on the least term
    let scale = match (f.terms().next(), product.terms().next()) {
        (Some(a), Some(b)) if (a.i, a.j) == (b.i, b.j) => a.c / b.c,
        _ => {
            return Err(Error::FactorsUnavailable(
                "supplied product has a different leading support".into(),
            ))
        }
    };
    if !f.eq_up_to(&product, bound, &scale) {
        return Err(Error::FactorsUnavailable(
            "supplied factors do not multiply back to the series".into(),
        ));
    }
    let n = Some(pieces.len() as i64);
    Ok(FactorizationResult {
        picard: picard_string(f.r(), n),
        pieces,
        n,
        certainty: Certainty::Certified,
        scale,
        verified_to: bound,
    })
}

/// The component germs cut out by a certified factorization, plus the
/// component-separating curve blow-up records.
pub fn q_factorialization_components(
    germ: &Germ,
    fr: &FactorizationResult,
) -> Result<(Vec<Germ>, Vec<DivisorialValuation>)> {
    if fr.certainty != Certainty::Certified {
        return Err(Error::FactorsUnavailable(
            "component germs need a fully certified factorization".into(),
        ));
    }
    let mut germs = Vec::new();
    for piece in &fr.pieces {
        germs.push(validate_germ(germ.r(), germ.a(), piece.series.clone())?);
    }
    // curve i separates the first i components from the rest; its valuation
    // takes v(z) = v(u) = 1, so x and y pick up the depth-r weights of the
    // two component groups
    let r = germ.r();
    let depths: Vec<i64> = germs
        .iter()
        .map(|g| g.f().weight_order(r))
        .collect::<Result<_>>()?;
    let total: i64 = depths.iter().sum();
    let mut curves = Vec::new();
    let mut acc = 0i64;
    for i in 1..germs.len() as i64 {
        acc += depths[(i - 1) as usize];
        curves.push(DivisorialValuation {
            values: ExpVec::from_i64(&[acc, total - acc, 1, 1]),
            discrepancy: rat_int(1),
            label: Label::Curve { i },
            nash: true,
            essential: Verdict::Yes,
            provenance: "component-separating curve blow-up".into(),
        });
    }
    Ok((germs, curves))
}
