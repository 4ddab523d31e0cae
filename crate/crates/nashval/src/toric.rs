//! Weighted blow-ups of cyclic quotient spaces: chart quotient types,
//! monomial coordinate changes, the discrepancy formula, and valuation
//! transport.
//!
//! A space `A^n / (1/r)(a_1, ..., a_n)` is stored with its weight vector as
//! given (signs preserved); congruence tests reduce mod `r`. Two spaces are
//! isomorphic-equal when one weight vector is a unit multiple of a
//! permutation of the other mod `r`, and equality is always tested through
//! that normalization, never on raw vectors.

use num_traits::Zero;

use crate::exact::{gcd_i64, rat, rat_int, ExpVec, MonomialMap};
use crate::series::Series;
use crate::{Error, Rat, Result};

/// `A^n / (1/r)(weights)`; `r = 1` is smooth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSpace {
    r: i64,
    weights: Vec<i64>,
}

impl QuotientSpace {
    pub fn new(r: i64, weights: Vec<i64>) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidWeight(format!("quotient order must be >= 1, got {r}")));
        }
        if weights.len() < 2 {
            return Err(Error::InvalidWeight("quotient space needs at least 2 coordinates".into()));
        }
        Ok(QuotientSpace { r, weights })
    }

    pub fn smooth(n: usize) -> Self {
        QuotientSpace { r: 1, weights: vec![0; n] }
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight_mod(&self, i: usize) -> i64 {
        self.weights[i].rem_euclid(self.r)
    }

    pub fn is_smooth(&self) -> bool {
        self.reduced().0 == 1
    }

    /// The actual group order and a generator: `(1/r)(a)` generates a group
    /// of order `r / gcd(r, a_1, ..., a_n)`.
    fn reduced(&self) -> (i64, Vec<i64>) {
        let mut g = self.r;
        for &w in &self.weights {
            g = gcd_i64(g, w.rem_euclid(self.r));
        }
        if g == 0 {
            g = self.r;
        }
        let r = self.r / g;
        let w = self.weights.iter().map(|&a| a.rem_euclid(self.r) / g).collect();
        (r, w)
    }

    /// Same space, weight vector rescaled by a unit `t` mod `r` and reduced
    /// to representatives in `[0, r)`.
    pub fn unit_rescaled(&self, t: i64) -> Result<QuotientSpace> {
        if gcd_i64(t, self.r) != 1 {
            return Err(Error::InvalidWeight(format!("{t} is not a unit mod {}", self.r)));
        }
        let weights = self
            .weights
            .iter()
            .map(|&a| (t * a).rem_euclid(self.r))
            .collect();
        Ok(QuotientSpace { r: self.r, weights })
    }

    /// Canonical representative under unit rescaling and coordinate
    /// permutation: the lexicographically smallest sorted residue vector.
    pub fn normalized(&self) -> QuotientSpace {
        let (r, w) = self.reduced();
        if r == 1 {
            return QuotientSpace { r: 1, weights: vec![0; self.n()] };
        }
        let mut best: Option<Vec<i64>> = None;
        for t in 1..r {
            if gcd_i64(t, r) != 1 {
                continue;
            }
            let mut cand: Vec<i64> = w.iter().map(|&a| (t * a).rem_euclid(r)).collect();
            cand.sort_unstable();
            if best.as_ref().is_none_or(|b| &cand < b) {
                best = Some(cand);
            }
        }
        QuotientSpace { r, weights: best.unwrap_or_else(|| vec![0; self.n()]) }
    }

    pub fn isomorphic_eq(&self, other: &QuotientSpace) -> bool {
        self.n() == other.n() && self.normalized() == other.normalized()
    }
}

impl std::fmt::Display for QuotientSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "1/{}({})", self.r, ws.join(","))
    }
}

/// A lattice weight `(1/r)(b_1, ..., b_n)` with its decomposition
/// `b_i = lambda * a_i + k_i * r` over the ambient space's weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupWeight {
    pub r: i64,
    pub b: Vec<i64>,
    pub lambda: i64,
    pub k: Vec<i64>,
}

impl BlowupWeight {
    /// The weight as an exact vector `(b_1/r, ..., b_n/r)`.
    pub fn as_expvec(&self) -> ExpVec {
        ExpVec::from_scaled(&self.b, self.r)
    }
}

/// Finds the least `lambda >= 1` with `b_i = lambda * a_i (mod r)` for all
/// `i`; rejects `b` that is not a lattice point.
pub fn decompose_weight(space: &QuotientSpace, b: &[i64]) -> Result<BlowupWeight> {
    if b.len() != space.n() {
        return Err(Error::DimensionMismatch { expected: space.n(), got: b.len() });
    }
    if b.iter().any(|&x| x < 1) {
        return Err(Error::InvalidWeight("blow-up weight entries must be positive".into()));
    }
    let r = space.r();
    for lambda in 1..=r {
        if (0..b.len()).all(|i| (b[i] - lambda * space.weights()[i]).rem_euclid(r) == 0) {
            let k = (0..b.len())
                .map(|i| (b[i] - lambda * space.weights()[i]) / r)
                .collect();
            return Ok(BlowupWeight { r, b: b.to_vec(), lambda, k });
        }
    }
    Err(Error::InvalidWeight(format!(
        "({}) / {} is not a lattice point of {}",
        b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        r,
        space
    )))
}

/// One affine chart of a weighted blow-up.
#[derive(Debug, Clone)]
pub struct ChartData {
    /// Coordinate position of the chart.
    pub index: usize,
    /// Quotient type of the chart.
    pub space: QuotientSpace,
    /// Upstream coordinates as monomials in chart coordinates.
    pub change: MonomialMap,
    /// Value of the blow-up weight on upstream coordinates; equals the
    /// transport of the chart's scaled unit valuation.
    pub exc_valuation: ExpVec,
}

/// Chart `index` of the blow-up of `space` with weight `w`. Uses the closed
/// form for `lambda = 1` and integer lattice reduction otherwise.
pub fn blowup_chart(space: &QuotientSpace, w: &BlowupWeight, index: usize) -> Result<ChartData> {
    let n = space.n();
    if index >= n {
        return Err(Error::DimensionMismatch { expected: n, got: index });
    }
    let r = space.r();
    let bi = w.b[index];
    let chart_space = if w.lambda == 1 {
        // 1/b_i(-b_1, ..., r at index, ..., -b_n)
        let weights = (0..n)
            .map(|j| if j == index { r } else { -w.b[j] })
            .collect();
        QuotientSpace::new(bi.max(1), weights)?
    } else {
        chart_quotient_lattice(space, w, index)?
    };

    let mut rows = vec![vec![Rat::zero(); n]; n];
    for (j, row) in rows.iter_mut().enumerate() {
        if j != index {
            row[j] = Rat::from_integer(1.into());
        }
        row[index] = rat(w.b[j], r);
    }
    let change = MonomialMap::from_rows(rows)?;
    let exc_valuation = w.as_expvec();
    debug_assert_eq!(change.apply(&ExpVec::unit(n, index)).unwrap(), exc_valuation);
    Ok(ChartData { index, space: chart_space, change, exc_valuation })
}

/// General-lambda chart type: the quotient lattice generated over `Z^n` by
/// the two distinguished vectors of the transformed cone, computed by
/// closing their residues under addition and extracting a cyclic generator.
fn chart_quotient_lattice(space: &QuotientSpace, w: &BlowupWeight, index: usize) -> Result<QuotientSpace> {
    let n = space.n();
    let r = space.r();
    let bi = w.b[index];
    let d = r * bi;
    // v' = (1/bi)(-b_1, ..., r@i, ..., -b_n), w' = (1/(r*bi))(a_j*bi - a_i*b_j, ..., r*a_i@i)
    let ai = space.weights()[index];
    let mut v1 = vec![0i64; n];
    let mut v2 = vec![0i64; n];
    for j in 0..n {
        if j == index {
            v1[j] = (r * r).rem_euclid(d);
            v2[j] = (r * ai).rem_euclid(d);
        } else {
            v1[j] = (-r * w.b[j]).rem_euclid(d);
            v2[j] = (space.weights()[j] * bi - ai * w.b[j]).rem_euclid(d);
        }
    }
    let mut group: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
    group.insert(vec![0; n]);
    let mut frontier = vec![vec![0i64; n]];
    while let Some(cur) = frontier.pop() {
        for gen in [&v1, &v2] {
            let nxt: Vec<i64> = cur
                .iter()
                .zip(gen.iter())
                .map(|(a, b)| (a + b).rem_euclid(d))
                .collect();
            if group.insert(nxt.clone()) {
                frontier.push(nxt);
            }
        }
    }
    let order = group.len() as i64;
    if order == 1 {
        return Ok(QuotientSpace::smooth(n));
    }
    // the quotient is cyclic: pick the smallest generator of full order
    for g in &group {
        let mut content = d;
        for &x in g {
            content = gcd_i64(content, x);
        }
        if d / content == order {
            let weights = g.iter().map(|&x| x * order / d).collect();
            return QuotientSpace::new(order, weights);
        }
    }
    Err(Error::InvalidWeight(format!(
        "chart lattice of {} at weight ({})/{} is not cyclic",
        space,
        w.b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        r
    )))
}

/// Discrepancy of the exceptional divisor of the weight-`w` blow-up over a
/// complete intersection cut out by hypersurfaces of the given `w`-orders:
/// `(sum b_i)/r - sum(hyp_weights) - 1`.
pub fn discrepancy(space: &QuotientSpace, w: &BlowupWeight, hyp_weights: &[Rat]) -> Rat {
    let total: i64 = w.b.iter().sum();
    let mut d = rat(total, space.r());
    for h in hyp_weights {
        d -= h;
    }
    d - rat_int(1)
}

/// Transports a valuation known on some chart coordinates to upstream
/// coordinates. `known[c]` gives the value on chart coordinate `c`; exactly
/// the slots eliminated by solving the hypersurface equation may be `None`.
///
/// When an upstream coordinate cannot be computed from the known slots, it
/// must be the `x` or `y` of a germ `xy = f(z, u)` on upstream coordinates
/// `(x, y, z, u)`, and `hyp` must supply `f`: the missing value is
/// `v(f) - v(partner)` with `v(f)` the minimum over the terms of `f`.
/// The minimum rule is exact here: monomial coordinate changes keep distinct
/// monomials distinct, so tied minimal terms cannot cancel.
pub fn transport_valuation(
    chart: &ChartData,
    known: &[Option<Rat>],
    hyp: Option<&Series>,
) -> Result<ExpVec> {
    let n = chart.change.dim();
    if known.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: known.len() });
    }
    let mut upstream: Vec<Option<Rat>> = Vec::with_capacity(n);
    for row in 0..n {
        let mut acc = Some(Rat::zero());
        for (coeff, value) in chart.change.row(row).iter().zip(known) {
            if coeff.is_zero() {
                continue;
            }
            acc = match (acc, value) {
                (Some(a), Some(v)) => Some(a + coeff * v),
                _ => None,
            };
        }
        upstream.push(acc);
    }
    let missing: Vec<usize> = (0..n).filter(|&i| upstream[i].is_none()).collect();
    match missing.as_slice() {
        [] => Ok(ExpVec::new(upstream.into_iter().map(Option::unwrap).collect())),
        [slot] if *slot <= 1 && n == 4 => {
            let f = hyp.ok_or_else(|| {
                Error::InvalidWeight("eliminated coordinate needs the defining series".into())
            })?;
            let vz = upstream[2].clone().ok_or_else(|| {
                Error::InvalidWeight("cannot reconstruct x and z simultaneously".into())
            })?;
            let vu = upstream[3].clone().unwrap();
            let vf = series_value(f, &vz, &vu)?;
            let partner = upstream[1 - slot].clone().ok_or_else(|| {
                Error::InvalidWeight("both hypersurface coordinates eliminated".into())
            })?;
            let mut entries: Vec<Rat> = Vec::with_capacity(n);
            for (i, v) in upstream.iter().enumerate() {
                if i == *slot {
                    entries.push(&vf - &partner);
                } else {
                    entries.push(v.clone().unwrap());
                }
            }
            Ok(ExpVec::new(entries))
        }
        _ => Err(Error::InvalidWeight(format!(
            "cannot reconstruct upstream coordinates {missing:?} from the known chart slots"
        ))),
    }
}

/// `v(f)` for a valuation with the given values on `z` and `u`: the minimum
/// of `(r*i)*vz + j*vu` over the support of `f`.
pub fn series_value(f: &Series, vz: &Rat, vu: &Rat) -> Result<Rat> {
    f.terms()
        .map(|t| vz * rat_int(f.r() * t.i) + vu * rat_int(t.j))
        .min()
        .ok_or_else(|| Error::InvalidGerm("value of the zero series".into()))
}
