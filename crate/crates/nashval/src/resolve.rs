//! Germ validation, the stepwise partial resolution of a germ, and the
//! brute-force divisor enumeration that serves as the oracle against the
//! closed-form catalog.
//!
//! The resolution of a germ `xy = f(z, u)` in `C^4/(1/r)(a, -a, 1, 0)`
//! proceeds by repeated weighted blow-ups with weight `(1/r)(a, rm-a, 1, r)`
//! followed at each step by the economic resolution of the two cyclic
//! quotient points in the `x`- and `y`-charts; the chain continues through
//! the `u`-chart germ until its multiplicity drops to zero. Every divisor is
//! emitted already in the original coordinates with its discrepancy
//! accumulated along the transport chain.

use crate::exact::{gcd_i64, mod_inverse, rat, rat_int, ExpVec};
use crate::series::Series;
use crate::toric::{
    blowup_chart, decompose_weight, transport_valuation, QuotientSpace,
};
use crate::{Error, Rat, Result};

/// Validity record of a germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GermFlags {
    /// The isolation surrogate (a pure power of `u` in the series) holds.
    pub isolated: bool,
    /// The pure power `z^(r*m)` is present (always enforced for `r > 1`).
    pub normalized: bool,
    /// Index one and multiplicity one: the germ is a smooth point.
    pub smooth: bool,
}

/// A validated germ `xy = f(z, u)` in `C^4/(1/r)(a, -a, 1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    r: i64,
    a: i64,
    f: Series,
    flags: GermFlags,
}

impl Germ {
    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn f(&self) -> &Series {
        &self.f
    }

    pub fn flags(&self) -> GermFlags {
        self.flags
    }

    /// The first Newton weight `m_1`.
    pub fn multiplicity(&self) -> Result<i64> {
        self.f.weight_order(1)
    }

    /// Ambient quotient `1/r(a, -a, 1, 0)`.
    pub fn ambient(&self) -> QuotientSpace {
        QuotientSpace::new(self.r, vec![self.a, -self.a, 1, 0]).expect("validated germ")
    }

    /// The quotient `1/r(a, -a, 1)` on `(x, y, z)` that the germ reduces to
    /// when `u` appears linearly in the series.
    pub fn quotient3(&self) -> QuotientSpace {
        QuotientSpace::new(self.r, vec![self.a, -self.a, 1]).expect("validated germ")
    }

    /// Whether the series contains the linear term `u`, making the germ a
    /// pure cyclic quotient.
    pub fn is_pure_quotient(&self) -> bool {
        self.f.has_term(0, 1)
    }

    /// Same germ with another defining series (used for coordinate changes).
    pub fn with_series(&self, f: Series) -> Result<Germ> {
        validate_germ(self.r, self.a, f)
    }
}

/// Checks a germ candidate and normalizes the group weight `a`.
pub fn validate_germ(r: i64, a: i64, f: Series) -> Result<Germ> {
    if r < 1 {
        return Err(Error::InvalidGerm(format!("index r must be >= 1, got {r}")));
    }
    if f.r() != r {
        return Err(Error::InvalidGerm(format!(
            "series index {} does not match germ index {r}",
            f.r()
        )));
    }
    if f.is_zero() {
        return Err(Error::InvalidGerm("the defining series is zero".into()));
    }
    let a = if r == 1 { 0 } else { a.rem_euclid(r) };
    if r > 1 && gcd_i64(a, r) != 1 {
        return Err(Error::InvalidGerm(format!("a = {a} is not coprime to r = {r}")));
    }
    if f.has_term(0, 0) {
        return Err(Error::InvalidGerm(
            "the series has a constant term, so the germ misses the fixed point".into(),
        ));
    }
    if f.pure_u_order().is_none() {
        return Err(Error::InvalidGerm(
            "z divides the series and no pure power of u is present (non-isolated)".into(),
        ));
    }
    let m = f.weight_order(1)?;
    let normalized = f.has_term(m, 0);
    if r > 1 && !normalized {
        return Err(Error::InvalidGerm(format!(
            "missing the pure term z^{} of minimal weight; adjust coordinates so it is present",
            r * m
        )));
    }
    let flags = GermFlags {
        isolated: true,
        normalized,
        smooth: r == 1 && m == 1,
    };
    Ok(Germ { r, a, f, flags })
}

/// A divisor found by walking the resolution, in original coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleDivisor {
    pub values: ExpVec,
    pub discrepancy: Rat,
    pub origin: String,
}

/// Terminal data of a three-dimensional cyclic quotient: the paired
/// coordinates `(p, q)` whose weights cancel mod `r`, the unit coordinate
/// `s`, and the canonical blow-up weight `b` with `b_s = 1`, `b_p + b_q = r`.
fn terminal_data(r: i64, w: &[i64]) -> Result<(usize, usize, usize, Vec<i64>)> {
    for s in 0..3 {
        let p = (s + 1) % 3;
        let q = (s + 2) % 3;
        if gcd_i64(w[s], r) != 1 || gcd_i64(w[p], r) != 1 {
            continue;
        }
        if (w[p] + w[q]).rem_euclid(r) != 0 {
            continue;
        }
        let t = mod_inverse(w[s].rem_euclid(r), r).expect("unit weight");
        let b: Vec<i64> = w.iter().map(|&wi| (t * wi).rem_euclid(r)).collect();
        debug_assert_eq!(b[s], 1);
        debug_assert_eq!(b[p] + b[q], r);
        return Ok((p, q, s, b));
    }
    Err(Error::NonTerminal(format!(
        "1/{r}({},{},{}) has no unit coordinate with a cancelling pair",
        w[0], w[1], w[2]
    )))
}

/// Economic resolution of a terminal quotient `1/r(a, -a, 1)` (in any
/// coordinate order): blows up the canonical weight, recurses into the two
/// new quotient points, and transports everything back. The result lists
/// each divisor's valuation on the given coordinates and its discrepancy
/// over the input space.
///
/// Transport is eager: every chart basis vector is a lattice point of the
/// ambient lattice, so the composed coordinate frames are integer columns
/// over the reduced order, and each divisor's valuation in the original
/// coordinates is exactly the column introduced by its blow-up. The
/// discrepancy is the coordinate sum minus one, exact for lattice
/// valuations over the quotient.
pub fn economic_resolution(space: &QuotientSpace) -> Result<Vec<OracleDivisor>> {
    if space.n() != 3 {
        return Err(Error::NonTerminal(
            "economic resolution expects a threefold quotient".into(),
        ));
    }
    let raw: Vec<i64> = (0..3).map(|i| space.weight_mod(i)).collect();
    let g = raw.iter().fold(space.r(), |acc, &x| gcd_i64(acc, x));
    let big_r = space.r() / g;
    if big_r == 1 {
        return Ok(Vec::new());
    }
    let w: [i64; 3] = [raw[0] / g, raw[1] / g, raw[2] / g];
    let cols = [[big_r, 0, 0], [0, big_r, 0], [0, 0, big_r]];
    let mut out = Vec::new();
    economic_rec(big_r, w, cols, big_r, &mut out, 0)?;
    Ok(out)
}

/// `cols[j]` is the `j`-th chart basis vector in original coordinates,
/// scaled by the original order `big_r`; `r_node` and `w` describe the
/// quotient at this chart origin.
fn economic_rec(
    r_node: i64,
    w: [i64; 3],
    cols: [[i64; 3]; 3],
    big_r: i64,
    out: &mut Vec<OracleDivisor>,
    depth: usize,
) -> Result<()> {
    if depth > 4096 {
        return Err(Error::NonTerminal(
            "economic resolution recursion exceeded its depth bound".into(),
        ));
    }
    let g = w.iter().fold(r_node, |acc, &x| gcd_i64(acc, x));
    let r = r_node / g;
    if r == 1 {
        return Ok(());
    }
    let w = [w[0] / g, w[1] / g, w[2] / g];
    let (p, q, _s, b) = terminal_data(r, &w)?;

    // the exceptional valuation in original coordinates: the weight vector
    // pushed through the frame, still a lattice point
    let mut v = [0i64; 3];
    for t in 0..3 {
        let num: i64 = (0..3).map(|j| b[j] * cols[j][t]).sum();
        if num % r != 0 {
            return Err(Error::InvalidWeight(
                "transported weight left the original lattice".into(),
            ));
        }
        v[t] = num / r;
    }
    let total: i64 = v.iter().sum();
    out.push(OracleDivisor {
        values: ExpVec::from_scaled(&v, big_r),
        discrepancy: rat(total - big_r, big_r),
        origin: format!("quotient blow-up, depth {depth}"),
    });

    for c in [p, q] {
        if b[c] <= 1 {
            continue;
        }
        // chart type in chart coordinates: 1/b_c(-b_0, ..., r at c, ...)
        let mut wc = [0i64; 3];
        for j in 0..3 {
            wc[j] = if j == c { r } else { -b[j] }.rem_euclid(b[c]);
        }
        // the chart basis replaces slot c by the blow-up weight vector
        let mut next_cols = cols;
        next_cols[c] = v;
        economic_rec(b[c], wc, next_cols, big_r, out, depth + 1)?;
    }
    Ok(())
}

/// One step of the resolution chain: the blow-up with weight
/// `(1/r)(a, rm - a, 1, r)`.
#[derive(Debug, Clone)]
pub struct WStep {
    /// Index into the chain (0 = the input germ).
    pub level: usize,
    /// Numerators of the blow-up weight over `r`.
    pub b: Vec<i64>,
    /// The step's exceptional divisor, in original coordinates.
    pub exc: OracleDivisor,
    /// Quotient type of the `x`-chart point on `(x1, z1, u1)`, if singular.
    pub p1: Option<QuotientSpace>,
    /// Quotient type of the `y`-chart point on `(y1, z1, u1)`, if singular.
    pub p2: Option<QuotientSpace>,
    /// Multiplicity of the transformed series (0 at the end of the chain).
    pub next_m: i64,
}

/// Outcome of a single step.
#[derive(Debug, Clone)]
pub enum StepOutcome {
    /// The `u`-chart carries a new germ of positive multiplicity.
    Next(Germ),
    /// The transformed series is a unit: the chain ends here.
    Terminal,
}

/// Chart data of one step, before transport.
#[derive(Debug, Clone)]
pub struct StepCharts {
    pub b: Vec<i64>,
    pub chart_x: crate::toric::ChartData,
    pub chart_y: crate::toric::ChartData,
    pub p1: QuotientSpace,
    pub p2: QuotientSpace,
    pub outcome: StepOutcome,
}

/// Performs the canonical blow-up of a germ with `r > 1`; requires the
/// normalization term `z^(r*m)` in the series.
pub fn w_morphism_step(germ: &Germ) -> Result<StepCharts> {
    let m = germ.multiplicity()?;
    if germ.r() > 1 && !germ.f().has_term(m, 0) {
        return Err(Error::NormalizationViolated(format!(
            "the series lacks the pure term z^{} needed by the canonical weight",
            germ.r() * m
        )));
    }
    step_core(germ)
}

/// The blow-up itself. The canonical weight is a valid lattice weight even
/// when the pure term `z^(r*m)` is absent; its absence only leaves an extra
/// Gorenstein point on the `z`-chart, which carries no divisors of the
/// partial resolution.
fn step_core(germ: &Germ) -> Result<StepCharts> {
    let r = germ.r();
    if r <= 1 {
        return Err(Error::Unsupported("the stepwise chain is defined for r > 1".into()));
    }
    let m = germ.multiplicity()?;
    if m < 1 {
        return Err(Error::InvalidGerm("the germ is already resolved (multiplicity 0)".into()));
    }
    let b = vec![germ.a(), r * m - germ.a(), 1, r];
    let ambient = germ.ambient();
    let weight = decompose_weight(&ambient, &b)?;
    debug_assert_eq!(weight.lambda, 1);
    let chart_x = blowup_chart(&ambient, &weight, 0)?;
    let chart_y = blowup_chart(&ambient, &weight, 1)?;
    let p1 = QuotientSpace::new(
        chart_x.space.r(),
        vec![
            chart_x.space.weights()[0],
            chart_x.space.weights()[2],
            chart_x.space.weights()[3],
        ],
    )?;
    let p2 = QuotientSpace::new(
        chart_y.space.r(),
        vec![
            chart_y.space.weights()[1],
            chart_y.space.weights()[2],
            chart_y.space.weights()[3],
        ],
    )?;
    let f_next = germ.f().chart_transform()?;
    let outcome = if f_next.has_term(0, 0) {
        StepOutcome::Terminal
    } else {
        let m_next = f_next.weight_order(1)?;
        let flags = GermFlags {
            isolated: f_next.pure_u_order().is_some(),
            normalized: f_next.has_term(m_next, 0),
            smooth: false,
        };
        StepOutcome::Next(Germ { r, a: germ.a(), f: f_next, flags })
    };
    Ok(StepCharts { b, chart_x, chart_y, p1, p2, outcome })
}

/// Record of a cyclic quotient point encountered during the resolution.
#[derive(Debug, Clone)]
pub struct QuotientPointRecord {
    pub level: usize,
    pub chart: &'static str,
    pub space: QuotientSpace,
    pub divisors: usize,
}

/// The full resolution record: the chain of steps, the quotient points with
/// their transports resolved, and every divisor in original coordinates.
#[derive(Debug, Clone)]
pub struct ResolutionTree {
    pub steps: Vec<WStep>,
    pub quotient_points: Vec<QuotientPointRecord>,
    pub divisors: Vec<OracleDivisor>,
    pub notes: Vec<String>,
}

struct ChainLevel {
    b: Vec<i64>,
}

/// Applies the `u`-chart monomial maps of levels `0..upto` to a valuation on
/// level-`upto` coordinates, accumulating the discrepancy contribution of
/// each step (the step divisor is the `u`-coordinate divisor in its chart).
fn walk_up(levels: &[ChainLevel], upto: usize, v: ExpVec, disc: Rat, r: i64) -> (ExpVec, Rat) {
    let mut v = v;
    let mut disc = disc;
    for level in (0..upto).rev() {
        let b = &levels[level].b;
        let vu = v.get(3).clone();
        disc += rat(1, r) * &vu;
        v = ExpVec::new(vec![
            v.get(0) + rat(b[0], r) * &vu,
            v.get(1) + rat(b[1], r) * &vu,
            v.get(2) + rat(b[2], r) * &vu,
            vu,
        ]);
    }
    (v, disc)
}

/// Lifts an economic-resolution divisor of a side-chart quotient point into
/// the coordinates of its chain level. `eliminated` is the chart slot solved
/// away by the hypersurface equation (1 for the x-chart, 0 for the y-chart).
fn lift_side_divisor(
    chart: &crate::toric::ChartData,
    f_level: &Series,
    div: &OracleDivisor,
    eliminated: usize,
    r: i64,
) -> Result<(ExpVec, Rat)> {
    let local = &div.values;
    let mut known: Vec<Option<Rat>> = vec![None; 4];
    let mut slot = 0;
    for (c, k) in known.iter_mut().enumerate() {
        if c == eliminated {
            continue;
        }
        *k = Some(local.get(slot).clone());
        slot += 1;
    }
    let v_level = transport_valuation(chart, &known, Some(f_level))?;
    // the step exceptional is the chart-coordinate divisor; its value on the
    // side divisor is the first local entry
    let disc = &div.discrepancy + rat(1, r) * local.get(0);
    Ok((v_level, disc))
}

/// Extends an economic divisor of the quotient form `1/r(a,-a,1)` on
/// `(x, y, z)` to the four germ coordinates: `u = (xy - ...)/c` forces
/// `v(u) = v(x) + v(y)`.
fn quotient_divisor_to_four(d: &OracleDivisor) -> ExpVec {
    let vu = d.values.get(0) + d.values.get(1);
    ExpVec::new(vec![
        d.values.get(0).clone(),
        d.values.get(1).clone(),
        d.values.get(2).clone(),
        vu,
    ])
}

/// Runs the full resolution of a germ and enumerates its divisors. Dispatch:
/// pure quotients get the economic resolution only; index one gets a single
/// blow-up plus the economic resolution of its quotient point; higher index
/// runs the stepwise chain.
pub fn gorenstein_resolution(germ: &Germ) -> Result<ResolutionTree> {
    let mut tree = ResolutionTree {
        steps: Vec::new(),
        quotient_points: Vec::new(),
        divisors: Vec::new(),
        notes: Vec::new(),
    };
    let r = germ.r();

    if r == 1 {
        let m = germ.multiplicity()?;
        if m <= 1 {
            tree.notes.push("smooth point: no exceptional divisors".into());
            return Ok(tree);
        }
        resolve_index_one(germ, m, &mut tree)?;
        tree.notes.push(RESIDUAL_NOTE.into());
        return Ok(tree);
    }

    if germ.is_pure_quotient() {
        // u appears linearly: the germ is the quotient 1/r(a,-a,1) on (x,y,z)
        let q3 = germ.quotient3();
        let divs = economic_resolution(&q3)?;
        let count = divs.len();
        for d in divs {
            tree.divisors.push(OracleDivisor {
                values: quotient_divisor_to_four(&d),
                discrepancy: d.discrepancy,
                origin: "quotient form".into(),
            });
        }
        tree.quotient_points.push(QuotientPointRecord {
            level: 0,
            chart: "quotient",
            space: q3,
            divisors: count,
        });
        return Ok(tree);
    }

    // stepwise chain
    let mut levels: Vec<ChainLevel> = Vec::new();
    let mut g = germ.clone();
    loop {
        let level = levels.len();
        let m = g.multiplicity()?;
        if !g.f().has_term(m, 0) {
            // the canonical weight stays valid; only an extra Gorenstein
            // point appears on the z-chart, off the enumeration
            tree.notes.push(format!(
                "pure term z^{} absent at step {level}; the walk continues with the canonical weight",
                r * m
            ));
        }

        let step = step_core(&g)?;
        let v_exc: Vec<Rat> = step.b.iter().map(|&x| rat(x, r)).collect();
        let (exc_values, exc_disc) = walk_up(&levels, level, ExpVec::new(v_exc), rat(1, r), r);
        let exc = OracleDivisor {
            values: exc_values,
            discrepancy: exc_disc,
            origin: format!("step {level} exceptional"),
        };
        tree.divisors.push(exc.clone());

        for (chart, point, eliminated, name) in [
            (&step.chart_x, &step.p1, 1usize, "x"),
            (&step.chart_y, &step.p2, 0usize, "y"),
        ] {
            let side = economic_resolution(point)?;
            let count = side.len();
            for d in &side {
                let (v_level, disc_level) = lift_side_divisor(chart, g.f(), d, eliminated, r)?;
                let (values, disc) = walk_up(&levels, level, v_level, disc_level, r);
                tree.divisors.push(OracleDivisor {
                    values,
                    discrepancy: disc,
                    origin: format!("step {level} chart {name}"),
                });
            }
            if !point.is_smooth() {
                tree.quotient_points.push(QuotientPointRecord {
                    level,
                    chart: if eliminated == 1 { "x" } else { "y" },
                    space: point.clone(),
                    divisors: count,
                });
            }
            let _ = name;
        }

        let next_m = match &step.outcome {
            StepOutcome::Terminal => 0,
            StepOutcome::Next(next) => next.multiplicity()?,
        };
        tree.steps.push(WStep {
            level,
            b: step.b.clone(),
            exc,
            p1: (!step.p1.is_smooth()).then(|| step.p1.clone()),
            p2: (!step.p2.is_smooth()).then(|| step.p2.clone()),
            next_m,
        });
        levels.push(ChainLevel { b: step.b.clone() });

        match step.outcome {
            StepOutcome::Terminal => break,
            StepOutcome::Next(next) => g = next,
        }
    }
    tree.notes.push(RESIDUAL_NOTE.into());
    Ok(tree)
}

const RESIDUAL_NOTE: &str =
    "the partial resolution may keep hypersurface double points; they carry no divisors here";

/// Index-one dispatch: blow up with weight `(m-1, 1, 1, 1)` and resolve the
/// single cyclic quotient point in the `x`-chart.
fn resolve_index_one(germ: &Germ, m: i64, tree: &mut ResolutionTree) -> Result<()> {
    let ambient = germ.ambient();
    let b = vec![m - 1, 1, 1, 1];
    let weight = decompose_weight(&ambient, &b)?;
    let chart_x = blowup_chart(&ambient, &weight, 0)?;
    let exc = OracleDivisor {
        values: weight.as_expvec(),
        discrepancy: rat_int(1),
        origin: "first blow-up".into(),
    };
    tree.divisors.push(exc.clone());
    tree.steps.push(WStep {
        level: 0,
        b: b.clone(),
        exc,
        p1: None,
        p2: None,
        next_m: 0,
    });
    if m == 2 {
        return Ok(());
    }
    let point = QuotientSpace::new(
        chart_x.space.r(),
        vec![
            chart_x.space.weights()[0],
            chart_x.space.weights()[2],
            chart_x.space.weights()[3],
        ],
    )?;
    let side = economic_resolution(&point)?;
    let count = side.len();
    for d in &side {
        let (values, disc) = lift_side_divisor(&chart_x, germ.f(), d, 1, 1)?;
        tree.divisors.push(OracleDivisor {
            values,
            discrepancy: disc,
            origin: "cyclic point of the first blow-up".into(),
        });
    }
    tree.quotient_points.push(QuotientPointRecord {
        level: 0,
        chart: "x",
        space: point,
        divisors: count,
    });
    Ok(())
}

/// First-step side-divisor tally: counts the divisors over the two side
/// charts of the first blow-up, grouped by `r` times their discrepancy over
/// the germ.
pub fn first_step_side_counts(germ: &Germ) -> Result<Vec<(i64, usize)>> {
    if germ.r() <= 1 {
        return Err(Error::Unsupported("side counts are defined for r > 1".into()));
    }
    let step = w_morphism_step(germ)?;
    let mut tally: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for (chart, point, eliminated) in [
        (&step.chart_x, &step.p1, 1usize),
        (&step.chart_y, &step.p2, 0usize),
    ] {
        for d in economic_resolution(point)? {
            let (_, disc) = lift_side_divisor(chart, germ.f(), &d, eliminated, germ.r())?;
            let scaled = disc * rat_int(germ.r());
            if !scaled.is_integer() {
                return Err(Error::InvalidWeight(format!(
                    "side divisor discrepancy {scaled} is not a multiple of 1/r"
                )));
            }
            let lambda = i64::try_from(scaled.to_integer()).expect("small discrepancy");
            *tally.entry(lambda).or_insert(0) += 1;
        }
    }
    Ok(tally.into_iter().collect())
}
