//! One-off broad soak of the walk-vs-catalog equality (not part of the
//! committed acceptance budget). Ignored by default.

use nashval::catalog::closed_form_catalog;
use nashval::exact::{gcd_i64, rat_int, ExpVec};
use nashval::resolve::{gorenstein_resolution, validate_germ, Germ};
use nashval::series::Series;
use nashval::Rat;

struct Rng(u64);
impl Rng {
    fn next(&mut self) -> u64 { let mut x = self.0; x ^= x << 13; x ^= x >> 7; x ^= x << 17; self.0 = x; x }
    fn below(&mut self, n: u64) -> u64 { self.next() % n }
    fn range(&mut self, lo: i64, hi: i64) -> i64 { lo + self.below((hi - lo + 1) as u64) as i64 }
}

fn random_germ(rng: &mut Rng) -> Germ {
    loop {
        let r = rng.range(1, 7);
        let a = if r == 1 { 0 } else { loop { let c = rng.range(1, r - 1); if gcd_i64(c, r) == 1 { break c; } } };
        let mut terms: Vec<((i64, i64), Rat)> = Vec::new();
        terms.push(((0, rng.range(1, 12)), rat_int(rng.range(1, 3))));
        for _ in 0..rng.range(0, 6) {
            let i = rng.range(0, (12 / r).min(12));
            let j = rng.range(0, 12);
            if (i, j) == (0, 0) { continue; }
            let c = match rng.range(-3, 3) { 0 => 1, c => c };
            terms.push(((i, j), rat_int(c)));
        }
        let Ok(candidate) = Series::new(r, terms.clone(), 64) else { continue };
        if candidate.is_zero() || candidate.has_term(0, 0) || candidate.pure_u_order().is_none() { continue }
        let Ok(m) = candidate.weight_order(1) else { continue };
        if r > 1 && !candidate.has_term(m, 0) { terms.push(((m, 0), rat_int(rng.range(1, 3)))); }
        let Ok(f) = Series::new(r, terms, 64) else { continue };
        if let Ok(g) = validate_germ(r, a, f) { return g; }
    }
}

#[test]
#[ignore]
fn soak_walk_equals_catalog() {
    for seed in [1u64, 42, 777, 0xdead_beef, 0x5eed_5eed] {
        let mut rng = Rng(seed);
        for n in 0..400 {
            let g = random_germ(&mut rng);
            let mut catalog: Vec<(ExpVec, Rat)> = closed_form_catalog(&g).unwrap()
                .into_iter().map(|e| (e.values, e.discrepancy)).collect();
            let tree = gorenstein_resolution(&g).unwrap();
            let mut walked: Vec<(ExpVec, Rat)> = tree.divisors.into_iter()
                .map(|d| (d.values, d.discrepancy)).collect();
            catalog.sort();
            walked.sort();
            assert_eq!(walked, catalog, "seed {seed} germ {n}: 1/{}({},..) f {:?}", g.r(), g.a(), g.f().support());
        }
        println!("seed {seed}: 400 germs ok");
    }
}
