//! Input parsing, analysis orchestration, and report rendering. This is the
//! only module concerned with serialization; its JSON output is
//! deterministic (fixed field order, ordered rows) for golden-file testing.

use serde::{Deserialize, Deserializer, Serialize};

use crate::catalog::{
    closed_form_catalog, count_by_discrepancy, essential_valuations, has_boundary_entry,
    Classification, DivisorialValuation, Verdict, WeightTable, BOUNDARY_ENTRY_NOTE,
};
use crate::exact::{format_rat, parse_rat};
use crate::factor::{
    factor_series, q_factorialization_components, verify_supplied_factors, Certainty,
    FactorizationResult,
};
use crate::resolve::{gorenstein_resolution, validate_germ, Germ, ResolutionTree};
use crate::series::Series;
use crate::{Error, Result};

fn default_trunc() -> i64 {
    64
}

/// One series term as it appears in input documents; the coefficient is an
/// exact rational string (`"p/q"` or an integer, numeric literals accepted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub i: i64,
    pub j: i64,
    #[serde(deserialize_with = "coeff_string")]
    pub c: String,
}

fn coeff_string<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }
    Ok(match Repr::deserialize(d)? {
        Repr::Int(n) => n.to_string(),
        Repr::Str(s) => s,
    })
}

/// Command-style switches carried inside a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InputOptions {
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub strict: bool,
}

/// A germ description as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDoc {
    pub r: i64,
    #[serde(default)]
    pub a: i64,
    pub f: Vec<TermDoc>,
    #[serde(default = "default_trunc")]
    pub trunc: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_factors: Option<Vec<Vec<TermDoc>>>,
    #[serde(default, skip_serializing_if = "is_default_options")]
    pub options: InputOptions,
}

fn is_default_options(o: &InputOptions) -> bool {
    *o == InputOptions::default()
}

/// Parses a single germ document, canonicalizing coefficient strings and
/// term order so that parsing is idempotent.
pub fn parse_input(document: &str) -> Result<InputDoc> {
    let mut doc: InputDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    canonicalize(&mut doc)?;
    Ok(doc)
}

/// Parses either a single document or an array of them.
pub fn parse_batch(document: &str) -> Result<Vec<InputDoc>> {
    let value: serde_json::Value =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let docs: Vec<serde_json::Value> = match value {
        serde_json::Value::Array(items) => items,
        single => vec![single],
    };
    docs.into_iter()
        .map(|v| {
            let mut doc: InputDoc =
                serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
            canonicalize(&mut doc)?;
            Ok(doc)
        })
        .collect()
}

fn canonicalize(doc: &mut InputDoc) -> Result<()> {
    let canon = |terms: &mut Vec<TermDoc>| -> Result<()> {
        for t in terms.iter_mut() {
            if t.i < 0 || t.j < 0 {
                return Err(Error::Parse(format!("negative exponent in term ({}, {})", t.i, t.j)));
            }
            t.c = format_rat(&parse_rat(&t.c)?);
        }
        terms.sort_by_key(|t| (t.i, t.j));
        Ok(())
    };
    canon(&mut doc.f)?;
    if let Some(factors) = &mut doc.f_factors {
        for f in factors.iter_mut() {
            canon(f)?;
        }
    }
    Ok(())
}

fn terms_to_series(r: i64, terms: &[TermDoc], trunc: i64) -> Result<Series> {
    let mut parsed = Vec::with_capacity(terms.len());
    for t in terms {
        parsed.push(((t.i, t.j), parse_rat(&t.c)?));
    }
    Series::new(r, parsed, trunc)
}

fn series_to_terms(f: &Series) -> Vec<TermDoc> {
    f.terms()
        .map(|t| TermDoc { i: t.i, j: t.j, c: format_rat(&t.c) })
        .collect()
}

/// Which sections of the report to compute.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    pub classify: bool,
    pub factor: bool,
    pub oracle: bool,
    pub tree: bool,
    pub max_k: Option<i64>,
}

impl AnalyzeOptions {
    pub fn full(oracle: bool) -> AnalyzeOptions {
        AnalyzeOptions { classify: true, factor: true, oracle, tree: false, max_k: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GermSummary {
    pub r: i64,
    pub a: i64,
    pub multiplicity: i64,
    pub smooth: bool,
    pub pure_quotient: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub k: i64,
    pub m: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorSection {
    pub verdict: String,
    pub factor_count: Option<i64>,
    pub certainty: String,
    pub class_group: String,
    pub verified_to: i64,
    pub factors: Vec<Vec<TermDoc>>,
    /// Blocks that are counted or undecided, with their counts.
    pub blocks: Vec<BlockRow>,
    pub components: Vec<ComponentRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockRow {
    pub terms: Vec<TermDoc>,
    pub count: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentRow {
    pub terms: Vec<TermDoc>,
    pub multiplicity: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValuationRow {
    pub label: String,
    pub values: [String; 4],
    pub display: String,
    pub discrepancy: String,
    pub nash: bool,
    pub essential: String,
    pub provenance: String,
}

impl ValuationRow {
    fn from(v: &DivisorialValuation) -> ValuationRow {
        let e = v.values.entries();
        ValuationRow {
            label: v.label.to_string(),
            values: [
                format_rat(&e[0]),
                format_rat(&e[1]),
                format_rat(&e[2]),
                format_rat(&e[3]),
            ],
            display: v.values.display_scaled(),
            discrepancy: format_rat(&v.discrepancy),
            nash: v.nash,
            essential: v.essential.to_string(),
            provenance: v.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionRowDoc {
    pub k: i64,
    pub m_k: i64,
    pub threshold: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurjectivitySection {
    pub verdict: String,
    pub criterion: Vec<CriterionRowDoc>,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountsSection {
    pub by_discrepancy: Vec<(String, usize)>,
    pub nash_total: usize,
    pub multiplicity: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_step: Option<Vec<(i64, usize)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub matches: bool,
    pub oracle_count: usize,
    pub catalog_count: usize,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeStepRow {
    pub level: usize,
    pub weight: Vec<i64>,
    pub exceptional: String,
    pub discrepancy: String,
    pub next_multiplicity: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreePointRow {
    pub level: usize,
    pub chart: String,
    pub space: String,
    pub divisors: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeDivisorRow {
    pub values: String,
    pub discrepancy: String,
    pub origin: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeSection {
    pub steps: Vec<TreeStepRow>,
    pub quotient_points: Vec<TreePointRow>,
    pub divisors: Vec<TreeDivisorRow>,
    pub notes: Vec<String>,
}

/// The full analysis record; sections not requested are omitted.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub input: InputDoc,
    pub germ: GermSummary,
    pub weights: Vec<WeightRow>,
    pub depth: i64,
    pub depth_kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_factorial: Option<FactorSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<ValuationRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_valuations: Option<Vec<ValuationRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surjectivity: Option<SurjectivitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<TreeSection>,
    pub notes: Vec<String>,
}

impl ReportDoc {
    /// True when any verdict in the report is undecided.
    pub fn has_unknowns(&self) -> bool {
        let qf_unknown = self
            .q_factorial
            .as_ref()
            .is_some_and(|q| q.verdict == "unknown" || q.certainty == "unknown");
        let val_unknown = self
            .valuations
            .as_ref()
            .is_some_and(|vs| vs.iter().any(|v| v.essential == "unknown"));
        let surj_unknown = self
            .surjectivity
            .as_ref()
            .is_some_and(|s| s.verdict == "unknown");
        qf_unknown || val_unknown || surj_unknown
    }
}

/// Runs the requested analyses over a parsed document.
pub fn analyze_with(doc: &InputDoc, opts: AnalyzeOptions) -> Result<ReportDoc> {
    let f = terms_to_series(doc.r, &doc.f, doc.trunc)?;
    let germ = validate_germ(doc.r, doc.a, f)?;
    let table = WeightTable::build(germ.f())?;
    let max_k = opts.max_k.unwrap_or(2 * doc.r + table.delta).max(1);
    let mut weights = Vec::new();
    for (k, m) in table.rows() {
        if k <= max_k {
            weights.push(WeightRow { k, m });
        }
    }
    for k in (2 * doc.r + table.delta + 1)..=max_k {
        weights.push(WeightRow { k, m: germ.f().weight_order(k)? });
    }
    let mut notes: Vec<String> = Vec::new();
    let mut report = ReportDoc {
        input: doc.clone(),
        germ: GermSummary {
            r: germ.r(),
            a: germ.a(),
            multiplicity: germ.multiplicity()?,
            smooth: germ.flags().smooth,
            pure_quotient: germ.is_pure_quotient(),
        },
        weights,
        depth: table.delta,
        depth_kind: if doc.r == 1 { "near-stabilization" } else { "stabilization" }.into(),
        q_factorial: None,
        valuations: None,
        extra_valuations: None,
        surjectivity: None,
        counts: None,
        oracle_check: None,
        resolution: None,
        notes: Vec::new(),
    };
    if report.germ.smooth {
        notes.push("smooth point: all enumerations are empty".into());
    }

    let mut qf_verdict = Verdict::Unknown;
    if opts.factor || opts.classify {
        let fr = match &doc.f_factors {
            Some(lists) => {
                let factors: Vec<Series> = lists
                    .iter()
                    .map(|terms| terms_to_series(doc.r, terms, doc.trunc))
                    .collect::<Result<_>>()?;
                let fr = verify_supplied_factors(germ.f(), &factors)?;
                notes.push("factorization supplied in the input and verified".into());
                fr
            }
            None => factor_series(germ.f())?,
        };
        qf_verdict = match (fr.certainty, fr.n) {
            (Certainty::Unknown, _) | (_, None) => Verdict::Unknown,
            (_, Some(1)) => Verdict::Yes,
            (_, Some(_)) => Verdict::No,
        };
        let (section, curves) = factor_section(&germ, &fr, qf_verdict, &mut notes)?;
        report.q_factorial = Some(section);
        if !curves.is_empty() {
            report.extra_valuations =
                Some(curves.iter().map(ValuationRow::from).collect());
        }
    }

    if opts.classify {
        let Classification { valuations, verdict } = essential_valuations(&germ, qf_verdict)?;
        if has_boundary_entry(&germ, &valuations) {
            notes.push(BOUNDARY_ENTRY_NOTE.into());
        }
        report.surjectivity = Some(SurjectivitySection {
            verdict: verdict.surjective.to_string(),
            criterion: verdict
                .trace
                .iter()
                .map(|row| CriterionRowDoc {
                    k: row.k,
                    m_k: row.m_k,
                    threshold: row.threshold,
                    holds: row.holds,
                })
                .collect(),
            witnesses: verdict.witnesses.iter().map(|w| w.values.display_scaled()).collect(),
        });
        notes.extend(verdict.notes);
        let counts = count_by_discrepancy(&germ)?;
        report.counts = Some(CountsSection {
            by_discrepancy: counts
                .by_discrepancy
                .iter()
                .map(|(d, n)| (format_rat(d), *n))
                .collect(),
            nash_total: valuations.iter().filter(|v| v.nash).count(),
            multiplicity: counts.multiplicity,
            first_step: counts.first_step,
        });
        report.valuations = Some(valuations.iter().map(ValuationRow::from).collect());
    }

    if opts.oracle {
        report.oracle_check = Some(oracle_section(&germ)?);
    }
    if opts.tree {
        let tree = gorenstein_resolution(&germ)?;
        report.resolution = Some(tree_section(&tree));
    }

    report.notes = notes;
    if report.has_unknowns() {
        report
            .notes
            .push("some verdicts are undecided over the rationals; see the unknown rows".into());
    }
    Ok(report)
}

/// Full analysis with the document's own options (the `analyze` entry point).
pub fn analyze(doc: &InputDoc) -> Result<ReportDoc> {
    analyze_with(doc, AnalyzeOptions::full(doc.options.oracle))
}

fn factor_section(
    germ: &Germ,
    fr: &FactorizationResult,
    verdict: Verdict,
    notes: &mut Vec<String>,
) -> Result<(FactorSection, Vec<DivisorialValuation>)> {
    let mut components = Vec::new();
    let mut curves = Vec::new();
    if fr.certainty == Certainty::Certified && fr.n.unwrap_or(1) > 1 {
        let (germs, curve_rows) = q_factorialization_components(germ, fr)?;
        for g in &germs {
            components.push(ComponentRow {
                terms: series_to_terms(g.f()),
                multiplicity: g.multiplicity()?,
            });
        }
        curves = curve_rows;
    }
    if fr.certainty == Certainty::Unknown {
        notes.push(
            "factor structure undecided: an initial form has irrational multiple roots".into(),
        );
    }
    let section = FactorSection {
        verdict: verdict.to_string(),
        factor_count: fr.n,
        certainty: match fr.certainty {
            Certainty::Certified => "certified",
            Certainty::CountOnly => "count-only",
            Certainty::Unknown => "unknown",
        }
        .into(),
        class_group: fr.picard.clone(),
        verified_to: fr.verified_to,
        factors: fr.factors().iter().map(|f| series_to_terms(f)).collect(),
        blocks: fr
            .pieces
            .iter()
            .filter(|p| !p.irreducible)
            .map(|p| BlockRow { terms: series_to_terms(&p.series), count: p.count })
            .collect(),
        components,
    };
    if !curves.is_empty() {
        notes.push(format!(
            "{} component-separating curve blow-up(s) realize depth-r entries",
            curves.len()
        ));
    }
    Ok((section, curves))
}

fn oracle_section(germ: &Germ) -> Result<OracleSection> {
    let catalog = closed_form_catalog(germ)?;
    let tree = gorenstein_resolution(germ)?;
    let mut want: Vec<(String, String)> = catalog
        .iter()
        .map(|e| (e.values.display_scaled(), format_rat(&e.discrepancy)))
        .collect();
    let mut got: Vec<(String, String)> = tree
        .divisors
        .iter()
        .map(|d| (d.values.display_scaled(), format_rat(&d.discrepancy)))
        .collect();
    want.sort();
    got.sort();
    let mut mismatches = Vec::new();
    for w in &want {
        if !got.contains(w) {
            mismatches.push(format!("catalog only: {} (a = {})", w.0, w.1));
        }
    }
    for g in &got {
        if !want.contains(g) {
            mismatches.push(format!("resolution only: {} (a = {})", g.0, g.1));
        }
    }
    Ok(OracleSection {
        matches: want == got,
        oracle_count: got.len(),
        catalog_count: want.len(),
        mismatches,
    })
}

fn tree_section(tree: &ResolutionTree) -> TreeSection {
    TreeSection {
        steps: tree
            .steps
            .iter()
            .map(|s| TreeStepRow {
                level: s.level,
                weight: s.b.clone(),
                exceptional: s.exc.values.display_scaled(),
                discrepancy: format_rat(&s.exc.discrepancy),
                next_multiplicity: s.next_m,
            })
            .collect(),
        quotient_points: tree
            .quotient_points
            .iter()
            .map(|p| TreePointRow {
                level: p.level,
                chart: p.chart.into(),
                space: p.space.to_string(),
                divisors: p.divisors,
            })
            .collect(),
        divisors: tree
            .divisors
            .iter()
            .map(|d| TreeDivisorRow {
                values: d.values.display_scaled(),
                discrepancy: format_rat(&d.discrepancy),
                origin: d.origin.clone(),
            })
            .collect(),
        notes: tree.notes.clone(),
    }
}

/// Output format of the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

/// Renders a report deterministically in the requested format.
pub fn render(report: &ReportDoc, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Table => render_table(report),
    }
}

fn render_table(report: &ReportDoc) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let g = &report.germ;
    let _ = writeln!(
        out,
        "germ: xy = f(z,u) in C^4/(1/{})({},-{},1,0), multiplicity {}{}",
        g.r,
        g.a,
        g.a,
        g.multiplicity,
        if g.smooth { " (smooth)" } else if g.pure_quotient { " (pure quotient)" } else { "" }
    );
    let _ = writeln!(
        out,
        "weights: {}",
        report
            .weights
            .iter()
            .map(|w| format!("m_{} = {}", w.k, w.m))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(out, "{} depth: {}", report.depth_kind, report.depth);
    if let Some(q) = &report.q_factorial {
        let _ = writeln!(
            out,
            "Q-factorial: {} (factors: {}, {}; class group {})",
            q.verdict,
            q.factor_count.map_or("?".into(), |n| n.to_string()),
            q.certainty,
            q.class_group
        );
        for f in &q.factors {
            let _ = writeln!(out, "  factor: {}", terms_display(f));
        }
        for b in &q.blocks {
            let _ = writeln!(
                out,
                "  block ({} factors): {}",
                b.count.map_or("?".into(), |n| n.to_string()),
                terms_display(&b.terms)
            );
        }
    }
    if let Some(vals) = &report.valuations {
        let _ = writeln!(out, "valuations ({}):", vals.len());
        for v in vals {
            let _ = writeln!(
                out,
                "  {:<12} {:<22} a = {:<5} nash = {:<5} essential = {:<8} [{}]",
                v.label, v.display, v.discrepancy, v.nash, v.essential, v.provenance
            );
        }
    }
    if let Some(extra) = &report.extra_valuations {
        let _ = writeln!(out, "component-separating curves ({}):", extra.len());
        for v in extra {
            let _ = writeln!(
                out,
                "  {:<12} {:<22} a = {:<5} nash = {:<5} essential = {:<8} [{}]",
                v.label, v.display, v.discrepancy, v.nash, v.essential, v.provenance
            );
        }
    }
    if let Some(s) = &report.surjectivity {
        let _ = writeln!(out, "Nash map surjective: {}", s.verdict);
        for row in &s.criterion {
            let _ = writeln!(
                out,
                "  depth {}: m_k = {} < {} ? {}",
                row.k, row.m_k, row.threshold, row.holds
            );
        }
        if !s.witnesses.is_empty() {
            let _ = writeln!(out, "  witnesses: {}", s.witnesses.join(", "));
        }
    }
    if let Some(c) = &report.counts {
        let rows: Vec<String> = c
            .by_discrepancy
            .iter()
            .map(|(d, n)| format!("{d}: {n}"))
            .collect();
        let _ = writeln!(out, "counts by discrepancy: {{{}}}", rows.join(", "));
        let _ = writeln!(out, "nash valuations: {}", c.nash_total);
        if let Some(fs) = &c.first_step {
            let rows: Vec<String> = fs.iter().map(|(l, n)| format!("{l}/{}: {n}", g.r)).collect();
            let _ = writeln!(out, "first-step side divisors: {{{}}}", rows.join(", "));
        }
    }
    if let Some(o) = &report.oracle_check {
        let _ = writeln!(
            out,
            "oracle check: {} (resolution {}, catalog {})",
            if o.matches { "match" } else { "MISMATCH" },
            o.oracle_count,
            o.catalog_count
        );
        for m in &o.mismatches {
            let _ = writeln!(out, "  {m}");
        }
    }
    if let Some(t) = &report.resolution {
        let _ = writeln!(out, "resolution steps:");
        for s in &t.steps {
            let _ = writeln!(
                out,
                "  step {}: weight (1/{})({}) exceptional {} a = {} next m = {}",
                s.level,
                g.r,
                s.weight.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                s.exceptional,
                s.discrepancy,
                s.next_multiplicity
            );
        }
        for p in &t.quotient_points {
            let _ = writeln!(
                out,
                "  quotient point at step {} chart {}: {} ({} divisors)",
                p.level, p.chart, p.space, p.divisors
            );
        }
        let _ = writeln!(out, "  divisors:");
        for d in &t.divisors {
            let _ = writeln!(out, "    {:<22} a = {:<5} [{}]", d.values, d.discrepancy, d.origin);
        }
        for n in &t.notes {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

fn terms_display(terms: &[TermDoc]) -> String {
    terms
        .iter()
        .map(|t| {
            let mut parts = Vec::new();
            if t.c != "1" || (t.i == 0 && t.j == 0) {
                parts.push(format!("({})", t.c));
            }
            if t.i > 0 {
                parts.push(format!("w^{}", t.i));
            }
            if t.j > 0 {
                parts.push(format!("u^{}", t.j));
            }
            parts.join("*")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// True when the error should map to the truncation exit code.
pub fn is_truncation_error(e: &Error) -> bool {
    matches!(e, Error::InsufficientTruncation(_))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_doc() -> InputDoc {
        parse_input(
            r#"{"r":2,"a":1,"f":[{"i":4,"j":0,"c":"1"},{"i":3,"j":1,"c":1},
                {"i":1,"j":11,"c":"1"},{"i":0,"j":12,"c":"1"}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn parse_examples() {
        let doc = parse_input(
            r#"{"r":2,"a":1,"f":[{"i":1,"j":0,"c":"1"},{"i":0,"j":2,"c":"1"}]}"#,
        )
        .unwrap();
        assert_eq!((doc.r, doc.a, doc.trunc), (2, 1, 64));
        assert_eq!(doc.f.len(), 2);

        let frac = parse_input(r#"{"r":1,"f":[{"i":2,"j":0,"c":"4/6"},{"i":0,"j":3,"c":"1"}]}"#)
            .unwrap();
        assert_eq!(frac.a, 0, "a defaults to 0");
        assert_eq!(frac.f[1].c, "2/3", "coefficients canonicalize");

        assert!(parse_input(r#"{"r":1,"f":[{"i":-1,"j":0,"c":"1"}]}"#).is_err());
        assert!(parse_input(r#"{"r":1,"f":[{"i":1,"j":0,"c":"x"}]}"#).is_err());
        assert!(parse_input("not json").is_err());
    }

    #[test]
    fn echo_roundtrip() {
        let doc = sample_doc();
        let report = analyze(&doc).unwrap();
        let rendered = render(&report, Format::Json);
        let value: serde_json::Value = serde_json::from_str(&rendered).unwrap();
        let echo = serde_json::to_string(&value["input"]).unwrap();
        let reparsed = parse_input(&echo).unwrap();
        assert_eq!(reparsed, doc);
    }

    #[test]
    fn json_output_is_deterministic() {
        let doc = sample_doc();
        let a = render(&analyze(&doc).unwrap(), Format::Json);
        let b = render(&analyze(&doc).unwrap(), Format::Json);
        assert_eq!(a, b);
        assert!(!a.contains("e-"), "no floating point representations");
    }

    #[test]
    fn sample_product_report_values() {
        let report = analyze(&sample_doc()).unwrap();
        let m1 = report.weights.iter().find(|w| w.k == 1).unwrap().m;
        let m3 = report.weights.iter().find(|w| w.k == 3).unwrap().m;
        assert_eq!((m1, m3), (4, 10));
        let q = report.q_factorial.as_ref().unwrap();
        assert_eq!(q.verdict, "no");
        assert_eq!(q.factor_count, Some(2));
        let vals = report.valuations.as_ref().unwrap();
        let target = vals
            .iter()
            .find(|v| v.display == "1/2*(9,11,3,2)")
            .expect("depth-three entry present");
        assert_eq!(target.discrepancy, "3/2");
        assert!(!target.nash);
        assert_eq!(target.essential, "unknown");
        assert!(report.has_unknowns());
        assert!(!report.notes.is_empty());
    }

    #[test]
    fn smooth_report() {
        let doc = parse_input(r#"{"r":1,"f":[{"i":1,"j":0,"c":"1"},{"i":0,"j":1,"c":"1"}]}"#)
            .unwrap();
        let report = analyze(&doc).unwrap();
        assert!(report.germ.smooth);
        assert!(report.valuations.as_ref().unwrap().is_empty());
        assert!(report.notes.iter().any(|n| n.contains("smooth")));
    }

    #[test]
    fn oracle_section_matches_for_small_germ() {
        let doc = parse_input(
            r#"{"r":2,"a":1,"f":[{"i":1,"j":0,"c":"1"},{"i":0,"j":4,"c":"1"}],
                "options":{"oracle":true}}"#,
        )
        .unwrap();
        let report = analyze(&doc).unwrap();
        let oracle = report.oracle_check.as_ref().unwrap();
        assert!(oracle.matches, "mismatches: {:?}", oracle.mismatches);
        assert_eq!(oracle.oracle_count, 4);
    }

    #[test]
    fn supplied_factors_are_used() {
        let doc = parse_input(
            r#"{"r":2,"a":1,
                "f":[{"i":4,"j":0,"c":"1"},{"i":3,"j":1,"c":"1"},
                     {"i":1,"j":11,"c":"1"},{"i":0,"j":12,"c":"1"}],
                "f_factors":[[{"i":3,"j":0,"c":"1"},{"i":0,"j":11,"c":"1"}],
                             [{"i":1,"j":0,"c":"1"},{"i":0,"j":1,"c":"1"}]]}"#,
        )
        .unwrap();
        let report = analyze(&doc).unwrap();
        let q = report.q_factorial.as_ref().unwrap();
        assert_eq!(q.verdict, "no");
        assert_eq!(q.certainty, "certified");
        assert!(report.notes.iter().any(|n| n.contains("supplied")));
    }

    #[test]
    fn table_render_mentions_key_sections() {
        let report = analyze(&sample_doc()).unwrap();
        let table = render(&report, Format::Table);
        assert!(table.contains("m_1 = 4"));
        assert!(table.contains("Q-factorial: no"));
        assert!(table.contains("1/2*(9,11,3,2)"));
        assert!(table.contains("surjective: unknown"));
    }

    #[test]
    fn batch_parsing() {
        let docs = parse_batch(
            r#"[{"r":1,"f":[{"i":2,"j":0,"c":"1"},{"i":0,"j":3,"c":"1"}]},
                {"r":2,"a":1,"f":[{"i":1,"j":0,"c":"1"},{"i":0,"j":2,"c":"1"}]}]"#,
        )
        .unwrap();
        assert_eq!(docs.len(), 2);
        let single = parse_batch(r#"{"r":1,"f":[{"i":2,"j":0,"c":"1"},{"i":0,"j":3,"c":"1"}]}"#)
            .unwrap();
        assert_eq!(single.len(), 1);
    }
}
