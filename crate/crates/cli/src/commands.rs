use serde::Serialize;

use hh_bounds::convexity::{check_coordinate_convexity, ConvexityReport};
use hh_bounds::oracle::{reference_integral_2d, OracleResult};
use hh_bounds::rect::{bakula_chain_with_reference, dragomir_chain_with_reference};
use hh_bounds::{corpus, expr, theorem3_discrete_bounds, ChainReport, Fn2D, Rect};

use crate::output::{csv, json, rect_text, sci};
use crate::{BoundsArgs, ChainArgs, ConvergeArgs, Failure, FunctionArgs, Outcome, OutputFormat};

pub struct Problem {
    pub label: String,
    pub f: Fn2D,
    pub rect: Rect,
}

pub fn resolve_function(spec: &str) -> Result<(String, Fn2D), Failure> {
    if let Some((_, f)) = corpus::named(spec) {
        return Ok((spec.to_string(), f));
    }
    let ast = expr::parse(spec).map_err(|e| Failure::usage(e.render(spec)))?;
    Ok((spec.to_string(), expr::to_fn(ast)))
}

pub fn gate_failure(report: &ConvexityReport) -> Failure {
    let mut message = format!(
        "convexity check failed: most negative slack {} over {} samples",
        report.max_violation, report.samples
    );
    if let Some(w) = &report.witness {
        message.push_str(&format!(
            "\n  free axis {:?}, fixed coordinate {}, u1 = {}, u2 = {}, lambda = {}, at (x, y) = ({}, {})",
            w.axis, w.fixed, w.u1, w.u2, w.lambda, w.point.0, w.point.1
        ));
    }
    Failure { code: 3, message }
}

fn prepare(common: &FunctionArgs) -> Result<Problem, Failure> {
    let (label, f) = resolve_function(&common.function)?;
    let [a, b, c, d] = <[f64; 4]>::try_from(common.rect.as_slice())
        .map_err(|_| Failure::usage("--rect takes exactly four numbers"))?;
    let rect = Rect::new(a, b, c, d)?;
    if !common.skip_convexity_check {
        let report = check_coordinate_convexity(
            &f,
            rect,
            common.convexity_samples,
            common.convexity_tol,
            common.seed,
        )?;
        if !report.passed {
            return Err(gate_failure(&report));
        }
    }
    Ok(Problem { label, f, rect })
}

#[derive(Serialize)]
struct BoundsReport {
    function: String,
    rect: [f64; 4],
    n: usize,
    m: usize,
    lower: f64,
    upper: f64,
    gap: f64,
    oracle: f64,
    oracle_error: f64,
}

pub fn bounds(args: &BoundsArgs) -> Result<Outcome, Failure> {
    let p = prepare(&args.common)?;
    let pair = theorem3_discrete_bounds(&p.f, p.rect, args.n, args.m)?;
    let oracle = reference_integral_2d(&p.f, p.rect, args.common.oracle_grid)?;
    let rep = BoundsReport {
        function: p.label,
        rect: p.rect.as_array(),
        n: args.n,
        m: args.m,
        lower: pair.lower,
        upper: pair.upper,
        gap: pair.gap(),
        oracle: oracle.value,
        oracle_error: oracle.error_estimate,
    };
    let text = match args.common.output {
        OutputFormat::Json => json(&rep)?,
        OutputFormat::Csv => csv(
            &[
                "function", "a", "b", "c", "d", "n", "m", "lower", "upper", "gap", "oracle",
                "oracle_error",
            ],
            &[vec![
                rep.function.clone(),
                sci(rep.rect[0]),
                sci(rep.rect[1]),
                sci(rep.rect[2]),
                sci(rep.rect[3]),
                rep.n.to_string(),
                rep.m.to_string(),
                sci(rep.lower),
                sci(rep.upper),
                sci(rep.gap),
                sci(rep.oracle),
                sci(rep.oracle_error),
            ]],
        )?,
        OutputFormat::Human => format!(
            "function      {}\nrect          {}\nn, m          {}, {}\nlower         {}\nupper         {}\ngap           {}\noracle        {} (error estimate {:e}, grid {})\nevaluations   {}\n",
            rep.function,
            rect_text(&rep.rect),
            rep.n,
            rep.m,
            rep.lower,
            rep.upper,
            rep.gap,
            rep.oracle,
            rep.oracle_error,
            oracle.grid,
            pair.evals,
        ),
    };
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct ChainOutput {
    function: String,
    rect: [f64; 4],
    scheme: String,
    certified: bool,
    double_integral: OracleResult,
    dragomir: ChainReport,
    bakula: ChainReport,
}

fn chain_table(title: &str, rep: &ChainReport) -> String {
    let mut s = format!("{title}  [{}]\n", rep.scheme);
    for (i, t) in rep.terms.iter().enumerate() {
        s.push_str(&format!("  {}  {:<24} {}\n", i + 1, t.name, t.value));
    }
    for o in &rep.orderings {
        s.push_str(&format!(
            "  term {} <= term {}  {:<4} slack {}\n",
            o.i + 1,
            o.j + 1,
            if o.satisfied { "ok" } else { "FAIL" },
            o.slack
        ));
    }
    s
}

pub fn chain(args: &ChainArgs) -> Result<Outcome, Failure> {
    let p = prepare(&args.common)?;
    let scheme = args.scheme.scheme();
    scheme.validate()?;
    let oracle = reference_integral_2d(&p.f, p.rect, args.common.oracle_grid)?;
    let dragomir = dragomir_chain_with_reference(&p.f, p.rect, scheme, oracle.value)?;
    let bakula = bakula_chain_with_reference(&p.f, p.rect, scheme, oracle.value)?;
    let out = ChainOutput {
        function: p.label,
        rect: p.rect.as_array(),
        scheme: scheme.label(),
        certified: scheme.is_certified(),
        double_integral: oracle,
        dragomir,
        bakula,
    };
    let text = match args.common.output {
        OutputFormat::Json => json(&out)?,
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for (chain, rep) in [("dragomir", &out.dragomir), ("bakula", &out.bakula)] {
                for (i, t) in rep.terms.iter().enumerate() {
                    let verdict = match i {
                        0 => String::new(),
                        _ => rep.orderings[i - 1].satisfied.to_string(),
                    };
                    rows.push(vec![
                        chain.to_string(),
                        (i + 1).to_string(),
                        t.name.clone(),
                        sci(t.value),
                        verdict,
                    ]);
                }
            }
            csv(&["chain", "index", "term", "value", "ordered_after_previous"], &rows)?
        }
        OutputFormat::Human => format!(
            "function  {}\nrect      {}\n\n{}\n{}",
            out.function,
            rect_text(&out.rect),
            chain_table("Dragomir chain", &out.dragomir),
            chain_table("Bakula chain", &out.bakula),
        ),
    };
    Ok(Outcome::ok(text))
}

/// Parses `LO:HI` (or a single `N`) into the doubling sequence `LO, 2 LO, ... <= HI`.
pub fn doubling_range(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::usage(format!("--n expects LO:HI with 1 <= LO <= HI, got '{spec}'"));
    let (lo, hi) = match spec.split_once(':') {
        Some((lo, hi)) => (lo.trim().parse::<usize>(), hi.trim().parse::<usize>()),
        None => (spec.trim().parse::<usize>(), spec.trim().parse::<usize>()),
    };
    let (lo, hi) = (lo.map_err(|_| bad())?, hi.map_err(|_| bad())?);
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok(std::iter::successors(Some(lo), |&n| n.checked_mul(2))
        .take_while(|&n| n <= hi)
        .collect())
}

#[derive(Serialize)]
struct ConvergeRow {
    n: usize,
    lower: f64,
    upper: f64,
    gap: f64,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct ConvergeOutput {
    function: String,
    rect: [f64; 4],
    m: usize,
    rows: Vec<ConvergeRow>,
}

pub fn converge(args: &ConvergeArgs) -> Result<Outcome, Failure> {
    let ns = doubling_range(&args.n)?;
    let p = prepare(&args.common)?;
    let mut rows: Vec<ConvergeRow> = Vec::with_capacity(ns.len());
    for n in ns {
        let b = theorem3_discrete_bounds(&p.f, p.rect, n, args.m)?;
        let ratio = rows
            .last()
            .filter(|prev| prev.gap > 0.0)
            .map(|prev| b.gap() / prev.gap);
        rows.push(ConvergeRow {
            n,
            lower: b.lower,
            upper: b.upper,
            gap: b.gap(),
            ratio,
        });
    }
    let out = ConvergeOutput {
        function: p.label,
        rect: p.rect.as_array(),
        m: args.m,
        rows,
    };
    let text = match args.common.output {
        OutputFormat::Json => json(&out)?,
        OutputFormat::Csv => csv(
            &["n", "m", "lower", "upper", "gap", "ratio"],
            &out.rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        out.m.to_string(),
                        sci(r.lower),
                        sci(r.upper),
                        sci(r.gap),
                        r.ratio.map(sci).unwrap_or_default(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        OutputFormat::Human => {
            let mut s = format!(
                "function  {}\nrect      {}\nm         {}\n\n{:>6}  {:>24}  {:>24}  {:>12}  {:>8}\n",
                out.function,
                rect_text(&out.rect),
                out.m,
                "n",
                "lower",
                "upper",
                "gap",
                "ratio"
            );
            for r in &out.rows {
                s.push_str(&format!(
                    "{:>6}  {:>24}  {:>24}  {:>12.4e}  {:>8}\n",
                    r.n,
                    r.lower,
                    r.upper,
                    r.gap,
                    r.ratio.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into())
                ));
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}
