//! Property suite over random coordinate-convex instances.
//!
//! Case `i` is generated from seed `seed + i`, so any case can be replayed on
//! its own with `--cases 1 --seed <seed + i>`. Cases run in parallel; results
//! are collected in case order, so output does not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use hh_bounds::bounds::tol_machine;
use hh_bounds::convexity::{check_coordinate_convexity, ConvexityReport, CoordinateConvexSpec, DEFAULT_SAMPLES, DEFAULT_TOL};
use hh_bounds::oracle::{reference_integral_2d, DEFAULT_GRID};
use hh_bounds::rect::{
    agrees, bakula_chain_with_reference, dragomir_chain_with_reference, recapture_classical_chain,
};
use hh_bounds::{
    theorem3_discrete_bounds, theorem4_terms, theorem5_terms, theorem6_upper, Fn2D, InnerScheme, Rect,
};

use crate::commands::gate_failure;
use crate::output::{csv, json, sci};
use crate::{Failure, Outcome, OutputFormat, VerifyArgs};

const REL_TOL: f64 = 1e-9;
const RECAPTURE_TOL: f64 = 1e-12;
const MAX_N: usize = 8;
const INNER_M: [usize; 3] = [1, 2, 4];
const QUADRATURE: InnerScheme = InnerScheme::Quadrature { tol: 1e-12 };
const MAX_REPORTED_FAILURES: usize = 20;

pub const PROPERTIES: [&str; 8] = [
    "enclosure",
    "midline_sums",
    "boundary_sums",
    "positive_upper",
    "chain_recapture",
    "chain_ordering",
    "refined_chain_tighter",
    "gap_monotone",
];

#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub case: usize,
    pub seed: u64,
    pub atom_count: usize,
    pub spec: CoordinateConvexSpec,
}

impl Instance {
    pub fn generate(case: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: f64 = rng.random_range(-2.0..=2.0);
        let w: f64 = rng.random_range(0.25..=3.0);
        let c: f64 = rng.random_range(-2.0..=2.0);
        let h: f64 = rng.random_range(0.25..=3.0);
        let rect = Rect::new(a, a + w, c, c + h).expect("positive side lengths");
        let atom_count = rng.random_range(1..=4);
        let spec = CoordinateConvexSpec::generate(rng.random(), rect, atom_count);
        Self {
            case,
            seed,
            atom_count,
            spec,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    property: &'static str,
    skipped: bool,
    violated: bool,
    slack: f64,
    detail: String,
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    /// Records `slack >= -tol`.
    fn check(&mut self, property: &'static str, slack: f64, tol: f64, detail: impl FnOnce() -> String) {
        let violated = slack.is_nan() || slack < -tol;
        self.checks.push(Check {
            property,
            skipped: false,
            violated,
            slack,
            detail: if violated { detail() } else { String::new() },
        });
    }

    fn skip(&mut self, property: &'static str) {
        self.checks.push(Check {
            property,
            skipped: true,
            violated: false,
            slack: f64::INFINITY,
            detail: String::new(),
        });
    }
}

enum CaseOutcome {
    Checked(Vec<Check>),
    Gate(ConvexityReport),
}

fn run_case(inst: &Instance, inject_concave: bool) -> Result<CaseOutcome, hh_bounds::Error> {
    let r = inst.spec.rect;
    let f = if inject_concave {
        let spec = inst.spec.clone();
        let (cx, _) = r.center();
        let scale = 4.0 / (r.width() * r.width());
        Fn2D::new(move |x, y| spec.eval(x, y) - scale * (x - cx) * (x - cx))
    } else {
        inst.spec.to_fn()
    };

    let gate = check_coordinate_convexity(&f, r, DEFAULT_SAMPLES, DEFAULT_TOL, inst.seed)?;
    if !gate.passed {
        return Ok(CaseOutcome::Gate(gate));
    }

    let mut rec = Recorder { checks: Vec::new() };
    let oracle = reference_integral_2d(&f, r, DEFAULT_GRID)?;
    let reference = oracle.value;

    for n in 1..=MAX_N {
        for m in INNER_M {
            let b = theorem3_discrete_bounds(&f, r, n, m)?;
            let tol = REL_TOL * b.lower.abs().max(b.upper.abs()).max(reference.abs());
            if oracle.error_estimate > 1e-3 * b.gap() && oracle.error_estimate > tol {
                rec.skip("enclosure");
                continue;
            }
            let slack = (reference - b.lower).min(b.upper - reference);
            rec.check("enclosure", slack, tol, || {
                format!("n={n} m={m}: lower {} oracle {reference} upper {}", b.lower, b.upper)
            });
        }
    }

    for scheme in [InnerScheme::default(), QUADRATURE] {
        for n in 1..=MAX_N {
            for (property, sides) in [
                ("midline_sums", theorem4_terms(&f, r, n, scheme)?),
                ("boundary_sums", theorem5_terms(&f, r, n, scheme)?),
            ] {
                let tol = REL_TOL * sides.rhs.abs().max(1.0);
                rec.check(property, sides.slack(), tol, || {
                    format!("{} n={n}: lhs {} rhs {}", scheme.label(), sides.lhs, sides.rhs)
                });
            }
            if f.is_positive() {
                let bound = theorem6_upper(&f, r, n, scheme)?;
                let tol = REL_TOL * bound.abs().max(1.0);
                rec.check("positive_upper", bound - reference, tol, || {
                    format!("{} n={n}: integral {reference} bound {bound}", scheme.label())
                });
            }
        }

        let dragomir = dragomir_chain_with_reference(&f, r, scheme, reference)?;
        let bakula = bakula_chain_with_reference(&f, r, scheme, reference)?;
        let recaptured = recapture_classical_chain(&f, r, scheme, reference)?;
        for (i, (d, rc)) in dragomir.values().into_iter().zip(recaptured).enumerate() {
            let rel = if agrees(d, rc, 0.0) {
                0.0
            } else {
                (d - rc).abs() / d.abs().max(rc.abs())
            };
            rec.check("chain_recapture", -rel, RECAPTURE_TOL, || {
                format!("{} term {}: chain {d} recaptured {rc}", scheme.label(), i + 1)
            });
        }
        for (name, chain) in [("dragomir", &dragomir), ("bakula", &bakula)] {
            rec.check("chain_ordering", chain.worst_slack(), chain.tolerance, || {
                format!("{} {name} chain: {:?}", scheme.label(), chain.values())
            });
        }
        let (dv, bv) = (dragomir.values(), bakula.values());
        for k in [3, 4] {
            rec.check(
                "refined_chain_tighter",
                dv[k] - bv[k],
                tol_machine(&[dv[k], bv[k]]),
                || format!("{} term {}: refined {} classical {}", scheme.label(), k + 1, bv[k], dv[k]),
            );
        }
    }

    for m in INNER_M {
        for n in [1, 2, 4] {
            let coarse = theorem3_discrete_bounds(&f, r, n, m)?;
            let fine = theorem3_discrete_bounds(&f, r, 2 * n, m)?;
            rec.check(
                "gap_monotone",
                coarse.gap() - fine.gap(),
                tol_machine(&[coarse.lower, coarse.upper]),
                || format!("m={m}: gap(n={n}) {} gap(n={}) {}", coarse.gap(), 2 * n, fine.gap()),
            );
        }
    }

    Ok(CaseOutcome::Checked(rec.checks))
}

#[derive(Debug, Serialize)]
struct PropertySummary {
    name: &'static str,
    checks: usize,
    skipped: usize,
    violations: usize,
    worst_slack: Option<f64>,
}

#[derive(Debug, Serialize)]
struct FailureRecord {
    case: usize,
    seed: u64,
    property: &'static str,
    detail: String,
    instance: CoordinateConvexSpec,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    seed: u64,
    cases: usize,
    passed: bool,
    gate_failures: usize,
    properties: Vec<PropertySummary>,
    failures: Vec<FailureRecord>,
}

pub fn run(args: &VerifyArgs) -> Result<Outcome, Failure> {
    if args.cases == 0 {
        return Err(Failure::usage("--cases must be at least 1"));
    }
    let instances: Vec<Instance> = (0..args.cases)
        .map(|i| Instance::generate(i, args.seed.wrapping_add(i as u64)))
        .collect();
    let outcomes = instances
        .par_iter()
        .map(|inst| run_case(inst, args.inject_concave))
        .collect::<Result<Vec<_>, _>>()?;

    let mut properties: Vec<PropertySummary> = PROPERTIES
        .iter()
        .map(|&name| PropertySummary {
            name,
            checks: 0,
            skipped: 0,
            violations: 0,
            worst_slack: None,
        })
        .collect();
    let mut failures = Vec::new();
    let mut gate_reports = Vec::new();

    for (inst, outcome) in instances.iter().zip(outcomes) {
        let checks = match outcome {
            CaseOutcome::Gate(report) => {
                gate_reports.push((inst, report));
                continue;
            }
            CaseOutcome::Checked(checks) => checks,
        };
        for c in checks {
            let p = properties
                .iter_mut()
                .find(|p| p.name == c.property)
                .expect("known property");
            if c.skipped {
                p.skipped += 1;
                continue;
            }
            p.checks += 1;
            p.worst_slack = Some(p.worst_slack.map_or(c.slack, |w| w.min(c.slack)));
            if c.violated {
                p.violations += 1;
                if failures.len() < MAX_REPORTED_FAILURES {
                    failures.push(FailureRecord {
                        case: inst.case,
                        seed: inst.seed,
                        property: c.property,
                        detail: c.detail,
                        instance: inst.spec.clone(),
                    });
                }
            }
        }
    }

    let violations: usize = properties.iter().map(|p| p.violations).sum();
    let report = VerifyReport {
        seed: args.seed,
        cases: args.cases,
        passed: violations == 0 && gate_reports.is_empty(),
        gate_failures: gate_reports.len(),
        properties,
        failures,
    };

    let stdout = match args.output {
        OutputFormat::Json => json(&report)?,
        OutputFormat::Csv => csv(
            &["property", "checks", "skipped", "violations", "worst_slack"],
            &report
                .properties
                .iter()
                .map(|p| {
                    vec![
                        p.name.to_string(),
                        p.checks.to_string(),
                        p.skipped.to_string(),
                        p.violations.to_string(),
                        p.worst_slack.map(sci).unwrap_or_default(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        OutputFormat::Human => human(&report),
    };

    if let Some((inst, gate)) = gate_reports.first() {
        let f = gate_failure(gate);
        return Ok(Outcome {
            stdout,
            stderr: format!(
                "case {} (seed {}) rejected by the convexity gate; {}\n",
                inst.case, inst.seed, f.message
            ),
            code: 3,
        });
    }
    if violations > 0 {
        let mut stderr = format!("{violations} property violation(s)\n");
        for f in &report.failures {
            stderr.push_str(&format!(
                "  case {} [{}] {}\n    replay: hh-bounds verify --cases 1 --seed {}\n",
                f.case, f.property, f.detail, f.seed
            ));
        }
        return Ok(Outcome {
            stdout,
            stderr,
            code: 1,
        });
    }
    Ok(Outcome::ok(stdout))
}

fn human(report: &VerifyReport) -> String {
    let mut s = format!(
        "verify: {} cases from seed {}\n\n{:<24} {:>8} {:>8} {:>10}  {}\n",
        report.cases, report.seed, "property", "checks", "skipped", "violations", "worst slack"
    );
    for p in &report.properties {
        s.push_str(&format!(
            "{:<24} {:>8} {:>8} {:>10}  {}\n",
            p.name,
            p.checks,
            p.skipped,
            p.violations,
            p.worst_slack.map(|v| format!("{v:e}")).unwrap_or_else(|| "-".into())
        ));
    }
    if report.gate_failures > 0 {
        s.push_str(&format!("\n{} case(s) rejected by the convexity gate\n", report.gate_failures));
    }
    s.push_str(if report.passed { "\nresult: PASS\n" } else { "\nresult: FAIL\n" });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible_from_their_seed() {
        let a = Instance::generate(3, 10);
        let b = Instance::generate(0, 10);
        assert_eq!(a.spec, b.spec);
        assert!((1..=4).contains(&a.atom_count));
    }

    #[test]
    fn single_case_passes_every_property() {
        let inst = Instance::generate(0, 123);
        match run_case(&inst, false).unwrap() {
            CaseOutcome::Checked(checks) => {
                assert!(checks.iter().all(|c| !c.violated), "{checks:?}");
                for p in ["enclosure", "chain_recapture", "gap_monotone", "midline_sums"] {
                    assert!(checks.iter().any(|c| c.property == p && !c.skipped));
                }
            }
            CaseOutcome::Gate(r) => panic!("gate rejected a generated instance: {r:?}"),
        }
    }

    #[test]
    fn injected_concavity_hits_the_gate() {
        let inst = Instance::generate(0, 7);
        assert!(matches!(run_case(&inst, true).unwrap(), CaseOutcome::Gate(_)));
    }
}
