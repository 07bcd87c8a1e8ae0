//! Executes a [`RunConfig`] and assembles its report.

use coinwalk::hilbert::{normalize, random_coin_vector};
use coinwalk::oracle::{certify_schedule, dense_evolve, DensePlan};
use coinwalk::teleport::TeleportPlan;
use coinwalk::transfer::alternating_schedule;
use coinwalk::{
    plan_complete, plan_cycle, plan_line, plan_regular, run_teleport, run_transfer, sample_branch, CaseTag, Complex64,
    Error, TransferPlan, WalkState, ORACLE_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Format, InputSpec, Mode, Protocol, RunConfig};
use crate::error::{exit, CliError};
use crate::report::{
    BranchRow, CertifyEntry, CertifySection, ProtocolReport, TeleportSection, TransferSection, UnplannedTarget, Verdict,
};
use crate::trace::{emit_csv, trace_rows};
use crate::verify::verify_all;

/// Input norms further than this from 1 trigger a warning.
pub const NORM_WARNING_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ProtocolReport,
    pub trace: Vec<WalkState>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.report.verdict {
            Verdict::Pass => exit::PASS,
            Verdict::Fail => exit::FIDELITY,
        }
    }

    /// The report in the configured format.
    pub fn render(&self) -> Result<String, CliError> {
        match self.report.config.format {
            Format::Structured => Ok(serde_json::to_string_pretty(&self.report)? + "\n"),
            Format::Csv => Ok(emit_csv(if self.report.config.trace { &self.trace } else { &[] })),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if !cfg.placements.is_empty() && !(cfg.protocol.is_transfer() || cfg.protocol == Protocol::Certify) {
        return Err(CliError::Config(format!("{} does not accept schedule overrides", cfg.protocol)));
    }
    let mut report = ProtocolReport::new(cfg.clone());
    let mut trace = Vec::new();
    match cfg.protocol {
        p if p.is_transfer() => {
            let plan = override_schedule(transfer_plan(cfg)?, cfg)?;
            let payload = resolve_input(cfg, plan.coin_dim(), &mut report.warnings)?;
            let result = run_transfer(&plan, &payload)?;
            let deviation = oracle_deviation(DensePlan::Transfer(&plan), &payload, &result.trace)?;
            report.verdict = Verdict::from_pass(result.passed());
            report.input = Some(payload);
            report.transfer = Some(TransferSection::from_report(&result, deviation));
            trace = result.trace;
        }
        p if p.is_teleport() => {
            let plan = teleport_plan(cfg)?;
            let input = resolve_input(cfg, plan.coin_dim(), &mut report.warnings)?;
            let run = run_teleport(&plan, &input)?;
            let deviation = oracle_deviation(DensePlan::Teleport(&plan), &input, &run.trace)?;
            let mut section = TeleportSection::from_run(&run, deviation);
            let pass = match cfg.mode {
                Mode::Enumerate => run.passed(),
                Mode::Sample => {
                    let b = sample_branch(&run, cfg.seed);
                    section.sampled = Some(BranchRow::from(b));
                    b.passed()
                }
            };
            report.verdict = Verdict::from_pass(pass);
            report.input = Some(input);
            report.teleport = Some(section);
            trace = run.trace;
        }
        Protocol::Certify => {
            let section = certify(cfg)?;
            report.verdict = Verdict::from_pass(section.infeasible.is_empty() && section.unplanned.is_empty());
            report.certify = Some(section);
        }
        Protocol::VerifyAll => {
            let section = verify_all(cfg.seed);
            report.verdict = Verdict::from_pass(section.criteria.iter().all(|c| c.passed));
            report.verify = Some(section);
        }
        _ => unreachable!("every protocol is handled above"),
    }
    if cfg.trace && cfg.format == Format::Structured {
        report.trace = Some(trace_rows(&trace));
    }
    Ok(Outcome { report, trace })
}

/// The coin-1 input: explicit amplitudes (normalized, with a warning when
/// they were not) or a seeded random vector.
pub fn resolve_input(cfg: &RunConfig, dim: usize, warnings: &mut Vec<String>) -> Result<Vec<Complex64>, CliError> {
    match &cfg.input {
        InputSpec::Random { seed } => Ok(random_coin_vector(dim, &mut ChaCha8Rng::seed_from_u64(*seed))),
        InputSpec::Explicit(v) => {
            if v.len() != dim {
                return Err(CliError::Config(format!(
                    "input has {} amplitudes but the coin has dimension {dim}",
                    v.len()
                )));
            }
            let mut v = v.clone();
            let norm = normalize(&mut v);
            if norm == 0.0 {
                return Err(Error::ZeroState.into());
            }
            if (norm - 1.0).abs() > NORM_WARNING_TOL {
                warnings.push(format!("input norm {norm} differs from 1; normalized"));
            }
            Ok(v)
        }
    }
}

pub fn transfer_plan(cfg: &RunConfig) -> Result<TransferPlan, CliError> {
    Ok(match cfg.protocol {
        Protocol::TransferLine => plan_line(cfg.need_x()?)?,
        Protocol::TransferCycle => plan_cycle(cfg.need_d()?, cfg.need_x()?, cfg.need_method()?)?,
        Protocol::TransferComplete => plan_complete(cfg.need_d()?, cfg.need_x()?)?,
        Protocol::TransferRegular => plan_regular(cfg.need_n()?, cfg.need_d()?, cfg.need_x()?)?,
        other => return Err(CliError::Config(format!("{other} is not a transfer protocol"))),
    })
}

pub fn teleport_plan(cfg: &RunConfig) -> Result<TeleportPlan, CliError> {
    Ok(match cfg.protocol {
        Protocol::TeleportLine => TeleportPlan::line(cfg.need_n()?)?,
        Protocol::TeleportCycle => TeleportPlan::cycle(cfg.need_d()?)?,
        Protocol::TeleportComplete => TeleportPlan::complete(cfg.need_d()?, cfg.need_t()?)?,
        Protocol::TeleportRegular => TeleportPlan::regular(cfg.need_n()?, cfg.need_d()?, cfg.need_t()?)?,
        other => return Err(CliError::Config(format!("{other} is not a teleport protocol"))),
    })
}

/// Replaces the generated schedule with the configured placements, keeping the
/// step count and recovery.
fn override_schedule(mut plan: TransferPlan, cfg: &RunConfig) -> Result<TransferPlan, CliError> {
    if cfg.placements.is_empty() {
        return Ok(plan);
    }
    let dim = plan.coin_dim();
    let ops = cfg.placements.iter().map(|p| Ok((p.step, p.coin_op(dim)?))).collect::<Result<Vec<_>, CliError>>()?;
    plan.steps = alternating_schedule(plan.arena, plan.step_count(), &ops)?;
    plan.case_tag = CaseTag::Custom;
    plan.certification = None;
    Ok(plan)
}

/// Runs the dense oracle alongside the sparse trace. Systems too large for
/// the oracle are skipped; a disagreement is an internal error.
fn oracle_deviation(plan: DensePlan<'_>, input: &[Complex64], trace: &[WalkState]) -> Result<Option<f64>, CliError> {
    let dense = match dense_evolve(plan, input) {
        Ok(d) => d,
        Err(Error::Size { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let dev = dense.max_deviation(trace)?;
    if dev > ORACLE_TOL {
        return Err(CliError::Oracle(format!("sparse and dense runs differ by {dev:e}")));
    }
    Ok(Some(dev))
}

/// Certifies every target of one arena (or the single `--target`).
///
/// `--n` selects the regular graph, `--method` the cycle, `--d` alone the
/// complete graph and `--target` alone the line.
type PlanBuilder = Box<dyn Fn(i64) -> coinwalk::Result<TransferPlan>>;

fn certify(cfg: &RunConfig) -> Result<CertifySection, CliError> {
    if cfg.trials == 0 {
        return Err(CliError::Config("certify needs --trials >= 1".into()));
    }
    let (targets, build): (Vec<i64>, PlanBuilder) = if let Some(n) = cfg.n {
        let d = cfg.need_d()?;
        ((1..n as i64).collect(), Box::new(move |x| plan_regular(n, d, x)))
    } else if let Some(method) = cfg.method {
        let d = cfg.need_d()?;
        ((1..d as i64).collect(), Box::new(move |x| plan_cycle(d, x, method)))
    } else if let Some(d) = cfg.d {
        ((1..d as i64).collect(), Box::new(move |x| plan_complete(d, x)))
    } else {
        let x = cfg.need_x()?;
        (vec![x], Box::new(plan_line))
    };
    let targets = match cfg.x {
        Some(x) if cfg.n.is_some() || cfg.d.is_some() => vec![x],
        _ => targets,
    };
    let mut entries = Vec::new();
    let mut unplanned = Vec::new();
    let mut arena = None;
    for x in targets {
        let plan = match build(x) {
            Ok(p) => override_schedule(p, cfg)?,
            Err(e) if e.is_precondition() => return Err(e.into()),
            Err(e) => {
                unplanned.push(UnplannedTarget { target: x, reason: e.to_string() });
                continue;
            }
        };
        arena.get_or_insert(plan.arena);
        let mut record = certify_schedule(&plan, cfg.trials, cfg.seed)?;
        if let Some(gen) = &plan.certification {
            record.attempts = gen.attempts.clone();
        }
        entries.push(CertifyEntry {
            target: x,
            case: plan.case_tag.as_str().to_string(),
            steps: plan.step_count(),
            placements: plan.placements(),
            recovery: [plan.recovery.0.name(), plan.recovery.1.name()],
            record,
        });
    }
    let arena = match arena {
        Some(a) => a,
        None => return Err(CliError::Walk(Error::Infeasible("no target could be planned".into()))),
    };
    Ok(CertifySection {
        arena,
        feasible: entries.iter().filter(|e| e.record.passed).map(|e| e.target).collect(),
        infeasible: entries.iter().filter(|e| !e.record.passed).map(|e| e.target).collect(),
        entries,
        unplanned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PlacementOverride;

    fn cfg(protocol: Protocol) -> RunConfig {
        RunConfig::new(protocol)
    }

    #[test]
    fn line_flags_map_to_case() {
        let mut c = cfg(Protocol::TransferLine);
        c.x = Some(3);
        c.input = InputSpec::Explicit(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]);
        let out = run(&c).unwrap();
        let t = out.report.transfer.as_ref().unwrap();
        assert_eq!(t.case, "L1_2");
        assert_eq!(t.steps, 7);
        assert_eq!(out.exit_code(), 0);
        assert!(out.report.warnings.is_empty());
    }

    #[test]
    fn unnormalized_input_warns() {
        let mut c = cfg(Protocol::TransferLine);
        c.x = Some(2);
        c.input = InputSpec::Explicit(vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)]);
        let out = run(&c).unwrap();
        assert_eq!(out.report.warnings.len(), 1);
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn coprimality_is_a_config_error() {
        let mut c = cfg(Protocol::TeleportComplete);
        c.d = Some(4);
        c.t = Some(2);
        let err = run(&c).unwrap_err();
        assert_eq!(err.exit_code(), exit::CONFIG);
        assert!(err.to_string().contains("gcd(t,d) must be 1"));
    }

    #[test]
    fn missing_parameter_named() {
        let err = run(&cfg(Protocol::TransferCycle)).unwrap_err();
        assert!(err.to_string().contains("--d"));
        assert_eq!(err.exit_code(), exit::CONFIG);
    }

    #[test]
    fn corrupted_schedule_fails() {
        let mut c = cfg(Protocol::TransferLine);
        c.x = Some(2);
        c.placements = vec![PlacementOverride { step: 1, op: "X".into() }];
        let out = run(&c).unwrap();
        assert_eq!(out.report.transfer.as_ref().unwrap().case, "custom");
        assert_eq!(out.exit_code(), exit::FIDELITY);
    }

    #[test]
    fn teleport_line_table() {
        let mut c = cfg(Protocol::TeleportLine);
        c.n = Some(6);
        let out = run(&c).unwrap();
        let t = out.report.teleport.as_ref().unwrap();
        assert_eq!(t.branches.len(), 6);
        assert!(t.branches.iter().all(|b| (b.fidelity - 1.0).abs() < 1e-10));
        assert!(t.oracle_deviation.unwrap() <= 1e-12);
    }

    #[test]
    fn sample_mode_reports_one_branch() {
        let mut c = cfg(Protocol::TeleportCycle);
        c.d = Some(8);
        c.mode = Mode::Sample;
        let out = run(&c).unwrap();
        assert!(out.report.teleport.as_ref().unwrap().sampled.is_some());
    }

    #[test]
    fn regular_certify_reports_feasible_set() {
        let mut c = cfg(Protocol::Certify);
        c.n = Some(7);
        c.d = Some(3);
        c.trials = 3;
        let out = run(&c).unwrap();
        let s = out.report.certify.as_ref().unwrap();
        assert_eq!(s.feasible, (1..7).collect::<Vec<_>>());
        assert!(s.infeasible.is_empty());
    }

    #[test]
    fn reports_are_deterministic() {
        let mut c = cfg(Protocol::TeleportComplete);
        c.d = Some(5);
        c.t = Some(3);
        c.seed = 4;
        c.input = InputSpec::Random { seed: 4 };
        c.trace = true;
        let a = run(&c).unwrap().render().unwrap();
        let b = run(&c).unwrap().render().unwrap();
        assert_eq!(a, b);
    }
}
