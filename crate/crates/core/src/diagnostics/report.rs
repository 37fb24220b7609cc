use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{
    classify, fit_convex_mixture, tv, two_sample_threshold, Classification, ConvexFitResult,
    EPS_EXACT,
};
use super::scenario::{CausalScenario, Generator, InterventionPair};
use crate::error::{Error, Result};
use crate::gates;
use crate::process::{born_joint, Arm, SwitchScenario};
use crate::sim::{
    sample_shots, simulate_exact, target_given_control, Circuit, NoiseModel, OutcomeDistribution,
};
use crate::tensor::ComplexMatrix;

/// Conditioning events with probability at or below this are treated as impossible.
pub const MASS_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Observe and do agree at a parentless A.
    R1,
    /// Observe and do agree once the control value is fixed.
    R2,
    /// Forcing A leaves B untouched when A is declared not to reach B.
    R3,
    /// The `+` conditional lies on the segment between the `0` and `1` conditionals.
    R4,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches(['R', 'r']) {
            "1" => Ok(Rule::R1),
            "2" => Ok(Rule::R2),
            "3" => Ok(Rule::R3),
            "4" => Ok(Rule::R4),
            _ => Err(Error::InvalidArgument(format!("unknown rule `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlSetting {
    Zero,
    One,
    Plus,
    Unconditioned,
}

impl ControlSetting {
    pub const SWITCH: [ControlSetting; 3] = [
        ControlSetting::Zero,
        ControlSetting::One,
        ControlSetting::Plus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ControlSetting::Zero => "0",
            ControlSetting::One => "1",
            ControlSetting::Plus => "+",
            ControlSetting::Unconditioned => "none",
        }
    }

    /// Measurement basis that realizes this setting and the bin selecting it.
    fn basis(self) -> Option<(Vec<ComplexMatrix>, usize)> {
        match self {
            ControlSetting::Zero => Some((gates::z_basis(), 0)),
            ControlSetting::One => Some((gates::z_basis(), 1)),
            ControlSetting::Plus => Some((gates::x_basis(), 0)),
            ControlSetting::Unconditioned => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Violated,
    NotApplicable,
    /// A conditioning event has zero probability (or drew no shots).
    Undefined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not-applicable",
            Verdict::Undefined => "undefined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub rule: Rule,
    /// Control value conditioned on, when the check is per setting.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub context: Option<String>,
    pub quantity: Option<f64>,
    pub threshold: Option<f64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Exact,
    /// Conditionals estimated from `shots` samples per measurement setting, with thresholds
    /// holding at confidence `1 − delta`.
    Sampled {
        shots: u64,
        seed: u64,
        delta: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCdEntry {
    pub control: String,
    pub value: Option<f64>,
}

/// `Δ_CD(c) = TV(P(O | do, c), P(O | observe, c))` for `c ∈ {0, 1, +}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCd {
    pub ideal: Vec<DeltaCdEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noisy: Option<Vec<DeltaCdEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub scenario: String,
    pub mode: Mode,
    pub noise: Option<NoiseModel>,
    pub checks: Vec<Check>,
    pub delta_cd: Option<DeltaCd>,
    pub rule4_fit: Option<ConvexFitResult>,
    pub classification: Option<Classification>,
}

impl DiagnosticReport {
    pub fn has_violation(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Violated)
    }

    pub fn checks_for(&self, rule: Rule) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.rule == rule)
    }

    pub fn to_text(&self) -> String {
        let mode = match self.mode {
            Mode::Exact => "exact".to_string(),
            Mode::Sampled { shots, seed, delta } => {
                format!("sampled, shots={shots}, seed={seed}, delta={delta}")
            }
        };
        let mut out = format!("scenario: {} ({mode})\n", self.scenario);
        if let Some(n) = self.noise {
            let _ = writeln!(out, "noise: p1={} p3={}", n.p1, n.p3);
        }
        let _ = writeln!(
            out,
            "{:<5}{:<9}{:>14}{:>14}  verdict",
            "rule", "control", "quantity", "threshold"
        );
        for c in &self.checks {
            let q = c.quantity.map_or("-".to_string(), |q| format!("{q:.6e}"));
            let t = c.threshold.map_or("-".to_string(), |t| format!("{t:.3e}"));
            let _ = write!(
                out,
                "{:<5}{:<9}{:>14}{:>14}  {}",
                format!("{:?}", c.rule),
                c.context.as_deref().unwrap_or("-"),
                q,
                t,
                c.verdict.as_str()
            );
            if let Some(n) = &c.note {
                let _ = write!(out, " ({n})");
            }
            out.push('\n');
        }
        if let Some(d) = &self.delta_cd {
            let fmt = |es: &[DeltaCdEntry]| {
                es.iter()
                    .map(|e| {
                        format!(
                            "{}={}",
                            e.control,
                            e.value.map_or("undefined".into(), |v| format!("{v:.6}"))
                        )
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(out, "delta_cd ideal: {}", fmt(&d.ideal));
            if let Some(n) = &d.noisy {
                let _ = writeln!(out, "delta_cd noisy: {}", fmt(n));
            }
        }
        if let Some(f) = self.rule4_fit {
            let _ = writeln!(
                out,
                "convex fit: lambda*={:.6} residual={:.6e}",
                f.lambda_star, f.residual
            );
        }
        if let Some(c) = self.classification {
            let _ = writeln!(out, "classification: {}", c.as_str());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ArmKind {
    Natural,
    Observe,
    Do,
}

/// A conditional distribution and the number of samples behind it (0 in exact mode).
#[derive(Clone, Debug)]
struct Estimate {
    probs: Option<Vec<f64>>,
    n: u64,
}

struct ProcessEvaluator<'a> {
    scenario: &'a SwitchScenario,
    pair: Option<&'a InterventionPair>,
    mode: Mode,
    /// Keeps ideal and noisy samples independent.
    stream_offset: u64,
}

fn normalized(joint: &[f64]) -> Option<Vec<f64>> {
    let mass: f64 = joint.iter().sum();
    (mass > MASS_FLOOR).then(|| joint.iter().map(|p| p / mass).collect())
}

/// Seed for one (arm, basis) measurement setting.
fn derive_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl ProcessEvaluator<'_> {
    fn arm(&self, kind: ArmKind) -> Result<Arm<'_>> {
        Ok(match (kind, self.pair) {
            (ArmKind::Natural, _) => Arm::Natural,
            (ArmKind::Observe, Some(p)) => Arm::Observe(&p.observe),
            (ArmKind::Do, Some(p)) => Arm::Do(&p.do_state),
            (_, None) => {
                return Err(Error::InvalidArgument(
                    "scenario has no intervention pair".into(),
                ))
            }
        })
    }

    fn conditional(&self, kind: ArmKind, setting: ControlSetting) -> Result<Estimate> {
        let r = self.scenario.resolve(self.arm(kind)?)?;
        let n_out = r.n_outcomes();
        let basis = setting.basis();
        match self.mode {
            Mode::Exact => {
                let joint = match &basis {
                    None => born_joint(&r, None)?,
                    Some((b, bin)) => born_joint(&r, Some(&b[*bin]))?,
                };
                Ok(Estimate {
                    probs: normalized(&joint),
                    n: 0,
                })
            }
            Mode::Sampled { shots, seed, .. } => {
                let (rows, bin) = match &basis {
                    None => (vec![born_joint(&r, None)?], 0),
                    Some((b, bin)) => (
                        b.iter()
                            .map(|e| born_joint(&r, Some(e)))
                            .collect::<Result<Vec<_>>>()?,
                        *bin,
                    ),
                };
                let probs: Vec<f64> = rows.concat();
                let labels = (0..probs.len())
                    .map(|i| format!("{}:{}", i / n_out, i % n_out))
                    .collect();
                let dist = OutcomeDistribution::new(labels, probs, None)?;
                let basis_id = match setting {
                    ControlSetting::Zero | ControlSetting::One => 0,
                    ControlSetting::Plus => 1,
                    ControlSetting::Unconditioned => 2,
                };
                let stream = self.stream_offset + 4 * kind as u64 + basis_id;
                let counts = sample_shots(&dist, shots, derive_seed(seed, stream))?;
                let bin_counts = &counts.counts[bin * n_out..(bin + 1) * n_out];
                let n: u64 = bin_counts.iter().sum();
                Ok(Estimate {
                    probs: (n > 0)
                        .then(|| bin_counts.iter().map(|&c| c as f64 / n as f64).collect()),
                    n,
                })
            }
        }
    }

    fn threshold(&self, estimates: &[&Estimate]) -> Result<Option<f64>> {
        match self.mode {
            Mode::Exact => Ok(Some(EPS_EXACT)),
            Mode::Sampled { delta, .. } => {
                let n = estimates.iter().map(|e| e.n).min().unwrap_or(0);
                if n == 0 {
                    return Ok(None);
                }
                two_sample_threshold(n, delta).map(Some)
            }
        }
    }

    /// TV between two arms at one setting, as a check.
    fn compare(
        &self,
        rule: Rule,
        a: ArmKind,
        b: ArmKind,
        setting: ControlSetting,
    ) -> Result<Check> {
        let (ea, eb) = (self.conditional(a, setting)?, self.conditional(b, setting)?);
        let context =
            (setting != ControlSetting::Unconditioned).then(|| format!("c={}", setting.label()));
        let threshold = self.threshold(&[&ea, &eb])?;
        Ok(match (&ea.probs, &eb.probs, threshold) {
            (Some(pa), Some(pb), Some(t)) => {
                let q = tv(pa, pb)?;
                Check {
                    rule,
                    context,
                    quantity: Some(q),
                    threshold: Some(t),
                    verdict: if q > t {
                        Verdict::Violated
                    } else {
                        Verdict::Pass
                    },
                    note: None,
                }
            }
            _ => Check {
                rule,
                context,
                quantity: None,
                threshold,
                verdict: Verdict::Undefined,
                note: Some("conditioning event has zero probability".into()),
            },
        })
    }

    fn settings(&self) -> Vec<ControlSetting> {
        if self.scenario.control_prep().is_some() {
            ControlSetting::SWITCH.to_vec()
        } else {
            vec![ControlSetting::Unconditioned]
        }
    }

    fn delta_cd(&self) -> Result<Vec<DeltaCdEntry>> {
        ControlSetting::SWITCH
            .iter()
            .map(|&s| {
                let c = self.compare(Rule::R2, ArmKind::Do, ArmKind::Observe, s)?;
                Ok(DeltaCdEntry {
                    control: s.label().into(),
                    value: c.quantity,
                })
            })
            .collect()
    }

    fn rule4(&self) -> Result<(Check, Option<ConvexFitResult>)> {
        let [e0, e1, ep] = [
            ControlSetting::Zero,
            ControlSetting::One,
            ControlSetting::Plus,
        ]
        .map(|s| self.conditional(ArmKind::Do, s));
        let (e0, e1, ep) = (e0?, e1?, ep?);
        let threshold = self.threshold(&[&e0, &e1, &ep])?;
        Ok(match (&ep.probs, &e0.probs, &e1.probs, threshold) {
            (Some(pp), Some(p0), Some(p1), Some(t)) => {
                let fit = fit_convex_mixture(pp, p0, p1)?;
                let check = Check {
                    rule: Rule::R4,
                    context: Some("c=+".into()),
                    quantity: Some(fit.residual),
                    threshold: Some(t),
                    verdict: if fit.residual > t {
                        Verdict::Violated
                    } else {
                        Verdict::Pass
                    },
                    note: None,
                };
                (check, Some(fit))
            }
            _ => (
                Check {
                    rule: Rule::R4,
                    context: Some("c=+".into()),
                    quantity: None,
                    threshold,
                    verdict: Verdict::Undefined,
                    note: Some("conditioning event has zero probability".into()),
                },
                None,
            ),
        })
    }
}

fn not_applicable(rule: Rule, threshold: Option<f64>, note: &str) -> Check {
    Check {
        rule,
        context: None,
        quantity: None,
        threshold,
        verdict: Verdict::NotApplicable,
        note: Some(note.into()),
    }
}

fn base_threshold(mode: Mode) -> Option<f64> {
    match mode {
        Mode::Exact => Some(EPS_EXACT),
        Mode::Sampled { .. } => None,
    }
}

fn check_mode(mode: Mode) -> Result<()> {
    if let Mode::Sampled { shots, delta, .. } = mode {
        two_sample_threshold(shots, delta)?;
    }
    Ok(())
}

fn process_report(
    scenario: &CausalScenario,
    base: &SwitchScenario,
    rules: &[Rule],
    mode: Mode,
    noise: Option<NoiseModel>,
) -> Result<DiagnosticReport> {
    let effective_noise = noise.or(base.noise);
    let mut active = base.clone();
    active.noise = effective_noise;
    let pair = scenario.intervention_pair.as_ref();
    let eval = ProcessEvaluator {
        scenario: &active,
        pair,
        mode,
        stream_offset: 0,
    };
    let has_control = active.control_prep().is_some();
    let declared = scenario.declared;
    let eps0 = base_threshold(mode);
    let mut checks = Vec::new();
    let mut rule4_fit = None;
    for &rule in rules {
        if pair.is_none() && rule != Rule::R4 {
            checks.push(not_applicable(rule, eps0, "no intervention pair"));
            continue;
        }
        match rule {
            Rule::R1 if !declared.a_parentless => {
                checks.push(not_applicable(rule, eps0, "A is not declared parentless"))
            }
            Rule::R1 => checks.push(eval.compare(
                rule,
                ArmKind::Do,
                ArmKind::Observe,
                ControlSetting::Unconditioned,
            )?),
            Rule::R2 => {
                for s in eval.settings() {
                    checks.push(eval.compare(rule, ArmKind::Do, ArmKind::Observe, s)?);
                }
            }
            Rule::R3 => {
                for s in eval.settings() {
                    let mut c = eval.compare(rule, ArmKind::Do, ArmKind::Natural, s)?;
                    if declared.a_influences_b {
                        let witnessed =
                            matches!((c.quantity, c.threshold), (Some(q), Some(t)) if q > t);
                        c.verdict = Verdict::NotApplicable;
                        c.note = Some(if witnessed {
                            "A is declared to influence B".into()
                        } else {
                            "A is declared to influence B; influence not witnessed".into()
                        });
                    }
                    checks.push(c);
                }
            }
            Rule::R4 if !has_control => {
                checks.push(not_applicable(rule, eps0, "no control system"))
            }
            Rule::R4 if pair.is_none() => {
                checks.push(not_applicable(rule, eps0, "no intervention pair"))
            }
            Rule::R4 => {
                let (c, fit) = eval.rule4()?;
                checks.push(c);
                rule4_fit = fit;
            }
        }
    }

    let (delta_cd, classification) = if has_control && pair.is_some() {
        let mut ideal_s = active.clone();
        ideal_s.noise = None;
        let ideal_eval = ProcessEvaluator {
            scenario: &ideal_s,
            ..eval
        };
        let ideal = ideal_eval.delta_cd()?;
        let noisy = match effective_noise {
            Some(_) => Some(
                ProcessEvaluator {
                    stream_offset: 16,
                    ..eval
                }
                .delta_cd()?,
            ),
            None => None,
        };
        let eps = match mode {
            Mode::Exact => Some(EPS_EXACT),
            // The largest per-setting threshold is the conservative choice.
            Mode::Sampled { .. } => ControlSetting::SWITCH
                .iter()
                .map(|&s| {
                    let e = eval.conditional(ArmKind::Do, s)?;
                    let o = eval.conditional(ArmKind::Observe, s)?;
                    eval.threshold(&[&e, &o])
                })
                .collect::<Result<Option<Vec<f64>>>>()?
                .map(|v| v.into_iter().fold(0.0, f64::max)),
        };
        let values = |es: &[DeltaCdEntry]| -> Option<[f64; 3]> {
            Some([es[0].value?, es[1].value?, es[2].value?])
        };
        let class = match (values(&ideal), &noisy, eps) {
            (Some(i), None, Some(eps)) => Some(classify(i, None, eps)?),
            (Some(i), Some(n), Some(eps)) => match values(n) {
                Some(n) => Some(classify(i, Some(n), eps)?),
                None => None,
            },
            _ => None,
        };
        (Some(DeltaCd { ideal, noisy }), class)
    } else {
        (None, None)
    };

    Ok(DiagnosticReport {
        scenario: scenario.name.clone(),
        mode,
        noise: effective_noise,
        checks,
        delta_cd,
        rule4_fit,
        classification,
    })
}

fn circuit_report(
    scenario: &CausalScenario,
    circuit: &Circuit,
    rules: &[Rule],
    mode: Mode,
) -> Result<DiagnosticReport> {
    let exact = simulate_exact(circuit)?;
    let (cond, threshold) = match mode {
        Mode::Exact => (
            target_given_control(&exact.joint_control_target()?),
            Some(EPS_EXACT),
        ),
        Mode::Sampled { shots, seed, delta } => {
            let counts = sample_shots(&exact, shots, seed)?;
            let j = counts.joint_control_target()?;
            let n = (j[0][0] + j[0][1]).min(j[1][0] + j[1][1]);
            let t = if n == 0 {
                None
            } else {
                Some(two_sample_threshold(n, delta)?)
            };
            (counts.conditional()?, t)
        }
    };
    let eps0 = base_threshold(mode);
    let checks = rules
        .iter()
        .map(|&rule| match rule {
            Rule::R2 => {
                let context = Some("c=0 vs c=1".into());
                match (cond, threshold) {
                    ([Some(a), Some(b)], Some(t)) => {
                        let q = 0.5 * ((a[0] - b[0]).abs() + (a[1] - b[1]).abs());
                        Check {
                            rule,
                            context,
                            quantity: Some(q),
                            threshold: Some(t),
                            verdict: if q > t {
                                Verdict::Violated
                            } else {
                                Verdict::Pass
                            },
                            note: None,
                        }
                    }
                    _ => Check {
                        rule,
                        context,
                        quantity: None,
                        threshold,
                        verdict: Verdict::Undefined,
                        note: Some("a control value never occurs".into()),
                    },
                }
            }
            _ => not_applicable(rule, eps0, "circuit scenario has no intervention pair"),
        })
        .collect();
    Ok(DiagnosticReport {
        scenario: scenario.name.clone(),
        mode,
        noise: None,
        checks,
        delta_cd: None,
        rule4_fit: None,
        classification: None,
    })
}

/// Run the requested rules on `scenario`. `noise` overrides any noise in a process scenario.
pub fn emit_report(
    scenario: &CausalScenario,
    rules: &[Rule],
    mode: Mode,
    noise: Option<NoiseModel>,
) -> Result<DiagnosticReport> {
    if rules.is_empty() {
        return Err(Error::Empty("rule set"));
    }
    check_mode(mode)?;
    scenario.validate()?;
    let mut rules = rules.to_vec();
    rules.sort();
    rules.dedup();
    match &scenario.generator {
        Generator::Process(s) => process_report(scenario, s, &rules, mode, noise),
        Generator::Circuit(c) if noise.is_none() => circuit_report(scenario, c, &rules, mode),
        Generator::Circuit(_) => Err(Error::InvalidArgument(
            "noise for circuit scenarios is part of the circuit".into(),
        )),
    }
}
