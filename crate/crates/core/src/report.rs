//! Verification suites: each runs a family of numerical checks and records
//! the measured value, the threshold and the statement being checked.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{
    derived_numbers, metric_derivative, metric_derivative_of, scan_exceptional_points,
    symmetric_porosity_lower_bound, Ladder, Predicate, ScanOptions,
};
use crate::constructions::{
    build_box_curve, build_cantor_hat_curve, build_l2_kink_example, build_spiral_curve_with_b,
    c_m_bound, sampled_pair_ratio, spiral_arc, spiral_ratio_bound_check, CantorCode, HatCurveSpec,
    KinkExampleSpec,
};
use crate::curve::{phi_reparam, variation, zahorski_homeomorphism, Curve, Interval};
use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::sets::ClosedSet;
use crate::spec::CurveSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Spiral,
    Box,
    Hat,
    Kink,
    Reparam,
    Porosity,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Spiral,
        Suite::Box,
        Suite::Hat,
        Suite::Kink,
        Suite::Reparam,
        Suite::Porosity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Spiral => "spiral",
            Suite::Box => "box",
            Suite::Hat => "hat",
            Suite::Kink => "kink",
            Suite::Reparam => "reparam",
            Suite::Porosity => "porosity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

/// One measured quantity compared against its threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    /// The mathematical statement the check probes.
    pub anchor: String,
    pub measured: f64,
    pub threshold: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(id: &str, anchor: &str, measured: f64, threshold: f64) -> Self {
        Check {
            id: id.into(),
            anchor: anchor.into(),
            measured,
            threshold,
            relation: "<=",
            passed: measured <= threshold,
            detail: None,
        }
    }

    pub fn at_least(id: &str, anchor: &str, measured: f64, threshold: f64) -> Self {
        Check {
            id: id.into(),
            anchor: anchor.into(),
            measured,
            threshold,
            relation: ">=",
            passed: measured >= threshold,
            detail: None,
        }
    }

    /// A check that could not be evaluated.
    pub fn errored(id: &str, anchor: &str, err: &Error) -> Self {
        Check {
            id: id.into(),
            anchor: anchor.into(),
            measured: f64::NAN,
            threshold: f64::NAN,
            relation: "<=",
            passed: false,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces the suite's default curve parameters when its type matches.
    pub spec: Option<CurveSpec>,
}

/// Runs `suite`; failures, including builder errors, become failed checks.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> VerificationReport {
    let checks = match suite {
        Suite::Spiral => spiral_suite(opts),
        Suite::Box => box_suite(opts),
        Suite::Hat => hat_suite(opts),
        Suite::Kink => kink_suite(opts),
        Suite::Reparam => reparam_suite(opts),
        Suite::Porosity => porosity_suite(opts),
    };
    let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    VerificationReport {
        suite,
        seed: opts.seed,
        checks,
        passed,
    }
}

const ANCHOR_MODULUS: &str = "|S_{a,b}(t)| = t·|b|/√(b²+1)";
const ANCHOR_PAIR: &str = "|g(t) − g(s)|/|t − s| > q for s ∈ [0,1], t ≠ s";
const ANCHOR_TSTAR: &str = "arg(g(1/2 + t*) − g(1/2)) = −α with t* ∈ (1/2, 1/2 + s0)";
const ANCHOR_RATIO_BOUND: &str = "t/|f(t) − f(0)| ≤ 1/k for all t > 0";
const ANCHOR_UNIT_SPEED: &str = "g is parameterized by arc length";
const ANCHOR_BOX: &str = "‖g(t) − g(s)‖₁ = |t − s| for s ∈ [0,1]";
const ANCHOR_HAT_LENGTH: &str = "H¹(graph of G) ≤ 2 + Σ 2ⁿθ_n p_n < 5";
const ANCHOR_HAT_MD: &str = "md = 1 at points of the graphs of S_n";
const ANCHOR_SPIKE: &str = "|γ(y_n) − γ(z_n)|/H¹(γ[y_n, z_n]) ≤ cos α_n";
const ANCHOR_PSI: &str =
    "H¹(γ[c,c+t])/|γ(c+t) − γ(c)| ≤ max(ψ_{n+1}(1/q_{n+1}), ψ_{n+1}(ψ_{n+1}(1)), ψ_{n+1}(1 + 2/(n+1)))";
const ANCHOR_THETA: &str = "θ_{n+1}p_{n+1} < θ_n p_n/4, 2θ_{n+1} < θ_n/L_n, Σθ_n < 1";
const ANCHOR_KINK_MD: &str = "md(f, x) ≥ 1 − 2ε off the kinks";
const ANCHOR_KINK_CHORD: &str = "|f(q_m + s) − f(q_m − s)|/(2s) = C_m < 1";
const ANCHOR_LIPSCHITZ: &str = "f is 1-Lipschitz";
const ANCHOR_VARIATION: &str = "⋁ₛᵗ f = ∫ₛᵗ md(f, τ) dτ when md is continuous";
const ANCHOR_PHI: &str = "φ(t) = v_f(t) + λ(U ∩ [a, t])";
const ANCHOR_ZAHORSKI: &str = "h′ = 0 exactly on M and h′ > 0 off M";
const ANCHOR_POROSITY: &str = "symmetric upper porosity of M at x is positive";
const ANCHOR_SCAN: &str = "{x : md_+(f, x) ≠ md_-(f, x)} is countable";
const ANCHOR_BUTTERFLY: &str = "mD^+(f, x) < ∞ implies md(f, x) exists except on a null set";

fn spiral_suite(opts: &SuiteOptions) -> Vec<Check> {
    let (q, alpha, b) = match &opts.spec {
        Some(CurveSpec::Spiral { q, alpha, b }) => (*q, *alpha, *b),
        _ => (0.9, 1.0, Some(2.5)),
    };
    let mut checks = Vec::new();
    let mut modulus_err: f64 = 0.0;
    for bb in [0.5, 1.0, 2.5] {
        for i in 0..100 {
            let t = 10f64.powf(-4.0 + 8.0 * i as f64 / 99.0);
            let (x, y) = spiral_arc(1.0, bb, t);
            modulus_err = modulus_err.max((x.hypot(y) - t * bb / bb.hypot(1.0)).abs() / t.max(1.0));
        }
    }
    checks.push(Check::at_most(
        "spiral.modulus",
        ANCHOR_MODULUS,
        modulus_err,
        1e-8,
    ));
    let s = match build_spiral_curve_with_b(q, alpha, b) {
        Ok(s) => s,
        Err(e) => {
            checks.push(Check::errored("spiral.build", ANCHOR_PAIR, &e));
            return checks;
        }
    };
    let p = &s.params;
    let cert = sampled_pair_ratio(&s.curve, 100_000, opts.seed);
    checks.push(
        Check::at_least("spiral.pair_ratio", ANCHOR_PAIR, cert.min_ratio, q)
            .with_detail(format!("witness {:?}", cert.witness)),
    );
    let in_range = p.t_star > 0.5 && p.t_star < 0.5 + p.s0;
    let arg_err = (p.t_star_argument() + alpha).abs();
    checks.push(Check::at_most(
        "spiral.t_star",
        ANCHOR_TSTAR,
        if in_range { arg_err } else { f64::INFINITY },
        1e-6,
    ));
    let rb = spiral_ratio_bound_check(p);
    checks.push(Check::at_most(
        "spiral.ratio_bound",
        ANCHOR_RATIO_BOUND,
        rb.max_ratio,
        rb.bound + 1e-9,
    ));
    let join = p
        .breakpoints()
        .into_iter()
        .map(|t| {
            let (a, c) = (p.g(t - 1e-13), p.g(t + 1e-13));
            (a.0 - c.0).hypot(a.1 - c.1)
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "spiral.joins",
        ANCHOR_UNIT_SPEED,
        join,
        1e-10,
    ));
    let speed = [
        (0.0, 1.0),
        (1.0, 1.0 + p.s0),
        (1.0 + p.s0, 1.0 + p.l),
        (-p.l, 0.0),
    ]
    .into_iter()
    .map(|(a, b)| match variation(&s.curve, a, b, 16) {
        Ok(v) => (v.value - (b - a)).abs() / (b - a).max(1.0),
        Err(_) => f64::INFINITY,
    })
    .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "spiral.unit_speed",
        ANCHOR_UNIT_SPEED,
        speed,
        1e-6,
    ));
    for (i, (q2, a2)) in [(0.75, FRAC_PI_4), (0.96875, 1.4)].into_iter().enumerate() {
        let id = format!("spiral.schedule_{i}");
        match build_spiral_curve_with_b(q2, a2, None) {
            Ok(s2) => {
                let c = sampled_pair_ratio(&s2.curve, 20_000, opts.seed + 1 + i as u64);
                checks.push(
                    Check::at_least(&id, ANCHOR_PAIR, c.min_ratio, q2)
                        .with_detail(format!("q = {q2}, alpha = {a2}, b = {}", s2.params.b)),
                );
            }
            Err(e) => checks.push(Check::errored(&id, ANCHOR_PAIR, &e)),
        }
    }
    checks
}

fn box_suite(opts: &SuiteOptions) -> Vec<Check> {
    let alpha = match &opts.spec {
        Some(CurveSpec::Box { alpha }) => *alpha,
        _ => FRAC_PI_4,
    };
    let c = match build_box_curve(alpha) {
        Ok(c) => c,
        Err(e) => return vec![Check::errored("box.build", ANCHOR_BOX, &e)],
    };
    let cert = sampled_pair_ratio(&c, 100_000, opts.seed);
    let h = 0.5 * alpha.tan();
    let d = c.at(1.0 + h).sub(&c.at(0.5));
    vec![
        Check::at_most(
            "box.pair_ratio",
            ANCHOR_BOX,
            (cert.min_ratio - 1.0).abs(),
            1e-12,
        )
        .with_detail(format!("min ratio {}", cert.min_ratio)),
        Check::at_most(
            "box.argument",
            "arg(g(1 + h) − g(1/2)) = −α",
            (d.y().atan2(d.x()) + alpha).abs(),
            1e-12,
        ),
    ]
}

/// A ladder whose finest scale stays resolvable at `x` and whose coarsest
/// scale is a hundredth of `room`.
fn ladder_within(room: f64, x: f64) -> Result<Ladder> {
    let t0 = 0.01 * room;
    let floor = 1e-12 * x.abs().max(1.0);
    let steps = ((t0 / floor).log2().floor() as usize).min(20);
    Ladder::new(t0, 0.5, steps.max(4))
}

/// Fixed addresses used by the hat checks, truncated to `depth`.
pub fn hat_codes(depth: usize) -> Vec<CantorCode> {
    ["000000", "111111", "010101", "101100", "011010"]
        .iter()
        .map(|s| {
            let bits: Vec<u8> = s.bytes().take(depth).map(|b| b - b'0').collect();
            CantorCode::new(bits).expect("fixed codes are valid")
        })
        .collect()
}

fn hat_suite(opts: &SuiteOptions) -> Vec<Check> {
    let spec = opts
        .spec
        .as_ref()
        .and_then(CurveSpec::hat_spec)
        .unwrap_or_else(|| HatCurveSpec::default_schedule(6));
    let hat = match build_cantor_hat_curve(&spec) {
        Ok(h) => h,
        Err(e) => return vec![Check::errored("hat.build", ANCHOR_HAT_LENGTH, &e)],
    };
    let depth = hat.depth();
    let mut checks = vec![
        Check::at_most("hat.total_length", ANCHOR_HAT_LENGTH, hat.total_length, 5.0),
        Check::at_most(
            "hat.length_identity",
            ANCHOR_HAT_LENGTH,
            (hat.total_length - hat.length_from_constants()).abs(),
            1e-12,
        ),
    ];
    let mut theta_slack = f64::NEG_INFINITY;
    for i in 1..depth {
        let (a, b) = (&hat.levels[i - 1], &hat.levels[i]);
        let (ta, tb) = (hat.thetas[i - 1], hat.thetas[i]);
        theta_slack = theta_slack
            .max(tb * b.p_n / (ta * a.p_n / 4.0))
            .max(2.0 * tb / (ta / a.big_l));
    }
    theta_slack = theta_slack.max(hat.thetas.iter().sum::<f64>());
    checks.push(Check::at_most(
        "hat.theta_conditions",
        ANCHOR_THETA,
        theta_slack,
        1.0 - 1e-12,
    ));

    let mut md_dev: f64 = 0.0;
    for (s, room) in hat.a1_points(20) {
        let dev = ladder_within(room, s)
            .and_then(|l| metric_derivative(&hat.curve, s, &l, 1e-3))
            .map(|md| md.map_or(f64::INFINITY, |m| (m - 1.0).abs()))
            .unwrap_or(f64::INFINITY);
        md_dev = md_dev.max(dev);
    }
    checks.push(Check::at_most(
        "hat.md_on_graphs",
        ANCHOR_HAT_MD,
        md_dev,
        0.05,
    ));

    let top = depth.saturating_sub(1).min(5);
    if top >= 2 {
        let mut spike: f64 = f64::NEG_INFINITY;
        let mut psi_excess: f64 = f64::NEG_INFINITY;
        let mut failure = None;
        for code in hat_codes(depth) {
            for n in 2..=top {
                match hat.spike_check(&code, n) {
                    Ok(s) if s.straddles => spike = spike.max(s.ratio - s.cos_alpha),
                    Ok(_) => spike = f64::INFINITY,
                    Err(e) => failure = Some(e),
                }
                match hat.psi_check(&code, n, 200) {
                    Ok(p) => psi_excess = psi_excess.max(p.max_ratio - p.bound),
                    Err(e) => failure = Some(e),
                }
            }
        }
        if let Some(e) = failure {
            checks.push(Check::errored("hat.cantor_points", ANCHOR_SPIKE, &e));
        }
        checks.push(Check::at_most("hat.spikes", ANCHOR_SPIKE, spike, 0.05));
        checks.push(Check::at_most("hat.psi_bound", ANCHOR_PSI, psi_excess, 0.0));
    }
    checks
}

fn kink_suite(opts: &SuiteOptions) -> Vec<Check> {
    let spec = opts
        .spec
        .as_ref()
        .and_then(CurveSpec::kink_spec)
        .unwrap_or_else(|| KinkExampleSpec::dyadic(20));
    let curve = match build_l2_kink_example(&spec) {
        Ok(c) => c,
        Err(e) => return vec![Check::errored("kink.build", ANCHOR_KINK_MD, &e)],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let mut worst = f64::INFINITY;
    let mut count = 0;
    while count < 50 {
        let x: f64 = rng.gen_range(0.01..0.99);
        let gap = spec
            .kinks
            .iter()
            .map(|q| (q - x).abs())
            .fold(f64::INFINITY, f64::min);
        if gap < 1e-4 {
            continue;
        }
        count += 1;
        let md = ladder_within(gap, x)
            .and_then(|l| metric_derivative(&curve, x, &l, 1e-3))
            .ok()
            .flatten()
            .unwrap_or(f64::NEG_INFINITY);
        worst = worst.min(md);
    }
    checks.push(Check::at_least(
        "kink.md_off_kinks",
        ANCHOR_KINK_MD,
        worst,
        1.0 - 2.0 * spec.tail - 0.02,
    ));
    match c_m_bound(1, &spec.weights) {
        Ok(c1) => {
            let q1 = spec.kinks[0];
            let room = spec
                .kinks
                .iter()
                .skip(1)
                .map(|q| (q - q1).abs())
                .fold(q1.min(1.0 - q1), f64::min);
            let ratio = (1..=20)
                .map(|j| {
                    let s = room * 2f64.powi(-j);
                    curve.chord(q1 - s, q1 + s) / (2.0 * s)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            checks.push(
                Check::at_most("kink.symmetric_chord", ANCHOR_KINK_CHORD, ratio, c1 + 0.01)
                    .with_detail(format!("C_1 = {c1}")),
            );
            checks.push(Check::at_most(
                "kink.c1_below_one",
                ANCHOR_KINK_CHORD,
                c1,
                1.0 - 1e-12,
            ));
        }
        Err(e) => checks.push(Check::errored(
            "kink.symmetric_chord",
            ANCHOR_KINK_CHORD,
            &e,
        )),
    }
    let lip = (0..10_000)
        .map(|_| {
            let (s, t): (f64, f64) = (rng.gen(), rng.gen());
            if s == t {
                0.0
            } else {
                curve.chord(s, t) / (t - s).abs()
            }
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "kink.lipschitz",
        ANCHOR_LIPSCHITZ,
        lip,
        1.0 + 1e-9,
    ));
    checks
}

fn parabola() -> Curve {
    Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| (t, 0.5 * t * t))
        .expect("euclidean norm is planar")
}

fn plateau() -> Curve {
    Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| {
        (t.min(0.25) + (t - 0.5).max(0.0), 0.0)
    })
    .expect("euclidean norm is planar")
}

/// `∫ₛᵗ md(f, τ) dτ` by composite Simpson with the ladder estimate of `md` at
/// every node.
pub fn integrate_md(curve: &Curve, s: f64, t: f64, panels: usize) -> Result<f64> {
    let ladder = Ladder::default_for(curve.domain());
    let n = 2 * panels.max(1);
    let h = (t - s) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let x = s + h * i as f64;
        let md = metric_derivative(curve, x, &ladder, 1e-3)?
            .ok_or_else(|| Error::Construction(format!("md absent at {x}")))?;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * md;
    }
    Ok(acc * h / 3.0)
}

fn reparam_suite(opts: &SuiteOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let f = parabola();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let (s, t) = (a.min(b), a.max(b));
        if t - s < 1e-3 {
            continue;
        }
        let rel = variation(&f, s, t, 14)
            .and_then(|v| integrate_md(&f, s, t, 32).map(|i| (v.value - i).abs() / v.value))
            .unwrap_or(f64::INFINITY);
        worst = worst.max(rel);
    }
    checks.push(Check::at_most(
        "reparam.variation_identity",
        ANCHOR_VARIATION,
        worst,
        1e-5,
    ));
    match phi_reparam(&plateau(), 101, 12) {
        Ok(plan) => {
            checks.push(Check::at_most(
                "reparam.phi_end",
                ANCHOR_PHI,
                (plan.phi.forward(1.0) - 1.0).abs(),
                1e-9,
            ));
            let g = plan.reparameterized();
            let d = g.domain();
            let pairs: Vec<(f64, f64)> = (0..10_000)
                .map(|_| (rng.gen_range(d.lo..=d.hi), rng.gen_range(d.lo..=d.hi)))
                .collect();
            checks.push(Check::at_most(
                "reparam.lipschitz",
                ANCHOR_LIPSCHITZ,
                g.max_pair_ratio(&pairs),
                1.0 + 1e-6,
            ));
        }
        Err(e) => checks.push(Check::errored("reparam.phi_end", ANCHOR_PHI, &e)),
    }
    let domain = Interval { lo: 0.0, hi: 1.0 };
    match zahorski_homeomorphism(&ClosedSet::from_points([0.5]), domain) {
        Ok(h) => {
            let at_m = h.derivative(0.5).unwrap_or(f64::INFINITY);
            let at_0 = h.derivative(0.0).unwrap_or(f64::NAN);
            checks.push(Check::at_most(
                "reparam.zahorski_on_m",
                ANCHOR_ZAHORSKI,
                at_m.abs(),
                1e-6,
            ));
            checks.push(Check::at_most(
                "reparam.zahorski_at_0",
                ANCHOR_ZAHORSKI,
                (at_0 - 2.0).abs(),
                1e-6,
            ));
        }
        Err(e) => checks.push(Check::errored("reparam.zahorski_on_m", ANCHOR_ZAHORSKI, &e)),
    }
    checks
}

/// `{0} ∪ {±2^{−n} : 1 ≤ n ≤ 60}`.
pub fn dyadic_point_set() -> ClosedSet {
    ClosedSet::from_points(std::iter::once(0.0).chain((1..=60).flat_map(|n| {
        let p = 2f64.powi(-n);
        [p, -p]
    })))
}

/// The piecewise-linear curve with slopes 1, 2, 1, 2 on quarters of `[0, 1]`.
pub fn slopes_1212() -> Curve {
    Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, |t| {
        let f = if t <= 0.25 {
            t
        } else if t <= 0.5 {
            0.25 + 2.0 * (t - 0.25)
        } else if t <= 0.75 {
            0.75 + (t - 0.5)
        } else {
            1.0 + 2.0 * (t - 0.75)
        };
        (f, 0.0)
    })
    .expect("euclidean norm is planar")
    .with_breakpoints(vec![0.25, 0.5, 0.75])
    .expect("interior breakpoints")
}

/// A random Lipschitz planar curve on `[0, 1]` made of 3 to 8 pieces, each
/// an affine map plus a sinusoid, glued continuously.
pub fn random_piecewise_curve(seed: u64) -> Curve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = rng.gen_range(3..=8);
    let mut knots: Vec<f64> = (1..pieces).map(|_| rng.gen_range(0.05..0.95)).collect();
    knots.sort_by(f64::total_cmp);
    knots.insert(0, 0.0);
    knots.push(1.0);
    let coeffs: Vec<[f64; 6]> = (0..pieces)
        .map(|_| {
            [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(1.0..20.0),
                rng.gen_range(0.0..PI),
            ]
        })
        .collect();
    let piece = move |c: &[f64; 6], u: f64| {
        let wave = (c[4] * u + c[5]).sin() - c[5].sin();
        (c[0] * u + c[2] * wave, c[1] * u + c[3] * wave)
    };
    let mut starts = vec![(0.0, 0.0)];
    for i in 0..pieces {
        let (x0, y0) = starts[i];
        let (dx, dy) = piece(&coeffs[i], knots[i + 1] - knots[i]);
        starts.push((x0 + dx, y0 + dy));
    }
    let breaks = knots[1..pieces].to_vec();
    let k = knots.clone();
    Curve::planar(0.0, 1.0, NormSpec::Euclidean2d, move |t| {
        let i = k.partition_point(|&x| x <= t).clamp(1, pieces) - 1;
        let (x0, y0) = starts[i];
        let (dx, dy) = piece(&coeffs[i], t - k[i]);
        (x0 + dx, y0 + dy)
    })
    .expect("euclidean norm is planar")
    .with_breakpoints(breaks)
    .expect("interior knots")
    .with_label(format!("random piecewise curve {seed}"))
}

/// Fraction of `grid` points where `mD^+` is finite but `md` is not
/// detected.
pub fn butterfly_fraction(curve: &Curve, grid: &[f64]) -> Result<f64> {
    use rayon::prelude::*;
    let ladder = Ladder::default_for(curve.domain());
    let bad = grid
        .par_iter()
        .map(|&x| {
            let est = derived_numbers(curve, x, &ladder)?;
            let finite_upper = est.plus_upper().is_some_and(|u| u.is_finite());
            Ok((finite_upper && metric_derivative_of(&est, 1e-3).is_none()) as usize)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(bad as f64 / grid.len() as f64)
}

fn porosity_suite(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let scales = Ladder::new(0.5, 0.5, 30).expect("valid ladder");
    match symmetric_porosity_lower_bound(&dyadic_point_set(), 0.0, &scales) {
        Ok(g) => checks.push(Check::at_least(
            "porosity.dyadic",
            ANCHOR_POROSITY,
            g.bound,
            0.5 - 1e-9,
        )),
        Err(e) => checks.push(Check::errored("porosity.dyadic", ANCHOR_POROSITY, &e)),
    }
    match build_cantor_hat_curve(&HatCurveSpec::default_schedule(3)) {
        Ok(hat) => {
            let set = hat.g_family_set(3).expect("depth 3 exists");
            let hat_scales = Ladder::new(1.0, 0.5, 40).expect("valid ladder");
            let mut least = f64::INFINITY;
            for code in hat_codes(3) {
                let bound = hat
                    .cantor_point(&code)
                    .and_then(|p| symmetric_porosity_lower_bound(&set, p.x, &hat_scales))
                    .map(|g| g.bound)
                    .unwrap_or(0.0);
                least = least.min(bound);
            }
            checks.push(
                Check::at_least(
                    "porosity.hat_cantor_points",
                    ANCHOR_POROSITY,
                    least,
                    f64::MIN_POSITIVE,
                )
                .with_detail("least bound over five depth-3 Cantor points"),
            );
        }
        Err(e) => checks.push(Check::errored(
            "porosity.hat_cantor_points",
            ANCHOR_POROSITY,
            &e,
        )),
    }
    let c = slopes_1212();
    let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    let ladder = Ladder::default_for(c.domain());
    match scan_exceptional_points(
        &c,
        &grid,
        &ladder,
        Predicate::UnilateralMismatch,
        &ScanOptions::default(),
    ) {
        Ok(found) => {
            let xs: Vec<f64> = found.iter().map(|f| f.x).collect();
            let exact = xs == [0.25, 0.5, 0.75];
            checks.push(
                Check::at_most(
                    "porosity.kink_scan",
                    ANCHOR_SCAN,
                    if exact { 0.0 } else { 1.0 },
                    0.0,
                )
                .with_detail(format!("flagged {xs:?}")),
            );
        }
        Err(e) => checks.push(Check::errored("porosity.kink_scan", ANCHOR_SCAN, &e)),
    }
    let grid: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let f = random_piecewise_curve(opts.seed.wrapping_mul(31).wrapping_add(k));
        worst = worst.max(butterfly_fraction(&f, &grid).unwrap_or(1.0));
    }
    checks.push(Check::at_most(
        "porosity.butterfly",
        ANCHOR_BUTTERFLY,
        worst,
        0.01,
    ));
    checks
}

/// The suite a check id such as `hat.spikes` belongs to.
pub fn suite_for_check(id: &str) -> Option<Suite> {
    Suite::ALL
        .into_iter()
        .find(|s| id.split('.').next() == Some(s.name()))
}
