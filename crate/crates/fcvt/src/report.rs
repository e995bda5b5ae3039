//! JSON and text renderings of test, simulation and validation output.

use std::fmt::Write as _;

use fcvt_core::{Sidedness, TestReport};
use serde::Serialize;

use crate::sim::SimulationResult;
use crate::validation::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct ProfileJson {
    pub M4: f64,
    pub M6: f64,
    pub M8: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReportJson {
    pub n: usize,
    pub p: usize,
    #[serde(rename = "T")]
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub z: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub profile: ProfileJson,
    #[serde(rename = "tr_P_hadamard")]
    pub tr_p_hadamard: f64,
}

impl TestReportJson {
    pub fn new(r: &TestReport, alpha: f64) -> Self {
        Self {
            n: r.n,
            p: r.p,
            t: r.t,
            a: r.a,
            b: r.b,
            z: r.z,
            p_value: r.p_value,
            reject: r.rejects(alpha),
            alpha,
            profile: ProfileJson {
                M4: r.profile.m4,
                M6: r.profile.m6,
                M8: r.profile.m8,
            },
            tr_p_hadamard: r.t1,
        }
    }
}

/// `x` rounded to six significant digits, switching to exponent notation
/// outside `[1e-4, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        sci
    }
}

pub fn test_report_text(r: &TestReport, alpha: f64) -> String {
    let side = match r.sidedness {
        Sidedness::Upper => "upper tail",
        Sidedness::TwoSided => "two-sided",
    };
    let mut s = String::new();
    let _ = writeln!(s, "homoscedasticity test ({side})");
    let _ = writeln!(s, "  n              {}", r.n);
    let _ = writeln!(s, "  p              {}", r.p);
    let _ = writeln!(s, "  T              {}", sig6(r.t));
    let _ = writeln!(s, "  a              {}", sig6(r.a));
    let _ = writeln!(s, "  b              {}", sig6(r.b));
    let _ = writeln!(s, "  z              {}", sig6(r.z));
    let _ = writeln!(s, "  p_value        {}", sig6(r.p_value));
    let _ = writeln!(
        s,
        "  reject         {} (alpha {})",
        if r.rejects(alpha) { "yes" } else { "no" },
        sig6(alpha)
    );
    let _ = writeln!(
        s,
        "  profile        {} (M4 {}, M6 {}, M8 {})",
        r.profile_name,
        sig6(r.profile.m4),
        sig6(r.profile.m6),
        sig6(r.profile.m8)
    );
    let _ = writeln!(s, "  tr(P∘P)        {}", sig6(r.t1));
    s
}

pub fn simulation_text(r: &SimulationResult) -> String {
    let c = &r.config;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "n={} p={} design={} error={} model={} reps={} alpha={} seed={}{}",
        c.n,
        c.p,
        c.design_law,
        c.error_law,
        c.model,
        c.reps,
        sig6(c.alpha),
        c.seed,
        if c.fixed_design { " fixed-design" } else { "" }
    );
    let _ = writeln!(
        s,
        "  rejection_rate {} ({} of {})",
        sig6(r.rejection_rate),
        r.rejections,
        r.reps_used
    );
    let _ = writeln!(
        s,
        "  wilson 95%     [{}, {}]",
        sig6(r.wilson_ci[0]),
        sig6(r.wilson_ci[1])
    );
    let _ = writeln!(s, "  mean T         {}", sig6(r.mean_t));
    let _ = writeln!(s, "  mean a         {}", sig6(r.mean_a));
    s
}

pub fn validation_text(r: &ValidationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "two-point enumeration, n={} p={} sigma={} seed={}",
        r.n, r.p, r.sigma, r.seed
    );
    let _ = writeln!(
        s,
        "{:<8} {:>14} {:>14} {:>12}  pass",
        "quantity", "closed_form", "oracle", "rel_error"
    );
    for row in &r.rows {
        let pass = match row.pass {
            Some(true) => "ok".to_owned(),
            Some(false) => "FAIL".to_owned(),
            None => format!("ratio {}", sig6(row.closed_form / row.oracle)),
        };
        let _ = writeln!(
            s,
            "{:<8} {:>14} {:>14} {:>12}  {}",
            row.quantity,
            sig6(row.closed_form),
            sig6(row.oracle),
            format!("{:.2e}", row.rel_error),
            pass
        );
    }
    let _ = writeln!(s, "{}", if r.passed { "all exact rows pass" } else { "FAILED" });
    s
}
