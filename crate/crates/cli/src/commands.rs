//! Command implementations. Each returns a report with a text form and a
//! JSON form; `ok = false` maps to exit code 1.

use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use phigamma::arith::{fmt_q, Q};
use phigamma::construction::{det_slope_certificate, glue, recover_filtered, same_filtered, verify_module, Check};
use phigamma::filtered::{hn_slopes, is_admissible, newton_slopes, FilteredModule};
use phigamma::linalg::QMat;
use phigamma::membership::{membership as decide, zero_order_form, Condition, SemistableData};
use phigamma::robba::Profile;
use phigamma::selftest;

use crate::formats::{CandidateFile, FormatError, ModuleFile, ProfileHeader, SeriesFile};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, paths or flag combinations. Exit code 2.
    Usage(String),
    /// Malformed input or a failing computation. Exit code 1.
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Failure(m) => ("failure", m),
        };
        json!({ "error": kind, "message": msg })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<phigamma::Error> for CliError {
    fn from(e: phigamma::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Failure(e.to_string())
    }
}

type Res<T> = Result<T, CliError>;

pub struct Report {
    pub text: Vec<String>,
    pub json: Value,
    pub ok: bool,
}

/// Profile overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub p: Option<u64>,
    pub prec: Option<i64>,
    pub t_prec: Option<i64>,
    pub window: Option<(i64, i64)>,
    pub levels: Option<(u32, u32)>,
}

impl Flags {
    /// Defaults, then the file header, then the flags. `fixed_p` is the
    /// prime a module file commits to.
    pub fn profile(&self, header: &ProfileHeader, fixed_p: Option<u64>) -> Res<Profile> {
        let mut pr = header.apply(Profile::default());
        if let Some(fp) = fixed_p {
            if let Some(h) = header.p.filter(|&h| h != fp) {
                return Err(CliError::Failure(format!("validation error: profile p = {h} but module p = {fp}")));
            }
            if let Some(x) = self.p.filter(|&x| x != fp) {
                return Err(CliError::Usage(format!("--p {x} conflicts with p = {fp} in the input file")));
            }
            pr.p = fp;
        } else if let Some(p) = self.p {
            pr.p = p;
        }
        if let Some(v) = self.prec {
            pr.prec = v;
        }
        if let Some(v) = self.t_prec {
            pr.t_prec = v;
        }
        if let Some((a, b)) = self.levels {
            pr.n0 = a;
            pr.n1 = b;
        }
        match self.window {
            Some((a, b)) => {
                pr.kmin = a;
                pr.kmax = b;
            }
            // an unset window grows with p so that larger primes work out of the box
            None if header.kmax.is_none() => pr.kmax = pr.kmax.max(pr.p as i64 * pr.t_prec),
            None => {}
        }
        pr.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(pr)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Res<T> {
    let s = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| CliError::Failure(format!("parse error in {}: {e}", path.display())))
}

fn load_module(path: &Path) -> Res<FilteredModule> {
    let f: ModuleFile = read_json(path)?;
    Ok(f.to_module()?)
}

fn basis_names(d: usize) -> Vec<String> {
    if d <= 3 {
        ["e", "f", "g"][..d].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=d).map(|i| format!("e{i}")).collect()
    }
}

/// A vector as a combination of the basis names, scaled so that its first
/// nonzero coordinate is 1.
fn vector_name(v: &[Q], names: &[String]) -> String {
    let Some(lead) = v.iter().find(|c| !c.is_zero()) else {
        return "0".into();
    };
    let mut out = String::new();
    for (c, n) in v.iter().zip(names) {
        let c = c / lead;
        if c.is_zero() {
            continue;
        }
        let neg = c < Q::zero();
        let a = if neg { -c } else { c };
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if !a.is_one() {
            if a.is_integer() {
                out.push_str(&fmt_q(&a));
            } else {
                out.push_str(&format!("({})", fmt_q(&a)));
            }
        }
        out.push_str(n);
    }
    out
}

fn span_name(basis: &QMat) -> String {
    let names = basis_names(basis.rows);
    if basis.cols == basis.rows && basis.rows > 0 {
        return "D".into();
    }
    let cols: Vec<String> = (0..basis.cols).map(|j| vector_name(&basis.col(j), &names)).collect();
    format!("span({})", cols.join(", "))
}

fn slope_list(s: &[Q]) -> String {
    format!("[{}]", s.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

fn slope_strings(s: &[Q]) -> Vec<String> {
    s.iter().map(fmt_q).collect()
}

fn check_json(c: &Check) -> Value {
    json!({ "name": c.name, "passed": c.passed, "detail": c.detail })
}

fn mark(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn analyze(_flags: &Flags, path: &Path) -> Res<Report> {
    let m = load_module(path)?;
    let (tn, th) = m.tn_th();
    let adm = is_admissible(&m)?;
    let sl = hn_slopes(&m)?;
    let mut text = vec![
        format!("p = {}, dim = {}", m.p, m.dim()),
        format!("t_N = {}, t_H = {}", fmt_q(&tn), th),
    ];
    let witness = adm.witness.as_ref().map(|(w, deg)| {
        json!({ "span": span_name(&w.basis), "basis": w.basis.to_strings(), "degree": fmt_q(deg) })
    });
    match &adm.witness {
        None => text.push(format!("admissible: true; slopes: {}", slope_list(&sl.slopes))),
        Some((w, _)) => text.push(format!(
            "admissible: false; witness: {}; slopes: {}",
            span_name(&w.basis),
            slope_list(&sl.slopes)
        )),
    }
    if let Some(n) = &sl.note {
        text.push(format!("note: {n}"));
    }
    let json = json!({
        "p": m.p,
        "dim": m.dim(),
        "t_N": fmt_q(&tn),
        "t_H": th,
        "admissible": adm.admissible,
        "witness": witness,
        "slopes": slope_strings(&sl.slopes),
        "note": sl.note,
    });
    Ok(Report { text, json, ok: true })
}

pub fn slopes(_flags: &Flags, path: &Path) -> Res<Report> {
    let m = load_module(path)?;
    let sl = hn_slopes(&m)?;
    let nw = newton_slopes(&m.phi, m.p)?;
    let mut text = vec![format!("HN slopes: {}", slope_list(&sl.slopes))];
    for (k, s) in sl.steps.iter().enumerate() {
        text.push(format!("  step {}: {} with slope {}", k + 1, span_name(&s.basis), fmt_q(&s.slope)));
    }
    text.push(format!("Newton slopes: {}", slope_list(&nw.slopes)));
    if let Some(n) = &sl.note {
        text.push(format!("note: {n}"));
    }
    let steps: Vec<Value> = sl
        .steps
        .iter()
        .map(|s| json!({ "span": span_name(&s.basis), "basis": s.basis.to_strings(), "slope": fmt_q(&s.slope) }))
        .collect();
    let json = json!({
        "hn_slopes": slope_strings(&sl.slopes),
        "steps": steps,
        "newton_slopes": slope_strings(&nw.slopes),
        "note": sl.note,
    });
    Ok(Report { text, json, ok: true })
}

fn module_and_profile(flags: &Flags, path: &Path) -> Res<(FilteredModule, Profile)> {
    let m = load_module(path)?;
    let pr = flags.profile(&ProfileHeader::default(), Some(m.p))?;
    Ok((m, pr))
}

pub fn construct(flags: &Flags, path: &Path) -> Res<Report> {
    let (m, pr) = module_and_profile(flags, path)?;
    let gm = glue(&m, pr)?;
    let d = gm.dim();
    let names = basis_names(d);
    let mut text = vec![format!("glued over levels {}:{} with T = {}", pr.n0, pr.n1, pr.t_prec)];
    let mut sections = Vec::new();
    for k in 0..d {
        let coords: Vec<String> = (0..d).map(|i| format!("{:?}", gm.r.get(i, k))).collect();
        let body: Vec<String> = coords.iter().zip(&names).map(|(c, n)| format!("{n}: {c}")).collect();
        text.push(format!("g{} = t^{} * ({})", k + 1, gm.b[k], body.join(", ")));
        sections.push(json!({ "t_power": gm.b[k], "coords": coords }));
    }
    let phi: Vec<Vec<String>> =
        gm.phi_matrix.iter().map(|row| row.iter().map(|x| format!("{x:?}")).collect()).collect();
    text.push("phi on the sections (column k is phi(g_k)):".into());
    for row in &phi {
        text.push(format!("  [{}]", row.join(", ")));
    }
    let report = verify_module(&gm);
    for c in &report.checks {
        text.push(format!("{} {}: {}", mark(c.passed), c.name, c.detail));
    }
    let (tn, th) = m.tn_th();
    let expected = tn - phigamma::arith::q(th);
    let (cert_ok, cert) = match det_slope_certificate(&gm) {
        Ok(s) => {
            let ok = s == expected;
            text.push(format!(
                "{} certificate: det phi = p^{} * unit, t_N - t_H = {}",
                mark(ok),
                fmt_q(&s),
                fmt_q(&expected)
            ));
            (ok, json!({ "slope": fmt_q(&s), "t_N_minus_t_H": fmt_q(&expected), "passed": ok }))
        }
        Err(e) => {
            text.push(format!("FAIL certificate: {e}"));
            (false, json!({ "error": e.to_string(), "t_N_minus_t_H": fmt_q(&expected), "passed": false }))
        }
    };
    let json = json!({
        "profile": pr,
        "sections": sections,
        "phi_matrix": phi,
        "checks": report.checks.iter().map(check_json).collect::<Vec<_>>(),
        "certificate": cert,
        "diagnostics": gm.diagnostics,
    });
    Ok(Report { text, json, ok: report.all_passed() && cert_ok })
}

pub fn verify(flags: &Flags, path: &Path) -> Res<Report> {
    let (m, pr) = module_and_profile(flags, path)?;
    let gm = glue(&m, pr)?;
    let report = verify_module(&gm);
    let text = report.checks.iter().map(|c| format!("{} {}: {}", mark(c.passed), c.name, c.detail)).collect();
    let json = json!({
        "profile": pr,
        "checks": report.checks.iter().map(check_json).collect::<Vec<_>>(),
        "passed": report.all_passed(),
    });
    Ok(Report { text, json, ok: report.all_passed() })
}

pub fn recover(flags: &Flags, path: &Path) -> Res<Report> {
    let (m, pr) = module_and_profile(flags, path)?;
    let gm = glue(&m, pr)?;
    let rec = recover_filtered(&gm)?;
    let same = same_filtered(&m, &rec);
    let file = ModuleFile::from_module(&rec);
    let mut text = vec!["recovered module:".to_string()];
    text.extend(format!("{rec:?}").lines().map(|l| format!("  {l}")));
    text.push(format!("matches input: {same}"));
    let json = json!({ "profile": pr, "module": file, "matches_input": same });
    Ok(Report { text, json, ok: same })
}

fn load_series(flags: &Flags, path: &Path) -> Res<(phigamma::robba::LogRobbaElement, Profile)> {
    let f: SeriesFile = read_json(path)?;
    let pr = flags.profile(&f.profile, None)?;
    Ok((f.series.to_element(pr)?, pr))
}

pub fn ord(flags: &Flags, path: &Path) -> Res<Report> {
    let (x, pr) = load_series(flags, path)?;
    let est = x.ord_estimate()?;
    let text = vec![format!("ord = {est}")];
    let value = if est.value.is_finite() { json!(est.value) } else { Value::Null };
    let json = json!({
        "ord": est.exact.as_ref().map(fmt_q),
        "estimate": value,
        "window_limited": true,
        "kmax": pr.kmax,
    });
    Ok(Report { text, json, ok: true })
}

pub fn iota(flags: &Flags, path: &Path, level: u32) -> Res<Report> {
    let (x, pr) = load_series(flags, path)?;
    pr.check_level(level)
        .map_err(|_| CliError::Usage(format!("--level {level} is outside the levels {}:{}", pr.n0, pr.n1)))?;
    let y = x.iota(level)?;
    let mut text = vec![format!("iota_{level}: coefficients in K_{level} written in powers of pi = zeta - 1")];
    let mut coeffs = Vec::new();
    for (i, s) in y.coeffs.iter().enumerate().take(y.degree() + 1) {
        text.push(format!("L^{i}: {s:?}"));
        let terms: Vec<Value> = s
            .terms()
            .filter(|(_, c)| c.c.iter().any(|x| !x.is_zero()))
            .map(|(k, c)| json!({ "t": k, "coeff": c.c.iter().map(fmt_q).collect::<Vec<_>>() }))
            .collect();
        coeffs.push(json!({ "terms": terms, "trunc": s.trunc }));
    }
    let json = json!({ "level": level, "profile": pr, "log_coeffs": coeffs });
    Ok(Report { text, json, ok: true })
}

fn cond_json(c: &Condition) -> Value {
    json!({ "label": c.label, "passed": c.passed, "detail": c.detail })
}

pub fn membership(flags: &Flags, path: &Path, zero_order: bool) -> Res<Report> {
    let f: CandidateFile = read_json(path)?;
    let m = f.module.to_module()?;
    let pr = flags.profile(&f.profile, Some(m.p))?;
    let data = SemistableData::new(&m)?;
    let xs = f.x.iter().map(|e| e.to_element(pr)).collect::<Result<Vec<_>, _>>()?;
    let v = if zero_order { zero_order_form(&xs, &data, pr)? } else { decide(&xs, &data, pr)? };
    let mut text = vec![format!("member: {}", v.member)];
    let all: Vec<&Condition> = std::iter::once(&v.cond1).chain(&v.cond2).chain(&v.cond3).collect();
    for c in &all {
        text.push(format!("{} {}: {}", mark(c.passed), c.label, c.detail));
    }
    if v.window_limited {
        text.push(format!(
            "note: conditions were checked on X-exponents up to {} and levels {}:{}",
            pr.kmax, pr.n0, pr.n1
        ));
    }
    let json = json!({
        "profile": pr,
        "member": v.member,
        "window_limited": v.window_limited,
        "form": if zero_order { "zero-order" } else { "general" },
        "cond1": cond_json(&v.cond1),
        "cond2": v.cond2.iter().map(cond_json).collect::<Vec<_>>(),
        "cond3": v.cond3.iter().map(cond_json).collect::<Vec<_>>(),
    });
    Ok(Report { text, json, ok: true })
}

pub fn selftest(flags: &Flags, ids: &[u32]) -> Res<Report> {
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(CliError::Usage(format!("criterion {bad} does not exist; use 1 to 10")));
    }
    let pr = flags.profile(&ProfileHeader::default(), None)?;
    let results = selftest::run(pr, ids);
    let mut text: Vec<String> = results
        .iter()
        .map(|r| format!("{} criterion {:>2}: {} -- {}", mark(r.passed), r.id, r.title, r.detail))
        .collect();
    let passed = results.iter().filter(|r| r.passed).count();
    text.push(format!("{passed}/{} criteria passed", results.len()));
    let json = json!({
        "profile": pr,
        "criteria": results
            .iter()
            .map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed, "detail": r.detail }))
            .collect::<Vec<_>>(),
        "passed": passed,
        "total": results.len(),
    });
    Ok(Report { text, json, ok: passed == results.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use phigamma::arith::q;

    #[test]
    fn names() {
        let n = basis_names(2);
        assert_eq!(vector_name(&[q(1), q(0)], &n), "e");
        assert_eq!(vector_name(&[q(2), q(-4)], &n), "e-2f");
        assert_eq!(vector_name(&[q(0), q(-3)], &n), "f");
        assert_eq!(vector_name(&[q(2), q(1)], &n), "e+(1/2)f");
        assert_eq!(basis_names(4)[3], "e4");
        assert_eq!(span_name(&QMat::from_rows(vec![vec![q(1)], vec![q(0)]])), "span(e)");
    }

    #[test]
    fn flags_override_header() {
        let h = ProfileHeader { kmax: Some(80), ..Default::default() };
        let f = Flags { levels: Some((1, 2)), ..Default::default() };
        let pr = f.profile(&h, Some(3)).unwrap();
        assert_eq!((pr.p, pr.kmax, pr.n1), (3, 80, 2));
        let clash = Flags { p: Some(5), ..Default::default() };
        assert!(matches!(clash.profile(&h, Some(3)), Err(CliError::Usage(_))));
        let big = Flags { p: Some(11), ..Default::default() };
        assert_eq!(big.profile(&ProfileHeader::default(), None).unwrap().kmax, 88);
    }
}
