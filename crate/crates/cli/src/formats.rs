//! JSON input files and the series literal grammar.
//!
//! Matrices use the column convention: `phi[i][j]` is the coefficient of
//! `e_i` in `φ(e_j)`. Rationals are strings such as `"-3/4"`.

use std::collections::BTreeMap;
use std::fmt;

use phigamma::arith::{fmt_q, parse_q, Q};
use phigamma::filtered::FilteredModule;
use phigamma::linalg::QMat;
use phigamma::robba::{LogRobbaElement, Profile, RobbaElement};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum FormatError {
    Parse(String),
    Validation(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Parse(m) => write!(f, "parse error: {m}"),
            FormatError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

type Res<T> = Result<T, FormatError>;

fn parse_err(m: impl Into<String>) -> FormatError {
    FormatError::Parse(m.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilEntry {
    pub jump: i64,
    /// Each generator is a coordinate vector of length `dim`.
    pub generators: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub p: u64,
    pub dim: usize,
    pub phi: Vec<Vec<String>>,
    #[serde(rename = "N", default)]
    pub n: Option<Vec<Vec<String>>>,
    pub filtration: Vec<FilEntry>,
}

fn rational(s: &str, at: &str) -> Res<Q> {
    parse_q(s).ok_or_else(|| parse_err(format!("{at}: '{s}' is not a rational number")))
}

fn matrix(rows: &[Vec<String>], d: usize, name: &str) -> Res<QMat> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(FormatError::Validation(format!("{name} must be a {d}x{d} matrix")));
    }
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        out.push(
            r.iter()
                .enumerate()
                .map(|(j, s)| rational(s, &format!("{name}[{i}][{j}]")))
                .collect::<Res<Vec<_>>>()?,
        );
    }
    Ok(QMat::from_rows(out))
}

fn strings(m: &QMat) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| fmt_q(m.get(i, j))).collect()).collect()
}

impl ModuleFile {
    pub fn to_module(&self) -> Res<FilteredModule> {
        let d = self.dim;
        let phi = matrix(&self.phi, d, "phi")?;
        let n = match &self.n {
            Some(rows) => matrix(rows, d, "N")?,
            None => QMat::zeros(d, d),
        };
        if d > 0 && phi.det() == Q::from_integer(0.into()) {
            return Err(FormatError::Validation("matrix phi is not invertible".into()));
        }
        let mut fil = Vec::new();
        for (k, e) in self.filtration.iter().enumerate() {
            let mut cols = Vec::new();
            for (g, v) in e.generators.iter().enumerate() {
                if v.len() != d {
                    return Err(FormatError::Validation(format!("filtration[{k}].generators[{g}] must have length {d}")));
                }
                cols.push(
                    v.iter()
                        .enumerate()
                        .map(|(i, s)| rational(s, &format!("filtration[{k}].generators[{g}][{i}]")))
                        .collect::<Res<Vec<_>>>()?,
                );
            }
            fil.push((e.jump, QMat::from_cols(&cols, d)));
        }
        FilteredModule::new(self.p, phi, n, fil).map_err(|e| FormatError::Validation(e.to_string()))
    }

    pub fn from_module(m: &FilteredModule) -> Self {
        let d = m.dim();
        ModuleFile {
            p: m.p,
            dim: d,
            phi: strings(&m.phi),
            n: Some(strings(&m.nmat)),
            filtration: m
                .filtration
                .iter()
                .map(|(i, g)| FilEntry {
                    jump: *i,
                    generators: (0..g.cols).map(|j| g.col(j).iter().map(fmt_q).collect()).collect(),
                })
                .collect(),
        }
    }
}

/// Window header of a series file; absent fields fall back to the defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileHeader {
    pub p: Option<u64>,
    #[serde(rename = "P")]
    pub prec: Option<i64>,
    pub kmin: Option<i64>,
    pub kmax: Option<i64>,
    #[serde(rename = "T")]
    pub t_prec: Option<i64>,
    pub n0: Option<u32>,
    pub n1: Option<u32>,
}

impl ProfileHeader {
    pub fn apply(&self, mut pr: Profile) -> Profile {
        if let Some(v) = self.p {
            pr.p = v;
        }
        if let Some(v) = self.prec {
            pr.prec = v;
        }
        if let Some(v) = self.kmin {
            pr.kmin = v;
        }
        if let Some(v) = self.kmax {
            pr.kmax = v;
        }
        if let Some(v) = self.t_prec {
            pr.t_prec = v;
        }
        if let Some(v) = self.n0 {
            pr.n0 = v;
        }
        if let Some(v) = self.n1 {
            pr.n1 = v;
        }
        pr
    }
}

/// A series given by a literal (`expr`) or by coefficient maps per power
/// of `ℓ_X`, over a common `t^{-m}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesBody {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    /// X-exponent to rational, the `ℓ_X^0` part.
    #[serde(default)]
    pub coeffs: BTreeMap<String, String>,
    /// Maps for `ℓ_X^1, ℓ_X^2, ...`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lx_coeffs: Vec<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lx_degree: Option<usize>,
    #[serde(default)]
    pub t_denominator: u32,
}

/// Candidate coordinates may be bare literals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesEntry {
    Literal(String),
    Body(SeriesBody),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    #[serde(default)]
    pub profile: ProfileHeader,
    #[serde(flatten)]
    pub series: SeriesBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateFile {
    #[serde(default)]
    pub profile: ProfileHeader,
    pub module: ModuleFile,
    /// Coordinates on the Frobenius-slope basis.
    pub x: Vec<SeriesEntry>,
}

fn coeff_map(m: &BTreeMap<String, String>, pr: Profile) -> Res<RobbaElement> {
    let mut out = BTreeMap::new();
    for (k, v) in m {
        let e: i64 = k.trim().parse().map_err(|_| parse_err(format!("exponent '{k}' is not an integer")))?;
        if e < pr.kmin || e > pr.kmax {
            return Err(FormatError::Validation(format!("exponent {e} outside the window [{}, {}]", pr.kmin, pr.kmax)));
        }
        let c = rational(v, &format!("coefficient of X^{e}"))?;
        if fmt_q(&c) != v.trim().trim_start_matches('+') {
            return Err(FormatError::Validation(format!("coefficient '{v}' of X^{e} is not in lowest terms")));
        }
        out.insert(e, c);
    }
    Ok(RobbaElement::from_laurent(pr, &out, None))
}

impl SeriesBody {
    pub fn to_element(&self, pr: Profile) -> Res<LogRobbaElement> {
        if let Some(e) = &self.expr {
            if !self.coeffs.is_empty() || !self.lx_coeffs.is_empty() {
                return Err(FormatError::Validation("give either expr or coefficient maps, not both".into()));
            }
            return Ok(parse_series(e, pr)?.div_t(self.t_denominator));
        }
        if let Some(g) = self.lx_degree {
            if g != self.lx_coeffs.len() {
                return Err(FormatError::Validation(format!(
                    "lx_degree is {g} but {} lx_coeffs maps are given",
                    self.lx_coeffs.len()
                )));
            }
        }
        let mut poly = vec![coeff_map(&self.coeffs, pr)?];
        for m in &self.lx_coeffs {
            poly.push(coeff_map(m, pr)?);
        }
        Ok(LogRobbaElement::new(pr, self.t_denominator, poly))
    }
}

impl SeriesEntry {
    pub fn to_element(&self, pr: Profile) -> Res<LogRobbaElement> {
        match self {
            SeriesEntry::Literal(s) => parse_series(s, pr),
            SeriesEntry::Body(b) => b.to_element(pr),
        }
    }
}

/// Parse a sum of terms `c*X^a*t^b*l^k`, where `c` is a rational, `X` the
/// variable, `t = log(1+X)` and `l = ℓ_X`. Exponents of `X` and `t` may be
/// negative. Example: `3/2*X^-1 - t + 2*l*X^2`.
pub fn parse_series(s: &str, pr: Profile) -> Res<LogRobbaElement> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_err("empty series literal"));
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && prev.is_some() && prev != Some('^') && prev != Some('*') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = Some(ch);
    }
    terms.push(cur);
    let mut acc = LogRobbaElement::zero(pr);
    for t in terms {
        acc = acc.add(&parse_term(&t, pr)?);
    }
    Ok(acc)
}

fn parse_term(t: &str, pr: Profile) -> Res<LogRobbaElement> {
    let (sign, body) = match t.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() {
        return Err(parse_err(format!("dangling sign in '{t}'")));
    }
    let mut coef = Q::from_integer(sign.into());
    let (mut xe, mut te, mut le) = (0i64, 0i64, 0u32);
    for f in body.split('*') {
        if f.is_empty() {
            return Err(parse_err(format!("empty factor in '{t}'")));
        }
        let (base, exp) = match f.split_once('^') {
            Some((b, e)) => (b, Some(e.parse::<i64>().map_err(|_| parse_err(format!("bad exponent in '{f}'")))?)),
            None => (f, None),
        };
        match base {
            "X" => xe += exp.unwrap_or(1),
            "t" => te += exp.unwrap_or(1),
            "l" => {
                let e = exp.unwrap_or(1);
                if e < 0 {
                    return Err(parse_err("negative power of l"));
                }
                le += e as u32;
            }
            _ => {
                if exp.is_some() {
                    return Err(parse_err(format!("cannot raise '{base}' to a power")));
                }
                coef *= rational(base, &format!("term '{t}'"))?;
            }
        }
    }
    if xe < pr.kmin || xe > pr.kmax {
        return Err(FormatError::Validation(format!("X^{xe} outside the window [{}, {}]", pr.kmin, pr.kmax)));
    }
    let mut x = LogRobbaElement::from_robba(RobbaElement::monomial(pr, coef, xe));
    if le > 0 {
        x = x.mul(&LogRobbaElement::ell(pr).pow(le));
    }
    Ok(if te >= 0 { x.mul_t(te as u32) } else { x.div_t((-te) as u32) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use phigamma::arith::q;

    fn example1() -> &'static str {
        r#"{"p": 2, "dim": 2, "phi": [["1","0"],["0","2"]], "N": [["0","0"],["0","0"]],
            "filtration": [{"jump": 0, "generators": [["1","0"],["0","1"]]},
                           {"jump": 1, "generators": [["1","1"]]}]}"#
    }

    #[test]
    fn module_round_trip() {
        let f: ModuleFile = serde_json::from_str(example1()).unwrap();
        let m = f.to_module().unwrap();
        assert_eq!(m.tn_th(), (q(1), 1));
        let back = ModuleFile::from_module(&m);
        assert_eq!(back.to_module().unwrap(), m);
        let again: ModuleFile = serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn singular_phi_is_named() {
        let s = r#"{"p": 2, "dim": 1, "phi": [["0"]], "filtration": []}"#;
        let f: ModuleFile = serde_json::from_str(s).unwrap();
        let e = f.to_module().unwrap_err().to_string();
        assert!(e.contains("phi"), "{e}");
    }

    #[test]
    fn series_file_for_q() {
        let s = r#"{"profile": {"p": 2}, "coeffs": {"0": "2", "1": "1"}}"#;
        let f: SeriesFile = serde_json::from_str(s).unwrap();
        let pr = f.profile.apply(Profile::default());
        let x = f.series.to_element(pr).unwrap().as_robba().unwrap();
        assert_eq!(x.laurent(0).unwrap().to_map(), BTreeMap::from([(0, q(2)), (1, q(1))]));
    }

    #[test]
    fn literals() {
        let pr = Profile::default();
        let a = parse_series("2 + X", pr).unwrap();
        let b = SeriesBody {
            coeffs: BTreeMap::from([("0".into(), "2".into()), ("1".into(), "1".into())]),
            ..Default::default()
        };
        assert_eq!(a, b.to_element(pr).unwrap());
        let t = parse_series("t", pr).unwrap();
        assert_eq!(t, LogRobbaElement::from_robba(RobbaElement::t(pr)));
        let inv = parse_series("3/2*X^-1 - t^-1", pr).unwrap();
        assert_eq!(inv.t_denominator(), 1);
        let l = parse_series("l*X^2", pr).unwrap();
        assert_eq!(l.log_degree(), 1);
        assert!(parse_series("2*", pr).is_err());
        assert!(parse_series("X^100", pr).is_err());
        assert!(parse_series("", pr).is_err());
    }

    #[test]
    fn lowest_terms_required() {
        let s = r#"{"coeffs": {"0": "2/4"}}"#;
        let f: SeriesFile = serde_json::from_str(s).unwrap();
        assert!(f.series.to_element(Profile::default()).is_err());
    }
}
