use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::glue::{glue_with_gamma, t_power_times, LogMat, PhiGammaModule};
use super::polymat::unimodular_inverse;
use crate::arith::{q, QPoly, Q};
use crate::error::{Error, Result};
use crate::filtered::FilteredModule;
use crate::linalg::{Matrix, QMat};
use crate::local_fields::{field, TSeries, TVal};
use crate::robba::LogRobbaElement;

pub type TMat = Matrix<TSeries>;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, res: std::result::Result<String, String>) {
        let (passed, detail) = match res {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check { name: name.into(), passed, detail });
    }
}

fn iota_log(x: &LogRobbaElement, n: u32) -> Result<TSeries> {
    let s = x.iota(n)?;
    if s.degree() > 0 {
        return Err(Error::Unsupported("localization of an element involving l_X".into()));
    }
    Ok(s.coeffs.into_iter().next().unwrap())
}

pub fn iota_mat(m: &LogMat, n: u32) -> Result<TMat> {
    let mut rows = Vec::new();
    for row in m {
        rows.push(row.iter().map(|x| iota_log(x, n)).collect::<Result<Vec<_>>>()?);
    }
    Ok(TMat::from_rows(rows))
}

fn tmat_inverse(m: &TMat) -> Result<TMat> {
    let det = m.det_cofactor();
    let di = det.invert()?;
    Ok(m.adjugate().map(|x| x.mul(&di)))
}

fn rational_times(a: &QMat, m: &TMat) -> TMat {
    TMat::from_fn(a.rows, m.cols, |i, j| {
        let mut acc = TSeries::zero(&m.get(0, j).field, m.get(0, j).trunc);
        for k in 0..a.cols {
            let c = a.get(i, k);
            if !c.is_zero() {
                acc = acc.add(&m.get(k, j).scale(c));
            }
        }
        acc
    })
}

fn lift_mat(m: &TMat, n: u32) -> TMat {
    let up = field(m.get(0, 0).field.p, n + 1);
    m.map(|s| s.lift(&up))
}

fn min_trunc(m: &TMat) -> i64 {
    (0..m.rows).flat_map(|i| (0..m.cols).map(move |j| (i, j))).map(|(i, j)| m.get(i, j).trunc).min().unwrap_or(i64::MAX)
}

fn all_integral(m: &TMat) -> Option<(usize, usize)> {
    (0..m.rows).flat_map(|i| (0..m.cols).map(move |j| (i, j))).find(|&(i, j)| !m.get(i, j).is_integral())
}

fn eq_mod_mat(a: &TMat, b: &TMat, k: i64) -> bool {
    (0..a.rows).all(|i| (0..a.cols).all(|j| a.get(i, j).eq_mod(b.get(i, j), k)))
}

fn unit_det(m: &TMat) -> std::result::Result<(), String> {
    match m.det_cofactor().valuation() {
        TVal::Exact(0) => Ok(()),
        v => Err(format!("determinant has t-valuation {v}")),
    }
}

/// Whether a matrix lies in `GL_d(K_n[[t]])` at the known precision.
fn in_gl(m: &TMat) -> std::result::Result<(), String> {
    if let Some((i, j)) = all_integral(m) {
        return Err(format!("entry ({}, {}) has a pole", i + 1, j + 1));
    }
    unit_det(m)
}

/// Pole-adjusted precision `T' = T - 2h`.
pub fn working_precision(m: &PhiGammaModule) -> i64 {
    (m.profile.t_prec - 2 * m.lattices.h).max(1)
}

/// Lattice coordinates `diag(t^{h_j}) (Φ^n B)^{-1} ι_n(G)` of the sections.
fn lattice_coords(m: &PhiGammaModule, g: &LogMat, n: u32) -> Result<TMat> {
    let ig = iota_mat(g, n)?;
    let bn = m.lattices.level(n).unwrap();
    let inv = bn.inverse().unwrap();
    let y = rational_times(&inv, &ig);
    Ok(TMat::from_fn(y.rows, y.cols, |i, j| y.get(i, j).shift(m.lattices.weights[i])))
}

fn frob_vec(m: &PhiGammaModule, v: &[LogRobbaElement]) -> Result<Vec<LogRobbaElement>> {
    let fv = v.iter().map(|x| x.frobenius()).collect::<Result<Vec<_>>>()?;
    let d = v.len();
    Ok((0..d)
        .map(|i| {
            let mut acc = LogRobbaElement::zero(m.profile);
            for (k, y) in fv.iter().enumerate() {
                let c = m.module.phi.get(i, k);
                if !c.is_zero() {
                    acc = acc.add(&y.scale(c));
                }
            }
            acc
        })
        .collect())
}

fn columns(g: &LogMat) -> Vec<Vec<LogRobbaElement>> {
    let d = g.len();
    (0..d).map(|k| (0..d).map(|i| g[i][k].clone()).collect()).collect()
}

fn from_columns(cols: &[Vec<LogRobbaElement>]) -> LogMat {
    let d = cols.len();
    (0..d).map(|i| (0..d).map(|k| cols[k][i].clone()).collect()).collect()
}

fn check_lattice(m: &PhiGammaModule, g: &LogMat) -> std::result::Result<String, String> {
    for n in m.profile.levels() {
        let y = lattice_coords(m, g, n).map_err(|e| e.to_string())?;
        in_gl(&y).map_err(|e| format!("level {n}: {e}"))?;
    }
    Ok(format!("sections generate the lattice at levels {}..{}", m.profile.n0, m.profile.n1))
}

fn check_phi(m: &PhiGammaModule, g: &LogMat) -> std::result::Result<String, String> {
    let pr = m.profile;
    let tp = working_precision(m);
    let fg = columns(g).iter().map(|c| frob_vec(m, c)).collect::<Result<Vec<_>>>().map_err(|e| e.to_string())?;
    let fg = from_columns(&fg);
    for n in pr.n0..pr.n1 {
        let lhs = iota_mat(&fg, n + 1).map_err(|e| e.to_string())?;
        let rhs = rational_times(&m.module.phi, &lift_mat(&iota_mat(g, n).map_err(|e| e.to_string())?, n));
        let k = tp.min(min_trunc(&lhs)).min(min_trunc(&rhs));
        if !eq_mod_mat(&lhs, &rhs, k) {
            return Err(format!("transport from level {n} to {} fails", n + 1));
        }
    }
    for n in pr.n0 + 1..=pr.n1 {
        let f = iota_mat(&m.phi_matrix, n).map_err(|e| e.to_string())?;
        in_gl(&f).map_err(|e| format!("phi-matrix at level {n}: {e}"))?;
        let ig = iota_mat(g, n).map_err(|e| e.to_string())?;
        let lhs = iota_mat(&fg, n).map_err(|e| e.to_string())?;
        let rhs = ig.mul(&f);
        let k = tp.min(min_trunc(&lhs)).min(min_trunc(&rhs));
        if !eq_mod_mat(&lhs, &rhs, k) {
            return Err(format!("phi(G) != G F at level {n}"));
        }
    }
    Ok("phi-compatible; phi-matrix invertible over the window ring".into())
}

fn check_gamma(m: &PhiGammaModule) -> std::result::Result<String, String> {
    let Some((a, gm)) = &m.gamma_matrix else {
        return Ok("no gamma matrix requested".into());
    };
    for n in m.profile.levels() {
        let gi = iota_mat(gm, n).map_err(|e| e.to_string())?;
        in_gl(&gi).map_err(|e| format!("level {n}: {e}"))?;
    }
    Ok(format!("gamma_{a} matrix in GL_d at every level"))
}

fn check_connection(m: &PhiGammaModule, g: &LogMat) -> std::result::Result<String, String> {
    let tp = working_precision(m);
    let ng: LogMat = g.iter().map(|row| row.iter().map(|x| x.nabla()).collect()).collect();
    for n in m.profile.levels() {
        let ig = iota_mat(g, n).map_err(|e| e.to_string())?;
        let ign = iota_mat(&ng, n).map_err(|e| e.to_string())?;
        let ginv = tmat_inverse(&ig).map_err(|e| e.to_string())?;
        let a = ginv.mul(&ign);
        if let Some((i, j)) = all_integral(&a) {
            return Err(format!("level {n}: connection matrix entry ({}, {}) has a pole", i + 1, j + 1));
        }
        // the columns of G^{-1} are horizontal: t dC/dt + A C = 0
        let dc = ginv.map(|s| s.derivative().shift(1));
        let res = dc.add(&a.mul(&ginv));
        let k = tp.min(min_trunc(&res));
        let lo = (0..res.rows).flat_map(|i| (0..res.cols).map(move |j| (i, j)));
        for (i, j) in lo {
            let s = res.get(i, j);
            let start = s.valuation().lower_bound().min(0);
            if (start..k).any(|e| !s.coeff(e).is_zero()) {
                return Err(format!("level {n}: horizontal section {} fails the recursion", j + 1));
            }
        }
    }
    Ok("connection regular; d horizontal sections at every level".into())
}

/// Sections of a second glue run on the module rewritten in another basis,
/// brought back to the original coordinates.
fn alternate_sections(m: &PhiGammaModule, seed: u64) -> Result<LogMat> {
    let d = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = loop {
        let s = QMat::from_fn(d, d, |i, j| if i == j { q(rng.gen_range(1..=3)) } else { q(rng.gen_range(-2..=2)) });
        if s.det() != Q::zero() {
            break s;
        }
    };
    let other = glue_with_gamma(&m.module.change_basis(&s)?, m.profile, None)?;
    let g2 = other.sections();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|k| {
                    let mut acc = LogRobbaElement::zero(m.profile);
                    for (l, row) in g2.iter().enumerate() {
                        let c = s.get(i, l);
                        if !c.is_zero() {
                            acc = acc.add(&row[k].scale(c));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect())
}

fn check_uniqueness(m: &PhiGammaModule, g: &LogMat, seed: u64) -> std::result::Result<String, String> {
    let g2 = alternate_sections(m, seed).map_err(|e| e.to_string())?;
    for n in m.profile.levels() {
        let a = iota_mat(g, n).map_err(|e| e.to_string())?;
        let b = iota_mat(&g2, n).map_err(|e| e.to_string())?;
        let tr = tmat_inverse(&a).map_err(|e| e.to_string())?.mul(&b);
        in_gl(&tr).map_err(|e| format!("level {n}: second run differs: {e}"))?;
    }
    Ok("an independent glue run spans the same module".into())
}

pub fn verify_module(m: &PhiGammaModule) -> VerifyReport {
    verify_sections(m, &m.sections(), 7)
}

/// Run every check against the given sections (normally `m.sections()`).
pub fn verify_sections(m: &PhiGammaModule, g: &LogMat, seed: u64) -> VerifyReport {
    let mut r = VerifyReport::default();
    r.push("lattice", check_lattice(m, g));
    r.push("phi", check_phi(m, g));
    r.push("gamma", check_gamma(m));
    r.push("connection", check_connection(m, g));
    r.push("uniqueness", check_uniqueness(m, g, seed));
    r
}

/// Sections with `R_k` replaced by `R_k + X·e_1`, before the `t` twist.
pub fn perturbed_sections(m: &PhiGammaModule, k: usize) -> LogMat {
    let mut r = m.r.clone();
    let v = r.get(0, k) + &QPoly::x();
    r.set(0, k, v);
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|c| t_power_times(m.profile, r.get(i, c), m.b[c], &q(1))).collect())
        .collect()
}

/// Membership of a coordinate vector in the glued module, checked through
/// the lattice conditions at every window level.
pub fn contains(m: &PhiGammaModule, y: &[LogRobbaElement]) -> Result<bool> {
    for n in m.profile.levels() {
        let v = y.iter().map(|x| iota_log(x, n)).collect::<Result<Vec<_>>>()?;
        let c = m.lattices.coordinates(n, &v).unwrap();
        if c.iter().any(|s| !s.is_integral()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Read `(φ, N, Fil)` back off the glued module: φ on the horizontal
/// sections, and `Fil^i` as the vectors landing in `t^i` times the lattice.
pub fn recover_filtered(m: &PhiGammaModule) -> Result<FilteredModule> {
    let d = m.dim();
    let pr = m.profile;
    let g = m.sections();
    check_connection(m, &g).map_err(Error::NotLocallyTrivial)?;
    let rinv = unimodular_inverse(&m.r).ok_or_else(|| Error::NotLocallyTrivial("sections do not form a basis".into()))?;
    let ginv: LogMat = (0..d)
        .map(|k| (0..d).map(|l| t_power_times(pr, rinv.get(k, l), -m.b[k], &q(1))).collect())
        .collect();
    let fginv: LogMat = ginv.iter().map(|row| row.iter().map(|x| x.frobenius()).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let prod = mat_mul(&mat_mul(&g, &m.phi_matrix, pr), &fginv, pr);
    let mut phi = QMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let c = prod[i][j]
                .as_robba()
                .and_then(|x| x.as_constant().or_else(|| x.is_zero().then(Q::zero)))
                .ok_or_else(|| Error::NotLocallyTrivial(format!("Frobenius on horizontal sections is not constant at ({}, {})", i + 1, j + 1)))?;
            phi.set(i, j, c);
        }
    }
    let lo = m.lattices.weights.iter().copied().min().unwrap_or(0) - 1;
    let hi = m.lattices.weights.iter().copied().max().unwrap_or(0) + 1;
    let mut fils: Option<Vec<(i64, QMat)>> = None;
    for n in pr.levels() {
        let ig = iota_mat(&g, n)?;
        let z = tmat_inverse(&ig)?;
        let z = z.mul(&TMat::from_fn(d, d, |i, j| {
            TSeries::from_q(&ig.get(0, 0).field, phi.pow(n as i64).get(i, j).clone(), pr.t_prec)
        }));
        let mut here = Vec::new();
        for i in lo..=hi {
            here.push((i, fil_at(&z, i)?));
        }
        match &fils {
            None => fils = Some(here),
            Some(prev) => {
                if prev.iter().zip(&here).any(|((_, a), (_, b))| !a.same_span(b)) {
                    return Err(Error::NotLocallyTrivial(format!("filtration read at level {n} disagrees with level {}", pr.n0)));
                }
            }
        }
    }
    let fils = fils.unwrap();
    let mut filtration = Vec::new();
    for w in fils.windows(2) {
        let (i, a) = &w[0];
        if a.rank_or_zero() > w[1].1.rank_or_zero() {
            filtration.push((*i, a.clone()));
        }
    }
    FilteredModule::new(pr.p, phi, QMat::zeros(d, d), filtration)
}

/// `{x ∈ Q^d : Z x ∈ t^i K_n[[t]]^d}`.
fn fil_at(z: &TMat, i: i64) -> Result<QMat> {
    let d = z.cols;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for r in 0..z.rows {
        let lo = (0..d).map(|j| z.get(r, j).valuation().lower_bound()).min().unwrap().min(0);
        for k in lo..i {
            if (0..d).any(|j| k >= z.get(r, j).trunc) {
                return Err(Error::PrecisionExhausted(format!("coefficient t^{k} is beyond the known precision")));
            }
            let coeffs: Vec<Vec<Q>> = (0..d).map(|j| z.get(r, j).coeff(k).as_poly().coeffs().to_vec()).collect();
            let width = coeffs.iter().map(|c| c.len()).max().unwrap_or(0);
            for comp in 0..width {
                rows.push((0..d).map(|j| coeffs[j].get(comp).cloned().unwrap_or_else(Q::zero)).collect());
            }
        }
    }
    if rows.is_empty() {
        return Ok(QMat::identity(d));
    }
    Ok(QMat::from_rows(rows).kernel(&q(1)))
}

fn mat_mul(a: &LogMat, b: &LogMat, pr: crate::robba::Profile) -> LogMat {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut acc = LogRobbaElement::zero(pr);
                    for k in 0..d {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc = acc.add(&a[i][k].mul(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Round-trip comparison: same φ, same N, same flag.
pub fn same_filtered(a: &FilteredModule, b: &FilteredModule) -> bool {
    a.p == b.p && a.phi == b.phi && a.nmat == b.nmat && a.same_filtration(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use crate::construction::glue;
    use crate::robba::{Profile, RobbaElement};

    fn pr12() -> Profile {
        Profile::default().with_levels(1, 2)
    }

    #[test]
    fn example_two_verifies() {
        let m = glue(&FilteredModule::example(2, 2).unwrap(), pr12()).unwrap();
        let r = verify_module(&m);
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn perturbation_breaks_the_lattice() {
        let m = glue(&FilteredModule::example(2, 2).unwrap(), pr12()).unwrap();
        let k = (0..m.dim()).min_by_key(|&k| m.b[k]).unwrap();
        let r = verify_sections(&m, &perturbed_sections(&m, k), 7);
        assert!(!r.get("lattice").unwrap().passed);
    }

    #[test]
    fn round_trips() {
        for k in [1, 2, 3] {
            let d = FilteredModule::example(k, 2).unwrap();
            let m = glue(&d, pr12()).unwrap();
            let back = recover_filtered(&m).unwrap();
            assert!(same_filtered(&d, &back), "example {k}: {back:?}");
        }
    }

    #[test]
    fn example_one_membership() {
        let pr = pr12();
        let m = glue(&FilteredModule::example(1, 2).unwrap(), pr).unwrap();
        let c = |x: Q| LogRobbaElement::constant(pr, x);
        assert!(contains(&m, &[c(q(1)), c(q(0))]).unwrap());
        let alpha = RobbaElement::from_poly(pr, QPoly::from_ints(&[4, 2, 1]).scale(&qf(1, 8)));
        let y = [LogRobbaElement::from_robba(alpha).div_t(1), c(q(1)).div_t(1)];
        assert!(contains(&m, &y).unwrap());
        // f/t alone has the wrong polar part
        assert!(!contains(&m, &[c(q(0)), c(q(1)).div_t(1)]).unwrap());
    }
}
