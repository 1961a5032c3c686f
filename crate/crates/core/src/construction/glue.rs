use num_traits::{One, Zero};

use super::lattice::{build_lattices, nzero_frame, LatticeFamily};
use super::polymat::{from_qmat, max_degree, scale_col, smith_left, unimodular_inverse, PolyMat};
use crate::arith::{fmt_q, one_plus_x_pow_minus_one, ppow, q, q_level_poly, qpow, vp, QPoly, Q};
use crate::error::{Error, Result};
use crate::filtered::FilteredModule;
use crate::robba::{LogRobbaElement, Profile, RobbaElement};

/// Square matrix of log elements, `m[row][col]`.
pub type LogMat = Vec<Vec<LogRobbaElement>>;

/// The glued module: sections `g_k = t^{b_k} R_k` over the frame, where the
/// columns `R_k` of `R` form a basis of `Q[X]^d` (constant determinant).
#[derive(Clone, Debug)]
pub struct PhiGammaModule {
    pub profile: Profile,
    pub module: FilteredModule,
    pub lattices: LatticeFamily,
    pub r: PolyMat,
    pub b: Vec<i64>,
    /// Column `k` holds the coordinates of `φ(g_k)` on the sections.
    pub phi_matrix: LogMat,
    pub gamma_matrix: Option<(Q, LogMat)>,
    pub diagnostics: Vec<String>,
}

impl PhiGammaModule {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// Coordinates of the frame vectors (the identity when `N = 0`).
    pub fn frame(&self) -> LogMat {
        nzero_frame(&self.module, self.profile)
    }

    /// `sections()[i][k]` is coordinate `i` of `g_k`.
    pub fn sections(&self) -> LogMat {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|k| t_power_times(self.profile, self.r.get(i, k), self.b[k], &Q::one())).collect())
            .collect()
    }

    pub fn section(&self, k: usize) -> Vec<LogRobbaElement> {
        self.sections().into_iter().map(|row| row[k].clone()).collect()
    }
}

/// `c · t^e · f(X)` as a log element.
pub(crate) fn t_power_times(profile: Profile, f: &QPoly, e: i64, c: &Q) -> LogRobbaElement {
    let x = LogRobbaElement::from_robba(RobbaElement::from_poly(profile, f.scale(c)));
    if e >= 0 {
        x.mul_t(e as u32)
    } else {
        x.div_t((-e) as u32)
    }
}

fn compose_mat(m: &PolyMat, g: &QPoly) -> PolyMat {
    m.map(|f| f.compose(g))
}

/// `M_{lk} = c^{b_k} t^{b_k - b_l} X_{lk}`.
fn twisted(profile: Profile, x: &PolyMat, b: &[i64], c: &Q) -> LogMat {
    let d = b.len();
    (0..d)
        .map(|l| (0..d).map(|k| t_power_times(profile, x.get(l, k), b[k] - b[l], &qpow(c, b[k]))).collect())
        .collect()
}

/// Basis of the Q[X]-module of vectors whose image at every window level
/// lies in `t^{hs}` times the lattice, as `R · diag(Δ^{a_k})` with
/// `Δ = Π_{n∈W} φ^{n-1}(q)`.
fn polynomial_lattice(lat: &LatticeFamily, profile: Profile, hs: i64) -> Result<(PolyMat, Vec<i64>)> {
    let d = lat.weights.len();
    let p = profile.p;
    let m: Vec<i64> = lat.weights.iter().map(|h| hs - h).collect();
    let mmax = m.iter().copied().max().unwrap_or(0) as usize;
    let qs: Vec<(u32, QPoly)> = profile.levels().map(|n| (n, q_level_poly(p, n))).collect();
    let mut gens: Option<PolyMat> = None;
    for (n, bn) in &lat.levels {
        let mut block = from_qmat(bn);
        let qn = &qs.iter().find(|(k, _)| k == n).unwrap().1;
        for (j, mj) in m.iter().enumerate() {
            scale_col(&mut block, j, &qn.pow(*mj as usize));
        }
        let mut eps = QPoly::one();
        for (k, qk) in &qs {
            if k != n {
                eps = &eps * &qk.pow(mmax);
            }
        }
        let block = block.map(|f| f * &eps);
        gens = Some(match gens {
            None => block,
            Some(g) => g.hcat(&block),
        });
    }
    let gens = gens.expect("nonempty level window");
    let (r, s) = smith_left(&gens);
    if s.len() < d {
        return Err(Error::CertificateFailure("lattice generators do not have full rank".into()));
    }
    let delta = qs.iter().fold(QPoly::one(), |acc, (_, f)| &acc * f);
    let mut a = Vec::new();
    for sk in &s {
        let e = sk.multiplicity(&qs[0].1);
        if *sk != delta.pow(e as usize) {
            return Err(Error::CertificateFailure(format!(
                "elementary divisors differ between window levels: {sk:?}"
            )));
        }
        a.push(e as i64);
    }
    Ok((r, a))
}

pub fn glue(dm: &FilteredModule, profile: Profile) -> Result<PhiGammaModule> {
    glue_with_gamma(dm, profile, Some(q(profile.p as i64 + 1)))
}

pub fn glue_with_gamma(dm: &FilteredModule, profile: Profile, gamma: Option<Q>) -> Result<PhiGammaModule> {
    if dm.p != profile.p {
        return Err(Error::ProfileMismatch);
    }
    if !dm.nmat.is_zero() {
        return Err(Error::UnsupportedShape("gluing is implemented for N = 0 only".into()));
    }
    let lat = build_lattices(dm, profile)?;
    let hs = lat.weights.iter().copied().max().unwrap_or(0);
    let (r, a) = polynomial_lattice(&lat, profile, hs)?;
    let b: Vec<i64> = a.iter().map(|x| x - hs).collect();
    let deg = max_degree(&r);
    if (deg as i64) * (profile.p as i64) > profile.kmax {
        return Err(Error::WindowTooSmall(format!(
            "sections have X-degree {deg}; their Frobenius images leave the window kmax = {}",
            profile.kmax
        )));
    }
    let rinv = unimodular_inverse(&r).ok_or_else(|| Error::CertificateFailure("section matrix is not unimodular".into()))?;
    let phir = compose_mat(&r, &one_plus_x_pow_minus_one(profile.p));
    let x = rinv.mul(&from_qmat(&dm.phi)).mul(&phir);
    let phi_matrix = twisted(profile, &x, &b, &q(profile.p as i64));
    let gamma_matrix = match gamma {
        None => None,
        Some(g) => {
            if !g.is_integer() || vp(profile.p, &g) != Some(0) || g <= Q::zero() {
                return Err(Error::Validation(format!("gamma exponent {} must be a positive integer unit", fmt_q(&g))));
            }
            let k: u64 = g.to_integer().try_into().unwrap();
            let gr = compose_mat(&r, &one_plus_x_pow_minus_one(k));
            let y = rinv.mul(&gr);
            Some((g.clone(), twisted(profile, &y, &b, &g)))
        }
    };
    let diagnostics = vec![
        format!("weights {:?}, shift {hs}, exponents {a:?}", lat.weights),
        format!("section degree {deg}"),
    ];
    Ok(PhiGammaModule { profile, module: dm.clone(), lattices: lat, r, b, phi_matrix, gamma_matrix, diagnostics })
}

pub fn det_log(m: &LogMat, profile: Profile) -> LogRobbaElement {
    let d = m.len();
    match d {
        0 => LogRobbaElement::one(profile),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = LogRobbaElement::zero(profile);
            for j in 0..d {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: LogMat = (1..d)
                    .map(|i| (0..d).filter(|&c| c != j).map(|c| m[i][c].clone()).collect())
                    .collect();
                let term = m[0][j].mul(&det_log(&minor, profile));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Factor `det φ = p^s · u` with `u` a certified unit and return `s`.
pub fn det_slope_certificate(m: &PhiGammaModule) -> Result<Q> {
    let det = det_log(&m.phi_matrix, m.profile);
    let fail = |why: String| Error::CertificateFailure(why);
    let el = det.as_robba().ok_or_else(|| fail(format!("determinant {det:?} involves t^-1 or l_X")))?;
    if el.t_degree() > 1 {
        return Err(fail(format!("determinant {el:?} involves t")));
    }
    let num = el.grades().first().cloned().unwrap_or_else(QPoly::zero);
    let lowest = num
        .coeffs()
        .iter()
        .find(|c| !c.is_zero())
        .ok_or_else(|| fail("determinant is zero".into()))?;
    let s = vp(m.profile.p, lowest).unwrap();
    let u = el.scale(&ppow(m.profile.p, -s));
    let uinv = u.invert_unit().map_err(|e| fail(format!("unit part is not invertible: {e}")))?;
    let bounded = |x: &RobbaElement| x.is_bounded().unwrap_or(false);
    if !bounded(&u) || !bounded(&uinv) {
        return Err(fail("unit part or its inverse is unbounded in the window".into()));
    }
    Ok(q(s))
}
