//! Angle machinery and the four-way classification: the angle between the
//! lifted tangent and the Reeb field computed from first principles and
//! from the closed forms, the normal-angle profile computed directly from
//! the Frenet normal and from the closed-form chain, and the verdicts
//! Legendre / slant / N-Legendre / N-slant.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lift::{
    acceleration_profile, covariant_along_lifted, frenet_apparatus, FrenetApparatus, LiftError,
    LiftedCurve, ParamKind, KAPPA_MIN, LIFT_FD_STEP,
};
use crate::numeric::{deriv4, max_abs, max_dev_from_mean, mean};
use crate::structure::{g1, g1_norm, xi, StructureError, StructureParams};
use crate::surface::{base_frenet, GeomError};

/// Default absolute tolerance for the constancy verdicts.
pub const CLASSIFY_TOL: f64 = 1e-5;

/// Default sample count for classification grids.
pub const CLASSIFY_SAMPLES: usize = 400;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("curve must be in g1 arc-length form")]
    NotArclength,
    #[error("|cos theta| exceeds 1 by {0:.3e}, beyond the clamp tolerance")]
    ClampViolation(f64),
    #[error("beta radicand is negative beyond tolerance: {0:.3e} (inconsistent parameters)")]
    NegativeRadicand(f64),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Verdict for the tangent channel g1(T, xi).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "c")]
pub enum TangentVerdict {
    Legendre,
    Slant(f64),
    None,
}

/// Verdict for the normal channel g1(N, xi).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "c")]
pub enum NormalVerdict {
    /// `degenerate` marks curves that are g1 geodesics: the Frenet normal
    /// is undefined but the unnormalized product g1(nabla T, xi) vanishes
    /// identically, the limiting sense in which such curves are N-Legendre.
    NLegendre { degenerate: bool },
    NSlant(f64),
    None,
    /// kappa dips below threshold somewhere without the curve being a
    /// geodesic; no stable normal verdict exists.
    Undefined,
}

impl TangentVerdict {
    pub fn is_slant_or_legendre(&self) -> bool {
        !matches!(self, TangentVerdict::None)
    }

    pub fn label(&self) -> String {
        match self {
            TangentVerdict::Legendre => "Legendre".into(),
            TangentVerdict::Slant(c) => format!("slant({c:.6})"),
            TangentVerdict::None => "none".into(),
        }
    }
}

impl NormalVerdict {
    pub fn label(&self) -> String {
        match self {
            NormalVerdict::NLegendre { degenerate: false } => "N-Legendre".into(),
            NormalVerdict::NLegendre { degenerate: true } => {
                "N-Legendre (degenerate: g1-geodesic)".into()
            }
            NormalVerdict::NSlant(c) => format!("N-slant({c:.6})"),
            NormalVerdict::None => "none".into(),
            NormalVerdict::Undefined => "undefined".into(),
        }
    }
}

/// Angle samples: the first-principles cosine, the closed-form cosine and
/// the derivative data used by the closed-form normal product.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AngleProfile {
    pub s: Vec<f64>,
    pub cos_theta_fp: Vec<f64>,
    pub cos_theta_paper: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_prime: Vec<f64>,
    /// -(d/ds cos theta) for each convention; stable near theta in {0, pi}.
    pub theta_prime_sin_theta_fp: Vec<f64>,
    pub theta_prime_sin_theta_paper: Vec<f64>,
    pub mean_cos_fp: f64,
    pub max_dev_cos_fp: f64,
    /// max |cos_fp - cos_paper|; zero exactly when alpha = 1.
    pub convention_gap: f64,
}

/// Per-sample ingredients of the closed-form chain.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DecompositionData {
    pub s: Vec<f64>,
    pub base_speed: Vec<f64>,
    pub base_kappa: Vec<f64>,
    pub g_e_x: Vec<f64>,
    pub g_t_x_prime: Vec<f64>,
    pub w_norm: Vec<f64>,
    pub beta_paper: Vec<f64>,
    pub beta_fp: Vec<f64>,
    /// Sign branch matched to g(N, X) at the left end of the grid.
    pub branch: f64,
    /// max |(coefficient of T)^2 + beta_fp^2 - 1|.
    pub unit_closure_residual: f64,
    /// max componentwise error reconstructing E via the closed-form
    /// decomposition, over samples with w_norm > 1e-8.
    pub e_reconstruction_max: f64,
    /// max |R(E,X,X,W)_direct - r ((cos/r sqrt)' - r beta kappa) K|.
    pub curvature_term_gap: f64,
}

/// Normalization and validity flags carried by every report.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GapFlags {
    /// alpha != 1: the closed-form cosine of the angle differs from the
    /// first-principles cosine by the factor (c1+d1)/(2 lambda sqrt(c1+d1)).
    pub alpha_not_one: bool,
    /// lambda != 1: the closed-form tangent coefficient of the field
    /// decomposition differs from g(T,X).
    pub lambda_not_one: bool,
    /// |cos_theta_paper| exceeded 1 somewhere (only possible off alpha = 1).
    pub cos_paper_out_of_range: bool,
    /// The closed-form normal product divides by g(W,W); unreliable when
    /// the field is parallel.
    pub w_vanishes: bool,
    /// Base speed differs from 1, where the printed closed form's extra
    /// factor r in the kappa term becomes visible.
    pub base_speed_not_one: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NormalChannel {
    pub n_xi_direct: Vec<f64>,
    pub n_xi_formula_plus: Vec<f64>,
    pub n_xi_formula_minus: Vec<f64>,
    pub n_xi_eq8: Vec<f64>,
    pub kappa_tilde: Vec<f64>,
    pub tau_tilde: Vec<f64>,
    /// max |formula(best branch) - direct|.
    pub formula_vs_direct: f64,
    pub formula_best_branch: f64,
    /// max |eq8 - direct|.
    pub eq8_vs_direct: f64,
    /// For degenerate (g1-geodesic) curves: max |g1(nabla T, xi)|.
    pub max_unnormalized: f64,
    pub degenerate_g1_geodesic: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub t_verdict: TangentVerdict,
    pub n_verdict: NormalVerdict,
    pub angle: AngleProfile,
    pub decomposition: DecompositionData,
    pub normal: NormalChannel,
    pub t_xi: Vec<f64>,
    pub flags: GapFlags,
    pub tol: f64,
    pub warnings: Vec<String>,
}

fn require_arclength(curve: &LiftedCurve) -> Result<(), ClassifyError> {
    if curve.param() != ParamKind::G1Arclength {
        return Err(ClassifyError::NotArclength);
    }
    Ok(())
}

/// g1(T_tilde(s), xi) at one parameter; equals eta(T_tilde) by the contact
/// identities.
pub fn t_xi_product(
    params: &StructureParams,
    curve: &LiftedCurve,
    s: f64,
) -> Result<f64, ClassifyError> {
    let point = curve.bundle_point(s)?;
    let t = curve.lifted_tangent(s)?;
    Ok(g1(params, curve.surface(), &point, &t, &xi(params, &point))?)
}

/// The angle profile of the curve over a sample grid.
pub fn angle_profile(
    params: &StructureParams,
    curve: &LiftedCurve,
    grid: &[f64],
) -> Result<AngleProfile, ClassifyError> {
    require_arclength(curve)?;
    let surface = curve.surface();
    let cos_fp_at = |s: f64| -> f64 {
        let point = curve.bundle_point(s).expect("point");
        let t = curve.lifted_tangent(s).expect("tangent");
        let x = xi(params, &point);
        let num = g1(params, surface, &point, &t, &x).expect("g1");
        let nt = g1_norm(params, surface, &point, &t).expect("norm");
        let nx = g1_norm(params, surface, &point, &x).expect("norm");
        num / (nt * nx)
    };
    let cos_paper_at = |s: f64| -> f64 {
        let e = curve.base().velocity(s);
        let x = curve.field().value(s);
        let gex = surface
            .inner(curve.base().point(s), e, x)
            .expect("metric");
        params.sqrt_c1d1() * gex
    };
    let mut profile = AngleProfile {
        s: grid.to_vec(),
        ..Default::default()
    };
    for &s in grid {
        let cf = cos_fp_at(s);
        let over = cf.abs() - 1.0;
        if over > 1e-10 {
            return Err(ClassifyError::ClampViolation(over));
        }
        let cf = cf.clamp(-1.0, 1.0);
        let cp = cos_paper_at(s);
        let theta = cf.acos();
        let dcos_fp = deriv4(cos_fp_at, s, LIFT_FD_STEP);
        let dcos_paper = deriv4(cos_paper_at, s, LIFT_FD_STEP);
        let sin = theta.sin();
        let theta_prime = if sin > 0.1 {
            -dcos_fp / sin
        } else {
            // Near the branch points differentiate theta itself.
            deriv4(|t| cos_fp_at(t).clamp(-1.0, 1.0).acos(), s, LIFT_FD_STEP)
        };
        profile.cos_theta_fp.push(cf);
        profile.cos_theta_paper.push(cp);
        profile.theta.push(theta);
        profile.theta_prime.push(theta_prime);
        profile.theta_prime_sin_theta_fp.push(-dcos_fp);
        profile.theta_prime_sin_theta_paper.push(-dcos_paper);
    }
    profile.mean_cos_fp = mean(&profile.cos_theta_fp);
    profile.max_dev_cos_fp = max_dev_from_mean(&profile.cos_theta_fp);
    profile.convention_gap = profile
        .cos_theta_fp
        .iter()
        .zip(&profile.cos_theta_paper)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(profile)
}

/// One beta sample per Eq.-style closed form and from first principles.
#[derive(Clone, Copy, Debug)]
pub struct BetaSample {
    pub beta_paper: f64,
    pub beta_fp: f64,
    pub radicand: f64,
}

/// The closed-form beta = branch * (1/r) sqrt(r^2 - (lambda/sqrt(c1+d1))^2 cos^2 theta)
/// next to the first-principles branch * sqrt(1 - g(T,X)^2).
pub fn beta_of(
    params: &StructureParams,
    curve: &LiftedCurve,
    s: f64,
    branch: f64,
) -> Result<BetaSample, ClassifyError> {
    let surface = curve.surface();
    let p = curve.base().point(s);
    let e = curve.base().velocity(s);
    let x = curve.field().value(s);
    let g = surface.metric_at(p)?;
    let r = g.norm(e);
    let cos_paper = params.sqrt_c1d1() * g.inner(e, x);
    let lam = params.lambda / params.sqrt_c1d1();
    let radicand = r * r - lam * lam * cos_paper * cos_paper;
    if radicand < -1e-12 {
        return Err(ClassifyError::NegativeRadicand(radicand));
    }
    let beta_paper = branch * radicand.max(0.0).sqrt() / r;
    let gtx = g.inner(e, x) / r;
    let beta_fp = branch * (1.0 - gtx * gtx).max(0.0).sqrt();
    Ok(BetaSample { beta_paper, beta_fp, radicand })
}

/// The curvature term R(E, X, X, nabla_E X): evaluated directly through the
/// curvature operator and through its closed form
/// r ((cos theta / (r sqrt(c1+d1)))' - r beta kappa) K.
pub fn curvature_term(
    params: &StructureParams,
    curve: &LiftedCurve,
    s: f64,
    branch: f64,
) -> Result<(f64, f64), ClassifyError> {
    let surface = curve.surface();
    let p = curve.base().point(s);
    let e = curve.base().velocity(s);
    let x = curve.field().value(s);
    let w = curve.cov_field_deriv(s)?;
    let direct = surface.curvature_tensor(p, e, x, x, w)?;
    let g = surface.metric_at(p)?;
    let r = g.norm(e);
    let k = surface.gauss_curvature(p)?;
    let g_t_x = |t: f64| -> f64 {
        let pp = curve.base().point(t);
        let ee = curve.base().velocity(t);
        let xx = curve.field().value(t);
        let gg = curve.surface().metric_at(pp).expect("metric");
        gg.inner(ee, xx) / gg.norm(ee)
    };
    let dtx = deriv4(g_t_x, s, LIFT_FD_STEP);
    let kappa = base_frenet(curve.base()).frame_at(s)?.kappa;
    let beta = beta_of(params, curve, s, branch)?.beta_paper;
    let formula = r * (dtx - r * beta * kappa) * k;
    Ok((direct, formula))
}

/// Builds the closed-form decomposition table over the grid.
pub fn decomposition_data(
    params: &StructureParams,
    curve: &LiftedCurve,
    grid: &[f64],
) -> Result<DecompositionData, ClassifyError> {
    let surface = curve.surface();
    let fr = base_frenet(curve.base());
    // Branch matched to sign(g(N, X)) at the first sample where it is
    // resolvable; +1 for identically tangent fields.
    let mut branch = 1.0;
    for &s in grid {
        let f = fr.frame_at(s)?;
        let x = curve.field().value(s);
        let gnx = surface.inner(curve.base().point(s), f.n, x)?;
        if gnx.abs() > 1e-9 {
            branch = gnx.signum();
            break;
        }
    }
    let g_t_x = |t: f64| -> f64 {
        let pp = curve.base().point(t);
        let ee = curve.base().velocity(t);
        let xx = curve.field().value(t);
        let gg = surface.metric_at(pp).expect("metric");
        gg.inner(ee, xx) / gg.norm(ee)
    };
    let mut out = DecompositionData {
        s: grid.to_vec(),
        branch,
        ..Default::default()
    };
    for &s in grid {
        let p = curve.base().point(s);
        let e = curve.base().velocity(s);
        let x = curve.field().value(s);
        let w = curve.cov_field_deriv(s)?;
        let g = surface.metric_at(p)?;
        let r = g.norm(e);
        let f = fr.frame_at(s)?;
        let beta = beta_of(params, curve, s, branch)?;
        let dtx = deriv4(g_t_x, s, LIFT_FD_STEP);
        let ww = g.inner(w, w);
        out.base_speed.push(r);
        out.base_kappa.push(f.kappa);
        out.g_e_x.push(g.inner(e, x));
        out.g_t_x_prime.push(dtx);
        out.w_norm.push(ww.sqrt());
        out.beta_paper.push(beta.beta_paper);
        out.beta_fp.push(branch * surface.inner(p, f.n, x)?.abs());
        // Unit closure of the first-principles decomposition.
        let ct = g.inner(e, x) / r;
        let bf = surface.inner(p, f.n, x)?;
        out.unit_closure_residual = out
            .unit_closure_residual
            .max((ct * ct + bf * bf - 1.0).abs());
        // Reconstruction of E from the closed-form decomposition, where the
        // covariant field derivative is large enough to divide by.
        if ww.sqrt() > 1e-8 {
            let cos_paper = params.sqrt_c1d1() * g.inner(e, x);
            let coeff_x = cos_paper / params.sqrt_c1d1();
            let coeff_w = r * (dtx - r * beta.beta_paper * f.kappa) / ww;
            let rec = x.scale(coeff_x).add(w.scale(coeff_w));
            let err = (rec.v1 - e.v1).abs().max((rec.v2 - e.v2).abs());
            out.e_reconstruction_max = out.e_reconstruction_max.max(err);
        }
        let (direct, formula) = curvature_term(params, curve, s, branch)?;
        out.curvature_term_gap = out.curvature_term_gap.max((direct - formula).abs());
    }
    Ok(out)
}

/// Direct normal product g1(N, xi) from the Frenet apparatus; no closed
/// forms involved.
pub fn n_xi_direct(
    params: &StructureParams,
    curve: &LiftedCurve,
    apparatus: &FrenetApparatus,
) -> Result<Vec<f64>, ClassifyError> {
    let mut out = Vec::with_capacity(apparatus.samples.len());
    for f in &apparatus.samples {
        let point = curve.bundle_point(f.s)?;
        out.push(g1(
            params,
            curve.surface(),
            &point,
            &f.n_tilde,
            &xi(params, &point),
        )?);
    }
    Ok(out)
}

/// The closed-form normal product, both sign branches, and the
/// intermediate form that keeps the measured curvature term.
pub fn n_xi_formula(
    params: &StructureParams,
    curve: &LiftedCurve,
    apparatus: &FrenetApparatus,
    angle: &AngleProfile,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), ClassifyError> {
    let surface = curve.surface();
    let fr = base_frenet(curve.base());
    let sqrt_c1d1 = params.sqrt_c1d1();
    let lam = params.lambda / sqrt_c1d1;
    let alpha2 = params.alpha * params.alpha;
    let g_t_x = |t: f64| -> f64 {
        let pp = curve.base().point(t);
        let ee = curve.base().velocity(t);
        let xx = curve.field().value(t);
        let gg = surface.metric_at(pp).expect("metric");
        gg.inner(ee, xx) / gg.norm(ee)
    };
    let mut plus = Vec::with_capacity(apparatus.samples.len());
    let mut minus = Vec::with_capacity(apparatus.samples.len());
    let mut eq8 = Vec::with_capacity(apparatus.samples.len());
    for (i, f) in apparatus.samples.iter().enumerate() {
        let s = f.s;
        let point = curve.bundle_point(s)?;
        let p = curve.base().point(s);
        let e = curve.base().velocity(s);
        let x = curve.field().value(s);
        let w = curve.cov_field_deriv(s)?;
        let g = surface.metric_at(p)?;
        let r = g.norm(e);
        let k = surface.gauss_curvature(p)?;
        let kappa = fr.frame_at(s)?.kappa;
        let xi_norm = g1_norm(params, surface, &point, &xi(params, &point))?;
        let dtx = deriv4(g_t_x, s, LIFT_FD_STEP);
        let cos_paper = angle.cos_theta_paper[i];
        let radicand = (r * r - lam * lam * cos_paper * cos_paper).max(0.0);
        let prefactor = r * (params.c2 * k - (params.c1 + params.d1))
            / (2.0 * params.lambda * alpha2 * f.kappa);
        let tail = xi_norm * angle.theta_prime_sin_theta_paper[i] / f.kappa;
        plus.push(prefactor * (dtx + r * kappa * radicand.sqrt()) - tail);
        minus.push(prefactor * (dtx - r * kappa * radicand.sqrt()) - tail);
        // Intermediate form with the measured curvature term and the
        // measured g(E, nabla_E X).
        let r_term = surface.curvature_tensor(p, e, x, x, w)?;
        let gew = g.inner(e, w);
        eq8.push(
            (params.c2 * r_term - (params.c1 + params.d1) * gew)
                / (2.0 * params.lambda * alpha2 * f.kappa)
                - tail,
        );
    }
    Ok((plus, minus, eq8))
}

/// Constancy verdict of a sampled channel.
fn channel_verdict(values: &[f64], tol: f64) -> (f64, f64) {
    (mean(values), max_dev_from_mean(values))
}

/// Full classification of an arc-length lifted curve.
pub fn classify(
    params: &StructureParams,
    curve: &LiftedCurve,
    tol: f64,
    n_samples: usize,
) -> Result<ClassificationReport, ClassifyError> {
    require_arclength(curve)?;
    let grid = curve.sample_grid(n_samples.max(8), curve.frenet_margin());
    let angle = angle_profile(params, curve, &grid)?;
    let decomposition = decomposition_data(params, curve, &grid)?;

    let mut t_xi = Vec::with_capacity(grid.len());
    for &s in &grid {
        t_xi.push(t_xi_product(params, curve, s)?);
    }
    let (t_mean, t_dev) = channel_verdict(&t_xi, tol);
    let t_verdict = if t_dev < tol {
        if t_mean.abs() < tol {
            TangentVerdict::Legendre
        } else {
            TangentVerdict::Slant(t_mean)
        }
    } else {
        TangentVerdict::None
    };

    let mut normal = NormalChannel::default();
    let mut n_verdict;
    match frenet_apparatus(params, curve, grid.len()) {
        Ok(apparatus) => {
            let direct = n_xi_direct(params, curve, &apparatus)?;
            let (plus, minus, eq8) = n_xi_formula(params, curve, &apparatus, &angle)?;
            let dev = |a: &[f64]| {
                a.iter()
                    .zip(&direct)
                    .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
            };
            let (dev_plus, dev_minus) = (dev(&plus), dev(&minus));
            normal.formula_best_branch = if dev_plus <= dev_minus { 1.0 } else { -1.0 };
            normal.formula_vs_direct = dev_plus.min(dev_minus);
            normal.eq8_vs_direct = dev(&eq8);
            normal.kappa_tilde = apparatus.kappas();
            normal.tau_tilde = apparatus.taus();
            let (n_mean, n_dev) = channel_verdict(&direct, tol);
            n_verdict = if n_dev < tol {
                if n_mean.abs() < tol {
                    NormalVerdict::NLegendre { degenerate: false }
                } else {
                    NormalVerdict::NSlant(n_mean)
                }
            } else {
                NormalVerdict::None
            };
            normal.n_xi_direct = direct;
            normal.n_xi_formula_plus = plus;
            normal.n_xi_formula_minus = minus;
            normal.n_xi_eq8 = eq8;
            normal.max_unnormalized = normal
                .n_xi_direct
                .iter()
                .zip(&normal.kappa_tilde)
                .fold(0.0_f64, |m, (n, k)| m.max((n * k).abs()));
        }
        Err(LiftError::VanishingCurvature { kappa_max, .. }) => {
            // kappa stays below threshold everywhere: the curve is a g1
            // geodesic and the unnormalized normal product is identically
            // zero; report the degenerate N-Legendre convention with the
            // measured evidence.
            let accel = acceleration_profile(params, curve, &grid)?;
            normal.kappa_tilde = accel;
            let nan = vec![f64::NAN; grid.len()];
            normal.n_xi_direct = nan.clone();
            normal.n_xi_formula_plus = nan.clone();
            normal.n_xi_formula_minus = nan.clone();
            normal.n_xi_eq8 = nan.clone();
            normal.tau_tilde = nan;
            let mut max_unnorm = 0.0_f64;
            let tangent = |t: f64| curve.lifted_tangent(t).expect("tangent");
            for &s in &grid {
                let point = curve.bundle_point(s)?;
                let acc = covariant_along_lifted(params, curve, &tangent, s, LIFT_FD_STEP)?;
                max_unnorm = max_unnorm
                    .max(g1(params, curve.surface(), &point, &acc, &xi(params, &point))?.abs());
            }
            normal.max_unnormalized = max_unnorm;
            if kappa_max < KAPPA_MIN && max_unnorm < tol {
                normal.degenerate_g1_geodesic = true;
                n_verdict = NormalVerdict::NLegendre { degenerate: true };
            } else {
                n_verdict = NormalVerdict::Undefined;
            }
        }
        Err(other) => return Err(other.into()),
    }

    let flags = GapFlags {
        alpha_not_one: (params.alpha - 1.0).abs() > 1e-12,
        lambda_not_one: (params.lambda - 1.0).abs() > 1e-12,
        cos_paper_out_of_range: max_abs(&angle.cos_theta_paper) > 1.0 + 1e-12,
        w_vanishes: decomposition.w_norm.iter().any(|w| *w < 1e-8),
        base_speed_not_one: decomposition
            .base_speed
            .iter()
            .any(|r| (r - 1.0).abs() > 1e-9),
    };
    Ok(ClassificationReport {
        t_verdict,
        n_verdict,
        angle,
        decomposition,
        normal,
        t_xi,
        flags,
        tol,
        warnings: curve.warnings().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{make_lift, reparameterize_arclength, LiftKind, UnitField};
    use crate::structure::{validate_params, RawParams};
    use crate::surface::{BaseCurve, ChartPoint, SurfaceModel, TangentVector};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
    use std::sync::Arc;

    fn canonical() -> StructureParams {
        StructureParams::canonical()
    }

    fn arclength(base: BaseCurve, kind: LiftKind, params: &StructureParams) -> LiftedCurve {
        let lift = make_lift(&base, kind).unwrap();
        reparameterize_arclength(params, &lift).unwrap().0
    }

    #[test]
    fn natural_lift_of_geodesic_has_cos_one() {
        let params = canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let base = BaseCurve::sphere_circle(sphere, 1.0, FRAC_PI_2, 1.0, 3.0);
        let curve = arclength(base, LiftKind::Natural, &params);
        let grid = curve.sample_grid(32, curve.frenet_margin());
        let profile = angle_profile(&params, &curve, &grid).unwrap();
        for &c in &profile.cos_theta_fp {
            assert!((c - 1.0).abs() < 1e-8, "cos = {c}");
        }
        // t_xi equals 1 for the unit tangent aligned with xi.
        let v = t_xi_product(&params, &curve, grid[3]).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn legendre_lift_has_cos_zero() {
        let params = canonical();
        let plane = SurfaceModel::plane();
        let base = BaseCurve::line(plane, ChartPoint::new(0.0, 0.0), TangentVector::new(1.0, 0.0), 1.0, 2.0);
        let curve = arclength(base, LiftKind::Parallel { angle: FRAC_PI_2 }, &params);
        let grid = curve.sample_grid(16, curve.frenet_margin());
        let profile = angle_profile(&params, &curve, &grid).unwrap();
        assert!(max_abs(&profile.cos_theta_fp) < 1e-9);
        assert!(max_abs(&profile.cos_theta_paper) < 1e-9);
    }

    #[test]
    fn parallel_lift_cos_matches_initial_angle_after_reparam() {
        let params = canonical();
        let plane = SurfaceModel::plane();
        let base = BaseCurve::line(plane, ChartPoint::new(0.0, 0.0), TangentVector::new(1.0, 0.0), 1.0, 2.0);
        let angle0 = FRAC_PI_3;
        let curve = arclength(base, LiftKind::Parallel { angle: angle0 }, &params);
        let grid = curve.sample_grid(16, curve.frenet_margin());
        let profile = angle_profile(&params, &curve, &grid).unwrap();
        // At the canonical configuration both conventions agree and equal
        // cos(angle0) once the curve is unit speed.
        for (a, b) in profile.cos_theta_fp.iter().zip(&profile.cos_theta_paper) {
            assert!((a - angle0.cos()).abs() < 1e-8);
            assert!((a - b).abs() < 1e-10);
        }
        assert!(profile.convention_gap < 1e-10);
    }

    #[test]
    fn beta_examples() {
        let params = canonical();
        let plane = SurfaceModel::plane();
        let base = BaseCurve::line(plane.clone(), ChartPoint::new(0.0, 0.0), TangentVector::new(1.0, 0.0), 1.0, 2.0);
        // theta = pi/2 at unit base speed: beta = 1 on both paths.
        let lift = make_lift(&base, LiftKind::Parallel { angle: FRAC_PI_2 }).unwrap();
        let b = beta_of(&params, &lift, 1.0, 1.0).unwrap();
        assert!((b.beta_paper - 1.0).abs() < 1e-10);
        assert!((b.beta_fp - 1.0).abs() < 1e-10);
        // cos theta = 1/2 at unit speed: beta = sqrt(15)/4 from the closed form.
        let theta0 = (0.25_f64).acos();
        let lift = make_lift(&base, LiftKind::ConstantAngle { angle: theta0 }).unwrap();
        let b = beta_of(&params, &lift, 1.0, 1.0).unwrap();
        assert!((b.beta_paper - (15.0_f64).sqrt() / 4.0).abs() < 1e-10);
        // Closure of the closed-form coefficients at the canonical
        // configuration: (lambda cos/(r sqrt))^2 + beta^2 = 1.
        let p = lift.base().point(1.0);
        let g = plane.metric_at(p).unwrap();
        let e = lift.base().velocity(1.0);
        let x = lift.field().value(1.0);
        let r = g.norm(e);
        let cos_paper = params.sqrt_c1d1() * g.inner(e, x);
        let coeff = params.lambda * cos_paper / (r * params.sqrt_c1d1());
        assert!((coeff * coeff + b.beta_paper * b.beta_paper - 1.0).abs() < 1e-10);
    }

    #[test]
    fn negative_radicand_is_reported() {
        // lambda large makes the radicand negative for a tangent-aligned field.
        let params = validate_params(RawParams::new(1.0, 0.0, 1.0, 3.0, 1.0)).unwrap();
        let plane = SurfaceModel::plane();
        let base = BaseCurve::line(plane, ChartPoint::new(0.0, 0.0), TangentVector::new(1.0, 0.0), 1.0, 2.0);
        let lift = make_lift(&base, LiftKind::Natural).unwrap();
        assert!(matches!(
            beta_of(&params, &lift, 1.0, 1.0),
            Err(ClassifyError::NegativeRadicand(_))
        ));
    }

    #[test]
    fn curvature_term_vanishes_on_plane_and_for_parallel_fields() {
        let params = canonical();
        let plane = SurfaceModel::plane();
        let base = BaseCurve::plane_circle(plane, ChartPoint::new(0.0, 0.0), 1.0, 1.0, 4.0);
        let lift = make_lift(&base, LiftKind::ConstantAngle { angle: 0.4 }).unwrap();
        let (direct, formula) = curvature_term(&params, &lift, 1.0, 1.0).unwrap();
        assert!(direct.abs() < 1e-12 && formula.abs() < 1e-12);

        let sphere = SurfaceModel::sphere(1.0);
        let base = BaseCurve::sphere_circle(sphere, 1.0, 1.0, 1.0, 4.0);
        let lift = make_lift(&base, LiftKind::Parallel { angle: 0.7 }).unwrap();
        let (direct, _) = curvature_term(&params, &lift, 1.0, 1.0).unwrap();
        assert!(direct.abs() < 1e-9);
    }

    #[test]
    fn curvature_term_constant_curvature_identity() {
        // Direct value equals K * g(E, nabla_E X) on the sphere.
        let params = canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let base = BaseCurve::sphere_circle(sphere.clone(), 1.0, 1.0, 1.0, 4.0);
        let lift = make_lift(&base, LiftKind::ConstantAngle { angle: 0.6 }).unwrap();
        for &s in &[0.6, 1.9, 3.1] {
            let (direct, _) = curvature_term(&params, &lift, s, 1.0).unwrap();
            let e = lift.base().velocity(s);
            let w = lift.cov_field_deriv(s).unwrap();
            let gew = sphere.inner(lift.base().point(s), e, w).unwrap();
            assert!((direct - gew).abs() < 1e-8);
        }
    }

    #[test]
    fn classify_slant_and_legendre_on_geodesic_base() {
        let params = canonical();
        let plane = SurfaceModel::plane();
        let base = BaseCurve::line(plane, ChartPoint::new(0.0, 0.0), TangentVector::new(1.0, 0.0), 1.0, 2.0);
        let slant = arclength(base.clone(), LiftKind::Parallel { angle: FRAC_PI_3 }, &params);
        let report = classify(&params, &slant, CLASSIFY_TOL, 64).unwrap();
        assert!(matches!(report.t_verdict, TangentVerdict::Slant(_)));
        // The slant lift over a geodesic is a g1 geodesic: degenerate
        // N-Legendre with identically vanishing unnormalized product.
        assert_eq!(report.n_verdict, NormalVerdict::NLegendre { degenerate: true });
        assert!(report.normal.max_unnormalized < 1e-9);

        let legendre = arclength(base, LiftKind::Parallel { angle: FRAC_PI_2 }, &params);
        let report = classify(&params, &legendre, CLASSIFY_TOL, 64).unwrap();
        assert_eq!(report.t_verdict, TangentVerdict::Legendre);
    }

    #[test]
    fn slant_lift_over_circle_on_unit_sphere_is_g1_geodesic() {
        // At the canonical configuration the unit-sphere bundle carries the
        // bi-invariant geometry of SO(3); constant-angle lifts over circles
        // are orbits of one-parameter isometry groups, hence geodesics.
        let params = canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let base = BaseCurve::sphere_circle(sphere, 1.0, FRAC_PI_3, 1.0, 4.0);
        let curve = arclength(base, LiftKind::ConstantAngle { angle: 0.5 }, &params);
        let report = classify(&params, &curve, CLASSIFY_TOL, 48).unwrap();
        assert!(matches!(report.t_verdict, TangentVerdict::Slant(_)));
        assert_eq!(report.n_verdict, NormalVerdict::NLegendre { degenerate: true });
        assert!(report.normal.max_unnormalized < 1e-9);
    }

    #[test]
    fn classify_slant_lift_on_unit_sphere_is_n_legendre() {
        // A rotating fiber angle with compensating base curvature keeps the
        // slant condition while breaking the orbit symmetry, so the lift
        // has a genuine Frenet frame.
        let params = canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let lift = crate::scenario::engineered_slant(
            &sphere,
            &params,
            0.3,
            crate::scenario::linear_angle(0.15, 0.45),
            ChartPoint::new(FRAC_PI_2, 0.0),
            TangentVector::new(0.0, 1.0),
            3.2,
        )
        .unwrap();
        let (curve, _) = reparameterize_arclength(&params, &lift).unwrap();
        let report = classify(&params, &curve, CLASSIFY_TOL, 96).unwrap();
        assert!(matches!(report.t_verdict, TangentVerdict::Slant(_)));
        assert_eq!(report.n_verdict, NormalVerdict::NLegendre { degenerate: false });
        assert!(report.normal.formula_vs_direct < 1e-5, "gap {}", report.normal.formula_vs_direct);
        assert!(report.normal.eq8_vs_direct < 1e-5, "gap {}", report.normal.eq8_vs_direct);
    }

    #[test]
    fn classify_non_slant_rotating_field_matches_formula() {
        // Rotating field over a small circle: non-slant; the closed form
        // reduces to -theta' sin theta / kappa on the unit sphere with
        // c2 = c1 + d1 and must track the direct product.
        let params = canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let base = BaseCurve::sphere_circle(sphere.clone(), 1.0, FRAC_PI_3, 1.0, 4.5);
        let fr = base_frenet(&base);
        let field = UnitField::new(Arc::new({
            let fr = fr.clone();
            move |s: f64| {
                let f = fr.frame_at(s).expect("frame");
                let (dt, dn) = fr.frame_derivs(s).expect("derivs");
                let phi = 0.5 + 0.35 * (0.9_f64 * s).sin();
                let dphi = 0.35 * 0.9 * (0.9_f64 * s).cos();
                let x = f.t.scale(phi.cos()).add(f.n.scale(phi.sin()));
                let dx = dt
                    .scale(phi.cos())
                    .add(dn.scale(phi.sin()))
                    .add(f.n.scale(phi.cos() * dphi))
                    .sub(f.t.scale(phi.sin() * dphi));
                (x, dx)
            }
        }));
        let lift = make_lift(&base, LiftKind::Prescribed { field }).unwrap();
        let (curve, _) = reparameterize_arclength(&params, &lift).unwrap();
        let report = classify(&params, &curve, CLASSIFY_TOL, 96).unwrap();
        assert_eq!(report.t_verdict, TangentVerdict::None);
        assert!(report.normal.formula_vs_direct < 1e-5, "gap {}", report.normal.formula_vs_direct);
        assert!(report.normal.eq8_vs_direct < 1e-5);
        // Cauchy-Schwarz bound on the direct product.
        assert!(max_abs(&report.normal.n_xi_direct) <= 1.0 + 1e-6);
    }

    #[test]
    fn branch_matching_picks_the_field_side() {
        let params = canonical();
        let plane = SurfaceModel::plane();
        let base = BaseCurve::plane_circle(plane, ChartPoint::new(0.0, 0.0), 1.0, 1.0, 4.0);
        for angle in [0.6, -0.6] {
            let curve = arclength(base.clone(), LiftKind::ConstantAngle { angle }, &params);
            let grid = curve.sample_grid(32, curve.frenet_margin());
            let d = decomposition_data(&params, &curve, &grid).unwrap();
            assert_eq!(d.branch, angle.signum());
            // The matched branch reproduces g(N, X) through the closed form.
            for (bp, bf) in d.beta_paper.iter().zip(&d.beta_fp) {
                assert!((bp - bf).abs() < 1e-8, "{bp} vs {bf}");
            }
        }
    }

    #[test]
    fn eq12_reconstruction_and_orthogonality() {
        let params = canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let base = BaseCurve::sphere_circle(sphere.clone(), 1.0, FRAC_PI_3, 1.0, 4.0);
        let curve = arclength(base, LiftKind::ConstantAngle { angle: 0.5 }, &params);
        let grid = curve.sample_grid(48, curve.frenet_margin());
        let d = decomposition_data(&params, &curve, &grid).unwrap();
        assert!(d.e_reconstruction_max < 1e-6, "rec {}", d.e_reconstruction_max);
        assert!(d.unit_closure_residual < 1e-10);
        assert!(d.curvature_term_gap < 1e-6, "gap {}", d.curvature_term_gap);
        // g(X, nabla_E X) = 0 by unitality.
        for &s in grid.iter().step_by(9) {
            let x = curve.field().value(s);
            let w = curve.cov_field_deriv(s).unwrap();
            let ip = sphere.inner(curve.base().point(s), x, w).unwrap();
            assert!(ip.abs() < 1e-8);
        }
    }
}
