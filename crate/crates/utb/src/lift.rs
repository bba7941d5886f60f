//! Curves in the unit tangent bundle: a base curve paired with a unit field
//! along it, their g1 arc-length form, covariant differentiation along the
//! lifted curve, and the Frenet apparatus (T, N, B, kappa, tau) of g1.

use std::sync::Arc;

use thiserror::Error;

use crate::numeric::{deriv4, deriv4_arr, rk4_integrate, HermiteSpline, RK_STEPS_PER_UNIT};
use crate::structure::{
    g1, g1_cross, g1_norm, nabla1, BundlePoint, BundleTangent, NablaCase, StructureError,
    StructureParams,
};
use crate::surface::{
    base_frenet, parallel_field, BaseCurve, GeomError, SurfaceModel, TangentVector,
};

/// Below this curvature the Frenet normal of g1 is refused rather than
/// amplified out of noise.
pub const KAPPA_MIN: f64 = 1e-7;

/// Step for differentiating smooth closures along a lifted curve.
pub const LIFT_FD_STEP: f64 = 1e-3;

/// Wider step for the second differentiation level (the normal field),
/// whose inputs already carry first-level noise.
pub const LIFT_FD_STEP_OUTER: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("lifted curve has zero g1 speed at s = {0}")]
    ZeroSpeed(f64),
    #[error("prescribed field cannot be unit-normalized (|X| = {0:.3e})")]
    NonUnitField(f64),
    #[error(
        "Frenet frame undefined: kappa dropped to {kappa_min:.3e} (max over grid {kappa_max:.3e}); \
         the curve is a g1-geodesic when the max is also below threshold"
    )]
    VanishingCurvature { kappa_min: f64, kappa_max: f64 },
    #[error("stencil at s = {0} leaves the curve domain")]
    DomainBoundary(f64),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Unit vector field along a base curve, with its plain s-derivative.
#[derive(Clone)]
pub struct UnitField {
    eval: Arc<dyn Fn(f64) -> (TangentVector, TangentVector) + Send + Sync>,
}

impl UnitField {
    pub fn new(eval: Arc<dyn Fn(f64) -> (TangentVector, TangentVector) + Send + Sync>) -> Self {
        Self { eval }
    }

    pub fn value(&self, s: f64) -> TangentVector {
        (self.eval)(s).0
    }

    pub fn jet(&self, s: f64) -> (TangentVector, TangentVector) {
        (self.eval)(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Raw,
    G1Arclength,
}

/// How the unit field of a lift is built from the base curve.
#[derive(Clone)]
pub enum LiftKind {
    /// X = T, the normalized tangent.
    Natural,
    /// Parallel transport of cos(a) T + sin(a) N from the left endpoint.
    Parallel { angle: f64 },
    /// X = cos(a) T + sin(a) N pointwise.
    ConstantAngle { angle: f64 },
    /// User-supplied field; renormalized with a warning when needed.
    Prescribed { field: UnitField },
}

/// A curve (gamma(s), X(s)) in the unit tangent bundle.
#[derive(Clone)]
pub struct LiftedCurve {
    base: BaseCurve,
    field: UnitField,
    param: ParamKind,
    warnings: Vec<String>,
}

impl LiftedCurve {
    pub fn new(base: BaseCurve, field: UnitField, param: ParamKind) -> Self {
        Self { base, field, param, warnings: Vec::new() }
    }

    pub fn surface(&self) -> &Arc<SurfaceModel> {
        self.base.surface()
    }

    pub fn base(&self) -> &BaseCurve {
        &self.base
    }

    pub fn field(&self) -> &UnitField {
        &self.field
    }

    pub fn domain(&self) -> (f64, f64) {
        self.base.domain()
    }

    pub fn param(&self) -> ParamKind {
        self.param
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn bundle_point(&self, s: f64) -> Result<BundlePoint, LiftError> {
        Ok(BundlePoint::normalized(
            self.surface(),
            self.base.point(s),
            self.field.value(s),
        )?)
    }

    /// Covariant derivative of the unit field along the base curve.
    pub fn cov_field_deriv(&self, s: f64) -> Result<TangentVector, LiftError> {
        let (x, dx) = self.field.jet(s);
        let j = self.base.jet(s);
        let gamma = self.surface().christoffel_at(j.pos)?;
        Ok(dx.add(gamma.apply(j.vel, x)))
    }

    /// The lifted tangent E^h + (nabla_E X)^t of the curve.
    pub fn lifted_tangent(&self, s: f64) -> Result<BundleTangent, LiftError> {
        let point = self.bundle_point(s)?;
        let w = self.cov_field_deriv(s)?;
        Ok(BundleTangent::projected(self.surface(), &point, self.base.velocity(s), w)?)
    }

    /// Norm of the lifted tangent under g1.
    pub fn g1_speed(&self, params: &StructureParams, s: f64) -> Result<f64, LiftError> {
        let point = self.bundle_point(s)?;
        let t = self.lifted_tangent(s)?;
        Ok(g1_norm(params, self.surface(), &point, &t)?)
    }

    pub fn sample_grid(&self, n: usize, margin: f64) -> Vec<f64> {
        self.base.sample_grid(n, margin)
    }

    /// Margin wide enough for the two-level Frenet stencils.
    pub fn frenet_margin(&self) -> f64 {
        2.0 * (LIFT_FD_STEP_OUTER + 2.0 * LIFT_FD_STEP) + 1e-9
    }

    fn with_warnings(mut self, warnings: Vec<String>) -> Self {
        self.warnings = warnings;
        self
    }
}

/// Builds the unit field of the requested lift kind over the base curve.
pub fn make_lift(base: &BaseCurve, kind: LiftKind) -> Result<LiftedCurve, LiftError> {
    let surface = base.surface().clone();
    let grid = base.sample_grid(64, 0.0);
    for &s in &grid {
        let r = base.speed(s)?;
        if !(r > 0.0) {
            return Err(LiftError::ZeroSpeed(s));
        }
    }
    let mut warnings = Vec::new();
    let field = match kind {
        LiftKind::Natural => {
            let b = base.clone();
            let surf = surface.clone();
            UnitField::new(Arc::new(move |s| {
                let j = b.jet(s);
                let g = surf.metric_at(j.pos).expect("chart exit");
                let r = g.norm(j.vel);
                let x = j.vel.scale(1.0 / r);
                // r' = g(nabla_E E, E)/r, and d/ds (E/r) = E'/r - E r'/r^2.
                let acc_cov = b.covariant_accel(s).expect("chart exit");
                let rp = g.inner(acc_cov, j.vel) / r;
                let dx = j.acc.scale(1.0 / r).sub(j.vel.scale(rp / (r * r)));
                (x, dx)
            }))
        }
        LiftKind::Parallel { angle } => {
            let fr = base_frenet(base);
            let s0 = base.domain().0;
            let f0 = fr.frame_at(s0)?;
            let v0 = f0.t.scale(angle.cos()).add(f0.n.scale(angle.sin()));
            let transported = parallel_field(base, v0, s0)?;
            UnitField::new(Arc::new(move |s| transported(s)))
        }
        LiftKind::ConstantAngle { angle } => {
            let fr = base_frenet(base);
            UnitField::new(Arc::new(move |s| {
                let f = fr.frame_at(s).expect("chart exit");
                let (dt, dn) = fr.frame_derivs(s).expect("chart exit");
                let x = f.t.scale(angle.cos()).add(f.n.scale(angle.sin()));
                let dx = dt.scale(angle.cos()).add(dn.scale(angle.sin()));
                (x, dx)
            }))
        }
        LiftKind::Prescribed { field } => {
            let mut max_dev = 0.0_f64;
            for &s in &grid {
                let n = surface.norm(base.point(s), field.value(s))?;
                if n < 1e-6 {
                    return Err(LiftError::NonUnitField(n));
                }
                max_dev = max_dev.max((n - 1.0).abs());
            }
            if max_dev > 1e-8 {
                warnings.push(format!(
                    "prescribed field renormalized; largest unit-norm deviation {max_dev:.3e}"
                ));
                let b = base.clone();
                let surf = surface.clone();
                let raw = field.clone();
                let normalized = move |s: f64| -> [f64; 2] {
                    let v = raw.value(s);
                    let n = surf.norm(b.point(s), v).expect("chart exit");
                    [v.v1 / n, v.v2 / n]
                };
                let normalized = Arc::new(normalized);
                UnitField::new(Arc::new(move |s| {
                    let v = normalized(s);
                    let d = deriv4_arr(|t| normalized(t), s, LIFT_FD_STEP);
                    (TangentVector::new(v[0], v[1]), TangentVector::new(d[0], d[1]))
                }))
            } else {
                field
            }
        }
    };
    // Membership check of the constructed field.
    for &s in &grid {
        let n = surface.norm(base.point(s), field.value(s))?;
        if (n - 1.0).abs() > 1e-8 {
            return Err(LiftError::NonUnitField(n));
        }
    }
    Ok(LiftedCurve::new(base.clone(), field, ParamKind::Raw).with_warnings(warnings))
}

/// Lift whose field makes the prescribed (possibly varying) angle with the
/// base Frenet frame: X = cos(phi) T + sin(phi) N with phi(s) and its
/// derivative supplied.
pub fn angle_lift(
    base: &BaseCurve,
    phi: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
) -> Result<LiftedCurve, LiftError> {
    let fr = base_frenet(base);
    let field = UnitField::new(Arc::new(move |s| {
        let (a, da) = phi(s);
        let f = fr.frame_at(s).expect("chart exit");
        let (dt, dn) = fr.frame_derivs(s).expect("chart exit");
        let x = f.t.scale(a.cos()).add(f.n.scale(a.sin()));
        let dx = dt
            .scale(a.cos())
            .add(dn.scale(a.sin()))
            .add(f.n.scale(a.cos() * da))
            .sub(f.t.scale(a.sin() * da));
        (x, dx)
    }));
    make_lift(base, LiftKind::Prescribed { field })
}

/// Monotone map between the raw parameter and g1 arc-length.
#[derive(Clone)]
pub struct ParamMap {
    s_of_sigma: Arc<HermiteSpline<1>>,
    sigma_of_s: Arc<HermiteSpline<1>>,
    pub length: f64,
}

impl ParamMap {
    pub fn s_of(&self, sigma: f64) -> f64 {
        self.s_of_sigma.eval(sigma)[0]
    }

    pub fn sigma_of(&self, s: f64) -> f64 {
        self.sigma_of_s.eval(s)[0]
    }
}

/// Reparameterizes the lift by g1 arc-length; the returned curve reports
/// g1_speed identically 1 and carries the monotone parameter map.
pub fn reparameterize_arclength(
    params: &StructureParams,
    curve: &LiftedCurve,
) -> Result<(LiftedCurve, ParamMap), LiftError> {
    let (s0, s1) = curve.domain();
    let speed = {
        let c = curve.clone();
        let p = *params;
        Arc::new(move |s: f64| c.g1_speed(&p, s).expect("speed evaluation failed"))
    };
    for &s in &curve.sample_grid(64, 0.0) {
        if speed(s) < 1e-12 {
            return Err(LiftError::ZeroSpeed(s));
        }
    }
    let rhs = {
        let speed = speed.clone();
        move |s: f64, _y: &[f64; 1]| [speed(s)]
    };
    let steps = ((s1 - s0) * RK_STEPS_PER_UNIT as f64).ceil().max(64.0) as usize;
    let sol = rk4_integrate(&rhs, [0.0], s0, s1, steps);
    let length = sol.last().unwrap().1[0];
    let ss: Vec<f64> = sol.iter().map(|(s, _)| *s).collect();
    let sigmas: Vec<f64> = sol.iter().map(|(_, y)| y[0]).collect();
    let inv = HermiteSpline::new(
        sigmas.clone(),
        ss.iter().map(|&s| [s]).collect(),
        ss.iter().map(|&s| [1.0 / speed(s)]).collect(),
    );
    let fwd = HermiteSpline::new(
        ss.iter().copied().collect(),
        sigmas.iter().map(|&x| [x]).collect(),
        ss.iter().map(|&s| [speed(s)]).collect(),
    );
    let map = ParamMap {
        s_of_sigma: Arc::new(inv),
        sigma_of_s: Arc::new(fwd),
        length,
    };

    let base = curve.base().clone();
    let surface = curve.surface().clone();
    let map_for_jet = map.clone();
    let speed_for_jet = speed.clone();
    let new_base = BaseCurve::from_jet(
        surface,
        Arc::new(move |sigma| {
            let s = map_for_jet.s_of(sigma);
            let j = base.jet(s);
            let v = speed_for_jet(s);
            let sp = 1.0 / v;
            let vp = deriv4(|t| speed_for_jet(t), s, LIFT_FD_STEP);
            let spp = -vp / (v * v * v);
            crate::surface::CurveJet {
                pos: j.pos,
                vel: j.vel.scale(sp),
                acc: j.acc.scale(sp * sp).add(j.vel.scale(spp)),
            }
        }),
        (0.0, length),
    );
    let old_field = curve.field().clone();
    let map_for_field = map.clone();
    let speed_for_field = speed.clone();
    let new_field = UnitField::new(Arc::new(move |sigma| {
        let s = map_for_field.s_of(sigma);
        let (x, dx) = old_field.jet(s);
        (x, dx.scale(1.0 / speed_for_field(s)))
    }));
    let repar = LiftedCurve::new(new_base, new_field, ParamKind::G1Arclength)
        .with_warnings(curve.warnings().to_vec());
    // Spot check the achieved speed.
    for &sig in &repar.sample_grid(32, 1e-6) {
        let v = repar.g1_speed(params, sig)?;
        if (v - 1.0).abs() > 1e-6 {
            return Err(LiftError::Geom(GeomError::IntegrationFailure(format!(
                "arc-length reparameterization missed unit speed: |v - 1| = {:.3e} at sigma = {sig}",
                (v - 1.0).abs()
            ))));
        }
    }
    Ok((repar, map))
}

/// Covariant derivative of a bundle-tangent field along the lifted curve.
///
/// Derivative slots are taken as base covariant derivatives of the
/// horizontal / tangential parts (differences with the given step); all
/// remaining terms evaluate the connection cases pointwise with u = X(s).
pub fn covariant_along_lifted(
    params: &StructureParams,
    curve: &LiftedCurve,
    field: &dyn Fn(f64) -> BundleTangent,
    s: f64,
    step: f64,
) -> Result<BundleTangent, LiftError> {
    let surface = curve.surface();
    let point = curve.bundle_point(s)?;
    let e = curve.base().velocity(s);
    let w = curve.cov_field_deriv(s)?;
    let j = curve.base().jet(s);
    let gamma = surface.christoffel_at(j.pos)?;

    let comps = |t: f64| -> [f64; 4] {
        let v = field(t);
        [v.h.v1, v.h.v2, v.t.v1, v.t.v2]
    };
    let d = deriv4_arr(comps, s, step);
    let here = field(s);
    let cov_a = TangentVector::new(d[0], d[1]).add(gamma.apply(e, here.h));
    let cov_b = TangentVector::new(d[2], d[3]).add(gamma.apply(e, here.t));

    let term_hh = nabla1(params, surface, &point, NablaCase::Hh, e, here.h, cov_a)?;
    let term_th = nabla1(params, surface, &point, NablaCase::Th, w, here.h, TangentVector::ZERO)?;
    let term_ht = nabla1(params, surface, &point, NablaCase::Ht, e, here.t, cov_b)?;
    let term_tt = nabla1(params, surface, &point, NablaCase::Tt, w, here.t, TangentVector::ZERO)?;
    let total = term_hh.add(term_th).add(term_ht).add(term_tt);
    Ok(BundleTangent::projected(surface, &point, total.h, total.t)?)
}

/// One Frenet sample of the lifted curve.
#[derive(Clone, Copy, Debug)]
pub struct FrenetSample {
    pub s: f64,
    pub t_tilde: BundleTangent,
    pub n_tilde: BundleTangent,
    pub b_tilde: BundleTangent,
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Clone, Debug)]
pub struct FrenetApparatus {
    pub samples: Vec<FrenetSample>,
    /// max over samples of ||nabla N + kappa T - tau B||.
    pub normal_eq_residual: f64,
    /// max over samples of ||nabla B + tau N||.
    pub binormal_eq_residual: f64,
    /// max over samples of | ||T|| - 1 |.
    pub tangent_norm_dev: f64,
}

impl FrenetApparatus {
    pub fn kappas(&self) -> Vec<f64> {
        self.samples.iter().map(|f| f.kappa).collect()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.samples.iter().map(|f| f.tau).collect()
    }
}

/// Measures ||nabla_T T|| over the grid without demanding a Frenet frame;
/// used to recognize g1 geodesics.
pub fn acceleration_profile(
    params: &StructureParams,
    curve: &LiftedCurve,
    grid: &[f64],
) -> Result<Vec<f64>, LiftError> {
    let tangent = |t: f64| curve.lifted_tangent(t).expect("tangent evaluation failed");
    let mut out = Vec::with_capacity(grid.len());
    for &s in grid {
        let point = curve.bundle_point(s)?;
        let acc = covariant_along_lifted(params, curve, &tangent, s, LIFT_FD_STEP)?;
        out.push(g1_norm(params, curve.surface(), &point, &acc)?);
    }
    Ok(out)
}

/// The Frenet apparatus of an arc-length lifted curve on a sample grid.
///
/// Fails with `VanishingCurvature` when kappa drops below `KAPPA_MIN`
/// anywhere on the grid; the natural lift of a geodesic is the canonical
/// such case.
pub fn frenet_apparatus(
    params: &StructureParams,
    curve: &LiftedCurve,
    n_samples: usize,
) -> Result<FrenetApparatus, LiftError> {
    assert_eq!(curve.param(), ParamKind::G1Arclength, "Frenet data needs the arc-length form");
    let grid = curve.sample_grid(n_samples.max(8), curve.frenet_margin());
    let surface = curve.surface().clone();

    let tangent = {
        let c = curve.clone();
        move |t: f64| c.lifted_tangent(t).expect("tangent evaluation failed")
    };
    let nabla_t = {
        let c = curve.clone();
        let p = *params;
        let tangent = tangent.clone();
        move |t: f64| {
            covariant_along_lifted(&p, &c, &tangent, t, LIFT_FD_STEP)
                .expect("curvature evaluation failed")
        }
    };
    // Pre-scan kappa over the grid so degenerate curves are refused before
    // any division by kappa.
    let mut kappa_min = f64::INFINITY;
    let mut kappa_max = 0.0_f64;
    for &s in &grid {
        let point = curve.bundle_point(s)?;
        let k = g1_norm(params, &surface, &point, &nabla_t(s))?;
        kappa_min = kappa_min.min(k);
        kappa_max = kappa_max.max(k);
    }
    if kappa_min < KAPPA_MIN {
        return Err(LiftError::VanishingCurvature { kappa_min, kappa_max });
    }

    let normal = {
        let c = curve.clone();
        let p = *params;
        let s = surface.clone();
        let nabla_t = nabla_t.clone();
        move |t: f64| {
            let point = c.bundle_point(t).expect("point evaluation failed");
            let v = nabla_t(t);
            let k = g1_norm(&p, &s, &point, &v).expect("norm evaluation failed");
            v.scale(1.0 / k)
        }
    };
    let binormal = {
        let c = curve.clone();
        let p = *params;
        let s = surface.clone();
        let tangent = tangent.clone();
        let normal = normal.clone();
        move |t: f64| {
            let point = c.bundle_point(t).expect("point evaluation failed");
            g1_cross(&p, &s, &point, &tangent(t), &normal(t)).expect("cross product failed")
        }
    };

    let mut samples = Vec::with_capacity(grid.len());
    let mut res_n = 0.0_f64;
    let mut res_b = 0.0_f64;
    let mut dev_t = 0.0_f64;
    for &s in &grid {
        let point = curve.bundle_point(s)?;
        let t_tilde = tangent(s);
        let acc = nabla_t(s);
        let kappa = g1_norm(params, &surface, &point, &acc)?;
        let n_tilde = acc.scale(1.0 / kappa);
        let b_tilde = g1_cross(params, &surface, &point, &t_tilde, &n_tilde)?;
        let nabla_n = covariant_along_lifted(params, curve, &normal, s, LIFT_FD_STEP_OUTER)?;
        let tau = g1(params, &surface, &point, &nabla_n, &b_tilde)?;
        // Frenet residuals.
        let r2 = nabla_n.add(t_tilde.scale(kappa)).sub(b_tilde.scale(tau));
        res_n = res_n.max(g1_norm(params, &surface, &point, &r2)?);
        let nabla_b = covariant_along_lifted(params, curve, &binormal, s, LIFT_FD_STEP_OUTER)?;
        let r3 = nabla_b.add(n_tilde.scale(tau));
        res_b = res_b.max(g1_norm(params, &surface, &point, &r3)?);
        dev_t = dev_t.max((g1_norm(params, &surface, &point, &t_tilde)? - 1.0).abs());
        samples.push(FrenetSample { s, t_tilde, n_tilde, b_tilde, kappa, tau });
    }
    Ok(FrenetApparatus {
        samples,
        normal_eq_residual: res_n,
        binormal_eq_residual: res_b,
        tangent_norm_dev: dev_t,
    })
}
