//! Builders for the builtin verification scenarios: engineered slant and
//! Legendre lifts with genuine Frenet frames, the degenerate orbit lifts,
//! rotating-field probes, and the scenario families the proposition
//! harness quantifies over.

use std::sync::Arc;

use crate::lift::{angle_lift, make_lift, reparameterize_arclength, LiftError, LiftKind, LiftedCurve};
use crate::structure::StructureParams;
use crate::surface::{curve_with_curvature, BaseCurve, ChartPoint, SurfaceModel, TangentVector};

/// A named lifted curve for reports and evidence tables.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub curve: LiftedCurve,
}

impl Scenario {
    pub fn new(name: impl Into<String>, curve: LiftedCurve) -> Self {
        Self { name: name.into(), curve }
    }
}

/// Arc-length form of a lift, tagged with a name.
pub fn arclength_scenario(
    params: &StructureParams,
    name: impl Into<String>,
    lift: &LiftedCurve,
) -> Result<Scenario, LiftError> {
    let (curve, _) = reparameterize_arclength(params, lift)?;
    Ok(Scenario::new(name, curve))
}

/// Smooth angle profile phi(s) = base + amp * sin(freq * s) with derivative.
pub fn sine_angle(base: f64, amp: f64, freq: f64) -> Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync> {
    Arc::new(move |s| (base + amp * (freq * s).sin(), amp * freq * (freq * s).cos()))
}

/// Constant angle profile.
pub fn const_angle(value: f64) -> Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync> {
    Arc::new(move |_| (value, 0.0))
}

/// Linear angle profile phi = slope * s + offset.
pub fn linear_angle(slope: f64, offset: f64) -> Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync> {
    Arc::new(move |s| (slope * s + offset, slope))
}

/// Monotone ramp with a ripple: phi = offset + slope s + amp sin(freq s),
/// with slope > amp * freq so the derivative never vanishes.
pub fn ramp_angle(
    slope: f64,
    offset: f64,
    amp: f64,
    freq: f64,
) -> Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync> {
    assert!(slope.abs() > (amp * freq).abs());
    Arc::new(move |s| {
        (
            offset + slope * s + amp * (freq * s).sin(),
            slope + amp * freq * (freq * s).cos(),
        )
    })
}

/// A slant lift with a genuine Frenet frame.
///
/// The fiber angle phi(s) and the base curvature are chosen jointly so the
/// arc-length curve has g1(T, xi) identically equal to the target: the
/// construction solves
///     v(s) = (c1 + d1) cos(phi) / (2 lambda t0),
///     c2 (phi' + kappa)^2 = v^2/alpha - c1 - d1 cos^2(phi)
/// for the base curvature kappa(s) of a unit-speed base curve. A varying
/// phi breaks the orbit symmetry that would otherwise make the lift a g1
/// geodesic.
pub fn engineered_slant(
    surface: &Arc<SurfaceModel>,
    params: &StructureParams,
    target_cos: f64,
    phi: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
    start: ChartPoint,
    heading: TangentVector,
    len: f64,
) -> Result<LiftedCurve, LiftError> {
    assert!(target_cos != 0.0, "use engineered_legendre for a zero target");
    let c1d1 = params.c1 + params.d1;
    let p = *params;
    let phi_for_kappa = phi.clone();
    let kappa = Arc::new(move |s: f64| -> f64 {
        let (a, da) = phi_for_kappa(s);
        let v = c1d1 * a.cos() / (2.0 * p.lambda * target_cos);
        let rad = (v * v / p.alpha - p.c1 - p.d1 * a.cos() * a.cos()) / p.c2;
        assert!(
            rad >= 0.0,
            "engineered slant profile is infeasible at s = {s}: radicand {rad}"
        );
        rad.sqrt() - da
    });
    let base = curve_with_curvature(surface, start, heading, kappa, len)?;
    angle_lift(&base, phi)
}

/// A Legendre lift with a genuine Frenet frame: X = N over a base of
/// varying curvature.
pub fn engineered_legendre(
    surface: &Arc<SurfaceModel>,
    kappa: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    start: ChartPoint,
    heading: TangentVector,
    len: f64,
) -> Result<LiftedCurve, LiftError> {
    let base = curve_with_curvature(surface, start, heading, kappa, len)?;
    angle_lift(&base, const_angle(std::f64::consts::FRAC_PI_2))
}

/// Unit-speed small circle on a sphere, with the equator at colat = pi/2.
pub fn sphere_circle_base(surface: &Arc<SurfaceModel>, radius: f64, colat: f64, len: f64) -> BaseCurve {
    BaseCurve::sphere_circle(surface.clone(), radius, colat, 1.0, len)
}

/// The family of slant and Legendre lifts on the unit-sphere bundle that
/// the N-Legendre proposition quantifies over, plus two parallel lifts
/// that are not slant (they exercise the skip path) and one orbit lift
/// that is a g1 geodesic (the degenerate case).
pub fn unit_sphere_slant_family(
    params: &StructureParams,
) -> Result<Vec<Scenario>, LiftError> {
    let sphere = SurfaceModel::sphere(1.0);
    let eq = ChartPoint::new(std::f64::consts::FRAC_PI_2, 0.0);
    let east = TangentVector::new(0.0, 1.0);
    let tilt = TangentVector::new(0.15, 1.0);
    let mut out = Vec::new();

    // Monotone angle ramps keep the curvature of the lift bounded away
    // from zero; the ramp stays inside the feasibility window
    // |cos(phi)| >= |target|.
    let profiles: [(f64, Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>); 4] = [
        (0.30, linear_angle(0.15, 0.45)),
        (0.30, ramp_angle(0.18, 0.40, 0.05, 1.5)),
        (0.42, linear_angle(0.17, 0.35)),
        (-0.35, linear_angle(0.16, 2.05)),
    ];
    for (i, (t0, profile)) in profiles.into_iter().enumerate() {
        let lift = engineered_slant(&sphere, params, t0, profile, eq, east, 3.2)?;
        out.push(arclength_scenario(
            params,
            format!("slant-engineered-{} (target {t0})", i + 1),
            &lift,
        )?);
    }
    let legendre = engineered_legendre(
        &sphere,
        Arc::new(|s: f64| 0.25 + 0.2 * s),
        eq,
        tilt,
        3.0,
    )?;
    out.push(arclength_scenario(params, "legendre-engineered (X = N)", &legendre)?);

    // Orbit lift: slant but a g1 geodesic at the canonical configuration.
    let circle = sphere_circle_base(&sphere, 1.0, std::f64::consts::FRAC_PI_3, 4.0);
    let orbit = make_lift(&circle, LiftKind::ConstantAngle { angle: 0.5 })?;
    out.push(arclength_scenario(params, "slant-orbit (small circle, constant angle)", &orbit)?);

    // Parallel lifts over small circles drift in angle: not slant.
    for colat in [std::f64::consts::FRAC_PI_3, 1.0] {
        let circle = sphere_circle_base(&sphere, 1.0, colat, 4.0);
        let lift = make_lift(&circle, LiftKind::Parallel { angle: 0.6 })?;
        out.push(arclength_scenario(
            params,
            format!("parallel-drift (colat {colat:.2})"),
            &lift,
        )?);
    }
    Ok(out)
}

/// Rotating-field probe over a small circle: non-slant with a genuine
/// Frenet frame; on the unit sphere with c2 = c1 + d1 the closed-form
/// normal product reduces to -theta' sin(theta) / kappa.
pub fn rotating_probe(
    params: &StructureParams,
    radius: f64,
    colat: f64,
    len: f64,
) -> Result<Scenario, LiftError> {
    let sphere = SurfaceModel::sphere(radius);
    let base = sphere_circle_base(&sphere, radius, colat, len);
    let lift = angle_lift(&base, sine_angle(0.5, 0.35, 0.9))?;
    arclength_scenario(params, format!("rotating-probe (R {radius}, colat {colat:.2})"), &lift)
}

/// Builtin scenario set for the closed-form/direct equivalence check at
/// the canonical configuration. Every member has a genuine Frenet frame
/// and satisfies the closed-form chain's hypotheses (nonvanishing field
/// derivative; the base-curvature term of the printed closed form either
/// vanishes or carries no weight).
pub fn chain_equivalence_scenarios(
    params: &StructureParams,
) -> Result<Vec<Scenario>, LiftError> {
    let sphere = SurfaceModel::sphere(1.0);
    let plane = SurfaceModel::plane();
    let eq = ChartPoint::new(std::f64::consts::FRAC_PI_2, 0.0);
    let east = TangentVector::new(0.0, 1.0);
    let mut out = Vec::new();

    let s1 = engineered_slant(&sphere, params, 0.3, linear_angle(0.15, 0.45), eq, east, 3.2)?;
    out.push(arclength_scenario(params, "sphere slant-engineered", &s1)?);

    let s2 = engineered_legendre(&sphere, Arc::new(|s: f64| 0.25 + 0.2 * s), eq, TangentVector::new(0.15, 1.0), 3.0)?;
    out.push(arclength_scenario(params, "sphere legendre-engineered", &s2)?);

    out.push(rotating_probe(params, 1.0, std::f64::consts::FRAC_PI_3, 4.5)?);

    let circle = BaseCurve::plane_circle(plane.clone(), ChartPoint::new(0.0, 0.0), 1.0, 1.0, 4.0);
    let natural = make_lift(&circle, LiftKind::Natural)?;
    out.push(arclength_scenario(params, "plane circle natural lift", &natural)?);

    Ok(out)
}

/// Scenarios that expose the printed closed form's extra factor of the
/// base speed in its curvature term (visible whenever the prefactor and
/// the base curvature are both nonzero and the base speed is not 1).
pub fn chain_caveat_scenarios(params: &StructureParams) -> Result<Vec<Scenario>, LiftError> {
    let plane = SurfaceModel::plane();
    let mut out = Vec::new();
    let circle = BaseCurve::plane_circle(plane.clone(), ChartPoint::new(0.0, 0.0), 1.0, 1.0, 4.0);
    let slant = make_lift(&circle, LiftKind::ConstantAngle { angle: std::f64::consts::FRAC_PI_6 })?;
    out.push(arclength_scenario(params, "plane circle constant-angle", &slant)?);

    let sphere2 = SurfaceModel::sphere(2.0);
    let small = sphere_circle_base(&sphere2, 2.0, 1.1, 4.0);
    let slant2 = make_lift(&small, LiftKind::ConstantAngle { angle: 0.7 })?;
    out.push(arclength_scenario(params, "sphere R=2 small-circle constant-angle", &slant2)?);
    Ok(out)
}

/// Slant-lift family over a flat or non-unit-curvature surface for the
/// constancy proposition: a geodesic base (degenerate orbit case), circle
/// bases at several angles, the natural lift (the zero-beta member) and a
/// spiral base whose curvature is not constant.
pub fn constant_speed_slant_family(
    params: &StructureParams,
    surface: &Arc<SurfaceModel>,
    sphere_radius: Option<f64>,
) -> Result<Vec<Scenario>, LiftError> {
    let mut out = Vec::new();
    match sphere_radius {
        None => {
            let line = BaseCurve::line(
                surface.clone(),
                ChartPoint::new(0.0, 0.0),
                TangentVector::new(1.0, 0.0),
                1.0,
                2.5,
            );
            let slant = make_lift(&line, LiftKind::Parallel { angle: std::f64::consts::FRAC_PI_3 })?;
            out.push(arclength_scenario(params, "line parallel (slant over geodesic)", &slant)?);

            let circle = BaseCurve::plane_circle(surface.clone(), ChartPoint::new(0.0, 0.0), 1.0, 1.0, 4.0);
            for angle in [std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_3] {
                let lift = make_lift(&circle, LiftKind::ConstantAngle { angle })?;
                out.push(arclength_scenario(
                    params,
                    format!("circle constant-angle {angle:.3}"),
                    &lift,
                )?);
            }
            let natural = make_lift(&circle, LiftKind::Natural)?;
            out.push(arclength_scenario(params, "circle natural (beta = 0)", &natural)?);

            let spiral = curve_with_curvature(
                surface,
                ChartPoint::new(0.0, 0.0),
                TangentVector::new(1.0, 0.0),
                Arc::new(|s: f64| 0.4 + 0.35 * s),
                3.0,
            )?;
            let lift = make_lift(&spiral, LiftKind::ConstantAngle { angle: std::f64::consts::FRAC_PI_4 })?;
            out.push(arclength_scenario(params, "spiral constant-angle (kappa varies)", &lift)?);
        }
        Some(r) => {
            let great = sphere_circle_base(surface, r, std::f64::consts::FRAC_PI_2, 4.0);
            let slant = make_lift(&great, LiftKind::Parallel { angle: std::f64::consts::FRAC_PI_3 })?;
            out.push(arclength_scenario(params, "great-circle parallel (slant over geodesic)", &slant)?);

            for (colat, angle) in [(1.0, std::f64::consts::FRAC_PI_4), (1.25, std::f64::consts::FRAC_PI_6)] {
                let circle = sphere_circle_base(surface, r, colat, 4.0);
                let lift = make_lift(&circle, LiftKind::ConstantAngle { angle })?;
                out.push(arclength_scenario(
                    params,
                    format!("small-circle constant-angle (colat {colat:.2}, angle {angle:.3})"),
                    &lift,
                )?);
            }
            let circle = sphere_circle_base(surface, r, 1.1, 4.0);
            let natural = make_lift(&circle, LiftKind::Natural)?;
            out.push(arclength_scenario(params, "small-circle natural (beta = 0)", &natural)?);

            let spiral = curve_with_curvature(
                surface,
                ChartPoint::new(std::f64::consts::FRAC_PI_2, 0.0),
                TangentVector::new(0.1, 1.0),
                Arc::new(|s: f64| 0.15 + 0.2 * s),
                3.0,
            )?;
            let lift = make_lift(&spiral, LiftKind::ConstantAngle { angle: std::f64::consts::FRAC_PI_4 })?;
            out.push(arclength_scenario(params, "spiral constant-angle (kappa varies)", &lift)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, NormalVerdict, TangentVerdict, CLASSIFY_TOL};

    #[test]
    fn engineered_slant_is_slant_with_frenet_frame() {
        let params = StructureParams::canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let lift = engineered_slant(
            &sphere,
            &params,
            0.3,
            linear_angle(0.15, 0.45),
            ChartPoint::new(std::f64::consts::FRAC_PI_2, 0.0),
            TangentVector::new(0.0, 1.0),
            3.2,
        )
        .unwrap();
        let (curve, _) = reparameterize_arclength(&params, &lift).unwrap();
        let report = classify(&params, &curve, CLASSIFY_TOL, 64).unwrap();
        match report.t_verdict {
            TangentVerdict::Slant(c) => assert!((c - 0.3).abs() < 1e-6, "slant constant {c}"),
            other => panic!("expected slant, got {other:?}"),
        }
        assert_eq!(report.n_verdict, NormalVerdict::NLegendre { degenerate: false });
    }

    #[test]
    fn engineered_legendre_is_legendre_with_frenet_frame() {
        let params = StructureParams::canonical();
        let sphere = SurfaceModel::sphere(1.0);
        let lift = engineered_legendre(
            &sphere,
            Arc::new(|s: f64| 0.25 + 0.2 * s),
            ChartPoint::new(std::f64::consts::FRAC_PI_2, 0.0),
            TangentVector::new(0.15, 1.0),
            3.0,
        )
        .unwrap();
        let (curve, _) = reparameterize_arclength(&params, &lift).unwrap();
        let report = classify(&params, &curve, CLASSIFY_TOL, 64).unwrap();
        assert_eq!(report.t_verdict, TangentVerdict::Legendre);
        assert_eq!(report.n_verdict, NormalVerdict::NLegendre { degenerate: false });
    }

    #[test]
    fn family_has_enough_slant_members() {
        let params = StructureParams::canonical();
        let family = unit_sphere_slant_family(&params).unwrap();
        let mut eligible = 0;
        for sc in &family {
            let report = classify(&params, &sc.curve, CLASSIFY_TOL, 48).unwrap();
            if report.t_verdict.is_slant_or_legendre() {
                eligible += 1;
            }
        }
        assert!(eligible >= 6, "only {eligible} slant/Legendre members");
    }
}
