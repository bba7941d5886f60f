//! The natural diagonal structure on the unit tangent bundle: parameter
//! validation, the induced metric g1, the contact tensors (phi, xi, eta),
//! the Levi-Civita connection of g1 case by case, and an independent
//! chart-based finite-difference oracle for that connection.

use std::sync::Arc;

use thiserror::Error;

use crate::numeric::{cross3, det3, deriv4_arr, fd_step, inv3, mat3_vec};
use crate::surface::{ChartPoint, GeomError, SurfaceModel, TangentVector};

/// Unit-norm slack for membership in the unit tangent bundle.
pub const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("positivity violated: {0}")]
    PositivityViolation(&'static str),
    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
    #[error("point is not in the unit tangent bundle: |g(u,u) - 1| = {0:.3e}")]
    NotUnit(f64),
    #[error("tangential part is not orthogonal to u: |g(t,u)| = {0:.3e}")]
    ConstraintViolation(f64),
    #[error("curvature is not constant over the sample set: spread {0:.3e}")]
    NonConstantCurvature(f64),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Raw constants of the structure before validation.
#[derive(Clone, Copy, Debug)]
pub struct RawParams {
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub lambda: f64,
    pub a1: f64,
    pub b1: f64,
}

impl RawParams {
    pub fn new(c1: f64, d1: f64, c2: f64, lambda: f64, a1: f64) -> Self {
        Self { c1, c2, d1, lambda, a1, b1: 0.0 }
    }
}

/// Validated constants with the derived quantities a2, b2 and alpha.
///
/// On the unit bundle t = g(u,u)/2 is the constant 1/2, so b2 reduces to
/// -b1 / (a1 (a1 + b1)).
#[derive(Clone, Copy, Debug)]
pub struct StructureParams {
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub lambda: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub alpha: f64,
    /// Whether a1^2 = c1/c2, the compatibility needed for
    /// g1(phi A, phi B) = g1(A,B) - eta(A) eta(B).
    pub phi_metric_compatible: bool,
}

/// Spec operation: validate raw constants and derive a2, b2, alpha.
pub fn validate_params(raw: RawParams) -> Result<StructureParams, StructureError> {
    if !(raw.c1 > 0.0) {
        return Err(StructureError::PositivityViolation("c1 must be > 0"));
    }
    if !(raw.c2 > 0.0) {
        return Err(StructureError::PositivityViolation("c2 must be > 0"));
    }
    if !(raw.c1 + raw.d1 > 0.0) {
        return Err(StructureError::PositivityViolation("c1 + d1 must be > 0"));
    }
    if raw.lambda == 0.0 || !raw.lambda.is_finite() {
        return Err(StructureError::ZeroDenominator("lambda must be nonzero"));
    }
    if raw.a1 == 0.0 || !raw.a1.is_finite() {
        return Err(StructureError::ZeroDenominator("a1 must be nonzero"));
    }
    // t = 1/2 on the unit bundle, so a1 + 2 t b1 = a1 + b1.
    if raw.a1 + raw.b1 == 0.0 {
        return Err(StructureError::ZeroDenominator("a1 + 2 t b1 must be nonzero"));
    }
    let alpha = (raw.c1 + raw.d1) / (4.0 * raw.lambda * raw.lambda);
    if !(alpha > 0.0) {
        return Err(StructureError::PositivityViolation("alpha must be > 0"));
    }
    Ok(StructureParams {
        c1: raw.c1,
        c2: raw.c2,
        d1: raw.d1,
        lambda: raw.lambda,
        a1: raw.a1,
        b1: raw.b1,
        a2: 1.0 / raw.a1,
        b2: -raw.b1 / (raw.a1 * (raw.a1 + raw.b1)),
        alpha,
        phi_metric_compatible: (raw.a1 * raw.a1 - raw.c1 / raw.c2).abs() < 1e-12,
    })
}

impl StructureParams {
    /// The canonical configuration c1 = 4, d1 = 0, c2 = 4, lambda = 1,
    /// a1 = 1, under which the closed-form angle identities hold exactly
    /// (alpha = 1 and 2 lambda = sqrt(c1 + d1)).
    pub fn canonical() -> Self {
        validate_params(RawParams::new(4.0, 0.0, 4.0, 1.0, 1.0)).unwrap()
    }

    pub fn sqrt_c1d1(&self) -> f64 {
        (self.c1 + self.d1).sqrt()
    }
}

/// A point (x, u) of the unit tangent bundle.
#[derive(Clone, Copy, Debug)]
pub struct BundlePoint {
    pub x: ChartPoint,
    pub u: TangentVector,
}

impl BundlePoint {
    pub fn new(surface: &SurfaceModel, x: ChartPoint, u: TangentVector) -> Result<Self, StructureError> {
        let n = surface.inner(x, u, u)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(StructureError::NotUnit((n - 1.0).abs()));
        }
        Ok(Self { x, u })
    }

    /// Rescales u onto the unit sphere of the metric.
    pub fn normalized(surface: &SurfaceModel, x: ChartPoint, u: TangentVector) -> Result<Self, StructureError> {
        let n = surface.norm(x, u)?;
        if n == 0.0 {
            return Err(StructureError::NotUnit(1.0));
        }
        Ok(Self { x, u: u.scale(1.0 / n) })
    }
}

/// A tangent vector of the unit bundle split into a horizontal part and a
/// tangential part; the tangential part is stored already projected
/// orthogonal to u.
#[derive(Clone, Copy, Debug, Default)]
pub struct BundleTangent {
    pub h: TangentVector,
    pub t: TangentVector,
}

impl BundleTangent {
    pub const ZERO: Self = Self { h: TangentVector::ZERO, t: TangentVector::ZERO };

    pub fn horizontal(h: TangentVector) -> Self {
        Self { h, t: TangentVector::ZERO }
    }

    /// Builds the tangent, projecting the tangential slot orthogonal to u.
    pub fn projected(
        surface: &SurfaceModel,
        point: &BundlePoint,
        h: TangentVector,
        t: TangentVector,
    ) -> Result<Self, StructureError> {
        Ok(Self { h, t: tangential_lift(surface, point, t)? })
    }

    pub fn checked(
        surface: &SurfaceModel,
        point: &BundlePoint,
        h: TangentVector,
        t: TangentVector,
    ) -> Result<Self, StructureError> {
        let c = surface.inner(point.x, t, point.u)?;
        if c.abs() > UNIT_TOL {
            return Err(StructureError::ConstraintViolation(c.abs()));
        }
        Ok(Self { h, t })
    }

    pub fn add(self, o: Self) -> Self {
        Self { h: self.h.add(o.h), t: self.t.add(o.t) }
    }

    pub fn sub(self, o: Self) -> Self {
        Self { h: self.h.sub(o.h), t: self.t.sub(o.t) }
    }

    pub fn scale(self, a: f64) -> Self {
        Self { h: self.h.scale(a), t: self.t.scale(a) }
    }
}

/// Tangential lift X^t = X - g(X,u) u of a base vector at (x, u).
pub fn tangential_lift(
    surface: &SurfaceModel,
    point: &BundlePoint,
    x: TangentVector,
) -> Result<TangentVector, StructureError> {
    let c = surface.inner(point.x, x, point.u)?;
    Ok(x.sub(point.u.scale(c)))
}

/// The induced metric g1 = alpha * [c1 g(Xh,Yh) + d1 g(Xh,u) g(Yh,u) + c2 g(Xt,Yt)].
pub fn g1(
    params: &StructureParams,
    surface: &SurfaceModel,
    point: &BundlePoint,
    a: &BundleTangent,
    b: &BundleTangent,
) -> Result<f64, StructureError> {
    let g = surface.metric_at(point.x)?;
    let hh = g.inner(a.h, b.h);
    let hu = g.inner(a.h, point.u);
    let bu = g.inner(b.h, point.u);
    let tt = g.inner(a.t, b.t);
    Ok(params.alpha * (params.c1 * hh + params.d1 * hu * bu + params.c2 * tt))
}

pub fn g1_norm(
    params: &StructureParams,
    surface: &SurfaceModel,
    point: &BundlePoint,
    a: &BundleTangent,
) -> Result<f64, StructureError> {
    Ok(g1(params, surface, point, a, a)?.max(0.0).sqrt())
}

/// The Reeb field xi = u^h / (2 lambda alpha).
pub fn xi(params: &StructureParams, point: &BundlePoint) -> BundleTangent {
    BundleTangent::horizontal(point.u.scale(1.0 / (2.0 * params.lambda * params.alpha)))
}

/// The contact form eta(A) = 2 alpha lambda g(Ah, u).
pub fn eta(
    params: &StructureParams,
    surface: &SurfaceModel,
    point: &BundlePoint,
    a: &BundleTangent,
) -> Result<f64, StructureError> {
    Ok(2.0 * params.alpha * params.lambda * surface.inner(point.x, a.h, point.u)?)
}

/// The structure tensor phi: phi(X^h) = a1 X^t and
/// phi(X^t) = -a2 X^h + a2 g(X,u) u^h.
pub fn phi(
    params: &StructureParams,
    surface: &SurfaceModel,
    point: &BundlePoint,
    a: &BundleTangent,
) -> Result<BundleTangent, StructureError> {
    let t_from_h = tangential_lift(surface, point, a.h)?.scale(params.a1);
    let tu = surface.inner(point.x, a.t, point.u)?;
    let h_from_t = a.t.scale(-params.a2).add(point.u.scale(params.a2 * tu));
    Ok(BundleTangent { h: h_from_t, t: t_from_h })
}

/// Connection cases of the bundle Levi-Civita connection; the letters name
/// the lift kinds of the two slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NablaCase {
    /// nabla_{X^h} Y^h
    Hh,
    /// nabla_{X^h} Y^t
    Ht,
    /// nabla_{X^t} Y^h
    Th,
    /// nabla_{X^t} Y^t
    Tt,
}

/// One case of the Levi-Civita connection of g1 evaluated at a point.
///
/// `derivative_term` carries the base covariant derivative for the
/// differentiated slot (Hh and Ht); it is ignored by the tensorial cases.
/// Tangential outputs are projected orthogonal to u.
pub fn nabla1(
    params: &StructureParams,
    surface: &SurfaceModel,
    point: &BundlePoint,
    case: NablaCase,
    x: TangentVector,
    y: TangentVector,
    derivative_term: TangentVector,
) -> Result<BundleTangent, StructureError> {
    let g = surface.metric_at(point.x)?;
    let u = point.u;
    let (c1, c2, d1) = (params.c1, params.c2, params.d1);
    let c1d1 = c1 + d1;
    let proj = |v: TangentVector| -> Result<TangentVector, StructureError> {
        tangential_lift(surface, point, v)
    };
    match case {
        NablaCase::Hh => {
            let r_xy_u = surface.curvature_operator(point.x, x, y, u)?;
            let xt = proj(x)?;
            let yt = proj(y)?;
            // The d1 bracket is symmetric in X and Y; an antisymmetric
            // bracket would make the connection torsion-full and break
            // metric compatibility (checked against the chart oracle).
            let bracket = yt.scale(g.inner(x, u)).add(xt.scale(g.inner(y, u)));
            let t = r_xy_u.scale(-0.5).sub(bracket.scale(d1 / (2.0 * c2)));
            Ok(BundleTangent { h: derivative_term, t: proj(t)? })
        }
        NablaCase::Ht => {
            let r_yu_x = surface.curvature_operator(point.x, y, u, x)?;
            let r_xu_u = surface.curvature_operator(point.x, x, u, u)?;
            let mut h = r_yu_x.scale(-c2 / (2.0 * c1));
            h = h.add(y.scale(d1 / (2.0 * c1) * g.inner(x, u)));
            h = h.add(u.scale(d1 / (2.0 * c1d1) * g.inner(x, y)));
            h = h.sub(u.scale(d1 * (2.0 * c1 + d1) / (2.0 * c1 * c1d1) * g.inner(x, u) * g.inner(y, u)));
            h = h.sub(u.scale(c2 * d1 / (2.0 * c1 * c1d1) * g.inner(y, r_xu_u)));
            Ok(BundleTangent { h, t: proj(derivative_term)? })
        }
        NablaCase::Th => {
            let r_xu_y = surface.curvature_operator(point.x, x, u, y)?;
            let r_yu_u = surface.curvature_operator(point.x, y, u, u)?;
            let mut h = r_xu_y.scale(-c2 / (2.0 * c1));
            h = h.add(x.scale(d1 / (2.0 * c1) * g.inner(y, u)));
            h = h.add(u.scale(d1 / (2.0 * c1d1) * g.inner(x, y)));
            h = h.sub(u.scale(d1 * (2.0 * c1 + d1) / (2.0 * c1 * c1d1) * g.inner(x, u) * g.inner(y, u)));
            h = h.sub(u.scale(c2 * d1 / (2.0 * c1 * c1d1) * g.inner(x, r_yu_u)));
            Ok(BundleTangent { h, t: TangentVector::ZERO })
        }
        NablaCase::Tt => {
            let xt = proj(x)?;
            Ok(BundleTangent {
                h: TangentVector::ZERO,
                t: xt.scale(-g.inner(y, u)),
            })
        }
    }
}

/// Report of the Sasakian criterion: the structure is Sasakian exactly when
/// the base curvature is the constant a1^2.
#[derive(Clone, Copy, Debug)]
pub struct SasakianReport {
    pub is_sasakian: bool,
    pub curvature: f64,
    pub a1_squared: f64,
}

pub fn sasakian_check(
    params: &StructureParams,
    surface: &SurfaceModel,
) -> Result<SasakianReport, StructureError> {
    let bounds = surface.chart();
    let lo1 = bounds.x1.0.max(-3.0) + 0.2;
    let hi1 = bounds.x1.1.min(3.0) - 0.2;
    let lo2 = bounds.x2.0.max(-3.0) + 0.2;
    let hi2 = bounds.x2.1.min(3.0) - 0.2;
    let mut ks = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let p = ChartPoint::new(
                lo1 + (hi1 - lo1) * i as f64 / 4.0,
                lo2 + (hi2 - lo2) * j as f64 / 4.0,
            );
            ks.push(surface.gauss_curvature(p)?);
        }
    }
    let k0 = ks[0];
    let spread = ks.iter().fold(0.0_f64, |m, k| m.max((k - k0).abs()));
    if spread > 1e-9 {
        return Err(StructureError::NonConstantCurvature(spread));
    }
    let a1sq = params.a1 * params.a1;
    Ok(SasakianReport {
        is_sasakian: (k0 - a1sq).abs() < 1e-9,
        curvature: k0,
        a1_squared: a1sq,
    })
}

/// Gram-Schmidt orthonormal frame (e1, e2) from the coordinate frame,
/// positively oriented with the chart.
pub fn chart_frame(surface: &SurfaceModel, p: ChartPoint) -> Result<(TangentVector, TangentVector), StructureError> {
    let g = surface.metric_at(p)?;
    let e1 = TangentVector::new(1.0 / g.g11.sqrt(), 0.0);
    let raw = TangentVector::new(-g.g12 / g.g11, 1.0);
    let e2 = raw.scale(1.0 / g.norm(raw));
    Ok((e1, e2))
}

/// Fiber angle of u relative to the orthonormal chart frame.
pub fn fiber_angle(surface: &SurfaceModel, point: &BundlePoint) -> Result<f64, StructureError> {
    let (e1, e2) = chart_frame(surface, point.x)?;
    let c = surface.inner(point.x, point.u, e1)?;
    let s = surface.inner(point.x, point.u, e2)?;
    Ok(s.atan2(c))
}

/// The unit fiber direction u(x, psi) = cos(psi) e1 + sin(psi) e2.
pub fn fiber_direction(surface: &SurfaceModel, p: ChartPoint, psi: f64) -> Result<TangentVector, StructureError> {
    let (e1, e2) = chart_frame(surface, p)?;
    Ok(e1.scale(psi.cos()).add(e2.scale(psi.sin())))
}

/// Covariant derivative of the frame field u(., psi) along the a-th
/// coordinate direction, by differences of its components.
fn frame_field_cov_deriv(
    surface: &SurfaceModel,
    p: ChartPoint,
    psi: f64,
    axis: usize,
) -> Result<TangentVector, StructureError> {
    let comp = |q: ChartPoint| -> [f64; 2] {
        let u = fiber_direction(surface, q, psi).expect("stencil left the chart");
        [u.v1, u.v2]
    };
    let (x, h) = if axis == 0 { (p.x1, fd_step(p.x1)) } else { (p.x2, fd_step(p.x2)) };
    let d = if axis == 0 {
        deriv4_arr(|t| comp(ChartPoint::new(t, p.x2)), x, h)
    } else {
        deriv4_arr(|t| comp(ChartPoint::new(p.x1, t)), x, h)
    };
    let u = fiber_direction(surface, p, psi)?;
    let gamma = surface.christoffel_at(p)?;
    let dir = if axis == 0 { TangentVector::new(1.0, 0.0) } else { TangentVector::new(0.0, 1.0) };
    Ok(TangentVector::new(d[0], d[1]).add(gamma.apply(dir, u)))
}

/// Coordinate basis of T(T1 M) in the chart (x1, x2, psi), expressed in
/// horizontal/tangential parts at (x, u(psi)).
pub fn chart_basis(
    surface: &SurfaceModel,
    p: ChartPoint,
    psi: f64,
) -> Result<(BundlePoint, [BundleTangent; 3]), StructureError> {
    let u = fiber_direction(surface, p, psi)?;
    let point = BundlePoint::normalized(surface, p, u)?;
    let du1 = frame_field_cov_deriv(surface, p, psi, 0)?;
    let du2 = frame_field_cov_deriv(surface, p, psi, 1)?;
    let (e1, e2) = chart_frame(surface, p)?;
    let w = e1.scale(-psi.sin()).add(e2.scale(psi.cos()));
    let b1 = BundleTangent::projected(surface, &point, TangentVector::new(1.0, 0.0), du1)?;
    let b2 = BundleTangent::projected(surface, &point, TangentVector::new(0.0, 1.0), du2)?;
    let b3 = BundleTangent::projected(surface, &point, TangentVector::ZERO, w)?;
    Ok((point, [b1, b2, b3]))
}

/// The 3x3 components of g1 in the chart (x1, x2, psi).
pub fn bundle_chart_metric(
    params: &StructureParams,
    surface: &SurfaceModel,
    coords: [f64; 3],
) -> Result<[[f64; 3]; 3], StructureError> {
    let p = ChartPoint::new(coords[0], coords[1]);
    let (point, basis) = chart_basis(surface, p, coords[2])?;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = g1(params, surface, &point, &basis[i], &basis[j])?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Christoffel symbols of g1 in the (x1, x2, psi) chart by fourth-order
/// differences of the chart metric; the independent oracle for `nabla1`.
pub fn chart_connection_oracle(
    params: &StructureParams,
    surface: &SurfaceModel,
    coords: [f64; 3],
) -> Result<[[[f64; 3]; 3]; 3], StructureError> {
    let g = bundle_chart_metric(params, surface, coords)?;
    let ginv = inv3(&g);
    let comp = |c: [f64; 3]| -> [f64; 6] {
        let m = bundle_chart_metric(params, surface, c).expect("oracle stencil left the chart");
        [m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]]
    };
    let mut dg = [[[0.0; 3]; 3]; 3]; // dg[l][i][j] = d_l g_ij
    for l in 0..3 {
        let h = fd_step(coords[l]);
        let d = deriv4_arr(
            |t| {
                let mut c = coords;
                c[l] = t;
                comp(c)
            },
            coords[l],
            h,
        );
        let full = [[d[0], d[1], d[2]], [d[1], d[3], d[4]], [d[2], d[4], d[5]]];
        dg[l] = full;
    }
    let mut out = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut sum = 0.0;
                for l in 0..3 {
                    sum += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                out[k][i][j] = 0.5 * sum;
            }
        }
    }
    Ok(out)
}

/// Chart components of a bundle tangent in the (x1, x2, psi) basis.
pub fn to_chart_components(
    surface: &SurfaceModel,
    point: &BundlePoint,
    a: &BundleTangent,
) -> Result<[f64; 3], StructureError> {
    let psi = fiber_angle(surface, point)?;
    let du1 = frame_field_cov_deriv(surface, point.x, psi, 0)?;
    let du2 = frame_field_cov_deriv(surface, point.x, psi, 1)?;
    let (e1, e2) = chart_frame(surface, point.x)?;
    let w = e1.scale(-psi.sin()).add(e2.scale(psi.cos()));
    let a1 = a.h.v1;
    let a2 = a.h.v2;
    let rest = a.t.sub(du1.scale(a1)).sub(du2.scale(a2));
    let a3 = surface.inner(point.x, rest, w)?;
    Ok([a1, a2, a3])
}

/// Inverse of `to_chart_components` at the same point.
pub fn from_chart_components(
    surface: &SurfaceModel,
    point: &BundlePoint,
    comps: [f64; 3],
) -> Result<BundleTangent, StructureError> {
    let psi = fiber_angle(surface, point)?;
    let du1 = frame_field_cov_deriv(surface, point.x, psi, 0)?;
    let du2 = frame_field_cov_deriv(surface, point.x, psi, 1)?;
    let (e1, e2) = chart_frame(surface, point.x)?;
    let w = e1.scale(-psi.sin()).add(e2.scale(psi.cos()));
    let h = TangentVector::new(comps[0], comps[1]);
    let t = du1.scale(comps[0]).add(du2.scale(comps[1])).add(w.scale(comps[2]));
    BundleTangent::projected(surface, point, h, t)
}

/// g1 cross product of A and B with the orientation of the (x1, x2, psi)
/// chart, used to build the Frenet binormal.
pub fn g1_cross(
    params: &StructureParams,
    surface: &SurfaceModel,
    point: &BundlePoint,
    a: &BundleTangent,
    b: &BundleTangent,
) -> Result<BundleTangent, StructureError> {
    let (e1, e2) = chart_frame(surface, point.x)?;
    let w = surface.rotate_plus_90(point.x, point.u)?;
    // Components of the inputs in the frame (e1^h, e2^h, w^t).
    let comp = |v: &BundleTangent| -> Result<[f64; 3], StructureError> {
        Ok([
            surface.inner(point.x, v.h, e1)?,
            surface.inner(point.x, v.h, e2)?,
            surface.inner(point.x, v.t, w)?,
        ])
    };
    let av = comp(a)?;
    let bv = comp(b)?;
    let f1 = BundleTangent::horizontal(e1);
    let f2 = BundleTangent::horizontal(e2);
    let f3 = BundleTangent::projected(surface, point, TangentVector::ZERO, w)?;
    let frame = [f1, f2, f3];
    let mut gram = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = g1(params, surface, point, &frame[i], &frame[j])?;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    let vol = det3(&gram).sqrt();
    let covariant = cross3(&av, &bv).map(|v| v * vol);
    let contravariant = mat3_vec(&inv3(&gram), &covariant);
    let h = e1.scale(contravariant[0]).add(e2.scale(contravariant[1]));
    let t = w.scale(contravariant[2]);
    BundleTangent::projected(surface, point, h, t)
}

/// Convenience bundle of the contact tensors at a point.
pub struct ContactTensors<'a> {
    params: &'a StructureParams,
    surface: &'a Arc<SurfaceModel>,
    pub point: BundlePoint,
}

impl<'a> ContactTensors<'a> {
    pub fn new(params: &'a StructureParams, surface: &'a Arc<SurfaceModel>, point: BundlePoint) -> Self {
        Self { params, surface, point }
    }

    pub fn xi(&self) -> BundleTangent {
        xi(self.params, &self.point)
    }

    pub fn eta(&self, a: &BundleTangent) -> Result<f64, StructureError> {
        eta(self.params, self.surface, &self.point, a)
    }

    pub fn phi(&self, a: &BundleTangent) -> Result<BundleTangent, StructureError> {
        phi(self.params, self.surface, &self.point, a)
    }

    pub fn g1(&self, a: &BundleTangent, b: &BundleTangent) -> Result<f64, StructureError> {
        g1(self.params, self.surface, &self.point, a, b)
    }
}
