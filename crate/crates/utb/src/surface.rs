//! Intrinsic geometry of the base surface in a single chart: metric,
//! Christoffel symbols, Gauss curvature, curvature operator, covariant
//! derivatives along curves, parallel transport, geodesics and the signed
//! Frenet data of base curves.

use std::sync::Arc;

use thiserror::Error;

use crate::expr::Expr;
use crate::numeric::{deriv4_arr, fd_step, rk4_integrate, HermiteSpline, RK_STEPS_PER_UNIT};

/// Colatitude clearance that keeps the sphere chart away from the poles.
pub const POLE_EPS: f64 = 1e-3;

/// Outer step for curvature-by-differences; one order above the Christoffel
/// step so the nested stencil stays below 1e-8 noise.
const CURVATURE_FD_REL_STEP: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("point ({x1}, {x2}) lies outside the chart domain")]
    OutOfChart { x1: f64, x2: f64 },
    #[error("metric is not positive definite at ({x1}, {x2})")]
    NonPositiveDefinite { x1: f64, x2: f64 },
    #[error("analytic {what} disagrees with finite differences at ({x1}, {x2}): |delta| = {delta:.3e}")]
    AnalyticMismatch { what: &'static str, x1: f64, x2: f64, delta: f64 },
    #[error("curve has zero speed at s = {0}")]
    ZeroSpeed(f64),
    #[error("finite-difference stencil at s = {0} leaves the curve domain")]
    DomainBoundary(f64),
    #[error("integration failure: {0}")]
    IntegrationFailure(String),
    #[error("expression error: {0}")]
    Expr(#[from] crate::expr::ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    pub x1: f64,
    pub x2: f64,
}

impl ChartPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TangentVector {
    pub v1: f64,
    pub v2: f64,
}

impl TangentVector {
    pub const ZERO: Self = Self { v1: 0.0, v2: 0.0 };

    pub fn new(v1: f64, v2: f64) -> Self {
        Self { v1, v2 }
    }

    pub fn scale(self, a: f64) -> Self {
        Self::new(a * self.v1, a * self.v2)
    }

    pub fn add(self, other: Self) -> Self {
        Self::new(self.v1 + other.v1, self.v2 + other.v2)
    }

    pub fn sub(self, other: Self) -> Self {
        Self::new(self.v1 - other.v1, self.v2 - other.v2)
    }

    pub fn is_finite(self) -> bool {
        self.v1.is_finite() && self.v2.is_finite()
    }
}

/// Symmetric 2x2 metric at a point.
#[derive(Clone, Copy, Debug)]
pub struct Metric2 {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl Metric2 {
    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn inner(&self, a: TangentVector, b: TangentVector) -> f64 {
        self.g11 * a.v1 * b.v1 + self.g12 * (a.v1 * b.v2 + a.v2 * b.v1) + self.g22 * a.v2 * b.v2
    }

    pub fn norm(&self, a: TangentVector) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g11 > 0.0 && self.det() > 0.0
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.g11, self.g12], [self.g12, self.g22]]
    }

    pub fn inverse(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        [[self.g22 / d, -self.g12 / d], [-self.g12 / d, self.g11 / d]]
    }
}

/// Christoffel symbols, indexed `[k][i][j]` for Γ^k_ij.
#[derive(Clone, Copy, Debug, Default)]
pub struct Christoffels(pub [[[f64; 2]; 2]; 2]);

impl Christoffels {
    /// Γ^k_ij a^i b^j contracted over the lower indices.
    pub fn apply(&self, a: TangentVector, b: TangentVector) -> TangentVector {
        let av = [a.v1, a.v2];
        let bv = [b.v1, b.v2];
        let mut out = [0.0; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    out[k] += self.0[k][i][j] * av[i] * bv[j];
                }
            }
        }
        TangentVector::new(out[0], out[1])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChartBounds {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
}

impl ChartBounds {
    fn unbounded() -> Self {
        Self {
            x1: (f64::NEG_INFINITY, f64::INFINITY),
            x2: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn contains(&self, p: ChartPoint) -> bool {
        p.x1.is_finite()
            && p.x2.is_finite()
            && p.x1 > self.x1.0
            && p.x1 < self.x1.1
            && p.x2 > self.x2.0
            && p.x2 < self.x2.1
    }
}

/// Optional closed-form data a custom surface may carry; both are validated
/// against finite differences at construction.
#[derive(Clone, Debug, Default)]
pub struct CustomAnalytic {
    /// Γ^1_11, Γ^1_12, Γ^1_22, Γ^2_11, Γ^2_12, Γ^2_22.
    pub christoffels: Option<[Expr; 6]>,
    pub curvature: Option<Expr>,
}

#[derive(Clone, Debug)]
enum SurfaceKind {
    Plane,
    Sphere { radius: f64 },
    Custom { g11: Expr, g12: Expr, g22: Expr, analytic: CustomAnalytic },
}

#[derive(Clone, Debug)]
pub struct SurfaceModel {
    kind: SurfaceKind,
    chart: ChartBounds,
}

impl SurfaceModel {
    pub fn plane() -> Arc<Self> {
        Arc::new(Self {
            kind: SurfaceKind::Plane,
            chart: ChartBounds::unbounded(),
        })
    }

    /// Round sphere of the given radius in a colatitude/longitude chart,
    /// restricted to x1 in (POLE_EPS, pi - POLE_EPS).
    pub fn sphere(radius: f64) -> Arc<Self> {
        assert!(radius > 0.0, "sphere radius must be positive");
        Arc::new(Self {
            kind: SurfaceKind::Sphere { radius },
            chart: ChartBounds {
                x1: (POLE_EPS, std::f64::consts::PI - POLE_EPS),
                x2: (f64::NEG_INFINITY, f64::INFINITY),
            },
        })
    }

    pub fn custom(
        g11: Expr,
        g12: Expr,
        g22: Expr,
        chart: Option<ChartBounds>,
        analytic: CustomAnalytic,
        check_points: &[ChartPoint],
    ) -> Result<Arc<Self>, GeomError> {
        let model = Self {
            kind: SurfaceKind::Custom { g11, g12, g22, analytic },
            chart: chart.unwrap_or(ChartBounds {
                x1: (-50.0, 50.0),
                x2: (-50.0, 50.0),
            }),
        };
        for &p in check_points {
            let g = model.metric_at(p)?;
            if !g.is_positive_definite() {
                return Err(GeomError::NonPositiveDefinite { x1: p.x1, x2: p.x2 });
            }
            model.check_analytic_consistency(p)?;
        }
        Ok(Arc::new(model))
    }

    pub fn custom_metric(
        g11: &str,
        g12: &str,
        g22: &str,
        check_points: &[ChartPoint],
    ) -> Result<Arc<Self>, GeomError> {
        Self::custom(
            Expr::parse(g11)?,
            Expr::parse(g12)?,
            Expr::parse(g22)?,
            None,
            CustomAnalytic::default(),
            check_points,
        )
    }

    fn check_analytic_consistency(&self, p: ChartPoint) -> Result<(), GeomError> {
        let SurfaceKind::Custom { analytic, .. } = &self.kind else {
            return Ok(());
        };
        if analytic.christoffels.is_some() {
            let fd = self.christoffel_fd(p)?;
            let an = self.christoffel_at(p)?;
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let delta = (fd.0[k][i][j] - an.0[k][i][j]).abs();
                        let scale = an.0[k][i][j].abs().max(1.0);
                        if delta > 1e-6 * scale {
                            return Err(GeomError::AnalyticMismatch {
                                what: "Christoffel symbols",
                                x1: p.x1,
                                x2: p.x2,
                                delta,
                            });
                        }
                    }
                }
            }
        }
        if analytic.curvature.is_some() {
            let fd = self.gauss_curvature_fd(p)?;
            let an = self.gauss_curvature(p)?;
            let delta = (fd - an).abs();
            if delta > 1e-6 * an.abs().max(1.0) {
                return Err(GeomError::AnalyticMismatch {
                    what: "Gauss curvature",
                    x1: p.x1,
                    x2: p.x2,
                    delta,
                });
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> ChartBounds {
        self.chart
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        self.chart.contains(p)
    }

    fn guard(&self, p: ChartPoint) -> Result<(), GeomError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::OutOfChart { x1: p.x1, x2: p.x2 })
        }
    }

    pub fn metric_at(&self, p: ChartPoint) -> Result<Metric2, GeomError> {
        self.guard(p)?;
        let g = match &self.kind {
            SurfaceKind::Plane => Metric2 { g11: 1.0, g12: 0.0, g22: 1.0 },
            SurfaceKind::Sphere { radius } => {
                let r2 = radius * radius;
                Metric2 {
                    g11: r2,
                    g12: 0.0,
                    g22: r2 * p.x1.sin().powi(2),
                }
            }
            SurfaceKind::Custom { g11, g12, g22, .. } => {
                let vars = [("x1", p.x1), ("x2", p.x2)];
                Metric2 {
                    g11: g11.eval(&vars)?,
                    g12: g12.eval(&vars)?,
                    g22: g22.eval(&vars)?,
                }
            }
        };
        if !g.is_positive_definite() {
            return Err(GeomError::NonPositiveDefinite { x1: p.x1, x2: p.x2 });
        }
        Ok(g)
    }

    pub fn inner(&self, p: ChartPoint, a: TangentVector, b: TangentVector) -> Result<f64, GeomError> {
        Ok(self.metric_at(p)?.inner(a, b))
    }

    pub fn norm(&self, p: ChartPoint, a: TangentVector) -> Result<f64, GeomError> {
        Ok(self.metric_at(p)?.norm(a))
    }

    /// Christoffel symbols, closed-form for the builtin surfaces and for
    /// custom surfaces that declare them; finite differences otherwise.
    pub fn christoffel_at(&self, p: ChartPoint) -> Result<Christoffels, GeomError> {
        self.guard(p)?;
        match &self.kind {
            SurfaceKind::Plane => Ok(Christoffels::default()),
            SurfaceKind::Sphere { .. } => {
                let (sin, cos) = p.x1.sin_cos();
                let mut c = Christoffels::default();
                c.0[0][1][1] = -sin * cos;
                c.0[1][0][1] = cos / sin;
                c.0[1][1][0] = cos / sin;
                Ok(c)
            }
            SurfaceKind::Custom { analytic, .. } => {
                if let Some(exprs) = &analytic.christoffels {
                    let vars = [("x1", p.x1), ("x2", p.x2)];
                    let v: Vec<f64> = exprs
                        .iter()
                        .map(|e| e.eval(&vars))
                        .collect::<Result<_, _>>()?;
                    let mut c = Christoffels::default();
                    for k in 0..2 {
                        c.0[k][0][0] = v[3 * k];
                        c.0[k][0][1] = v[3 * k + 1];
                        c.0[k][1][0] = v[3 * k + 1];
                        c.0[k][1][1] = v[3 * k + 2];
                    }
                    Ok(c)
                } else {
                    self.christoffel_fd(p)
                }
            }
        }
    }

    /// Christoffel symbols from fourth-order differences of the metric only.
    pub fn christoffel_fd(&self, p: ChartPoint) -> Result<Christoffels, GeomError> {
        let g = self.metric_at(p)?;
        let ginv = g.inverse();
        let comp = |q: ChartPoint| -> [f64; 3] {
            // Interior stencils only; guard() already rejected boundary points.
            let m = self.metric_at(q).expect("stencil left the chart");
            [m.g11, m.g12, m.g22]
        };
        let h1 = fd_step(p.x1);
        let h2 = fd_step(p.x2);
        self.guard(ChartPoint::new(p.x1 + 2.0 * h1, p.x2))?;
        self.guard(ChartPoint::new(p.x1 - 2.0 * h1, p.x2))?;
        let d1 = deriv4_arr(|x| comp(ChartPoint::new(x, p.x2)), p.x1, h1);
        let d2 = deriv4_arr(|x| comp(ChartPoint::new(p.x1, x)), p.x2, h2);
        // dg[l][i][j] = ∂_l g_ij
        let unpack = |d: [f64; 3]| [[d[0], d[1]], [d[1], d[2]]];
        let dg = [unpack(d1), unpack(d2)];
        let mut c = Christoffels::default();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut sum = 0.0;
                    for l in 0..2 {
                        sum += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    }
                    c.0[k][i][j] = 0.5 * sum;
                }
            }
        }
        Ok(c)
    }

    /// Gauss curvature; closed-form for builtins, finite differences for
    /// plain custom surfaces.
    pub fn gauss_curvature(&self, p: ChartPoint) -> Result<f64, GeomError> {
        self.guard(p)?;
        match &self.kind {
            SurfaceKind::Plane => Ok(0.0),
            SurfaceKind::Sphere { radius } => Ok(1.0 / (radius * radius)),
            SurfaceKind::Custom { analytic, .. } => {
                if let Some(expr) = &analytic.curvature {
                    Ok(expr.eval(&[("x1", p.x1), ("x2", p.x2)])?)
                } else {
                    self.gauss_curvature_fd(p)
                }
            }
        }
    }

    /// Gauss curvature assembled purely from the metric: nested differences
    /// of the finite-difference Christoffels give R(∂1,∂2)∂2, then
    /// K = g(R(∂1,∂2)∂2, ∂1) / det g.
    pub fn gauss_curvature_fd(&self, p: ChartPoint) -> Result<f64, GeomError> {
        let g = self.metric_at(p)?;
        let gamma = |q: ChartPoint| -> [f64; 8] {
            let c = self.christoffel_fd(q).expect("stencil left the chart");
            [
                c.0[0][0][0], c.0[0][0][1], c.0[0][1][0], c.0[0][1][1],
                c.0[1][0][0], c.0[1][0][1], c.0[1][1][0], c.0[1][1][1],
            ]
        };
        let h1 = CURVATURE_FD_REL_STEP * p.x1.abs().max(1.0);
        let h2 = CURVATURE_FD_REL_STEP * p.x2.abs().max(1.0);
        self.guard(ChartPoint::new(p.x1 + 2.0 * h1 + 2.0 * fd_step(p.x1), p.x2))?;
        self.guard(ChartPoint::new(p.x1 - 2.0 * h1 - 2.0 * fd_step(p.x1), p.x2))?;
        let d1 = deriv4_arr(|x| gamma(ChartPoint::new(x, p.x2)), p.x1, h1);
        let d2 = deriv4_arr(|x| gamma(ChartPoint::new(p.x1, x)), p.x2, h2);
        let c = self.christoffel_fd(p)?;
        let at = |v: &[f64; 8], k: usize, i: usize, j: usize| v[4 * k + 2 * i + j];
        // R(∂1,∂2)∂2 = (∂_1 Γ^l_22 - ∂_2 Γ^l_12 + Γ^l_1m Γ^m_22 - Γ^l_2m Γ^m_12) ∂_l
        let mut r = [0.0; 2];
        for l in 0..2 {
            let mut val = at(&d1, l, 1, 1) - at(&d2, l, 0, 1);
            for m in 0..2 {
                val += c.0[l][0][m] * c.0[m][1][1] - c.0[l][1][m] * c.0[m][0][1];
            }
            r[l] = val;
        }
        let rv = TangentVector::new(r[0], r[1]);
        Ok(g.inner(rv, TangentVector::new(1.0, 0.0)) / g.det())
    }

    /// Curvature operator with the sign fixed by R(X,Y)Z = K (g(Y,Z)X - g(X,Z)Y),
    /// so that R(X,Y,Y,X) = K for orthonormal X, Y.
    pub fn curvature_operator(
        &self,
        p: ChartPoint,
        x: TangentVector,
        y: TangentVector,
        z: TangentVector,
    ) -> Result<TangentVector, GeomError> {
        let g = self.metric_at(p)?;
        let k = self.gauss_curvature(p)?;
        let a = g.inner(y, z);
        let b = g.inner(x, z);
        Ok(x.scale(k * a).sub(y.scale(k * b)))
    }

    /// Four-tensor value R(X,Y,Z,W) = g(R(X,Y)Z, W).
    pub fn curvature_tensor(
        &self,
        p: ChartPoint,
        x: TangentVector,
        y: TangentVector,
        z: TangentVector,
        w: TangentVector,
    ) -> Result<f64, GeomError> {
        let r = self.curvature_operator(p, x, y, z)?;
        self.inner(p, r, w)
    }

    /// Rotation of `t` by +pi/2 in the chart orientation (x1, x2); maps the
    /// unit tangent of a curve to its unit normal.
    pub fn rotate_plus_90(&self, p: ChartPoint, t: TangentVector) -> Result<TangentVector, GeomError> {
        let g = self.metric_at(p)?;
        let vol = g.det().sqrt();
        let a = g.g11 * t.v1 + g.g12 * t.v2;
        let b = g.g12 * t.v1 + g.g22 * t.v2;
        Ok(TangentVector::new(-b / vol, a / vol))
    }
}

/// Position, velocity and plain second derivative of a curve at a parameter.
#[derive(Clone, Copy, Debug)]
pub struct CurveJet {
    pub pos: ChartPoint,
    pub vel: TangentVector,
    pub acc: TangentVector,
}

/// A parameterized curve in the chart with two derivatives available.
#[derive(Clone)]
pub struct BaseCurve {
    surface: Arc<SurfaceModel>,
    jet: Arc<dyn Fn(f64) -> CurveJet + Send + Sync>,
    domain: (f64, f64),
}

impl BaseCurve {
    pub fn from_jet(
        surface: Arc<SurfaceModel>,
        jet: Arc<dyn Fn(f64) -> CurveJet + Send + Sync>,
        domain: (f64, f64),
    ) -> Self {
        Self { surface, jet, domain }
    }

    /// Straight chart line p + s*speed*dir; a geodesic of the plane.
    pub fn line(surface: Arc<SurfaceModel>, start: ChartPoint, dir: TangentVector, speed: f64, len: f64) -> Self {
        let norm = (dir.v1 * dir.v1 + dir.v2 * dir.v2).sqrt();
        let d = dir.scale(speed / norm);
        Self::from_jet(
            surface,
            Arc::new(move |s| CurveJet {
                pos: ChartPoint::new(start.x1 + s * d.v1, start.x2 + s * d.v2),
                vel: d,
                acc: TangentVector::ZERO,
            }),
            (0.0, len),
        )
    }

    /// Circle in the plane chart traversed counterclockwise at constant speed.
    pub fn plane_circle(surface: Arc<SurfaceModel>, center: ChartPoint, radius: f64, speed: f64, len: f64) -> Self {
        let omega = speed / radius;
        Self::from_jet(
            surface,
            Arc::new(move |s| {
                let (sin, cos) = (omega * s).sin_cos();
                CurveJet {
                    pos: ChartPoint::new(center.x1 + radius * cos, center.x2 + radius * sin),
                    vel: TangentVector::new(-speed * sin, speed * cos),
                    acc: TangentVector::new(-speed * omega * cos, -speed * omega * sin),
                }
            }),
            (0.0, len),
        )
    }

    /// Colatitude circle x1 = colat on a sphere chart, traversed with
    /// increasing longitude at constant speed; colat = pi/2 is a great circle.
    pub fn sphere_circle(surface: Arc<SurfaceModel>, radius: f64, colat: f64, speed: f64, len: f64) -> Self {
        let omega = speed / (radius * colat.sin());
        Self::from_jet(
            surface,
            Arc::new(move |s| CurveJet {
                pos: ChartPoint::new(colat, omega * s),
                vel: TangentVector::new(0.0, omega),
                acc: TangentVector::ZERO,
            }),
            (0.0, len),
        )
    }

    /// Curve from coordinate expressions in the variable `s`; derivatives by
    /// fourth-order differences.
    pub fn from_exprs(
        surface: Arc<SurfaceModel>,
        x1: Expr,
        x2: Expr,
        domain: (f64, f64),
    ) -> Self {
        let eval = move |s: f64| -> [f64; 2] {
            [
                x1.eval(&[("s", s)]).unwrap_or(f64::NAN),
                x2.eval(&[("s", s)]).unwrap_or(f64::NAN),
            ]
        };
        let eval = Arc::new(eval);
        Self::from_jet(
            surface,
            Arc::new(move |s| {
                let h = fd_step(s);
                let p = eval(s);
                let v = deriv4_arr(|t| eval(t), s, h);
                let a = deriv4_arr(|t| deriv4_arr(|q| eval(q), t, h), s, 2.0 * h);
                CurveJet {
                    pos: ChartPoint::new(p[0], p[1]),
                    vel: TangentVector::new(v[0], v[1]),
                    acc: TangentVector::new(a[0], a[1]),
                }
            }),
            domain,
        )
    }

    /// Curve interpolated from dense (position, velocity) knots with known
    /// velocity derivative at each knot.
    pub fn from_knots(
        surface: Arc<SurfaceModel>,
        xs: Vec<f64>,
        states: Vec<[f64; 4]>,
        state_derivs: Vec<[f64; 4]>,
    ) -> Self {
        let domain = (xs[0], *xs.last().unwrap());
        let spline = HermiteSpline::new(xs, states, state_derivs);
        Self::from_jet(
            surface,
            Arc::new(move |s| {
                let y = spline.eval(s);
                let dy = spline.deriv(s);
                CurveJet {
                    pos: ChartPoint::new(y[0], y[1]),
                    vel: TangentVector::new(y[2], y[3]),
                    acc: TangentVector::new(dy[2], dy[3]),
                }
            }),
            domain,
        )
    }

    pub fn surface(&self) -> &Arc<SurfaceModel> {
        &self.surface
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn jet(&self, s: f64) -> CurveJet {
        (self.jet)(s)
    }

    pub fn point(&self, s: f64) -> ChartPoint {
        self.jet(s).pos
    }

    pub fn velocity(&self, s: f64) -> TangentVector {
        self.jet(s).vel
    }

    pub fn speed(&self, s: f64) -> Result<f64, GeomError> {
        let j = self.jet(s);
        Ok(self.surface.metric_at(j.pos)?.norm(j.vel))
    }

    /// Covariant acceleration ∇_E E with E = γ'(s).
    pub fn covariant_accel(&self, s: f64) -> Result<TangentVector, GeomError> {
        let j = self.jet(s);
        let gamma = self.surface.christoffel_at(j.pos)?;
        Ok(j.acc.add(gamma.apply(j.vel, j.vel)))
    }

    /// Evenly spaced samples with a safety margin inside the domain.
    pub fn sample_grid(&self, n: usize, margin: f64) -> Vec<f64> {
        let (s0, s1) = self.domain;
        let a = s0 + margin;
        let b = s1 - margin;
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Signed Frenet data of a base curve: unit tangent, the +pi/2 normal and
/// the geodesic curvature defined by ∇_T T = κ N.
#[derive(Clone, Copy, Debug)]
pub struct FrenetFrame2 {
    pub t: TangentVector,
    pub n: TangentVector,
    pub kappa: f64,
}

#[derive(Clone)]
pub struct BaseFrenet {
    curve: BaseCurve,
}

impl BaseFrenet {
    pub fn new(curve: BaseCurve) -> Self {
        Self { curve }
    }

    pub fn frame_at(&self, s: f64) -> Result<FrenetFrame2, GeomError> {
        let j = self.curve.jet(s);
        let g = self.curve.surface.metric_at(j.pos)?;
        let r = g.norm(j.vel);
        if r <= 0.0 || !r.is_finite() {
            return Err(GeomError::ZeroSpeed(s));
        }
        let t = j.vel.scale(1.0 / r);
        let n = self.curve.surface.rotate_plus_90(j.pos, t)?;
        let acc = self.curve.covariant_accel(s)?;
        let kappa = g.inner(acc, n) / (r * r);
        Ok(FrenetFrame2 { t, n, kappa })
    }

    /// Plain s-derivatives of T and N, using ∇_E T = rκN and ∇_E N = -rκT.
    pub fn frame_derivs(&self, s: f64) -> Result<(TangentVector, TangentVector), GeomError> {
        let j = self.curve.jet(s);
        let g = self.curve.surface.metric_at(j.pos)?;
        let gamma = self.curve.surface.christoffel_at(j.pos)?;
        let frame = self.frame_at(s)?;
        let r = g.norm(j.vel);
        let dt = frame.n.scale(r * frame.kappa).sub(gamma.apply(j.vel, frame.t));
        let dn = frame.t.scale(-r * frame.kappa).sub(gamma.apply(j.vel, frame.n));
        Ok((dt, dn))
    }
}

/// Spec operation: Frenet data of a base curve.
pub fn base_frenet(curve: &BaseCurve) -> BaseFrenet {
    BaseFrenet::new(curve.clone())
}

/// Componentwise V'^k + Γ^k_ij γ'^i V^j with V' from fourth-order differences
/// of the supplied field.
pub fn covariant_deriv_along(
    curve: &BaseCurve,
    field: &dyn Fn(f64) -> TangentVector,
    s: f64,
) -> Result<TangentVector, GeomError> {
    let h = fd_step(s);
    let (s0, s1) = curve.domain();
    if s - 2.0 * h < s0 - 1e-12 || s + 2.0 * h > s1 + 1e-12 {
        return Err(GeomError::DomainBoundary(s));
    }
    let dv = deriv4_arr(
        |t| {
            let v = field(t);
            [v.v1, v.v2]
        },
        s,
        h,
    );
    let j = curve.jet(s);
    let gamma = curve.surface().christoffel_at(j.pos)?;
    Ok(TangentVector::new(dv[0], dv[1]).add(gamma.apply(j.vel, field(s))))
}

/// Covariant derivative of a field given with its plain s-derivative, which
/// avoids the finite-difference stencil.
pub fn covariant_of_jet(
    curve: &BaseCurve,
    s: f64,
    value: TangentVector,
    plain_deriv: TangentVector,
) -> Result<TangentVector, GeomError> {
    let j = curve.jet(s);
    let gamma = curve.surface().christoffel_at(j.pos)?;
    Ok(plain_deriv.add(gamma.apply(j.vel, value)))
}

/// Parallel transport of v0 from s0 to s1 along the curve (RK4).
pub fn parallel_transport(
    curve: &BaseCurve,
    v0: TangentVector,
    s0: f64,
    s1: f64,
) -> Result<TangentVector, GeomError> {
    let rhs = |s: f64, y: &[f64; 2]| -> [f64; 2] {
        let j = curve.jet(s);
        let gamma = curve
            .surface()
            .christoffel_at(j.pos)
            .expect("parallel transport left the chart");
        let d = gamma.apply(j.vel, TangentVector::new(y[0], y[1]));
        [-d.v1, -d.v2]
    };
    let steps = ((s1 - s0).abs() * RK_STEPS_PER_UNIT as f64).ceil().max(16.0) as usize;
    let sol = rk4_integrate(&rhs, [v0.v1, v0.v2], s0, s1, steps);
    let (_, y) = sol.last().unwrap();
    if !y[0].is_finite() || !y[1].is_finite() {
        return Err(GeomError::IntegrationFailure("parallel transport diverged".into()));
    }
    Ok(TangentVector::new(y[0], y[1]))
}

/// Parallel field along the whole curve from an anchor value, interpolated
/// with Hermite knots whose derivative is the transport equation itself.
pub fn parallel_field(
    curve: &BaseCurve,
    v0: TangentVector,
    s0: f64,
) -> Result<Arc<dyn Fn(f64) -> (TangentVector, TangentVector) + Send + Sync>, GeomError> {
    let (a, b) = curve.domain();
    let rhs = |s: f64, y: &[f64; 2]| -> [f64; 2] {
        let j = curve.jet(s);
        let gamma = curve
            .surface()
            .christoffel_at(j.pos)
            .expect("parallel transport left the chart");
        let d = gamma.apply(j.vel, TangentVector::new(y[0], y[1]));
        [-d.v1, -d.v2]
    };
    let mut knots: Vec<(f64, [f64; 2])> = Vec::new();
    if s0 - a > 1e-12 {
        let steps = ((s0 - a) * RK_STEPS_PER_UNIT as f64).ceil().max(16.0) as usize;
        let mut back = rk4_integrate(&rhs, [v0.v1, v0.v2], s0, a, steps);
        back.reverse();
        back.pop();
        knots.extend(back);
    }
    let steps = ((b - s0) * RK_STEPS_PER_UNIT as f64).ceil().max(16.0) as usize;
    knots.extend(rk4_integrate(&rhs, [v0.v1, v0.v2], s0, b, steps));
    let xs: Vec<f64> = knots.iter().map(|(s, _)| *s).collect();
    let ys: Vec<[f64; 2]> = knots.iter().map(|(_, y)| *y).collect();
    let ds: Vec<[f64; 2]> = knots.iter().map(|(s, y)| rhs(*s, y)).collect();
    let spline = HermiteSpline::new(xs, ys, ds);
    let curve = curve.clone();
    Ok(Arc::new(move |s: f64| {
        let y = spline.eval(s);
        let v = TangentVector::new(y[0], y[1]);
        // Plain derivative equals the transport equation evaluated on the
        // interpolated value.
        let j = curve.jet(s);
        let gamma = curve.surface().christoffel_at(j.pos).expect("chart exit");
        let d = gamma.apply(j.vel, v).scale(-1.0);
        (v, d)
    }))
}

/// Unit-speed curve with prescribed signed geodesic curvature kappa(s),
/// solved from x'' = -Gamma(x', x') + kappa(s) * rot90(x').
pub fn curve_with_curvature(
    surface: &Arc<SurfaceModel>,
    p: ChartPoint,
    t0: TangentVector,
    kappa: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    len: f64,
) -> Result<BaseCurve, GeomError> {
    let n0 = surface.metric_at(p)?.norm(t0);
    if n0 == 0.0 {
        return Err(GeomError::ZeroSpeed(0.0));
    }
    let t0 = t0.scale(1.0 / n0);
    let surf = surface.clone();
    let kap = kappa.clone();
    let rhs = move |s: f64, y: &[f64; 4]| -> [f64; 4] {
        let pos = ChartPoint::new(y[0], y[1]);
        let vel = TangentVector::new(y[2], y[3]);
        let (gamma, n) = match (surf.christoffel_at(pos), surf.rotate_plus_90(pos, vel)) {
            (Ok(g), Ok(n)) => (g, n),
            _ => return [f64::NAN; 4],
        };
        let a = gamma.apply(vel, vel).scale(-1.0).add(n.scale(kap(s)));
        [y[2], y[3], a.v1, a.v2]
    };
    let steps = (len * RK_STEPS_PER_UNIT as f64).ceil().max(16.0) as usize;
    let sol = rk4_integrate(&rhs, [p.x1, p.x2, t0.v1, t0.v2], 0.0, len, steps);
    let mut last_good = p;
    for (_, y) in &sol {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::OutOfChart { x1: last_good.x1, x2: last_good.x2 });
        }
        let q = ChartPoint::new(y[0], y[1]);
        if !surface.contains(q) {
            return Err(GeomError::OutOfChart { x1: y[0], x2: y[1] });
        }
        last_good = q;
    }
    let xs: Vec<f64> = sol.iter().map(|(s, _)| *s).collect();
    let ys: Vec<[f64; 4]> = sol.iter().map(|(_, y)| *y).collect();
    let ds: Vec<[f64; 4]> = sol.iter().map(|(s, y)| rhs(*s, y)).collect();
    Ok(BaseCurve::from_knots(surface.clone(), xs, ys, ds))
}

/// Geodesic through p with initial velocity v, solved by RK4 over [0, len].
pub fn geodesic(
    surface: &Arc<SurfaceModel>,
    p: ChartPoint,
    v: TangentVector,
    len: f64,
) -> Result<BaseCurve, GeomError> {
    if surface.metric_at(p)?.norm(v) == 0.0 {
        return Err(GeomError::ZeroSpeed(0.0));
    }
    let surf = surface.clone();
    let rhs = move |_s: f64, y: &[f64; 4]| -> [f64; 4] {
        let pos = ChartPoint::new(y[0], y[1]);
        let vel = TangentVector::new(y[2], y[3]);
        let gamma = match surf.christoffel_at(pos) {
            Ok(g) => g,
            Err(_) => return [f64::NAN; 4],
        };
        let a = gamma.apply(vel, vel);
        [y[2], y[3], -a.v1, -a.v2]
    };
    let steps = (len * RK_STEPS_PER_UNIT as f64).ceil().max(16.0) as usize;
    let sol = rk4_integrate(&rhs, [p.x1, p.x2, v.v1, v.v2], 0.0, len, steps);
    let mut last_good = p;
    for (s, y) in &sol {
        if y.iter().any(|v| !v.is_finite()) {
            // The stencil crossed the chart edge inside a step; report the
            // last position still inside.
            return Err(GeomError::OutOfChart { x1: last_good.x1, x2: last_good.x2 });
        }
        let q = ChartPoint::new(y[0], y[1]);
        if !surface.contains(q) {
            return Err(GeomError::OutOfChart { x1: y[0], x2: y[1] });
        }
        if y[2].abs() + y[3].abs() > 1e12 {
            return Err(GeomError::IntegrationFailure(format!("geodesic diverged at s = {s}")));
        }
        last_good = q;
    }
    let xs: Vec<f64> = sol.iter().map(|(s, _)| *s).collect();
    let ys: Vec<[f64; 4]> = sol.iter().map(|(_, y)| *y).collect();
    let ds: Vec<[f64; 4]> = sol.iter().map(|(s, y)| rhs(*s, y)).collect();
    Ok(BaseCurve::from_knots(surface.clone(), xs, ys, ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tv(a: f64, b: f64) -> TangentVector {
        TangentVector::new(a, b)
    }

    #[test]
    fn metric_plane_identity() {
        let s = SurfaceModel::plane();
        let g = s.metric_at(ChartPoint::new(3.0, -2.0)).unwrap();
        assert_eq!((g.g11, g.g12, g.g22), (1.0, 0.0, 1.0));
    }

    #[test]
    fn metric_sphere_at_equator() {
        let s = SurfaceModel::sphere(1.0);
        let g = s.metric_at(ChartPoint::new(FRAC_PI_2, 0.0)).unwrap();
        assert!((g.g11 - 1.0).abs() < 1e-15 && (g.g22 - 1.0).abs() < 1e-15);
        let s2 = SurfaceModel::sphere(2.0);
        let g2 = s2.metric_at(ChartPoint::new(FRAC_PI_2, 0.0)).unwrap();
        assert!((g2.g11 - 4.0).abs() < 1e-15 && (g2.g22 - 4.0).abs() < 1e-15);
    }

    #[test]
    fn metric_rejects_out_of_chart() {
        let s = SurfaceModel::sphere(1.0);
        assert!(matches!(
            s.metric_at(ChartPoint::new(1e-4, 0.0)),
            Err(GeomError::OutOfChart { .. })
        ));
    }

    #[test]
    fn christoffels_plane_vanish() {
        let s = SurfaceModel::plane();
        let c = s.christoffel_at(ChartPoint::new(0.3, 0.7)).unwrap();
        assert_eq!(c.apply(tv(1.0, 2.0), tv(-3.0, 4.0)), TangentVector::ZERO);
    }

    #[test]
    fn christoffels_sphere_equator() {
        let s = SurfaceModel::sphere(1.0);
        let c = s.christoffel_at(ChartPoint::new(FRAC_PI_2, 0.0)).unwrap();
        assert!(c.0[0][1][1].abs() < 1e-15);
        assert!(c.0[1][0][1].abs() < 1e-15);
    }

    #[test]
    fn christoffels_fd_match_analytic_on_sphere() {
        let s = SurfaceModel::sphere(2.0);
        for &(x1, x2) in &[(0.4, 1.0), (1.2, -3.0), (2.3, 0.5)] {
            let p = ChartPoint::new(x1, x2);
            let fd = s.christoffel_fd(p).unwrap();
            let an = s.christoffel_at(p).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let scale = an.0[k][i][j].abs().max(1.0);
                        assert!((fd.0[k][i][j] - an.0[k][i][j]).abs() < 1e-6 * scale);
                    }
                }
            }
        }
    }

    #[test]
    fn custom_analytic_mismatch_is_rejected() {
        // Claims flat Christoffels for a visibly curved metric.
        let wrong = CustomAnalytic {
            christoffels: Some([
                Expr::parse("0").unwrap(),
                Expr::parse("0").unwrap(),
                Expr::parse("0").unwrap(),
                Expr::parse("0").unwrap(),
                Expr::parse("0").unwrap(),
                Expr::parse("0").unwrap(),
            ]),
            curvature: None,
        };
        let res = SurfaceModel::custom(
            Expr::parse("1").unwrap(),
            Expr::parse("0").unwrap(),
            Expr::parse("sin(x1) ^ 2").unwrap(),
            None,
            wrong,
            &[ChartPoint::new(0.8, 0.1)],
        );
        assert!(matches!(res, Err(GeomError::AnalyticMismatch { .. })));
    }

    #[test]
    fn gauss_curvature_builtin_values() {
        assert_eq!(
            SurfaceModel::plane().gauss_curvature(ChartPoint::new(5.0, 5.0)).unwrap(),
            0.0
        );
        for &r in &[1.0, 2.0, 5.0] {
            let s = SurfaceModel::sphere(r);
            let k = s.gauss_curvature(ChartPoint::new(1.1, 0.4)).unwrap();
            assert!((k - 1.0 / (r * r)).abs() < 1e-15);
            let kfd = s.gauss_curvature_fd(ChartPoint::new(1.1, 0.4)).unwrap();
            assert!((kfd - 1.0 / (r * r)).abs() < 1e-8, "fd path drifted: {kfd}");
        }
    }

    #[test]
    fn curvature_operator_sphere_sectional() {
        let s = SurfaceModel::sphere(1.0);
        let p = ChartPoint::new(1.0, 0.3);
        let g = s.metric_at(p).unwrap();
        // Orthonormalize the coordinate frame.
        let x = tv(1.0 / g.g11.sqrt(), 0.0);
        let y = tv(0.0, 1.0 / g.g22.sqrt());
        let sec = s.curvature_tensor(p, x, y, y, x).unwrap();
        assert!((sec - 1.0).abs() < 1e-12);
        // Antisymmetry in the first slots.
        let z = tv(0.3, -0.4);
        let r1 = s.curvature_operator(p, x, y, z).unwrap();
        let r2 = s.curvature_operator(p, y, x, z).unwrap();
        assert!((r1.v1 + r2.v1).abs() < 1e-15 && (r1.v2 + r2.v2).abs() < 1e-15);
        assert_eq!(s.curvature_operator(p, x, x, z).unwrap(), TangentVector::ZERO);
    }

    #[test]
    fn covariant_deriv_examples() {
        let plane = SurfaceModel::plane();
        let line = BaseCurve::line(plane.clone(), ChartPoint::new(0.0, 0.0), tv(1.0, 0.0), 1.0, 2.0);
        let constant = |_s: f64| tv(0.4, -0.3);
        let d = covariant_deriv_along(&line, &constant, 1.0).unwrap();
        assert!(d.v1.abs() < 1e-12 && d.v2.abs() < 1e-12);
        let linear = |s: f64| tv(s, 0.0);
        let d = covariant_deriv_along(&line, &linear, 1.0).unwrap();
        assert!((d.v1 - 1.0).abs() < 1e-10 && d.v2.abs() < 1e-12);

        let sphere = SurfaceModel::sphere(1.0);
        let equator = BaseCurve::sphere_circle(sphere.clone(), 1.0, FRAC_PI_2, 1.0, 3.0);
        let tangent = {
            let c = equator.clone();
            move |s: f64| c.velocity(s)
        };
        let d = covariant_deriv_along(&equator, &tangent, 1.5).unwrap();
        assert!(d.v1.abs() < 1e-10 && d.v2.abs() < 1e-10);
    }

    #[test]
    fn parallel_transport_examples() {
        let plane = SurfaceModel::plane();
        let arc = BaseCurve::plane_circle(plane.clone(), ChartPoint::new(0.0, 0.0), 1.0, 1.0, 2.0);
        let v = parallel_transport(&arc, tv(1.0, 0.0), 0.0, 2.0).unwrap();
        assert!((v.v1 - 1.0).abs() < 1e-10 && v.v2.abs() < 1e-10);

        let sphere = SurfaceModel::sphere(1.0);
        let equator = BaseCurve::sphere_circle(sphere.clone(), 1.0, FRAC_PI_2, 1.0, 3.0);
        let t0 = equator.velocity(0.5);
        let moved = parallel_transport(&equator, t0, 0.5, 2.5).unwrap();
        let t1 = equator.velocity(2.5);
        assert!((moved.v1 - t1.v1).abs() < 1e-9 && (moved.v2 - t1.v2).abs() < 1e-9);

        // Norm preservation on a non-geodesic curve.
        let small = BaseCurve::sphere_circle(sphere.clone(), 1.0, 1.0, 1.0, 4.0);
        let w = parallel_transport(&small, tv(0.3, 0.8), 0.0, 4.0).unwrap();
        let n0 = small.surface().norm(small.point(0.0), tv(0.3, 0.8)).unwrap();
        let n1 = small.surface().norm(small.point(4.0), w).unwrap();
        assert!((n0 - n1).abs() < 1e-8);
    }

    #[test]
    fn geodesic_examples() {
        let plane = SurfaceModel::plane();
        let line = geodesic(&plane, ChartPoint::new(0.0, 0.0), tv(1.0, 0.0), 1.0).unwrap();
        let end = line.point(1.0);
        assert!((end.x1 - 1.0).abs() < 1e-10 && end.x2.abs() < 1e-12);

        let sphere = SurfaceModel::sphere(1.0);
        let eq = geodesic(&sphere, ChartPoint::new(FRAC_PI_2, 0.0), tv(0.0, 1.0), 2.0).unwrap();
        for s in eq.sample_grid(20, 0.0) {
            assert!((eq.point(s).x1 - FRAC_PI_2).abs() < 1e-9);
            assert!((eq.speed(s).unwrap() - 1.0).abs() < 1e-8);
        }
        // Geodesic curvature vanishes along the solution.
        let fr = base_frenet(&eq);
        for s in eq.sample_grid(15, 0.05) {
            assert!(fr.frame_at(s).unwrap().kappa.abs() < 1e-6);
        }
    }

    #[test]
    fn geodesic_exits_chart() {
        let sphere = SurfaceModel::sphere(1.0);
        // Head straight for the pole.
        let res = geodesic(&sphere, ChartPoint::new(0.5, 0.0), tv(-1.0, 0.0), 1.0);
        assert!(matches!(res, Err(GeomError::OutOfChart { .. })));
    }

    #[test]
    fn frenet_plane_circle() {
        let plane = SurfaceModel::plane();
        let circle = BaseCurve::plane_circle(plane, ChartPoint::new(0.0, 0.0), 1.0, 1.0, 6.0);
        let fr = base_frenet(&circle);
        for s in circle.sample_grid(25, 0.0) {
            let f = fr.frame_at(s).unwrap();
            assert!((f.kappa - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn frenet_line_and_small_circle() {
        let plane = SurfaceModel::plane();
        let line = BaseCurve::line(plane, ChartPoint::new(0.0, 0.0), tv(2.0, 1.0), 1.3, 2.0);
        let fr = base_frenet(&line);
        assert!(fr.frame_at(1.0).unwrap().kappa.abs() < 1e-14);

        let sphere = SurfaceModel::sphere(1.0);
        let colat = 1.1_f64;
        let small = BaseCurve::sphere_circle(sphere.clone(), 1.0, colat, 1.0, 3.0);
        let fr = base_frenet(&small);
        for s in small.sample_grid(10, 0.0) {
            let f = fr.frame_at(s).unwrap();
            assert!((f.kappa - 1.0 / colat.tan()).abs() < 1e-10);
        }
    }

    #[test]
    fn frenet_orthonormality_and_defining_relation() {
        let sphere = SurfaceModel::sphere(2.0);
        let curve = BaseCurve::sphere_circle(sphere.clone(), 2.0, 0.9, 1.7, 3.0);
        let fr = base_frenet(&curve);
        for s in curve.sample_grid(12, 0.1) {
            let f = fr.frame_at(s).unwrap();
            let p = curve.point(s);
            let g = sphere.metric_at(p).unwrap();
            assert!((g.inner(f.t, f.t) - 1.0).abs() < 1e-12);
            assert!((g.inner(f.n, f.n) - 1.0).abs() < 1e-12);
            assert!(g.inner(f.t, f.n).abs() < 1e-12);
            // ∇_T T = κ N, via ∇_E E / r^2 projected.
            let acc = curve.covariant_accel(s).unwrap();
            let r = curve.speed(s).unwrap();
            let lhs = acc.scale(1.0 / (r * r));
            let rhs = f.n.scale(f.kappa);
            let diff = lhs.sub(rhs);
            assert!(g.norm(diff) < 1e-6);
        }
    }

    #[test]
    fn curve_with_curvature_matches_prescription() {
        let sphere = SurfaceModel::sphere(1.0);
        let kappa = Arc::new(|s: f64| 0.2 + 0.25 * s);
        let curve = curve_with_curvature(
            &sphere,
            ChartPoint::new(FRAC_PI_2, 0.0),
            tv(0.1, 1.0),
            kappa.clone(),
            3.0,
        )
        .unwrap();
        let fr = base_frenet(&curve);
        for s in curve.sample_grid(20, 0.05) {
            assert!((curve.speed(s).unwrap() - 1.0).abs() < 1e-8);
            let f = fr.frame_at(s).unwrap();
            assert!((f.kappa - kappa(s)).abs() < 1e-6, "kappa mismatch at {s}");
            // Stays well inside the sphere chart.
            let p = curve.point(s);
            assert!(p.x1 > 0.3 && p.x1 < PI - 0.3);
        }
    }

    #[test]
    fn custom_metric_fd_curvature() {
        // Conformal metric e^{2 x1} (dx1^2 + dx2^2) has K = 0... use a
        // non-flat one: g = diag(1, exp(2 x1)) has K = -1.
        let s = SurfaceModel::custom_metric(
            "1",
            "0",
            "exp(2 * x1)",
            &[ChartPoint::new(0.2, 0.1)],
        )
        .unwrap();
        let k = s.gauss_curvature(ChartPoint::new(0.2, 0.7)).unwrap();
        assert!((k + 1.0).abs() < 1e-7, "expected K = -1, got {k}");
    }
}
