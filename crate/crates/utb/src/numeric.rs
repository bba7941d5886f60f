//! Shared numerical kernels: finite differences, fixed-step RK4,
//! cubic Hermite interpolation and a few small statistics helpers.

/// Relative step for fourth-order central differences.
///
/// Truncation error scales as h^4 while round-off scales as eps/h; 1e-4
/// balances the two for targets around 1e-6.
pub const FD_REL_STEP: f64 = 1e-4;

/// Minimum RK4 steps per unit of the integration parameter.
pub const RK_STEPS_PER_UNIT: usize = 2000;

/// Step size scaled by the magnitude of the expansion point.
pub fn fd_step(x: f64) -> f64 {
    FD_REL_STEP * x.abs().max(1.0)
}

/// Fourth-order central difference f'(x) with explicit step.
pub fn deriv4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central difference of an array-valued function.
pub fn deriv4_arr<const N: usize>(f: impl Fn(f64) -> [f64; N], x: f64, h: f64) -> [f64; N] {
    let (a, b, c, d) = (f(x + 2.0 * h), f(x + h), f(x - h), f(x - 2.0 * h));
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = (-a[i] + 8.0 * b[i] - 8.0 * c[i] + d[i]) / (12.0 * h);
    }
    out
}

/// Classical fixed-step RK4 on y' = f(t, y), returning every knot.
pub fn rk4_integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t1: f64,
    steps: usize,
) -> Vec<(f64, [f64; N])> {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut t = t0;
    let mut y = y0;
    out.push((t, y));
    for i in 0..steps {
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &arr_axpy(&y, 0.5 * h, &k1));
        let k3 = f(t + 0.5 * h, &arr_axpy(&y, 0.5 * h, &k2));
        let k4 = f(t + h, &arr_axpy(&y, h, &k3));
        for j in 0..N {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t = t0 + (i + 1) as f64 * h;
        out.push((t, y));
    }
    out
}

fn arr_axpy<const N: usize>(y: &[f64; N], a: f64, x: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * x[i];
    }
    out
}

/// Piecewise cubic Hermite interpolant over possibly non-uniform knots.
///
/// Queries outside the knot range evaluate the boundary polynomial, which
/// keeps finite-difference stencils near the ends well defined.
#[derive(Clone, Debug)]
pub struct HermiteSpline<const N: usize> {
    xs: Vec<f64>,
    ys: Vec<[f64; N]>,
    ds: Vec<[f64; N]>,
}

impl<const N: usize> HermiteSpline<N> {
    pub fn new(xs: Vec<f64>, ys: Vec<[f64; N]>, ds: Vec<[f64; N]>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len() && xs.len() == ds.len());
        assert!(xs.windows(2).all(|w| w[1] > w[0]), "knots must increase");
        Self { xs, ys, ds }
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        let i = self.xs.partition_point(|&k| k <= x);
        i.clamp(1, n - 1) - 1
    }

    pub fn eval(&self, x: f64) -> [f64; N] {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let mut out = [0.0; N];
        for j in 0..N {
            out[j] = h00 * self.ys[i][j]
                + h10 * h * self.ds[i][j]
                + h01 * self.ys[i + 1][j]
                + h11 * h * self.ds[i + 1][j];
        }
        out
    }

    pub fn deriv(&self, x: f64) -> [f64; N] {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (6.0 * t - 6.0 * t2) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let mut out = [0.0; N];
        for j in 0..N {
            out[j] = d00 * self.ys[i][j]
                + d10 * self.ds[i][j]
                + d01 * self.ys[i + 1][j]
                + d11 * self.ds[i + 1][j];
        }
        out
    }

    pub fn second_deriv(&self, x: f64) -> [f64; N] {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let s00 = (12.0 * t - 6.0) / (h * h);
        let s10 = (6.0 * t - 4.0) / h;
        let s01 = (6.0 - 12.0 * t) / (h * h);
        let s11 = (6.0 * t - 2.0) / h;
        let mut out = [0.0; N];
        for j in 0..N {
            out[j] = s00 * self.ys[i][j]
                + s10 * self.ds[i][j]
                + s01 * self.ys[i + 1][j]
                + s11 * self.ds[i + 1][j];
        }
        out
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

/// Cumulative trapezoid integral of samples (same length as input).
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(xs.len());
    let mut total = 0.0;
    acc.push(0.0);
    for i in 1..xs.len() {
        total += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
        acc.push(total);
    }
    acc
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Largest deviation of the samples from their own mean.
pub fn max_dev_from_mean(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().fold(0.0_f64, |acc, v| acc.max((v - m).abs()))
}

/// Standard deviation divided by |mean|; infinite for a zero mean.
pub fn rel_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    if m.abs() < f64::MIN_POSITIVE.sqrt() {
        f64::INFINITY
    } else {
        var.sqrt() / m.abs()
    }
}

/// Symmetric 3x3 inverse via the adjugate.
pub fn inv3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = det3(m);
    let mut adj = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let minor: Vec<f64> = (0..3)
                .filter(|&i| i != r)
                .flat_map(|i| (0..3).filter(|&j| j != c).map(move |j| (i, j)))
                .map(|(i, j)| m[i][j])
                .collect();
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            adj[c][r] = sign * (minor[0] * minor[3] - minor[1] * minor[2]);
        }
    }
    for row in adj.iter_mut() {
        for v in row.iter_mut() {
            *v /= det;
        }
    }
    adj
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat3_vec(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}

pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Least-squares line fit y = a*x + b.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx = xs.iter().sum::<f64>();
    let sy = ys.iter().sum::<f64>();
    let sxx = xs.iter().map(|x| x * x).sum::<f64>();
    let sxy = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>();
    let denom = n * sxx - sx * sx;
    let a = (n * sxy - sx * sy) / denom;
    let b = (sy - a * sx) / n;
    (a, b)
}
