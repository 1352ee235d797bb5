//! Small quadrature and interpolation helpers shared across modules.

use std::f64::consts::PI;

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Running trapezoidal integral, starting at zero on the first node.
pub(crate) fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        out.push(acc);
    }
    out
}

/// Index `i` with `x[i] <= t <= x[i+1]`; `t` must lie inside `[x[0], x[n-1]]`.
pub(crate) fn bracket(x: &[f64], t: f64) -> usize {
    let n = x.len();
    match x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => (i.max(1) - 1).min(n - 2),
    }
}

pub(crate) fn lerp_at(x: &[f64], y: &[f64], t: f64) -> f64 {
    let i = bracket(x, t);
    let w = (t - x[i]) / (x[i + 1] - x[i]);
    y[i] + w * (y[i + 1] - y[i])
}

/// Derivative at `x[at]` of the quadratic through three nodes.
pub(crate) fn three_point_derivative(x: [f64; 3], y: [f64; 3], at: usize) -> f64 {
    let [x0, x1, x2] = x;
    let t = x[at];
    let l0 = (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1));
    y[0] * l0 + y[1] * l1 + y[2] * l2
}

/// Second-order derivative of sampled data: central stencil inside,
/// one-sided three-point stencils on both edges.
pub(crate) fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    debug_assert!(n >= 3);
    (0..n)
        .map(|i| {
            let (start, at) = if i == 0 {
                (0, 0)
            } else if i == n - 1 {
                (n - 3, 2)
            } else {
                (i - 1, 1)
            };
            three_point_derivative(
                [x[start], x[start + 1], x[start + 2]],
                [y[start], y[start + 1], y[start + 2]],
                at,
            )
        })
        .collect()
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Solves a small dense symmetric positive-definite system by Cholesky.
/// Returns `None` when the matrix is numerically singular.
pub(crate) fn solve_spd<const N: usize>(a: [[f64; N]; N], b: [f64; N]) -> Option<[f64; N]> {
    let mut l = [[0.0; N]; N];
    let scale = (0..N).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for i in 0..N {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 1e-12 * scale || s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; N];
    for i in 0..N {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let mut s = y[i];
        for k in i + 1..N {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

/// Wraps an angle into (-π, π].
pub(crate) fn wrap_pi(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}
