//! Finite-difference stencils on arbitrary node sets.
//!
//! These serve as the independent differentiation path: boundary and initial
//! data are traced from closed-form solutions with them, and the oracle tests
//! recompute every PDE residual through them rather than through the jet
//! arithmetic used in training.

/// Weights for the `order`-th derivative at `z` from samples at `nodes`
/// (Fornberg's recurrence). `nodes` must be pairwise distinct and
/// `order < nodes.len()`.
pub fn fd_weights(z: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(order < n, "need more nodes than the derivative order");
    // c[k][i] holds the weight of node i for derivative k, built up while
    // nodes are introduced one at a time.
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=order.min(i)).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=order.min(i)).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.pop().unwrap()
}

fn stencil_len(order: usize) -> usize {
    let n = order + 7;
    if n % 2 == 1 {
        n
    } else {
        n + 1
    }
}

/// Central finite difference of a univariate function.
pub fn diff1d(f: impl Fn(f64) -> f64, x: f64, order: usize, h: f64) -> f64 {
    if order == 0 {
        return f(x);
    }
    let n = stencil_len(order);
    let half = (n / 2) as isize;
    let nodes: Vec<f64> = (-half..=half).map(|k| x + k as f64 * h).collect();
    let w = fd_weights(x, &nodes, order);
    nodes.iter().zip(&w).map(|(&xi, &wi)| wi * f(xi)).sum()
}

/// Mixed derivative ∂_t^i ∂_x^j of a bivariate function, inner stencil in t.
pub fn diff2d(
    f: impl Fn(f64, f64) -> f64,
    x: f64,
    t: f64,
    t_order: usize,
    x_order: usize,
    hx: f64,
    ht: f64,
) -> f64 {
    if t_order == 0 {
        return diff1d(|xx| f(xx, t), x, x_order, hx);
    }
    diff1d(|xx| diff1d(|tt| f(xx, tt), t, t_order, ht), x, x_order, hx)
}
