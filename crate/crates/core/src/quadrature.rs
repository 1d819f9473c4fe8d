//! Gauss-Legendre rules on `[0, 1]` and their iterated extension to the
//! ordered simplex `0 <= s_1 <= ... <= s_k <= 1`.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[0, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A node of a simplex rule: ordered times `s_1 <= ... <= s_k` and weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexNode {
    pub s: Vec<f64>,
    pub weight: f64,
}

/// Iterated Gauss-Legendre rule on the ordered `k`-simplex with `n` nodes per
/// dimension: `s_k = u_k`, `s_j = s_{j+1} u_j`, Jacobian `s_2 s_3 ... s_k`.
/// Weights sum to `1/k!`. For `k = 0` the simplex is a point of unit mass.
pub fn simplex_rule(k: usize, n: usize) -> Vec<SimplexNode> {
    if k == 0 {
        return vec![SimplexNode {
            s: vec![],
            weight: 1.0,
        }];
    }
    let (nodes, weights) = gauss_legendre(n);
    let mut out = Vec::with_capacity(n.pow(k as u32));
    let mut idx = vec![0usize; k];
    loop {
        let mut s = vec![0.0; k];
        let mut w = 1.0;
        s[k - 1] = nodes[idx[k - 1]];
        w *= weights[idx[k - 1]];
        for j in (0..k - 1).rev() {
            s[j] = s[j + 1] * nodes[idx[j]];
            w *= weights[idx[j]] * s[j + 1];
        }
        out.push(SimplexNode { s, weight: w });
        let mut a = k;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
        }
    }
}
