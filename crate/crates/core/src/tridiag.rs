//! Thomas solver for the tridiagonal systems produced by the implicit
//! Helmholtz solves. All matrices here are strictly diagonally dominant,
//! so no pivoting is needed.

/// Solve `A x = rhs` where `A` is tridiagonal. `lower[i]` multiplies
/// `x[i-1]` in row `i` (`lower[0]` ignored), `upper[i]` multiplies
/// `x[i+1]` (`upper[n-1]` ignored).
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    assert!(n >= 1 && lower.len() == n && diag.len() == n && upper.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn multiply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    #[test]
    fn reproduces_rhs() {
        // deterministic pseudo-random diagonally dominant systems
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [1usize, 2, 3, 7, 50, 333] {
            let lower: Vec<f64> = (0..n).map(|_| next()).collect();
            let upper: Vec<f64> = (0..n).map(|_| next()).collect();
            let diag: Vec<f64> =
                (0..n).map(|i| 2.0 + lower[i].abs() + upper[i].abs() + next().abs()).collect();
            let rhs: Vec<f64> = (0..n).map(|_| next() * 10.0).collect();
            let x = solve(&lower, &diag, &upper, &rhs);
            let back = multiply(&lower, &diag, &upper, &x);
            for i in 0..n {
                assert!((back[i] - rhs[i]).abs() < 1e-11, "n = {n}, row {i}");
            }
        }
    }
}
