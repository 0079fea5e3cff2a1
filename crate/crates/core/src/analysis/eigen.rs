//! Cyclic Jacobi eigenvalue iteration for small symmetric matrices.

/// Hard cap on sweeps; cyclic Jacobi converges quadratically, so real inputs
/// finish in well under twenty.
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of the symmetric `n x n` matrix `a` (either storage order),
/// ascending.
///
/// Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius
/// norm drops below `rel_tol * ||a||_F`.
pub fn symmetric_eigenvalues(a: &[f64], n: usize, rel_tol: f64) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut w = a.to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    let total: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = rel_tol * total;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[idx(i, j)] * w[idx(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[idx(q, q)] - w[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                w[idx(p, p)] -= t * apq;
                w[idx(q, q)] += t * apq;
                w[idx(p, q)] = 0.0;
                w[idx(q, p)] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = w[idx(r, p)];
                    let h = w[idx(r, q)];
                    let rp = c * g - s * h;
                    let rq = s * g + c * h;
                    w[idx(r, p)] = rp;
                    w[idx(p, r)] = rp;
                    w[idx(r, q)] = rq;
                    w[idx(q, r)] = rq;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| w[idx(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_fixed_point() {
        assert_eq!(symmetric_eigenvalues(&[4.0, 0.0, 0.0, 1.0], 2, 1e-14), vec![1.0, 4.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let eig = symmetric_eigenvalues(&[1.0, 1.0, 1.0, 2.0], 2, 1e-14);
        let root5 = 5f64.sqrt();
        assert!((eig[0] - (3.0 - root5) / 2.0).abs() < 1e-15);
        assert!((eig[1] - (3.0 + root5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_is_preserved() {
        let a = [
            4.0, 1.0, -2.0, 0.5, //
            1.0, 3.0, 0.0, 1.5, //
            -2.0, 0.0, 5.0, -1.0, //
            0.5, 1.5, -1.0, 2.0,
        ];
        let eig = symmetric_eigenvalues(&a, 4, 1e-15);
        let trace: f64 = eig.iter().sum();
        assert!((trace - 14.0).abs() < 1e-12);
        assert!(eig.windows(2).all(|w| w[0] <= w[1]));
    }
}
