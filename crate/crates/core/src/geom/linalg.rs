use crate::derivkit::Scalar;

/// Determinant and inverse of a dense row-major `n x n` matrix by
/// Gauss–Jordan elimination with partial pivoting on the values.
///
/// Generic over [`Scalar`], so running it on jets differentiates the
/// determinant and every inverse entry. Returns `None` for an exactly
/// singular pivot.
pub fn det_and_inverse<S: Scalar>(m: &[S], n: usize) -> Option<(S, Vec<S>)> {
    assert_eq!(m.len(), n * n);
    assert!(n > 0, "empty matrix has no derivative carrier");
    let zero = m[0].zero_like();
    let mut a = m.to_vec();
    let mut inv: Vec<S> = (0..n * n)
        .map(|idx| zero.lift(if idx / n == idx % n { 1.0 } else { 0.0 }))
        .collect();
    let mut det = zero.lift(1.0);

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1 * n + col]
                    .value()
                    .abs()
                    .total_cmp(&a[r2 * n + col].value().abs())
            })
            .expect("non-empty range");
        if a[pivot_row * n + col].value() == 0.0 {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
                inv.swap(col * n + c, pivot_row * n + c);
            }
            det = -det;
        }
        let pivot = a[col * n + col].clone();
        det = det * pivot.clone();
        let rp = pivot.recip();
        for c in 0..n {
            a[col * n + c] = a[col * n + c].clone() * rp.clone();
            inv[col * n + c] = inv[col * n + c].clone() * rp.clone();
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r * n + col].clone();
            for c in 0..n {
                a[r * n + c] = a[r * n + c].clone() - factor.clone() * a[col * n + c].clone();
                inv[r * n + c] = inv[r * n + c].clone() - factor.clone() * inv[col * n + c].clone();
            }
        }
    }
    Some((det, inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivkit::Jet1;

    #[test]
    fn inverse_of_small_matrix() {
        let m = [4.0, 1.0, 2.0, 3.0];
        let (det, inv) = det_and_inverse(&m, 2).unwrap();
        assert!((det - 10.0).abs() < 1e-14);
        let expected = [0.3, -0.1, -0.2, 0.4];
        for (a, b) in inv.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = [0.0, 2.0, 3.0, 1.0];
        let (det, _) = det_and_inverse(&m, 2).unwrap();
        assert!((det + 6.0).abs() < 1e-14);
        assert!(det_and_inverse(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }

    #[test]
    fn determinant_derivative_is_jacobi_formula() {
        // M(t) = [[1 + t, t], [2t, 3]] at t = 0.5: det = 3 + 3t - 2t^2, det' = 3 - 4t = 1
        let t = Jet1::variable(1, 0, 0.5);
        let m = vec![
            t.clone() + 1.0,
            t.clone(),
            t.clone() * 2.0,
            t.lift(3.0),
        ];
        let (det, _) = det_and_inverse(&m, 2).unwrap();
        assert!((det.value() - 4.0).abs() < 1e-14);
        assert!((det.grad()[0] - 1.0).abs() < 1e-14);
    }
}
