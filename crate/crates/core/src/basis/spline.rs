//! Clamped uniform quadratic B-splines on a lattice.
//!
//! Along an axis with `n` elements the knot vector is
//! `[0, 0, 0, 1, 2, ..., n-1, n, n, n]`, giving `n + 2` functions. Element
//! `e` (parameter range `[e, e+1]`) supports functions `e, e+1, e+2`.

/// Knot vector of a clamped uniform quadratic spline with `n` elements.
pub fn clamped_knots(n: usize) -> Vec<f64> {
    let mut k = vec![0.0, 0.0];
    k.extend((0..=n).map(|i| i as f64));
    k.extend([n as f64, n as f64]);
    k
}

/// Values and parameter derivatives of the three quadratic B-splines
/// supported on element `e` at local coordinate `xi` in [0, 1]
/// (Cox–de Boor recursion restricted to the non-zero functions).
pub fn element_basis(knots: &[f64], e: usize, xi: f64) -> ([f64; 3], [f64; 3]) {
    const P: usize = 2;
    let span = e + P;
    let t = knots[span] + xi * (knots[span + 1] - knots[span]);
    // degree-0 .. degree-2 triangle of non-zero functions
    let mut n = [[0.0f64; P + 1]; P + 1];
    n[0][0] = 1.0;
    let mut left = [0.0; P + 1];
    let mut right = [0.0; P + 1];
    for j in 1..=P {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            // lower triangle stores knot differences
            n[j][r] = right[r + 1] + left[j - r];
            let temp = n[r][j - 1] / n[j][r];
            n[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j][j] = saved;
    }
    let values = [n[0][P], n[1][P], n[2][P]];
    // first derivative from the degree-1 functions
    let mut ders = [0.0; 3];
    for r in 0..=P {
        let mut d = 0.0;
        if r >= 1 {
            d += n[r - 1][P - 1] / n[P][r - 1];
        }
        if r < P {
            d -= n[r][P - 1] / n[P][r];
        }
        ders[r] = P as f64 * d;
    }
    (values, ders)
}

/// Greville abscissae of the `n + 2` functions.
pub fn greville(n: usize) -> Vec<f64> {
    let k = clamped_knots(n);
    (0..n + 2).map(|i| 0.5 * (k[i + 1] + k[i + 2])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook Cox–de Boor recursion over the full knot vector.
    fn cox_de_boor(knots: &[f64], i: usize, p: usize, t: f64) -> f64 {
        if p == 0 {
            let last = knots[knots.len() - 1];
            let in_span = knots[i] <= t && t < knots[i + 1];
            let at_end = t == last && knots[i] < knots[i + 1] && knots[i + 1] == last;
            return if in_span || at_end { 1.0 } else { 0.0 };
        }
        let mut v = 0.0;
        let d1 = knots[i + p] - knots[i];
        if d1 > 0.0 {
            v += (t - knots[i]) / d1 * cox_de_boor(knots, i, p - 1, t);
        }
        let d2 = knots[i + p + 1] - knots[i + 1];
        if d2 > 0.0 {
            v += (knots[i + p + 1] - t) / d2 * cox_de_boor(knots, i + 1, p - 1, t);
        }
        v
    }

    #[test]
    fn matches_recursive_definition() {
        for n in [1usize, 2, 3, 5] {
            let k = clamped_knots(n);
            for e in 0..n {
                for xi in [0.0, 0.13, 0.5, 0.77, 0.999] {
                    let (v, d) = element_basis(&k, e, xi);
                    let t = e as f64 + xi;
                    for r in 0..3 {
                        assert!((v[r] - cox_de_boor(&k, e + r, 2, t)).abs() < 1e-14);
                        let h = 1e-6;
                        let fd = (cox_de_boor(&k, e + r, 2, t + h) - cox_de_boor(&k, e + r, 2, t - h)) / (2.0 * h);
                        if xi > 1e-3 && xi < 1.0 - 1e-3 {
                            assert!((d[r] - fd).abs() < 1e-6);
                        }
                    }
                    assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn interior_midspan_values() {
        let k = clamped_knots(4);
        let (v, _) = element_basis(&k, 2, 0.5);
        for (a, b) in v.iter().zip([0.125, 0.75, 0.125]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_element_is_bernstein() {
        let k = clamped_knots(1);
        let x = 0.3;
        let (v, _) = element_basis(&k, 0, x);
        let b = [(1.0 - x) * (1.0 - x), 2.0 * x * (1.0 - x), x * x];
        for r in 0..3 {
            assert!((v[r] - b[r]).abs() < 1e-15);
        }
    }

    #[test]
    fn greville_points() {
        assert_eq!(greville(3), vec![0.0, 0.5, 1.5, 2.5, 3.0]);
    }
}
