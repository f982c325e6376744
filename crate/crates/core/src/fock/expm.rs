use nalgebra::DMatrix;

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// All generators used by the oracle are real and antisymmetric, so the result
/// is orthogonal; callers gate accuracy on that rather than on a step count.
pub(crate) fn expm(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let one_norm = (0..n)
        .map(|j| g.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    if one_norm > 0.25 {
        squarings = (one_norm / 0.25).log2().ceil() as u32;
    }
    let scaled = g / 2f64.powi(squarings as i32);

    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.amax() < 1e-18 * sum.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator() {
        let t = 2.7f64;
        let g = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let u = expm(&g);
        assert!((u[(0, 0)] - t.cos()).abs() < 1e-14);
        assert!((u[(1, 0)] - t.sin()).abs() < 1e-14);
        assert!((u[(0, 1)] + t.sin()).abs() < 1e-14);
    }

    #[test]
    fn zero_generator_is_identity() {
        let u = expm(&DMatrix::zeros(5, 5));
        assert_eq!(u, DMatrix::identity(5, 5));
    }

    #[test]
    fn antisymmetric_gives_orthogonal() {
        let n = 30;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n - 2 {
            let v = 0.4 * ((i + 1) * (i + 2)) as f64;
            let v = v.sqrt();
            g[(i, i + 2)] = v;
            g[(i + 2, i)] = -v;
        }
        let u = expm(&g);
        let err = (u.transpose() * &u - DMatrix::<f64>::identity(n, n)).amax();
        assert!(err < 1e-12, "{err}");
    }
}
