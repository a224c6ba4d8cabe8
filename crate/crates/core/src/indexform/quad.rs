/// Integral of uniformly spaced samples `f` with spacing `h`: composite
/// Simpson, with a 3/8 panel at the end when the interval count is odd and a
/// trapezoid for a single interval.
pub(crate) fn integrate_samples(f: &[f64], h: f64) -> f64 {
    let m = f.len().saturating_sub(1);
    match m {
        0 => 0.0,
        1 => 0.5 * h * (f[0] + f[1]),
        _ => {
            let simpson_end = if m % 2 == 0 { m } else { m - 3 };
            let mut sum = 0.0;
            let mut k = 0;
            while k < simpson_end {
                sum += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
                k += 2;
            }
            if simpson_end < m {
                sum += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
            }
            sum
        }
    }
}
