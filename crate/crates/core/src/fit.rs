//! Log-log least-squares slopes with a 95% confidence half-width.

/// Two-sided 97.5% Student-t quantiles for 1..=30 degrees of freedom.
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045, 2.042,
];

pub fn t_quantile_975(dof: usize) -> f64 {
    match dof {
        0 => f64::INFINITY,
        d if d <= 30 => T975[d - 1],
        _ => 1.96,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub half_width: f64,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let half_width = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum();
        let se = libm::sqrt(rss / (nf - 2.0) / sxx);
        t_quantile_975(n - 2) * se
    } else {
        f64::INFINITY
    };
    Some(LineFit {
        slope,
        intercept,
        half_width,
    })
}

/// Slope of `ln(value)` against `ln(radius)`; nonpositive values are skipped.
pub fn log_log_fit(radii: &[f64], values: &[f64]) -> Option<LineFit> {
    let (xs, ys): (alloc::vec::Vec<f64>, alloc::vec::Vec<f64>) = radii
        .iter()
        .zip(values)
        .filter(|(r, v)| **r > 0.0 && **v > 0.0 && v.is_finite())
        .map(|(r, v)| (libm::log(*r), libm::log(*v)))
        .unzip();
    least_squares(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let r = [4.0, 8.0, 16.0, 32.0, 64.0];
        let v: alloc::vec::Vec<f64> = r.iter().map(|x| 3.0 * libm::pow(*x, -2.5)).collect();
        let fit = log_log_fit(&r, &v).unwrap();
        assert!((fit.slope + 2.5).abs() < 1e-12);
        assert!(fit.half_width < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares(&[1.0], &[2.0]).is_none());
        assert!(least_squares(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
