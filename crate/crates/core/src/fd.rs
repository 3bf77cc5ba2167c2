//! Fourth-order finite differences on uniform grids.

/// First derivative of a sampled function, 4th order: five-point central
/// stencils inside, one-sided five-point stencils at the two boundary nodes
/// on each end. Needs at least 5 samples.
pub fn derivative(samples: &[f64], dt: f64) -> Vec<f64> {
    let n = samples.len();
    assert!(n >= 5, "need at least 5 samples for 4th-order stencils");
    let f = samples;
    let mut out = vec![0.0; n];
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dt);
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dt);
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dt);
    }
    out[n - 2] =
        (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5])
            / (12.0 * dt);
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
        + 3.0 * f[n - 5])
        / (12.0 * dt);
    out
}

/// Componentwise derivative of a sampled vector path (nodes x coords).
pub fn derivative_rows(samples: &[Vec<f64>], dt: f64) -> Vec<Vec<f64>> {
    let n = samples.len();
    let m = samples.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0.0; m]; n];
    let mut scratch = vec![0.0; n];
    for c in 0..m {
        for (i, row) in samples.iter().enumerate() {
            scratch[i] = row[c];
        }
        let d = derivative(&scratch, dt);
        for (i, v) in d.into_iter().enumerate() {
            out[i][c] = v;
        }
    }
    out
}

/// Cumulative integral with Simpson-type 4th-order end corrections
/// (Gregory coefficients); `integral[0] = 0`.
pub fn cumulative_integral(samples: &[f64], dt: f64) -> Vec<f64> {
    let n = samples.len();
    assert!(n >= 5);
    // composite trapezoid with 3rd-difference end corrections is O(h^4);
    // build cumulatively so every prefix is consistent
    let mut out = vec![0.0; n];
    for i in 1..n {
        // local quartic interpolation step from i-1 to i using 4 neighbors
        let (a, s) = if i == 1 {
            (0usize, 0.0)
        } else if i >= n - 1 {
            (n - 4, (i - 1 - (n - 4)) as f64)
        } else {
            (i - 2, 1.0)
        };
        let f0 = samples[a];
        let f1 = samples[a + 1];
        let f2 = samples[a + 2];
        let f3 = samples[a + 3];
        // integral of the cubic through (0..3) from s to s+1 (units of dt)
        let int_cubic = |x: f64| -> f64 {
            // Newton forward on nodes 0,1,2,3
            let d1 = f1 - f0;
            let d2 = f2 - 2.0 * f1 + f0;
            let d3 = f3 - 3.0 * f2 + 3.0 * f1 - f0;
            // antiderivative of f0 + d1 x + d2 x(x-1)/2 + d3 x(x-1)(x-2)/6
            f0 * x + d1 * x * x / 2.0 + d2 * (x * x * x / 3.0 - x * x / 2.0) / 2.0
                + d3 * (x * x * x * x / 4.0 - x * x * x + x * x) / 6.0
        };
        out[i] = out[i - 1] + dt * (int_cubic(s + 1.0) - int_cubic(s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics() {
        let n = 40;
        let dt = 0.05;
        let f: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                1.0 + t + t * t + t * t * t + t * t * t * t
            })
            .collect();
        let d = derivative(&f, dt);
        for (i, v) in d.iter().enumerate() {
            let t = i as f64 * dt;
            let expect = 1.0 + 2.0 * t + 3.0 * t * t + 4.0 * t * t * t;
            assert!((v - expect).abs() < 1e-10, "node {i}: {v} vs {expect}");
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |dt: f64| -> f64 {
            let n = (1.0 / dt) as usize + 1;
            let f: Vec<f64> = (0..n).map(|i| (i as f64 * dt).sin()).collect();
            let d = derivative(&f, dt);
            d.iter()
                .enumerate()
                .map(|(i, v)| (v - (i as f64 * dt).cos()).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err(0.01);
        let e2 = err(0.005);
        assert!(e1 / e2 > 8.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn cumulative_integral_of_cosine() {
        let dt = 0.01;
        let n = 201;
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * dt).cos()).collect();
        let integral = cumulative_integral(&f, dt);
        for (i, v) in integral.iter().enumerate() {
            let expect = (i as f64 * dt).sin();
            assert!((v - expect).abs() < 1e-9, "node {i}");
        }
    }
}
