//! Sample moments and a moment-based normality test. All reductions run
//! sequentially in index order so results are bit-reproducible.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance (`n - 1` denominator); 0 for a single value.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Moments {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
        let variance = if count > 1 {
            ss / (count - 1) as f64
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Moments {
            count,
            mean,
            variance,
            min,
            max,
        }
    }

    pub fn stddev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn stderr(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Shape statistics from central moments `m_j = mean((x - mean)^j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Shape {
    /// `m3 / m2^{3/2}`.
    pub skewness: f64,
    /// `m4 / m2^2 - 3`.
    pub excess_kurtosis: f64,
    /// `n/6 (S^2 + K^2/4)`.
    pub jarque_bera: f64,
    /// Upper tail of the chi-square distribution with 2 degrees of freedom
    /// at `jarque_bera`, which is exactly `exp(-JB/2)`.
    pub p_value: f64,
}

/// `None` when the sample has zero variance.
pub fn shape(values: &[f64]) -> Option<Shape> {
    let n = values.len() as f64;
    if values.len() < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 <= 0.0 {
        return None;
    }
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    let jarque_bera = n / 6.0 * (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
    Some(Shape {
        skewness,
        excess_kurtosis,
        jarque_bera,
        p_value: (-jarque_bera / 2.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moments_of_small_sample() {
        let m = Moments::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!((m.min, m.max), (1.0, 4.0));
        assert!(Moments::of(&[]).mean.is_nan());
        assert_eq!(Moments::of(&[7.0]).variance, 0.0);
    }

    #[test]
    fn constant_sample_has_no_shape() {
        assert!(shape(&[2.0; 10]).is_none());
        assert!(shape(&[1.0]).is_none());
    }

    #[test]
    fn symmetric_sample_has_zero_skew() {
        let s = shape(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        assert!(s.skewness.abs() < 1e-15);
        // Uniform-like: platykurtic.
        assert!(s.excess_kurtosis < 0.0);
    }

    #[test]
    fn normal_sample_passes_and_exponential_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // Box–Muller normals.
        let normal: Vec<f64> = (0..4000)
            .map(|_| {
                let u: f64 = rng.gen::<f64>().max(1e-300);
                let v: f64 = rng.gen();
                (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
            })
            .collect();
        let s = shape(&normal).unwrap();
        assert!(s.p_value > 1e-3, "{s:?}");
        let expo: Vec<f64> = (0..4000)
            .map(|_| -rng.gen::<f64>().max(1e-300).ln())
            .collect();
        let s = shape(&expo).unwrap();
        assert!(s.skewness > 1.5);
        assert!(s.p_value < 1e-10);
    }
}
