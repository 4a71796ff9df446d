#![allow(dead_code)]

/// One-sample Kolmogorov-Smirnov distance against a continuous CDF.
pub fn ks_one_sample(mut data: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    data.sort_by(f64::total_cmp);
    let n = data.len() as f64;
    data.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / na - j as f64 / nb).abs());
    }
    worst
}

pub fn circle_distance(a: f64, b: f64) -> f64 {
    let x = (a - b).rem_euclid(std::f64::consts::TAU);
    x.min(std::f64::consts::TAU - x)
}
