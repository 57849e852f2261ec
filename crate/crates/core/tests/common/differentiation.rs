//! Eighth-order central differences.

use nalgebra::{Matrix3, Vector3};

const STEP: f64 = 1e-2;
const FD8: [(f64, f64); 4] = [(1.0, 4.0 / 5.0), (2.0, -1.0 / 5.0), (3.0, 4.0 / 105.0), (4.0, -1.0 / 280.0)];
const FD8_SECOND: [(f64, f64); 4] = [(1.0, 8.0 / 5.0), (2.0, -1.0 / 5.0), (3.0, 8.0 / 315.0), (4.0, -1.0 / 560.0)];
const FD8_SECOND_CENTER: f64 = -205.0 / 72.0;

pub fn d1<F: Fn(f64) -> Vector3<f64>>(f: F, x: f64) -> Vector3<f64> {
    FD8.iter().fold(Vector3::zeros(), |a, &(k, c)| a + (f(x + k * STEP) - f(x - k * STEP)) * c) / STEP
}

pub fn d2<F: Fn(f64) -> Vector3<f64>>(f: F, x: f64) -> Vector3<f64> {
    let s = FD8_SECOND.iter().fold(f(x) * FD8_SECOND_CENTER, |a, &(k, c)| a + (f(x + k * STEP) + f(x - k * STEP)) * c);
    s / (STEP * STEP)
}

/// `J[(i, j)] = ∂_j F_i` by finite differences.
pub fn jacobian<F: Fn(&Vector3<f64>) -> Vector3<f64>>(f: &F, x: &Vector3<f64>) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    for k in 0..3 {
        let col = d1(|s| f(&(x + Vector3::ith(k, 1.0) * (s - x[k]))), x[k]);
        j.set_column(k, &col);
    }
    j
}

pub fn laplacian<F: Fn(&Vector3<f64>) -> Vector3<f64>>(f: &F, x: &Vector3<f64>) -> Vector3<f64> {
    (0..3).fold(Vector3::zeros(), |a, k| a + d2(|s| f(&(x + Vector3::ith(k, 1.0) * (s - x[k]))), x[k]))
}

pub fn curl(j: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(j[(2, 1)] - j[(1, 2)], j[(0, 2)] - j[(2, 0)], j[(1, 0)] - j[(0, 1)])
}
