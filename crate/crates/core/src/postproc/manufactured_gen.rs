// Generated by scripts/gen_manufactured.py. Do not edit.

use std::f64::consts::PI;

#[rustfmt::skip]
pub(crate) fn value(x: f64, y: f64) -> f64 {
    f64::powi(f64::sin(PI*x), 2)*f64::powi(f64::sin(PI*y), 2)
}

#[rustfmt::skip]
pub(crate) fn dx(x: f64, y: f64) -> f64 {
    2.0*PI*f64::sin(PI*x)*f64::powi(f64::sin(PI*y), 2)*f64::cos(PI*x)
}

#[rustfmt::skip]
pub(crate) fn dy(x: f64, y: f64) -> f64 {
    2.0*PI*f64::powi(f64::sin(PI*x), 2)*f64::sin(PI*y)*f64::cos(PI*y)
}

#[rustfmt::skip]
pub(crate) fn dxx(x: f64, y: f64) -> f64 {
    -2.0*f64::powi(PI, 2)*(f64::powi(f64::sin(PI*x), 2) - f64::powi(f64::cos(PI*x), 2))*f64::powi(f64::sin(PI*y), 2)
}

#[rustfmt::skip]
pub(crate) fn dxy(x: f64, y: f64) -> f64 {
    4.0*f64::powi(PI, 2)*f64::sin(PI*x)*f64::sin(PI*y)*f64::cos(PI*x)*f64::cos(PI*y)
}

#[rustfmt::skip]
pub(crate) fn dyy(x: f64, y: f64) -> f64 {
    -2.0*f64::powi(PI, 2)*(f64::powi(f64::sin(PI*y), 2) - f64::powi(f64::cos(PI*y), 2))*f64::powi(f64::sin(PI*x), 2)
}

#[rustfmt::skip]
pub(crate) fn bilaplacian(x: f64, y: f64) -> f64 {
    8.0*f64::powi(PI, 4)*((f64::powi(f64::sin(PI*x), 2) - f64::powi(f64::cos(PI*x), 2))*(f64::powi(f64::sin(PI*y), 2) - f64::powi(f64::cos(PI*y), 2)) + (f64::powi(f64::sin(PI*x), 2) - f64::powi(f64::cos(PI*x), 2))*f64::powi(f64::sin(PI*y), 2) + (f64::powi(f64::sin(PI*y), 2) - f64::powi(f64::cos(PI*y), 2))*f64::powi(f64::sin(PI*x), 2))
}

