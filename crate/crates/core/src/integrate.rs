//! Classical fixed-step Runge–Kutta.

use nalgebra::DVector;

use crate::error::Result;
use crate::scalar::Real;

/// One RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<T, F>(t: T, y: &DVector<T>, dt: T, mut f: F) -> Result<DVector<T>>
where
    T: Real,
    F: FnMut(T, &DVector<T>) -> Result<DVector<T>>,
{
    let half = dt * T::lit(0.5);
    let k1 = f(t, y)?;
    let k2 = f(t + half, &(y + &k1 * half))?;
    let k3 = f(t + half, &(y + &k2 * half))?;
    let k4 = f(t + dt, &(y + &k3 * dt))?;
    let sixth = dt / T::lit(6.0);
    Ok(y + (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * sixth)
}

/// Number of fixed steps covering `[0, t_end]`, the last one landing on `t_end`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    ((t_end / dt) - 1e-9).ceil().max(0.0) as usize
}
