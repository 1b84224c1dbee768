/// Central finite difference of order 1, 2 or 3 with one Richardson step.
///
/// The central stencils have error `c2 h^2 + c4 h^4 + ...`; combining steps
/// `h` and `h/2` as `(4 D(h/2) - D(h)) / 3` leaves `O(h^4)` truncation
/// error. Round-off grows like `eps |f| / h^order`, so higher orders want a
/// larger step (about `1e-3` for order 1, `5e-3` for order 2, `2e-2` for
/// order 3 on unit-scale functions).
pub fn finite_diff(f: impl Fn(f64) -> f64, x: f64, order: usize, step: f64) -> f64 {
    let stencil = |h: f64| -> f64 {
        match order {
            0 => f(x),
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
            _ => panic!("finite_diff supports orders 0..=3, got {order}"),
        }
    };
    if order == 0 {
        return f(x);
    }
    let coarse = stencil(step);
    let fine = stencil(0.5 * step);
    (4.0 * fine - coarse) / 3.0
}
