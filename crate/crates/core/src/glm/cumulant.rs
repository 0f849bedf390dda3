/// `b(t) = log(1 + e^t)`, evaluated as `max(t, 0) + log(1 + e^{-|t|})`.
pub fn cumulant(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Logistic function.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `b'(t) = e^t / (1 + e^t)`.
pub fn cumulant_d1(t: f64) -> f64 {
    sigmoid(t)
}

/// `b''(t) = e^t / (1 + e^t)^2`, symmetric in `t`.
pub fn cumulant_d2(t: f64) -> f64 {
    let e = (-t.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}
