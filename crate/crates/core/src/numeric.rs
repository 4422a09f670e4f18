//! Small numerical helpers shared across modules.

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`. Returns
/// `(argmin, min, evaluations)`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_evals: usize,
) -> (f64, f64, usize) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while (b - a).abs() > tol && evals < max_evals {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    if fc <= fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    }
}

/// Result of a tanh-sinh quadrature.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Double-exponential (tanh-sinh) quadrature of `f` over `[a, b]`.
///
/// `f` receives the abscissa together with its distances to `a` and `b`,
/// which stay accurate near the endpoints where integrable singularities
/// live. Step halving continues until consecutive estimates agree to
/// `rel_tol` (relative to the running sum of `|f|`).
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Quadrature {
    use std::f64::consts::FRAC_PI_2;
    if b <= a {
        return Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            converged: true,
        };
    }
    let half = 0.5 * (b - a);
    // Node at parameter t: x = tanh(pi/2 sinh t); weight dx/dt.
    let mut eval = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let ch = FRAC_PI_2 * t.cosh();
        let e = (-2.0 * s.abs()).exp();
        // 1 - |x| = 2e/(1+e), computed without cancellation
        let one_minus = 2.0 * e / (1.0 + e);
        let w = ch * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if w == 0.0 || one_minus == 0.0 {
            return 0.0;
        }
        let (da, db) = if t >= 0.0 {
            (half * (2.0 - one_minus), half * one_minus)
        } else {
            (half * one_minus, half * (2.0 - one_minus))
        };
        let x = if t >= 0.0 { b - db } else { a + da };
        let v = f(x, da, db);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let tmax = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut abs_sum = sum.abs();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > tmax {
            break;
        }
        let v = eval(t) + eval(-t);
        sum += v;
        abs_sum += v.abs();
        k += 1;
    }
    let mut prev = sum * h * half;
    for _level in 0..12 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            let v = eval(t) + eval(-t);
            add += v;
            abs_sum += v.abs();
            k += 2;
        }
        sum += add;
        let cur = sum * h * half;
        let err = (cur - prev).abs();
        let scale = (abs_sum * h * half).max(f64::MIN_POSITIVE);
        if err <= rel_tol * scale || err == 0.0 {
            return Quadrature {
                value: cur,
                error_estimate: err,
                converged: true,
            };
        }
        prev = cur;
    }
    Quadrature {
        value: prev,
        error_estimate: f64::INFINITY,
        converged: false,
    }
}
