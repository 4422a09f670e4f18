//! Bessel functions of the first kind `J_n` of integer order and their
//! positive zeros.
//!
//! Evaluation picks one of three regimes: the ascending power series for
//! small arguments, Hankel's asymptotic expansion when `x` is large compared
//! with `n^2`, and Miller's backward recurrence (normalized by
//! `J_0 + 2 sum J_2k = 1`) everywhere in between.
//!
//! Zeros are located inside certified sign-change brackets. For `J_0` the
//! brackets come from a fixed-step scan; for `J_n`, `n >= 1`, the interlacing
//! `j_{n-1,s} < j_{n,s} < j_{n-1,s+1}` turns the zeros of the previous order
//! into brackets. Each bracket is then refined by Newton's method from a
//! McMahon initial guess, safeguarded by bisection.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_MAX_X: f64 = 3.0;
const HANKEL_MIN_X: f64 = 40.0;
const NEWTON_MAX_ITER: usize = 50;
/// Scan step for sign changes. Consecutive zeros of any `J_n` are more than
/// 2.9 apart, so a step of 0.5 cannot jump over a pair.
const SCAN_STEP: f64 = 0.5;

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // leading term (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn use_hankel(n: u32, x: f64) -> bool {
    let nf = n as f64;
    x >= HANKEL_MIN_X && nf * nf <= 0.5 * x
}

fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 0..60 {
        // a_k(n) / x^k, with a_0 = 1
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if term.abs() > prev_abs {
            break; // asymptotic series started to diverge
        }
        prev_abs = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `J_{n-1}, J_n, J_{n+1}` at `x > 0` by Miller's algorithm.
fn miller(n: u32, x: f64) -> [f64; 3] {
    let big = (n as f64).max(x);
    let mut start = (big + 20.0 + (60.0 * big).sqrt()) as u32 + 2;
    start += start % 2;
    let two_over_x = 2.0 / x;
    let (mut above, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut out = [0.0; 3];
    // after each step `cur` holds the unnormalized J_k
    let mut k = start;
    loop {
        if k == n + 1 {
            out[2] = cur;
        } else if k == n {
            out[1] = cur;
        } else if n > 0 && k == n - 1 {
            out[0] = cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let below = k as f64 * two_over_x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    if n == 0 {
        // J_{-1} = -J_1
        out[0] = -out[2];
    }
    [out[0] / norm, out[1] / norm, out[2] / norm]
}

/// `J_n(x)` for integer `n >= 0`, real `x`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n.is_multiple_of(2) { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_MAX_X {
        series(n, x)
    } else if use_hankel(n, x) {
        hankel(n, x)
    } else {
        miller(n, x)[1]
    }
}

/// `(J_n(x), J_n'(x))` for `x > 0`, using `J_n' = (J_{n-1} - J_{n+1})/2`.
pub fn bessel_j_and_derivative(n: u32, x: f64) -> (f64, f64) {
    if x <= SERIES_MAX_X || use_hankel(n + 1, x) {
        let below = if n == 0 { -bessel_j(1, x) } else { bessel_j(n - 1, x) };
        let above = bessel_j(n + 1, x);
        return (bessel_j(n, x), 0.5 * (below - above));
    }
    let [below, at, above] = miller(n, x);
    (at, 0.5 * (below - above))
}

/// McMahon's large-zero expansion for `j_{n,s}`.
pub fn mcmahon_guess(n: u32, s: usize) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let beta = (s as f64 + 0.5 * n as f64 - 0.25) * PI;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
}

/// Refines the unique zero of `J_n` in `(lo, hi)`; the endpoint values must
/// differ in sign. Newton steps that leave the bracket are replaced by
/// bisection, and bisection alone finishes if Newton has not converged
/// after 50 iterations.
pub fn refine_zero(n: u32, mut lo: f64, mut hi: f64, guess: f64) -> Result<f64> {
    let flo = bessel_j(n, lo);
    let fhi = bessel_j(n, hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numeric(format!("no sign change of J_{n} on [{lo}, {hi}]")));
    }
    let lo_sign = flo.signum();
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..NEWTON_MAX_ITER {
        let (f, df) = bessel_j_and_derivative(n, x);
        if f == 0.0 {
            return Ok(x);
        }
        if f.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 2.0 * f64::EPSILON * x || hi - lo <= 2.0 * f64::EPSILON * x {
            return Ok(x);
        }
    }
    // Bisection fallback on the certified bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_j(n, mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Steps right from `from` (where `J_n` must not vanish) until the sign
/// changes, returning the first zero beyond `from`.
fn next_zero_after(n: u32, from: f64, s: usize) -> Result<f64> {
    let mut a = from;
    let mut fa = bessel_j(n, a);
    for _ in 0..10_000 {
        let b = a + SCAN_STEP;
        let fb = bessel_j(n, b);
        if fb == 0.0 {
            return Ok(b);
        }
        if fa.signum() != fb.signum() && fa != 0.0 {
            return refine_zero(n, a, b, mcmahon_guess(n, s));
        }
        a = b;
        fa = fb;
    }
    Err(Error::Numeric(format!(
        "scan for zero of J_{n} beyond {from} did not terminate"
    )))
}

/// Zeros of `J_n`, order by order, up to a limit.
///
/// For every order `n` with `j_{n,1} < limit`, the returned entry holds all
/// zeros `j_{n,s} < limit` in increasing order. Orders stop at the first
/// `n` whose first zero reaches the limit, which also bounds the sweep by
/// `j_{n,1} > n`.
pub fn zeros_below(limit: f64) -> Result<Vec<Vec<f64>>> {
    zeros_below_by(limit, |z| z < limit)
}

/// Same as [`zeros_below`] with a caller-supplied inclusion test, so that
/// callers can apply the strict threshold in their own units.
pub fn zeros_below_by(limit: f64, below: impl Fn(f64) -> bool) -> Result<Vec<Vec<f64>>> {
    if !(limit > 0.0 && limit.is_finite()) {
        return Err(Error::invalid("zero limit must be positive"));
    }
    // J_0 by scanning; keep the first zero at or beyond the limit as the
    // closing bracket for the next order.
    let mut prev: Vec<f64> = Vec::new();
    let mut a = 0.0;
    let mut fa: f64 = 1.0;
    while prev.last().is_none_or(|&z| below(z)) {
        let b = a + SCAN_STEP;
        let fb = bessel_j(0, b);
        if fa.signum() != fb.signum() {
            let s = prev.len() + 1;
            prev.push(refine_zero(0, a, b, mcmahon_guess(0, s))?);
        }
        a = b;
        fa = fb;
    }
    let mut all = Vec::new();
    let mut order = 0u32;
    loop {
        let inside: Vec<f64> = prev.iter().copied().filter(|&z| below(z)).collect();
        if inside.is_empty() {
            break;
        }
        all.push(inside);
        order += 1;
        if !below(order as f64) {
            break;
        }
        // Interlacing: j_{n,s} in (j_{n-1,s}, j_{n-1,s+1}).
        let mut next = Vec::with_capacity(prev.len());
        for s in 0..prev.len() {
            let z = if s + 1 < prev.len() {
                refine_zero(order, prev[s], prev[s + 1], mcmahon_guess(order, s + 1))?
            } else {
                next_zero_after(order, prev[s], s + 1)?
            };
            next.push(z);
            if !below(z) {
                break;
            }
        }
        prev = next;
    }
    Ok(all)
}

/// Reference value of `J_n(x)` from Bessel's integral
/// `(1/pi) int_0^pi cos(n t - x sin t) dt`, evaluated by the trapezoidal
/// rule, which converges geometrically for this periodic integrand.
pub fn bessel_j_integral(n: u32, x: f64) -> f64 {
    let m = (x.abs() + n as f64) as usize + 64;
    let h = PI / m as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    let mut s = 0.5 * (f(0.0) + f(PI));
    for k in 1..m {
        s += f(k as f64 * h);
    }
    s * h / PI
}
