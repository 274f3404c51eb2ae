//! Shared numerical helpers: quadrature, compensated summation, series tails
//! and float formatting.

/// Default number of panels for composite Simpson quadrature (2^12 + 1 nodes).
pub const DEFAULT_PANELS: usize = 1 << 12;

/// Composite Simpson rule for `f` on `[a, b]` with `panels` subintervals
/// (rounded down to an even count, at least 2).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = (panels.max(2)) & !1usize;
    let h = (b - a) / n as f64;
    let mut acc = KahanSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..n {
        let t = a + i as f64 * h;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(t));
    }
    acc.value() * h / 3.0
}

/// Simpson quadrature with panel doubling until two refinements agree to
/// `rel_tol` (used as an independent oracle for closed-form integrals).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut panels = 64;
    let mut prev = simpson(&f, a, b, panels);
    loop {
        panels *= 2;
        let next = simpson(&f, a, b, panels);
        let scale = next.abs().max(1e-300);
        if (next - prev).abs() <= rel_tol * scale || panels >= (1 << 22) {
            return next;
        }
        prev = next;
    }
}

/// Neumaier-compensated running sum; the result does not depend on the
/// grouping chosen by a parallel scheduler as long as values are fed in a
/// fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Compensated sum of an iterator of values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean and standard error of the mean (unbiased variance, n-1).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = compensated_sum(xs.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Trigamma function psi'(x) = sum_{k>=0} 1/(x+k)^2 for x > 0.
///
/// Upward recurrence into the asymptotic regime, then the standard
/// asymptotic series; relative error is near machine precision for all
/// arguments used here. `trigamma(l+1)` is the exact tail `sum_{j>l} 1/j^2`.
pub fn trigamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = KahanSum::new();
    let mut z = x;
    while z < 30.0 {
        acc.add(1.0 / (z * z));
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // 1/z + 1/(2z^2) + 1/(6z^3) - 1/(30z^5) + 1/(42z^7) - 1/(30z^9) + 5/(66z^11)
    let series = inv
        + 0.5 * inv2
        + inv * inv2
            * (1.0 / 6.0
                - inv2
                    * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0))));
    acc.add(series);
    acc.value()
}

/// Tail sum_{l >= from} l^{-s} for integer s >= 2 and `from >= 1`, via
/// Euler-Maclaurin once the argument is large enough.
pub fn zeta_tail(s: u32, from: usize) -> f64 {
    debug_assert!(s >= 2 && from >= 1);
    let mut acc = KahanSum::new();
    let mut l = from;
    // push the start point far enough that the expansion converges fast
    let safe = (4 * s as usize).max(64);
    while l < safe {
        acc.add((l as f64).powi(-(s as i32)));
        l += 1;
    }
    let lf = l as f64;
    let sf = s as f64;
    let base = lf.powi(-(s as i32));
    // sum_{j>=L} j^-s = L^{1-s}/(s-1) + L^-s/2 + s L^{-s-1}/12
    //                  - s(s+1)(s+2) L^{-s-3}/720 + s..(s+4) L^{-s-5}/30240
    let t0 = base * lf / (sf - 1.0);
    let t1 = base / 2.0;
    let t2 = sf * base / (12.0 * lf);
    let t3 = sf * (sf + 1.0) * (sf + 2.0) * base / (720.0 * lf * lf * lf);
    let t4 = sf * (sf + 1.0) * (sf + 2.0) * (sf + 3.0) * (sf + 4.0) * base
        / (30240.0 * lf.powi(5));
    acc.add(t0 + t1 + t2 - t3 + t4);
    acc.value()
}

/// Format a float with 17 significant digits (exact f64 round-trip).
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}
