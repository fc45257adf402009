//! One-dimensional golden-section search.

/// Inverse golden ratio, (sqrt(5) - 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes a unimodal function on `[a, b]` to absolute tolerance `tol`
/// in the argument. Returns the best `(x, f(x))` pair seen.
///
/// The function is assumed finite on the bracket; the caller is responsible
/// for supplying a bracket that contains the minimum.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    debug_assert!(a <= b && tol > 0.0);
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        let cand = if fc <= fd { (c, fc) } else { (d, fd) };
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

/// Maximizes a unimodal function on `[a, b]`; see [`golden_min`].
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_min(|x| -f(x), a, b, tol);
    (x, -neg)
}
