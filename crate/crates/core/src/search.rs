//! One-dimensional search primitives shared by the solvers.

/// Result of searching for the largest feasible point of a monotone predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxFeasible {
    /// Not feasible even at the lower probe.
    Infeasible,
    /// Largest feasible value found (within tolerance, always feasible itself).
    Found(f64),
    /// Still feasible at the cap; carries the cap.
    Unbounded(f64),
}

/// Finds the largest `x >= lo` with `feasible(x)`, for a predicate that is
/// feasible on an interval `[lo, x*]`.
///
/// The upper bracket is found by doubling from `lo` until infeasible or
/// past `cap`; the bracket is then bisected until narrower than `tol`.
pub fn max_feasible<F>(lo: f64, cap: f64, tol: f64, mut feasible: F) -> MaxFeasible
where
    F: FnMut(f64) -> bool,
{
    debug_assert!(lo > 0.0 && cap >= lo && tol > 0.0);
    if !feasible(lo) {
        return MaxFeasible::Infeasible;
    }
    let mut good = lo;
    let mut bad = lo;
    loop {
        bad = (bad * 2.0).min(cap);
        if !feasible(bad) {
            break;
        }
        good = bad;
        if bad >= cap {
            return MaxFeasible::Unbounded(cap);
        }
    }
    // 200 halvings exhaust f64 resolution long before the cap is hit.
    for _ in 0..200 {
        if bad - good <= tol {
            break;
        }
        let mid = 0.5 * (good + bad);
        if mid <= good || mid >= bad {
            break;
        }
        if feasible(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    MaxFeasible::Found(good)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Returns `(x, f(x))` for the best point evaluated. Non-finite values are
/// treated as `-inf`.
pub fn golden_section_max<F>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
