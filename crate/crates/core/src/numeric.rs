//! Small numeric kernels shared by the fading and solver modules:
//! adaptive Gauss-Kronrod quadrature, bisection root finding, and a
//! quantile-by-bisection helper for distributions without a closed-form
//! inverse CDF.

/// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
/// Nodes are symmetric; only the non-negative half is tabulated.
const KRONROD_NODES: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_48,
    0.405_845_151_377_397_2,
    0.586_087_235_467_691_1,
    0.741_531_185_599_394_5,
    0.864_864_423_359_769_1,
    0.949_107_912_342_758_5,
    0.991_455_371_120_812_6,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.209_482_141_084_727_82,
    0.204_432_940_075_298_89,
    0.190_350_578_064_785_42,
    0.169_004_726_639_267_9,
    0.140_653_259_715_525_92,
    0.104_790_010_322_250_19,
    0.063_092_092_629_978_56,
    0.022_935_322_010_529_224,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_64,
    0.129_484_966_168_869_7,
];

/// One Gauss-Kronrod panel; returns (kronrod estimate, error estimate).
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let f0 = f(c);
    let mut kronrod = KRONROD_WEIGHTS[0] * f0;
    let mut gauss = GAUSS_WEIGHTS[0] * f0;
    for i in 1..8 {
        let x = h * KRONROD_NODES[i];
        let flo = f(c - x);
        let fhi = f(c + x);
        kronrod += KRONROD_WEIGHTS[i] * (flo + fhi);
        if i % 2 == 0 {
            gauss += GAUSS_WEIGHTS[i / 2] * (flo + fhi);
        }
    }
    kronrod *= h;
    gauss *= h;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive quadrature of `f` over the finite interval `[a, b]` to absolute
/// tolerance `tol`. Interval-splitting recursion with a depth cap; the cap is
/// generous enough that smooth integrands converge long before hitting it.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (est, err) = gk15(f, a, b);
        if err <= tol || depth >= 48 {
            return est;
        }
        let c = 0.5 * (a + b);
        rec(f, a, c, 0.5 * tol, depth + 1) + rec(f, c, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    rec(&mut f, a, b, tol, 0)
}

/// Adaptive quadrature of `f` over `[0, inf)` via the substitution
/// `x = t / (1 - t)`, `dx = dt / (1 - t)^2`.
pub fn integrate_to_inf(mut f: impl FnMut(f64) -> f64, tol: f64) -> f64 {
    integrate(
        |t| {
            let om = 1.0 - t;
            if om <= 0.0 {
                return 0.0;
            }
            let x = t / om;
            f(x) / (om * om)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Bisection root of a monotone (or at least sign-changing) function on
/// `[lo, hi]`. `f(lo)` and `f(hi)` must bracket a sign change; returns the
/// midpoint once the interval shrinks below `tol`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0, "bisect: endpoints do not bracket");
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inverts a non-decreasing CDF at probability `u` by expanding an upper
/// bracket and bisecting. Deterministic; used for inverse-CDF sampling of
/// families without a closed-form quantile.
pub fn quantile_by_bisection(cdf: impl Fn(f64) -> f64, u: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    if u <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    let mut guard = 0;
    while cdf(hi) < u && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    bisect(|x| cdf(x) - u, 0.0, hi, 1e-13 * hi.max(1.0))
}
