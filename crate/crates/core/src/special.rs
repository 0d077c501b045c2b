//! Bessel functions of the first kind and adaptive Gauss–Kronrod quadrature.

use crate::scalar::Real;

/// `J_0(x) … J_{order_max}(x)` by Miller's backward recurrence.
///
/// The recurrence is normalised with `J_0 + 2 Σ J_{2k} = 1`, which holds for
/// every real argument, so a single pass serves all orders.
pub fn bessel_j_orders<T: Real>(order_max: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); order_max + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let ax = x.abs();
    let reach = (order_max as f64).max(ax.as_f64());
    let mut start = (reach + 30.0 + (40.0 * reach).sqrt()).ceil() as usize;
    start += start % 2;

    let big = T::max_value().sqrt();
    let two_over_x = T::lit(2.0) / ax;
    let (mut next, mut cur) = (T::zero(), T::min_positive_value().sqrt());
    let mut norm = T::zero();
    for k in (1..=start).rev() {
        let prev = T::from_usize_lossy(k) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1} up to scale
        let order = k - 1;
        if order <= order_max {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += T::lit(2.0) * cur;
        }
        if cur.abs() > big {
            let s = T::one() / big;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < T::zero() {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n(x)` for any integer order, using `J_{−n} = (−1)^n J_n`.
pub fn bessel_j<T: Real>(n: i64, x: T) -> T {
    let k = n.unsigned_abs() as usize;
    let v = bessel_j_orders(k, x)[k];
    if n < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Table of `J_n(x)` over a symmetric range of orders `−max..=max`.
#[derive(Clone, Debug)]
pub struct BesselTable<T> {
    max: usize,
    positive: Vec<T>,
}

impl<T: Real> BesselTable<T> {
    pub fn new(max: usize, x: T) -> Self {
        Self {
            max,
            positive: bessel_j_orders(max, x),
        }
    }

    /// `J_n(x)`; zero outside the tabulated range.
    pub fn get(&self, n: i64) -> T {
        let k = n.unsigned_abs() as usize;
        if k > self.max {
            return T::zero();
        }
        let v = self.positive[k];
        if n < 0 && k % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// 7-point Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod_15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let radius = (b - a) * half;
    let f_center = f(center);
    let mut kronrod = f_center * T::lit(WGK[7]);
    let mut gauss = f_center * T::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += pair * T::lit(WG[j / 2]);
        }
    }
    (kronrod * radius, ((kronrod - gauss) * radius).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integral of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `abs_tol`. Returns `(value, error_estimate)`; if the
/// subdivision budget is exhausted the best available estimate is returned.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, abs_tol: T) -> (T, T) {
    if a == b {
        return (T::zero(), T::zero());
    }
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gauss_kronrod_15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total_err = e;
    while total_err > abs_tol && parts.len() < MAX_INTERVALS {
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = (lo + hi) * T::lit(0.5);
        if mid == lo || mid == hi {
            parts.push((lo, hi, T::zero(), T::zero()));
            break;
        }
        let (v1, e1) = gauss_kronrod_15(&f, lo, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        total_err = parts.iter().map(|p| p.3).sum();
    }
    let value = parts.iter().map(|p| p.2).sum();
    (value, total_err)
}
