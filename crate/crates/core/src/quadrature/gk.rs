//! Globally adaptive 7/15-point Gauss–Kronrod integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
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

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 Kronrod nodes on [-1, 1] with their Kronrod and Gauss weights
/// (Gauss weight 0 where the node is Kronrod-only).
pub fn kronrod_rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[j] = (-XGK[j], WGK[j], wg);
        out[14 - j] = (XGK[j], WGK[j], wg);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
    pub abs_value: f64,
}

/// Apply the 15-point rule on [a, b].
pub(crate) fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    // round-off floor
    error = error.max(2.0 * f64::EPSILON * resabs);
    Segment {
        a,
        b,
        value,
        error,
        abs_value: resabs,
    }
}

struct ByError(Segment);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// Compensated (Neumaier) sum in the iteration order given.
pub(crate) fn neumaier<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Outcome of a global adaptive run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AdaptiveOutcome {
    pub value: f64,
    pub error: f64,
    pub abs_value: f64,
    pub segments: usize,
}

/// Stopping rule: either a fixed tolerance from (rel, abs) or, for
/// oscillatory integrands, an absolute tolerance tied to ∫|f|.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stop {
    pub rel: f64,
    pub abs: f64,
    /// multiplier on the running ∫|f| estimate, 0 to disable
    pub abs_of_modulus: f64,
}

impl Stop {
    fn target(&self, value: f64, modulus: f64) -> f64 {
        (self.rel * value.abs())
            .max(self.abs)
            .max(self.abs_of_modulus * modulus)
    }
}

/// Global adaptive bisection over an initial partition given by `cuts`
/// (sorted, at least two points).
pub(crate) fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    cuts: &[f64],
    stop: Stop,
    max_segments: usize,
) -> Result<AdaptiveOutcome> {
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut modulus = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let s = qk15(f, w[0], w[1]);
            value += s.value;
            error += s.error;
            modulus += s.abs_value;
            heap.push(ByError(s));
        }
    }
    if heap.is_empty() {
        return Ok(AdaptiveOutcome {
            value: 0.0,
            error: 0.0,
            abs_value: 0.0,
            segments: 0,
        });
    }
    let mut recompute = 0usize;
    loop {
        if error <= stop.target(value, modulus) {
            break;
        }
        if heap.len() >= max_segments {
            return Err(Error::accuracy(
                "adaptive quadrature subdivision limit",
                error,
                stop.target(value, modulus),
            ));
        }
        let ByError(worst) = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::accuracy(
                "adaptive quadrature interval below resolution",
                error,
                stop.target(value, modulus),
            ));
        }
        let left = qk15(f, worst.a, mid);
        let right = qk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        modulus += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(ByError(left));
        heap.push(ByError(right));
        recompute += 1;
        if recompute.is_multiple_of(256) {
            // refresh the running sums to stop drift
            let segs: Vec<&Segment> = heap.iter().map(|s| &s.0).collect();
            error = segs.iter().map(|s| s.error).sum();
            modulus = segs.iter().map(|s| s.abs_value).sum();
            value = neumaier(segs.iter().map(|s| s.value));
        }
    }
    let mut segs: Vec<Segment> = heap.into_iter().map(|s| s.0).collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(AdaptiveOutcome {
        value: neumaier(segs.iter().map(|s| s.value)),
        error: segs.iter().map(|s| s.error).sum(),
        abs_value: segs.iter().map(|s| s.abs_value).sum(),
        segments: segs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_weights_sum_to_two() {
        let rule = kronrod_rule();
        let wk: f64 = rule.iter().map(|r| r.1).sum();
        let wg: f64 = rule.iter().map(|r| r.2).sum();
        assert!((wk - 2.0).abs() < 1e-15);
        assert!((wg - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_exact_through_degree_22() {
        let rule = kronrod_rule();
        for deg in 0..=22 {
            let got: f64 = rule.iter().map(|r| r.1 * r.0.powi(deg)).sum();
            let want = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            assert!((got - want).abs() < 1e-15, "degree {deg}: {got} vs {want}");
        }
        // and not beyond: degree 24 is the first even power it misses
        let got: f64 = rule.iter().map(|r| r.1 * r.0.powi(24)).sum();
        assert!((got - 2.0 / 25.0).abs() > 1e-12);
    }

    #[test]
    fn gauss_exact_through_degree_13() {
        let rule = kronrod_rule();
        for deg in 0..=13 {
            let got: f64 = rule.iter().map(|r| r.2 * r.0.powi(deg)).sum();
            let want = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            assert!((got - want).abs() < 1e-15, "degree {deg}");
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier(v), 2.0);
    }
}
