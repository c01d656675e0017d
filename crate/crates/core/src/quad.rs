//! Globally adaptive Gauss-Kronrod (7/15) quadrature for scalar and
//! vector-valued integrands on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Tables are copied at their published precision.

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
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

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`] and [`integrate_vec`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    norm: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.norm == other.norm
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm.total_cmp(&other.norm)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn gk15<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];

    f(center, buf);
    for d in 0..dim {
        kron[d] = WGK[7] * buf[d];
        gauss[d] = WG[3] * buf[d];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        for x in [center - dx, center + dx] {
            f(x, buf);
            for d in 0..dim {
                kron[d] += WGK[j] * buf[d];
                if j % 2 == 1 {
                    gauss[d] += WG[j / 2] * buf[d];
                }
            }
        }
    }
    let mut error = vec![0.0; dim];
    for d in 0..dim {
        kron[d] *= half;
        gauss[d] *= half;
        error[d] = (kron[d] - gauss[d]).abs();
    }
    let norm = max_abs(&error);
    Panel {
        a,
        b,
        value: kron,
        error,
        norm,
    }
}

/// Integrates a vector-valued function over `[a, b]`. The integrand writes
/// its `dim` components into the supplied buffer.
///
/// Convergence is declared when the max-norm of the summed error estimates
/// falls below `max(abs_tol, rel_tol * |I|_max)`.
pub fn integrate_vec<F>(mut f: F, a: f64, b: f64, dim: usize, cfg: &QuadConfig) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    if dim == 0 {
        return Ok(Vec::new());
    }
    if a == b {
        return Ok(vec![0.0; dim]);
    }
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("bad integration interval [{a}, {b}]")));
    }
    let mut buf = vec![0.0; dim];
    let first = gk15(&mut f, a, b, dim, &mut buf);
    let mut total = first.value.clone();
    let mut total_err = first.error.clone();
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        let err = max_abs(&total_err);
        let scale = max_abs(&total);
        if !err.is_finite() || !scale.is_finite() {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: scale,
                error: err,
                intervals: heap.len(),
            });
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * scale) {
            break;
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: scale,
                error: err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature {
                a,
                b,
                estimate: scale,
                error: err,
                intervals: heap.len() + 1,
            });
        }
        let left = gk15(&mut f, worst.a, mid, dim, &mut buf);
        let right = gk15(&mut f, mid, worst.b, dim, &mut buf);
        for d in 0..dim {
            total[d] += left.value[d] + right.value[d] - worst.value[d];
            total_err[d] += left.error[d] + right.error[d] - worst.error[d];
        }
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift accumulated by the running updates.
    let mut out = vec![0.0; dim];
    for p in heap.iter() {
        for d in 0..dim {
            out[d] += p.value[d];
        }
    }
    Ok(out)
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let v = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), a, b, 1, cfg)?;
    Ok(v[0])
}

/// Integrates over `[a, b]` after splitting at the given interior points.
pub fn integrate_vec_split<F>(mut f: F, breaks: &[f64], dim: usize, cfg: &QuadConfig) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut out = vec![0.0; dim];
    for w in breaks.windows(2) {
        let part = integrate_vec(&mut f, w[0], w[1], dim, cfg)?;
        for d in 0..dim {
            out[d] += part[d];
        }
    }
    Ok(out)
}
