//! Globally adaptive Gauss–Kronrod (10/21) quadrature for complex-valued
//! integrands on a finite real interval.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_608_812_598,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 21];
    fv[20] = f(c);
    for j in 0..10 {
        let dx = h * XGK[j];
        fv[2 * j] = f(c - dx);
        fv[2 * j + 1] = f(c + dx);
    }
    let mut k = fv[20] * WGK[10];
    let mut g = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let s = fv[2 * j] + fv[2 * j + 1];
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    // QUADPACK-style error scaling: |K − G| overestimates the error of K.
    let mean = k * 0.5;
    let mut asc = (fv[20] - mean).norm() * WGK[10];
    for j in 0..10 {
        asc += ((fv[2 * j] - mean).norm() + (fv[2 * j + 1] - mean).norm()) * WGK[j];
    }
    let asc = asc * h.abs();
    let raw = ((k - g) * h).norm();
    let err = if asc > 0.0 && raw > 0.0 { asc * (200.0 * raw / asc).powf(1.5).min(1.0) } else { raw };
    (k * h, err)
}

/// Integrates `f` over `[a, b]` until the summed panel error drops below
/// `max(epsabs, epsrel·|I|)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, epsabs: f64, epsrel: f64, max_panels: usize) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Contour("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, evals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = gk21(&mut f, a, b);
    let mut total = v;
    let mut err = e;
    let mut evals = 21;
    heap.push(Panel { a, b, value: v, error: e });
    loop {
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::Contour("integrand produced a non-finite value".into()));
        }
        if err <= epsabs.max(epsrel * total.norm()) {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::Contour(format!(
                "no convergence after {} panels (error estimate {:.3e}, value {:.3e})",
                heap.len(),
                err,
                total.norm()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::Contour("panel width reached machine resolution".into()));
        }
        let (v1, e1) = gk21(&mut f, worst.a, m);
        let (v2, e2) = gk21(&mut f, m, worst.b);
        evals += 42;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated update round-off.
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
    }
    Ok(QuadResult { value, error, evals })
}

/// Integrates over consecutive sub-intervals given by `breaks` (sorted).
pub fn integrate_pieces<F>(mut f: F, breaks: &[f64], epsabs: f64, epsrel: f64, max_panels: usize) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    let mut out = QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, evals: 0 };
    for w in breaks.windows(2) {
        let r = integrate(&mut f, w[0], w[1], epsabs / (breaks.len() as f64), epsrel, max_panels)?;
        out.value += r.value;
        out.error += r.error;
        out.evals += r.evals;
    }
    Ok(out)
}
