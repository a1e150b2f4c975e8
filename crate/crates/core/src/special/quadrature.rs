//! Adaptive Gauss–Kronrod (10/21-point) quadrature on bounded and
//! semi-infinite intervals.
//!
//! Ranges are split at 1 and everything above 1 is integrated in `u = 1/t`
//! (Jacobian `1/u²`), which maps `[1, ∞)` onto `(0, 1]` and keeps long finite
//! panels such as `[1, 10⁹]` resolvable.
//! Intervals starting at 0 receive an extra break at [`SINGULAR_SPLIT`] so that
//! integrable logarithmic singularities at the origin are isolated and refined
//! by bisection without polluting the rest of the range.

use crate::error::{Error, Result};

/// Break inserted next to the origin when an interval starts at 0.
pub const SINGULAR_SPLIT: f64 = 1e-4;

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_880_528_816_664,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(relative_tolerance: f64, absolute_tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.absolute_tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive (rel {}, abs {})",
                self.relative_tolerance, self.absolute_tolerance
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.absolute_tolerance.max(self.relative_tolerance * value.abs())
    }
}

/// Value of an integral together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

/// Integrates `f` over `[a, b]`; `b` may be `f64::INFINITY`.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_with_breaks(f, &[a, b], spec)
}

/// Integrates `f` over `[points[0], points[last]]`, starting the adaptive
/// refinement from the panels delimited by `points` (kinks, branch points).
/// Only the last point may be infinite.
pub fn integrate_with_breaks<F>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let [r] = integrate_vec_with_breaks(|t| [f(t)], points, spec)?;
    Ok(r)
}

/// Vector-valued variant of [`integrate`]: all components share the
/// integrand evaluations and the subdivision, and each component must meet
/// the tolerance.
pub fn integrate_vec<const N: usize, F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<[Integral; N]>
where
    F: Fn(f64) -> [f64; N],
{
    integrate_vec_with_breaks(f, &[a, b], spec)
}

pub fn integrate_vec_with_breaks<const N: usize, F>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<[Integral; N]>
where
    F: Fn(f64) -> [f64; N],
{
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::Domain("at least two integration limits are required".into()));
    }
    for w in points.windows(2) {
        if !(w[0] <= w[1]) || w[0].is_infinite() {
            return Err(Error::Domain(format!(
                "integration points must be finite (except the last) and nondecreasing: {:?}",
                points
            )));
        }
    }
    let a = points[0];

    // Integration variable: x = t on [0, 1] and x = 2 − 1/t above 1, so that
    // every panel beyond 1 is integrated in u = 1/t (Jacobian 1/u²).
    let to_x = |t: f64| if t <= 1.0 { t } else { 2.0 - 1.0 / t };
    let mut breaks: Vec<f64> = points.iter().map(|&t| to_x(t)).collect();
    let last = *points.last().unwrap();
    if a < 1.0 && last > 1.0 {
        breaks.push(1.0);
    }
    if a == 0.0 && points[1] > SINGULAR_SPLIT {
        breaks.push(SINGULAR_SPLIT);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let g = |x: f64| -> [f64; N] {
        if x <= 1.0 {
            return f(x);
        }
        let u = 2.0 - x;
        if !(u > 0.0) {
            return [0.0; N];
        }
        let jac = 1.0 / (u * u);
        let mut v = f(1.0 / u);
        for c in v.iter_mut() {
            *c = if *c == 0.0 { 0.0 } else { *c * jac };
        }
        v
    };
    let panels: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).filter(|p| p.1 > p.0).collect();
    if panels.is_empty() {
        return Ok([Integral {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        }; N]);
    }
    adapt(&g, panels, spec)
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn adapt<const N: usize, G>(g: &G, initial: Vec<(f64, f64)>, spec: &QuadratureSpec) -> Result<[Integral; N]>
where
    G: Fn(f64) -> [f64; N],
{
    let mut panels: Vec<Panel<N>> = Vec::with_capacity(initial.len() + 16);
    for (a, b) in initial {
        panels.push(kronrod21(g, a, b)?);
    }
    let mut subdivisions = panels.len();
    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        for p in &panels {
            for k in 0..N {
                total[k] += p.value[k];
                err[k] += p.error[k];
            }
        }
        let targets: [f64; N] = std::array::from_fn(|k| spec.target(total[k]));
        if (0..N).all(|k| err[k] <= targets[k]) {
            return Ok(std::array::from_fn(|k| Integral {
                value: total[k],
                error: err[k],
                subdivisions,
            }));
        }
        // Bisect the panel with the largest tolerance-normalised error.
        let worst = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let score = (0..N).map(|k| p.error[k] / targets[k]).fold(0.0, f64::max);
                (i, score)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if subdivisions >= spec.max_subdivisions || !(mid > p.a && mid < p.b) {
            let k = (0..N).find(|&k| err[k] > targets[k]).unwrap_or(0);
            return Err(Error::Quadrature {
                estimate: total[k],
                error: err[k],
                subdivisions,
            });
        }
        panels.push(kronrod21(g, p.a, mid)?);
        panels.push(kronrod21(g, mid, p.b)?);
        subdivisions += 1;
    }
}

fn kronrod21<const N: usize, G>(g: &G, a: f64, b: f64) -> Result<Panel<N>>
where
    G: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let checked = |t: f64| -> Result<[f64; N]> {
        let v = g(t);
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(Error::Range(format!("integrand is not finite at {t:e}")))
        }
    };

    let fc = checked(center)?;
    let mut kronrod: [f64; N] = std::array::from_fn(|k| fc[k] * WGK[10]);
    let mut gauss = [0.0; N];
    let mut abs_sum: [f64; N] = std::array::from_fn(|k| (fc[k] * WGK[10]).abs());
    let mut fvals: [([f64; N], [f64; N]); 10] = [([0.0; N], [0.0; N]); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = checked(center - dx)?;
        let f2 = checked(center + dx)?;
        for k in 0..N {
            kronrod[k] += WGK[j] * (f1[k] + f2[k]);
            abs_sum[k] += WGK[j] * (f1[k].abs() + f2[k].abs());
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * (f1[k] + f2[k]);
            }
        }
        fvals[j] = (f1, f2);
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for k in 0..N {
        let mean = 0.5 * kronrod[k];
        let mut asc = WGK[10] * (fc[k] - mean).abs();
        for (j, (f1, f2)) in fvals.iter().enumerate() {
            asc += WGK[j] * ((f1[k] - mean).abs() + (f2[k] - mean).abs());
        }
        let resasc = asc * half.abs();
        let resabs = abs_sum[k] * half.abs();
        value[k] = kronrod[k] * half;
        let mut e = ((kronrod[k] - gauss[k]) * half).abs();
        if resasc != 0.0 && e != 0.0 {
            e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * resabs);
        }
        error[k] = e;
    }
    Ok(Panel { a, b, value, error })
}
