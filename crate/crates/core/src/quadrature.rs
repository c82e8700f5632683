//! Globally adaptive 21-point Gauss–Kronrod integration of vector-valued
//! integrands, with user breakpoints and a mapped semi-infinite tail.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Kronrod abscissae (descending, last = centre), Kronrod weights, Gauss weights
// for the nodes at odd Kronrod indices.
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
    0.123_491_976_262_065_851_077_600_525_040_314,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Absolute and relative error targets, applied per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn bound(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorIntegral {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    /// `x` itself.
    Identity,
    /// `x = origin / t` on `t in (0, 1]`.
    Tail { origin: f64 },
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    map: Map,
    value: Vec<f64>,
    error: Vec<f64>,
}

struct Ranked {
    score: f64,
    index: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.score.total_cmp(&other.score) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.index.cmp(&self.index))
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

struct Rule<'f, F> {
    f: &'f mut F,
    dim: usize,
    evaluations: usize,
    fc: Vec<f64>,
    f1: Vec<Vec<f64>>,
    f2: Vec<Vec<f64>>,
}

impl<'f, F: FnMut(f64, &mut [f64])> Rule<'f, F> {
    fn new(f: &'f mut F, dim: usize) -> Self {
        Self {
            f,
            dim,
            evaluations: 0,
            fc: vec![0.0; dim],
            f1: vec![vec![0.0; dim]; 10],
            f2: vec![vec![0.0; dim]; 10],
        }
    }

    fn eval(&mut self, map: Map, t: f64, out: &mut [f64]) {
        self.evaluations += 1;
        match map {
            Map::Identity => (self.f)(t, out),
            Map::Tail { origin } => {
                let x = origin / t;
                (self.f)(x, out);
                let jac = origin / (t * t);
                out.iter_mut().for_each(|v| *v *= jac);
            }
        }
    }

    fn apply(&mut self, a: f64, b: f64, map: Map) -> (Vec<f64>, Vec<f64>) {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut fc = std::mem::take(&mut self.fc);
        self.eval(map, center, &mut fc);
        let mut f1 = std::mem::take(&mut self.f1);
        let mut f2 = std::mem::take(&mut self.f2);
        for j in 0..10 {
            let dx = half * XGK[j];
            self.eval(map, center - dx, &mut f1[j]);
            self.eval(map, center + dx, &mut f2[j]);
        }
        let mut value = vec![0.0; self.dim];
        let mut error = vec![0.0; self.dim];
        for c in 0..self.dim {
            let mut resk = WGK[10] * fc[c];
            let mut resg = 0.0;
            let mut resabs = (WGK[10] * fc[c]).abs();
            for j in 0..10 {
                let s = f1[j][c] + f2[j][c];
                resk += WGK[j] * s;
                resabs += WGK[j] * (f1[j][c].abs() + f2[j][c].abs());
                if j % 2 == 1 {
                    resg += WG[j / 2] * s;
                }
            }
            let mean = 0.5 * resk;
            let mut resasc = WGK[10] * (fc[c] - mean).abs();
            for j in 0..10 {
                resasc += WGK[j] * ((f1[j][c] - mean).abs() + (f2[j][c] - mean).abs());
            }
            let ah = half.abs();
            value[c] = resk * half;
            error[c] = rescale_error((resk - resg) * half, resabs * ah, resasc * ah);
        }
        self.fc = fc;
        self.f1 = f1;
        self.f2 = f2;
        (value, error)
    }
}

fn adapt<F>(
    f: &mut F,
    dim: usize,
    segments: Vec<(f64, f64, Map)>,
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<VectorIntegral>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut rule = Rule::new(f, dim);
    let mut panels: Vec<Panel> = Vec::with_capacity(segments.len() + 2 * max_subdivisions);
    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    for (a, b, map) in segments {
        let (value, error) = rule.apply(a, b, map);
        for c in 0..dim {
            total[c] += value[c];
            total_err[c] += error[c];
        }
        panels.push(Panel {
            a,
            b,
            map,
            value,
            error,
        });
    }

    let score = |p: &Panel, total: &[f64]| -> f64 {
        p.error
            .iter()
            .zip(total)
            .map(|(e, t)| e / tol.bound(*t).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    };
    let converged = |total: &[f64], err: &[f64]| total.iter().zip(err).all(|(t, e)| *e <= tol.bound(*t));

    let mut heap: BinaryHeap<Ranked> = panels
        .iter()
        .enumerate()
        .map(|(index, p)| Ranked {
            score: score(p, &total),
            index,
        })
        .collect();

    let mut subdivisions = 0;
    while !converged(&total, &total_err) {
        if subdivisions >= max_subdivisions {
            let (worst, limit) = total
                .iter()
                .zip(&total_err)
                .map(|(t, e)| (*e, tol.bound(*t)))
                .max_by(|x, y| (x.0 / x.1).total_cmp(&(y.0 / y.1)))
                .unwrap_or((0.0, 0.0));
            return Err(Error::QuadratureNonConvergence {
                subdivisions,
                error: worst,
                tolerance: limit,
            });
        }
        let Some(top) = heap.pop() else { break };
        let (a, b, map) = {
            let p = &panels[top.index];
            (p.a, p.b, p.map)
        };
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            // cannot split further; leave it out of the queue
            continue;
        }
        let (lv, le) = rule.apply(a, mid, map);
        let (rv, re) = rule.apply(mid, b, map);
        for c in 0..dim {
            total[c] += lv[c] + rv[c] - panels[top.index].value[c];
            total_err[c] += le[c] + re[c] - panels[top.index].error[c];
        }
        panels[top.index] = Panel {
            a,
            b: mid,
            map,
            value: lv,
            error: le,
        };
        panels.push(Panel {
            a: mid,
            b,
            map,
            value: rv,
            error: re,
        });
        let right = panels.len() - 1;
        heap.push(Ranked {
            score: score(&panels[top.index], &total),
            index: top.index,
        });
        heap.push(Ranked {
            score: score(&panels[right], &total),
            index: right,
        });
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // rebuild sums to stop drift from the incremental updates
            total.iter_mut().for_each(|v| *v = 0.0);
            total_err.iter_mut().for_each(|v| *v = 0.0);
            for p in &panels {
                for c in 0..dim {
                    total[c] += p.value[c];
                    total_err[c] += p.error[c];
                }
            }
        }
    }
    if !converged(&total, &total_err) {
        let (worst, limit) = total
            .iter()
            .zip(&total_err)
            .map(|(t, e)| (*e, tol.bound(*t)))
            .max_by(|x, y| (x.0 / x.1).total_cmp(&(y.0 / y.1)))
            .unwrap_or((0.0, 0.0));
        return Err(Error::QuadratureNonConvergence {
            subdivisions,
            error: worst,
            tolerance: limit,
        });
    }
    Ok(VectorIntegral {
        value: total,
        error: total_err,
        subdivisions,
        evaluations: rule.evaluations,
    })
}

fn finite_segments(points: &[f64]) -> Result<Vec<(f64, f64, Map)>> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "integration needs at least two points".into(),
        ));
    }
    let mut segs = Vec::with_capacity(points.len() - 1);
    for w in points.windows(2) {
        if !(w[1] >= w[0]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::InvalidParameter(format!(
                "integration points must be finite and ascending, got {} then {}",
                w[0], w[1]
            )));
        }
        if w[1] > w[0] {
            segs.push((w[0], w[1], Map::Identity));
        }
    }
    Ok(segs)
}

/// Integrates a vector-valued `f` over `[points[0], points[last]]`, with every
/// interior point used as an initial panel boundary.
pub fn integrate_vector<F>(
    mut f: F,
    dim: usize,
    points: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<VectorIntegral>
where
    F: FnMut(f64, &mut [f64]),
{
    let segs = finite_segments(points)?;
    adapt(&mut f, dim, segs, tol, max_subdivisions)
}

/// Integrates over `[points[0], inf)`. The last point must be positive; beyond
/// it the tail is mapped onto `(0, 1]` by `x = points[last] / t`.
pub fn integrate_vector_to_infinity<F>(
    mut f: F,
    dim: usize,
    points: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<VectorIntegral>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut segs = if points.len() >= 2 {
        finite_segments(points)?
    } else {
        Vec::new()
    };
    let origin = *points
        .last()
        .ok_or_else(|| Error::InvalidParameter("no integration points".into()))?;
    if !(origin > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail origin must be positive, got {origin}"
        )));
    }
    segs.push((0.0, 1.0, Map::Tail { origin }));
    adapt(&mut f, dim, segs, tol, max_subdivisions)
}

/// Scalar integral over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<f64> {
    let r = integrate_vector(|x, out: &mut [f64]| out[0] = f(x), 1, &[a, b], tol, max_subdivisions)?;
    Ok(r.value[0])
}

/// Scalar integral over `[a, inf)` with optional interior breakpoints.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<f64> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|b| *b > a));
    if pts.len() == 1 {
        pts.push(a.abs().max(1.0) + a);
    }
    let r = integrate_vector_to_infinity(
        |x, out: &mut [f64]| out[0] = f(x),
        1,
        &pts,
        tol,
        max_subdivisions,
    )?;
    Ok(r.value[0])
}
