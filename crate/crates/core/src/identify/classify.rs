use std::fmt;
use std::str::FromStr;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::transform::{Descriptor, PgfFamily};

/// Sup-distance below which a fitted family counts as a match.
pub const MATCH_THRESHOLD: f64 = 1e-8;
pub const FIT_POINTS: usize = 50;
const FIT_RANGE: (f64, f64) = (0.02, 0.98);
const CHECK_POINTS: usize = 199;
const CHECK_RANGE: (f64, f64) = (0.005, 0.995);
const HARRIS_MAX_K: u32 = 8;
const GAUSS_NEWTON_STEPS: usize = 40;

/// A family shape to fit against an identification curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidatePattern {
    Degenerate,
    Geometric1,
    /// Fixed `k`, or every `k ≤ 8` when absent.
    Harris { k: Option<u32> },
    Sibuya,
}

impl CandidatePattern {
    pub fn defaults() -> Vec<CandidatePattern> {
        vec![
            CandidatePattern::Degenerate,
            CandidatePattern::Geometric1,
            CandidatePattern::Harris { k: None },
            CandidatePattern::Sibuya,
        ]
    }

    fn parameter_count(&self) -> usize {
        match self {
            CandidatePattern::Harris { .. } => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CandidatePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidatePattern::Degenerate => f.write_str("degenerate"),
            CandidatePattern::Geometric1 => f.write_str("geometric1"),
            CandidatePattern::Harris { k: None } => f.write_str("harris"),
            CandidatePattern::Harris { k: Some(k) } => write!(f, "harris:k={k}"),
            CandidatePattern::Sibuya => f.write_str("sibuya"),
        }
    }
}

impl FromStr for CandidatePattern {
    type Err = Error;

    /// A family tag, optionally `harris:k=<k>` to pin the Harris index.
    fn from_str(text: &str) -> Result<Self> {
        let d = Descriptor::parse(text)?;
        let pattern = match d.tag.as_str() {
            "degenerate" => CandidatePattern::Degenerate,
            "geometric1" | "geometric" => CandidatePattern::Geometric1,
            "harris" => {
                d.expect_only(&["k"])?;
                let k = if d.has("k") { Some(d.u32("k")?) } else { None };
                if k == Some(0) {
                    return Err(Error::param("k", 0.0, "must be a positive integer"));
                }
                return Ok(CandidatePattern::Harris { k });
            }
            "sibuya" => CandidatePattern::Sibuya,
            other => return Err(Error::descriptor(other, "unknown candidate family")),
        };
        d.expect_only(&[])?;
        Ok(pattern)
    }
}

/// Parses a whitespace-separated candidate list such as
/// `geometric1 harris:k=2`.
pub fn parse_candidates(text: &str) -> Result<Vec<CandidatePattern>> {
    text.split_whitespace().map(str::parse).collect()
}

/// A fitted family and its sup-distance to the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompounderMatch {
    pub family: PgfFamily,
    pub sup_distance: f64,
}

impl Serialize for CompounderMatch {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut params = serde_json::Map::new();
        match self.family {
            PgfFamily::Harris { a, k } => {
                params.insert("a".into(), a.into());
                params.insert("k".into(), k.into());
            }
            PgfFamily::Geometric1 { p } => {
                params.insert("p".into(), p.into());
            }
            PgfFamily::Sibuya { nu } => {
                params.insert("nu".into(), nu.into());
            }
            PgfFamily::Degenerate { k } => {
                params.insert("k".into(), k.into());
            }
            PgfFamily::BernoulliShift { lambda } => {
                params.insert("lambda".into(), lambda.into());
            }
        }
        let mut s = serializer.serialize_struct("CompounderMatch", 3)?;
        s.serialize_field("family", &self.family.descriptor().tag)?;
        s.serialize_field("params", &params)?;
        s.serialize_field("sup_distance", &self.sup_distance)?;
        s.end()
    }
}

fn spaced(range: (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64)
        .collect()
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    v.retain(|x| x.is_finite());
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

/// Least-squares refinement of a one-parameter family from `theta0`.
fn gauss_newton<B>(build: B, theta0: f64, ts: &[f64], ys: &[f64]) -> Option<f64>
where
    B: Fn(f64) -> Option<PgfFamily>,
{
    let sse = |theta: f64| -> Option<f64> {
        let p = build(theta)?;
        ts.iter()
            .zip(ys)
            .map(|(&t, &y)| p.eval_real(t).ok().map(|v| (v - y).powi(2)))
            .sum()
    };
    let mut theta = theta0;
    let mut current = sse(theta)?;
    for _ in 0..GAUSS_NEWTON_STEPS {
        let h = 1e-7 * theta.abs().max(1e-3);
        let (lo, hi) = (build(theta - h)?, build(theta + h)?);
        let p = build(theta)?;
        let (mut jr, mut jj) = (0.0, 0.0);
        for (&t, &y) in ts.iter().zip(ys) {
            let j = (hi.eval_real(t).ok()? - lo.eval_real(t).ok()?) / (2.0 * h);
            jr += j * (p.eval_real(t).ok()? - y);
            jj += j * j;
        }
        if !(jj > 0.0) {
            break;
        }
        let mut step = -jr / jj;
        let mut improved = false;
        for _ in 0..30 {
            if let Some(next) = sse(theta + step) {
                if next <= current {
                    theta += step;
                    current = next;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved || step.abs() <= 1e-15 * theta.abs().max(1.0) {
            break;
        }
    }
    Some(theta)
}

fn fit(pattern: CandidatePattern, ts: &[f64], ys: &[f64]) -> Vec<PgfFamily> {
    let pairs = || ts.iter().zip(ys).map(|(&t, &y)| (t, y));
    match pattern {
        CandidatePattern::Degenerate => median(pairs().map(|(t, y)| y.ln() / t.ln()).collect())
            .map(|k| k.round())
            .filter(|k| *k >= 1.0 && *k <= u32::MAX as f64)
            .and_then(|k| PgfFamily::degenerate(k as u32).ok())
            .into_iter()
            .collect(),
        CandidatePattern::Geometric1 => {
            let p0 = median(pairs().map(|(t, y)| y * (1.0 - t) / (t * (1.0 - y))).collect());
            p0.and_then(|p0| {
                gauss_newton(|p| PgfFamily::geometric1(p).ok(), p0.clamp(1e-9, 1.0 - 1e-9), ts, ys)
            })
            .and_then(|p| PgfFamily::geometric1(p).ok())
            .into_iter()
            .collect()
        }
        CandidatePattern::Sibuya => {
            let nu0 = median(pairs().map(|(t, y)| (1.0 - y).ln() / (1.0 - t).ln()).collect());
            nu0.and_then(|nu0| gauss_newton(|nu| PgfFamily::sibuya(nu).ok(), nu0.clamp(1e-9, 1.0 - 1e-9), ts, ys))
                .and_then(|nu| PgfFamily::sibuya(nu).ok())
                .into_iter()
                .collect()
        }
        CandidatePattern::Harris { k } => {
            let ks: Vec<u32> = match k {
                Some(k) => vec![k],
                None => (1..=HARRIS_MAX_K).collect(),
            };
            ks.into_iter()
                .filter_map(|k| {
                    let kf = k as i32;
                    let a0 = median(
                        pairs()
                            .map(|(t, y)| ((t / y).powi(kf) - t.powi(kf)) / (1.0 - t.powi(kf)))
                            .collect(),
                    )?;
                    let a = gauss_newton(|a| PgfFamily::harris(a, k).ok(), a0.max(1.0 + 1e-9), ts, ys)?;
                    PgfFamily::harris(a, k).ok()
                })
                .collect()
        }
    }
}

fn sup_distance(family: &PgfFamily, check: &[(f64, f64)]) -> f64 {
    check
        .iter()
        .map(|&(t, y)| family.eval_real(t).map(|v| (v - y).abs()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

/// Fits each candidate to `curve` on 50 points of `[0.02, 0.98]` and
/// measures the sup-distance on a denser grid.
///
/// Among fits under [`MATCH_THRESHOLD`] the one with fewest parameters
/// wins, then the earliest candidate. Returns `None` when nothing fits.
pub fn classify_compounder<C>(curve: &C, candidates: &[CandidatePattern]) -> Result<Option<CompounderMatch>>
where
    C: Fn(f64) -> Result<f64> + ?Sized,
{
    let ts = spaced(FIT_RANGE, FIT_POINTS);
    let ys = ts.iter().map(|&t| curve(t)).collect::<Result<Vec<_>>>()?;
    let check = spaced(CHECK_RANGE, CHECK_POINTS)
        .into_iter()
        .map(|t| curve(t).map(|y| (t, y)))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(usize, usize, CompounderMatch)> = None;
    for (order, pattern) in candidates.iter().enumerate() {
        for family in fit(*pattern, &ts, &ys) {
            let sup = sup_distance(&family, &check);
            if !(sup < MATCH_THRESHOLD) {
                continue;
            }
            let key = (pattern.parameter_count(), order);
            let better = match &best {
                None => true,
                Some((params, ord, m)) => {
                    key < (*params, *ord) || (key == (*params, *ord) && sup < m.sup_distance)
                }
            };
            if better {
                best = Some((
                    key.0,
                    key.1,
                    CompounderMatch {
                        family,
                        sup_distance: sup,
                    },
                ));
            }
        }
    }
    Ok(best.map(|(_, _, m)| m))
}
