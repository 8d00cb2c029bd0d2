//! Brute-force badness functionals of an inhomogeneous system `(theta, eta)`.
//!
//! Nothing here touches the game, geometry or strategy code: the functionals
//! are evaluated directly from integer residues so they can serve as ground
//! truth for the rest of the crate.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::rational::{self, fmt_q, parse_q, pow_q, qb, serde_intvec, serde_q, Q};
use crate::resonance::{ResonanceSequence, ThetaMatrix};

/// A decreasing approximation function `psi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiSpec {
    /// `psi(t) = c * t^(-sigma)`.
    PowerLaw { c: Q, sigma: Q },
    Table(PsiTable),
}

/// Step function through `(t_i, psi_i)` with `t` strictly increasing and
/// `psi` strictly decreasing and positive. `psi(t) = psi_i` for
/// `t_i <= t < t_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiTable {
    points: Vec<(u64, Q)>,
}

impl PsiTable {
    pub fn new(points: Vec<(u64, Q)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("psi table is empty".into()));
        }
        if points[0].0 == 0 || !points.iter().all(|(_, v)| v.is_positive()) {
            return Err(Error::InvalidParams("psi table needs t >= 1 and psi > 0".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 >= w[0].1 {
                return Err(Error::InvalidParams(
                    "psi table must have increasing t and decreasing psi".into(),
                ));
            }
        }
        Ok(PsiTable { points })
    }

    pub fn points(&self) -> &[(u64, Q)] {
        &self.points
    }

    pub fn last_t(&self) -> u64 {
        self.points.last().expect("non-empty").0
    }

    pub fn value_at(&self, t: u64) -> Option<&Q> {
        let idx = self.points.partition_point(|(ti, _)| *ti <= t);
        idx.checked_sub(1).map(|i| &self.points[i].1)
    }

    /// Inverse of `t -> 1/psi(t)`: the largest tabulated `t` with
    /// `1/psi(t) <= s`, clamped to the first entry.
    pub fn rho(&self, s: &Q) -> u64 {
        // 1/psi <= s  <=>  psi * s >= 1 (psi decreasing, so a prefix qualifies)
        let idx = self.points.partition_point(|(_, psi)| psi * s >= Q::one());
        self.points[idx.saturating_sub(1)].0
    }

    /// Largest `s` for which `rho` is determined by the table.
    pub fn coverage(&self) -> Q {
        self.points.last().expect("non-empty").1.recip()
    }
}

impl PsiSpec {
    pub fn power(c: Q, sigma: Q) -> Result<Self> {
        if !c.is_positive() || !sigma.is_positive() {
            return Err(Error::InvalidParams("power law needs c > 0 and sigma > 0".into()));
        }
        Ok(PsiSpec::PowerLaw { c, sigma })
    }

    /// Parses `power:c=1,sigma=1/2` or `table:1=1/2;3=1/5;...`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, body) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("psi function needs a kind prefix: {text:?}")))?;
        match kind.trim() {
            "power" => {
                let mut c = None;
                let mut sigma = None;
                for part in body.split(',') {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
                    match key.trim() {
                        "c" => c = Some(parse_q(value)?),
                        "sigma" => sigma = Some(parse_q(value)?),
                        other => return Err(Error::Parse(format!("unknown psi parameter {other:?}"))),
                    }
                }
                PsiSpec::power(
                    c.unwrap_or_else(Q::one),
                    sigma.ok_or_else(|| Error::Parse("power law needs sigma".into()))?,
                )
            }
            "table" => {
                let points = body
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|part| {
                        let (t, v) = part
                            .split_once('=')
                            .ok_or_else(|| Error::Parse(format!("expected t=psi in {part:?}")))?;
                        let t: u64 = t
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad table t {t:?}")))?;
                        Ok((t, parse_q(v)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PsiSpec::Table(PsiTable::new(points)?))
            }
            other => Err(Error::Parse(format!("unknown psi kind {other:?}"))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PsiSpec::PowerLaw { c, sigma } => format!("power:c={},sigma={}", fmt_q(c), fmt_q(sigma)),
            PsiSpec::Table(table) => {
                let body: Vec<String> = table
                    .points
                    .iter()
                    .map(|(t, v)| format!("{t}={}", fmt_q(v)))
                    .collect();
                format!("table:{}", body.join(";"))
            }
        }
    }

    /// `Some(value <= psi(t))`, or `None` where `psi` is undefined.
    pub fn dominates(&self, t: u64, value: &Q) -> Result<Option<bool>> {
        if value.is_negative() {
            return Err(Error::InvalidParams("psi comparison needs value >= 0".into()));
        }
        match self {
            PsiSpec::PowerLaw { c, sigma } => {
                // value <= c t^(-p/q)  <=>  value^q t^p <= c^q
                let (p, q) = exponent_parts(sigma)?;
                let lhs = pow_q(value, q) * pow_q(&Q::from_integer(BigInt::from(t)), p);
                Ok(Some(lhs <= pow_q(c, q)))
            }
            PsiSpec::Table(table) => Ok(table.value_at(t).map(|psi| value <= psi)),
        }
    }
}

fn exponent_parts(sigma: &Q) -> Result<(u64, u64)> {
    use num_traits::ToPrimitive;
    let p = sigma.numer().to_u64();
    let q = sigma.denom().to_u64();
    match (p, q) {
        (Some(p), Some(q)) if p > 0 && p <= 64 && q <= 64 => Ok((p, q)),
        _ => Err(Error::InvalidParams(format!(
            "sigma = {} is outside the supported exponent range",
            fmt_q(sigma)
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Theorem1,
    Jarnik,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadnessReport {
    pub functional: Functional,
    #[serde(rename = "N")]
    pub n_max: u64,
    #[serde(with = "serde_intvec")]
    pub minimizer: Vec<BigInt>,
    /// The minimum, raised to `value_power` (1 unless a power law with
    /// non-integral exponent forced a power comparison).
    #[serde(with = "serde_q")]
    pub value: Q,
    pub value_power: u64,
    pub psi: Option<String>,
    pub validity_bound: Option<String>,
    pub within_validity: bool,
    pub warnings: Vec<String>,
}

impl BadnessReport {
    pub fn is_positive(&self) -> bool {
        self.value.is_positive()
    }
}

/// `L_j(x) - eta_j = (sum_i P_{i,j} x_i - E_j) / D_j` over a common
/// denominator per form.
struct Residues {
    forms: Vec<(Vec<BigInt>, BigInt, BigInt)>,
}

impl Residues {
    fn new(theta: &ThetaMatrix, eta: &[Q]) -> Result<Self> {
        if eta.len() != theta.n {
            return Err(Error::DimensionMismatch {
                expected: theta.n,
                found: eta.len(),
            });
        }
        let forms = (0..theta.n)
            .map(|j| {
                let d = (0..theta.m)
                    .map(|i| theta.entries[i][j].denom().clone())
                    .fold(eta[j].denom().clone(), |acc, x| acc.lcm(&x));
                let coeffs = (0..theta.m)
                    .map(|i| (&theta.entries[i][j] * qb(&d)).to_integer())
                    .collect();
                let e = (&eta[j] * qb(&d)).to_integer();
                (coeffs, e, d)
            })
            .collect();
        Ok(Residues { forms })
    }

    /// `max_j || L_j(x) - eta_j ||`.
    fn distance(&self, x: &[i64]) -> Q {
        self.forms
            .iter()
            .map(|(coeffs, e, d)| {
                let s: BigInt = coeffs.iter().zip(x).map(|(c, &xi)| c * xi).sum::<BigInt>() - e;
                let r = s.mod_floor(d);
                let other = d - &r;
                Q::new(if r <= other { r } else { other }, d.clone())
            })
            .max()
            .expect("n >= 1")
    }
}

/// All `x in Z^m` with `max |x_i| = s`.
fn box_shell(m: usize, s: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for pos in 0..m {
        let lo: Vec<i64> = (0..m).map(|i| if i < pos { 1 - s } else { -s }).collect();
        let hi: Vec<i64> = (0..m).map(|i| if i < pos { s - 1 } else { s }).collect();
        let free: Vec<usize> = (0..m).filter(|&i| i != pos).collect();
        let mut x = lo.clone();
        'outer: loop {
            x[pos] = -s;
            out.push(x.clone());
            x[pos] = s;
            out.push(x.clone());
            for &i in free.iter().rev() {
                if x[i] < hi[i] {
                    x[i] += 1;
                    continue 'outer;
                }
                x[i] = lo[i];
            }
            break;
        }
    }
    out
}

fn better(a: &(Q, Vec<i64>), b: &(Q, Vec<i64>)) -> Ordering {
    a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1))
}

/// Minimum of `score(distance(x), max |x_i|)` over `0 < max |x_i| <= n_max`,
/// ties broken by lexicographically smallest `x`.
fn minimize<F>(theta: &ThetaMatrix, eta: &[Q], n_max: u64, exec: Execution, score: F) -> Result<(Q, Vec<i64>)>
where
    F: Fn(&Q, i64) -> Result<Q> + Sync,
{
    if n_max == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let residues = Residues::new(theta, eta)?;
    let m = theta.m;
    let per_shell = par::map_range(exec, 1..n_max as usize + 1, |s| -> Result<(Q, Vec<i64>)> {
        let mut best: Option<(Q, Vec<i64>)> = None;
        for x in box_shell(m, s as i64) {
            let candidate = (score(&residues.distance(&x), s as i64)?, x);
            if best.as_ref().is_none_or(|b| better(&candidate, b) == Ordering::Less) {
                best = Some(candidate);
            }
        }
        Ok(best.expect("shells are non-empty"))
    });
    let mut best: Option<(Q, Vec<i64>)> = None;
    for candidate in per_shell {
        let candidate = candidate?;
        if best.as_ref().is_none_or(|b| better(&candidate, b) == Ordering::Less) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("N >= 1"))
}

fn validity(theta: &ThetaMatrix, n_max: u64, warnings: &mut Vec<String>) -> (Option<String>, bool) {
    match theta.validity_bound() {
        Some(bound) => {
            let ok = BigInt::from(n_max) <= bound;
            if !ok {
                warnings.push(format!(
                    "N = {n_max} exceeds the surrogate validity bound {bound}; the value is exact for the rational surrogate only"
                ));
            }
            (Some(bound.to_string()), ok)
        }
        None => (None, true),
    }
}

/// `min (max_j ||L_j(x) - eta_j||)^n (max_i |x_i|)^m` over `0 < max |x_i| <= N`.
pub fn theorem1_constant(theta: &ThetaMatrix, eta: &[Q], n_max: u64) -> Result<BadnessReport> {
    theorem1_constant_with(theta, eta, n_max, Execution::default())
}

pub fn theorem1_constant_with(
    theta: &ThetaMatrix,
    eta: &[Q],
    n_max: u64,
    exec: Execution,
) -> Result<BadnessReport> {
    let (n, m) = (theta.n as u64, theta.m as u64);
    let (value, x) = minimize(theta, eta, n_max, exec, |dist, s| {
        Ok(pow_q(dist, n) * pow_q(&Q::from_integer(BigInt::from(s)), m))
    })?;
    let mut warnings = Vec::new();
    let (validity_bound, within_validity) = validity(theta, n_max, &mut warnings);
    Ok(BadnessReport {
        functional: Functional::Theorem1,
        n_max,
        minimizer: x.into_iter().map(BigInt::from).collect(),
        value,
        value_power: 1,
        psi: None,
        validity_bound,
        within_validity,
        warnings,
    })
}

/// `min ||L(x) - eta||_max * rho(max |x_i|)` with `rho` inverse to `1/psi`.
///
/// For `psi = c t^(-p/q)`, `rho(s) = (c s)^(q/p)` and the reported value is the
/// `p`-th power `D^p (c S)^q`.
pub fn jarnik_constant(theta: &ThetaMatrix, eta: &[Q], psi: &PsiSpec, n_max: u64) -> Result<BadnessReport> {
    jarnik_constant_with(theta, eta, psi, n_max, Execution::default())
}

pub fn jarnik_constant_with(
    theta: &ThetaMatrix,
    eta: &[Q],
    psi: &PsiSpec,
    n_max: u64,
    exec: Execution,
) -> Result<BadnessReport> {
    let (value, x, power) = match psi {
        PsiSpec::PowerLaw { c, sigma } => {
            let (p, q) = exponent_parts(sigma)?;
            let (value, x) = minimize(theta, eta, n_max, exec, |dist, s| {
                Ok(pow_q(dist, p) * pow_q(&(c * Q::from_integer(BigInt::from(s))), q))
            })?;
            (value, x, p)
        }
        PsiSpec::Table(table) => {
            let coverage = table.coverage();
            if Q::from_integer(BigInt::from(n_max)) > coverage {
                return Err(Error::TableRangeExceeded {
                    n: n_max,
                    covered: fmt_q(&coverage),
                });
            }
            let (value, x) = minimize(theta, eta, n_max, exec, |dist, s| {
                let rho = table.rho(&Q::from_integer(BigInt::from(s)));
                Ok(dist * Q::from_integer(BigInt::from(rho)))
            })?;
            (value, x, 1)
        }
    };
    let mut warnings = Vec::new();
    let (validity_bound, within_validity) = validity(theta, n_max, &mut warnings);
    Ok(BadnessReport {
        functional: Functional::Jarnik,
        n_max,
        minimizer: x.into_iter().map(BigInt::from).collect(),
        value,
        value_power: power,
        psi: Some(psi.describe()),
        validity_bound,
        within_validity,
        warnings,
    })
}

/// `min_{r <= r_max} || u^(r) . eta ||`.
pub fn resonance_margin(lambda: &ResonanceSequence, eta: &[Q], r_max: usize) -> Result<Q> {
    if r_max == 0 || r_max > lambda.len() {
        return Err(Error::InvalidParams(format!(
            "r_max = {r_max} outside 1..={}",
            lambda.len()
        )));
    }
    if eta.len() != lambda.dim() {
        return Err(Error::DimensionMismatch {
            expected: lambda.dim(),
            found: eta.len(),
        });
    }
    Ok((1..=r_max)
        .map(|r| rational::nearest_int_dist(&rational::dot_int(lambda.vector(r), eta)))
        .min()
        .expect("r_max >= 1"))
}
