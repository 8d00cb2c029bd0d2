//! Resonance data derived from a matrix of linear forms: the quality
//! function `psi_theta`, successive best approximations of the transposed
//! system, and their thinning into a lacunary sequence of integer vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::certify::PsiSpec;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::rational::{self, fmt_q, parse_q, qb, serde_int, serde_intvec, serde_opt_q, serde_q, Q};

/// Periodic-tail continued fraction `[a0; a1, ..., (p1, ..., pk)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub prefix: Vec<BigInt>,
    pub period: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn term(&self, i: usize) -> Option<BigInt> {
        if i < self.prefix.len() {
            Some(self.prefix[i].clone())
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - self.prefix.len()) % self.period.len()].clone())
        }
    }

    /// Convergents `p_k / q_k` with `q_k <= q_max` (all of them for a finite
    /// expansion).
    pub fn convergents(&self, q_max: &BigInt) -> Vec<(BigInt, BigInt)> {
        let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
        let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
        let mut out = Vec::new();
        let mut i = 0;
        while let Some(a) = self.term(i) {
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            if &q_next > q_max {
                break;
            }
            out.push((p_next.clone(), q_next.clone()));
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            i += 1;
        }
        out
    }

    /// First convergent whose denominator reaches `q_min`.
    pub fn surrogate(&self, q_min: &BigInt) -> Q {
        let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
        let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
        let mut i = 0;
        while let Some(a) = self.term(i) {
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            if &q >= q_min {
                break;
            }
            i += 1;
        }
        Q::new(p, q)
    }

    fn to_json(&self) -> serde_json::Value {
        let mut items: Vec<serde_json::Value> = self.prefix.iter().map(int_json).collect();
        if !self.period.is_empty() {
            items.push(serde_json::Value::Array(self.period.iter().map(int_json).collect()));
        }
        serde_json::Value::Array(items)
    }

    /// `[a0, a1, ..., [p1, ..., pk]]`: a trailing nested array is the period.
    fn from_json(value: &serde_json::Value) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse("cf must be an array".into()))?;
        let mut prefix = Vec::new();
        let mut period = Vec::new();
        for (i, item) in items.iter().enumerate() {
            match item {
                serde_json::Value::Array(p) if i + 1 == items.len() => {
                    period = p.iter().map(json_int).collect::<Result<_>>()?;
                    if period.is_empty() {
                        return Err(Error::Parse("cf period must be non-empty".into()));
                    }
                }
                other => prefix.push(json_int(other)?),
            }
        }
        if prefix.is_empty() && period.is_empty() {
            return Err(Error::Parse("cf must have at least one term".into()));
        }
        Ok(ContinuedFraction { prefix, period })
    }
}

fn int_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::from(v.to_string()),
    }
}

fn json_int(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("cf term is not an integer: {n}"))),
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| Error::Parse(format!("cf term is not an integer: {s:?}"))),
        other => Err(Error::Parse(format!("cf term is not an integer: {other}"))),
    }
}

/// The `m x n` matrix `theta_{i,j}`. `L_j(x) = sum_i theta_{i,j} x_i` for
/// `x in Z^m`; the transposed forms are `sum_j theta_{i,j} y_j` for `y in Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaMatrix {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<Vec<Q>>,
    /// When present, `entries` are a rational surrogate for the number with
    /// this expansion (`m = n = 1` only).
    pub cf: Option<ContinuedFraction>,
}

/// Default denominator floor for surrogates built from a bare expansion.
const SURROGATE_MIN_DENOMINATOR: u64 = 1_000_000_000_000;

impl ThetaMatrix {
    pub fn new(entries: Vec<Vec<Q>>) -> Result<Self> {
        let m = entries.len();
        let n = entries.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || entries.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParams("theta must be a non-empty rectangular matrix".into()));
        }
        Ok(ThetaMatrix {
            m,
            n,
            entries,
            cf: None,
        })
    }

    pub fn scalar(theta: Q) -> Self {
        ThetaMatrix {
            m: 1,
            n: 1,
            entries: vec![vec![theta]],
            cf: None,
        }
    }

    /// The golden-mean surrogate `832040/1346269` with its expansion `[0; 1, 1, ...]`.
    pub fn golden() -> Self {
        ThetaMatrix {
            cf: Some(ContinuedFraction {
                prefix: vec![BigInt::zero()],
                period: vec![BigInt::one()],
            }),
            ..ThetaMatrix::scalar(Q::new(BigInt::from(832040), BigInt::from(1346269)))
        }
    }

    pub fn from_cf(cf: ContinuedFraction) -> Self {
        let theta = cf.surrogate(&BigInt::from(SURROGATE_MIN_DENOMINATOR));
        ThetaMatrix {
            cf: Some(cf),
            ..ThetaMatrix::scalar(theta)
        }
    }

    /// Named presets accepted wherever a theta file is expected.
    pub fn preset(name: &str) -> Option<Self> {
        let cf = |prefix: i64, period: i64| ContinuedFraction {
            prefix: vec![BigInt::from(prefix)],
            period: vec![BigInt::from(period)],
        };
        match name {
            "golden" => Some(ThetaMatrix::golden()),
            "sqrt2" => Some(ThetaMatrix::from_cf(cf(1, 2))),
            "silver" => Some(ThetaMatrix::from_cf(cf(0, 2))),
            _ => None,
        }
    }

    pub fn is_surrogate(&self) -> bool {
        self.cf.is_some()
    }

    /// Range of `|x|` over which surrogate error cannot be trusted to keep
    /// `||.||` comparisons: `floor(sqrt(denominator))`.
    pub fn validity_bound(&self) -> Option<BigInt> {
        if !self.is_surrogate() {
            return None;
        }
        let denom = self
            .entries
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        Some(denom.sqrt())
    }

    /// `max_i || sum_j theta_{i,j} y_j ||`.
    pub fn transposed_quality(&self, y: &[BigInt]) -> Q {
        self.entries
            .iter()
            .map(|row| {
                let s = row
                    .iter()
                    .zip(y)
                    .fold(Q::zero(), |acc, (t, yj)| acc + t * qb(yj));
                rational::nearest_int_dist(&s)
            })
            .max()
            .unwrap_or_else(Q::zero)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ThetaFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let cf = raw.cf.as_ref().map(ContinuedFraction::from_json).transpose()?;
        let theta = match (raw.entries, cf) {
            (Some(entries), cf) => {
                let entries = entries
                    .iter()
                    .map(|row| row.iter().map(|e| parse_q(e)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let mut theta = ThetaMatrix::new(entries)?;
                theta.cf = cf;
                theta
            }
            (None, Some(cf)) => ThetaMatrix::from_cf(cf),
            (None, None) => return Err(Error::Parse("theta needs \"entries\" or \"cf\"".into())),
        };
        if theta.m != raw.m || theta.n != raw.n {
            return Err(Error::Parse(format!(
                "declared {}x{} but entries are {}x{}",
                raw.m, raw.n, theta.m, theta.n
            )));
        }
        if theta.cf.is_some() && (theta.m != 1 || theta.n != 1) {
            return Err(Error::Parse("cf is only meaningful for m = n = 1".into()));
        }
        Ok(theta)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::json!({
            "m": self.m,
            "n": self.n,
            "entries": self.entries.iter().map(|row| row.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        if let Some(cf) = &self.cf {
            value["cf"] = cf.to_json();
        }
        value
    }
}

#[derive(Deserialize)]
struct ThetaFile {
    m: usize,
    n: usize,
    #[serde(default)]
    entries: Option<Vec<Vec<String>>>,
    #[serde(default)]
    cf: Option<serde_json::Value>,
}

/// Integer form of the transposed system: row `i` is `(P_i, D_i)` with
/// `theta_{i,j} = P_{i,j} / D_i`.
struct IntRows {
    rows: Vec<(Vec<BigInt>, BigInt)>,
}

impl IntRows {
    fn new(theta: &ThetaMatrix) -> Self {
        let rows = theta
            .entries
            .iter()
            .map(|row| {
                let d = row.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
                let p = row.iter().map(|e| (e * qb(&d)).to_integer()).collect();
                (p, d)
            })
            .collect();
        IntRows { rows }
    }

    fn quality(&self, y: &[i64]) -> Q {
        self.rows
            .iter()
            .map(|(p, d)| {
                let s: BigInt = p.iter().zip(y).map(|(pj, &yj)| pj * yj).sum();
                let r = s.mod_floor(d);
                let other = d - &r;
                Q::new(if r <= other { r } else { other }, d.clone())
            })
            .max()
            .unwrap_or_else(Q::zero)
    }
}

fn canonical(y: &[i64]) -> bool {
    y.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Canonical vectors (first nonzero entry positive) with `max |y_j| = t`.
fn shell(n: usize, t: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    // `pos` is the first coordinate on the shell: earlier ones lie strictly
    // inside, later ones anywhere in `[-t, t]`
    for pos in 0..n {
        let lo: Vec<i64> = (0..n).map(|i| if i < pos { -(t - 1) } else { -t }).collect();
        let hi: Vec<i64> = (0..n).map(|i| if i < pos { t - 1 } else { t }).collect();
        let mut y = lo.clone();
        'odometer: loop {
            for sign in [-1, 1] {
                y[pos] = sign * t;
                if canonical(&y) {
                    out.push(y.clone());
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                if i == pos {
                    continue;
                }
                if y[i] < hi[i] {
                    y[i] += 1;
                    break;
                }
                y[i] = lo[i];
            }
        }
    }
    out
}

/// `psi_theta(t)`: minimum over nonzero integer `y` with `max |y_j| <= t` of
/// `max_i || sum_j theta_{i,j} y_j ||`.
pub fn psi_theta(theta: &ThetaMatrix, t: u64) -> Q {
    psi_theta_with(theta, t, Execution::default())
}

pub fn psi_theta_with(theta: &ThetaMatrix, t: u64, exec: Execution) -> Q {
    assert!(t >= 1, "psi_theta needs t >= 1");
    let rows = IntRows::new(theta);
    let n = theta.n;
    let shell_mins = par::map_range(exec, 1..t as usize + 1, |s| {
        shell(n, s as i64).iter().map(|y| rows.quality(y)).min()
    });
    shell_mins
        .into_iter()
        .flatten()
        .min()
        .expect("the first shell is never empty")
}

/// A change point of the step function `psi_theta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiRecord {
    pub t: u64,
    #[serde(with = "serde_intvec")]
    pub y: Vec<BigInt>,
    #[serde(with = "serde_q")]
    pub value: Q,
}

/// Every `t <= t_max` at which `psi_theta` strictly decreases, with a
/// minimizing vector. Stops after the value reaches zero.
pub fn psi_records(theta: &ThetaMatrix, t_max: u64, exec: Execution) -> Vec<PsiRecord> {
    let rows = IntRows::new(theta);
    let n = theta.n;
    let shell_best = par::map_range(exec, 1..t_max as usize + 1, |s| {
        shell(n, s as i64)
            .into_iter()
            .map(|y| (rows.quality(&y), y))
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
    });
    let mut records: Vec<PsiRecord> = Vec::new();
    for (i, best) in shell_best.into_iter().enumerate() {
        let Some((value, y)) = best else { continue };
        if records.last().is_none_or(|r| value < r.value) {
            let done = value.is_zero();
            records.push(PsiRecord {
                t: i as u64 + 1,
                y: y.into_iter().map(BigInt::from).collect(),
                value,
            });
            if done {
                break;
            }
        }
    }
    records
}

/// A successive best approximation of the transposed system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Approximation {
    #[serde(with = "serde_intvec")]
    pub u: Vec<BigInt>,
    #[serde(with = "serde_int")]
    pub t_sq: BigInt,
    #[serde(with = "serde_q")]
    pub quality: Q,
}

/// Record-setters in increasing Euclidean size (ties lexicographic, canonical
/// sign): each strictly improves the quality over all shorter vectors.
/// Only vectors with `|y| <= t_max` are considered.
pub fn best_approximations(theta: &ThetaMatrix, t_max: u64) -> Vec<Approximation> {
    best_approximations_with(theta, t_max, Execution::default())
}

pub fn best_approximations_with(theta: &ThetaMatrix, t_max: u64, exec: Execution) -> Vec<Approximation> {
    let n = theta.n;
    let limit_sq = (t_max as i128) * (t_max as i128);
    let mut vectors: Vec<(i128, Vec<i64>)> = (1..=t_max as i64)
        .flat_map(|s| shell(n, s))
        .map(|y| (y.iter().map(|&c| (c as i128) * (c as i128)).sum::<i128>(), y))
        .filter(|(sq, _)| *sq <= limit_sq)
        .collect();
    vectors.sort();
    let rows = IntRows::new(theta);
    let qualities = par::map_slice(exec, &vectors, |(_, y)| rows.quality(y));
    let mut out: Vec<Approximation> = Vec::new();
    for ((sq, y), quality) in vectors.into_iter().zip(qualities) {
        if out.last().is_none_or(|a| quality < a.quality) {
            let done = quality.is_zero();
            out.push(Approximation {
                u: y.into_iter().map(BigInt::from).collect(),
                t_sq: BigInt::from(sq),
                quality,
            });
            if done {
                break;
            }
        }
    }
    out
}

/// Convergent denominators `q_k <= t_max` of a `1 x 1` system given by its
/// continued fraction, as approximations (qualities from the surrogate).
pub fn cf_approximations(theta: &ThetaMatrix, t_max: &BigInt) -> Result<Vec<Approximation>> {
    let cf = theta
        .cf
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("theta has no continued fraction".into()))?;
    Ok(cf
        .convergents(t_max)
        .into_iter()
        .map(|(_, q)| {
            let u = vec![q.clone()];
            Approximation {
                quality: theta.transposed_quality(&u),
                t_sq: &q * &q,
                u,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    #[serde(with = "serde_intvec")]
    pub u: Vec<BigInt>,
    #[serde(with = "serde_int_str")]
    pub t_sq: BigInt,
    /// `None` for padding vectors.
    #[serde(with = "serde_opt_q")]
    pub quality: Option<Q>,
}

mod serde_int_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// The lacunary sequence of integer vectors `u^(r)`, `r = 1, 2, ...`, with
/// `M <= t_{r+1}/t_r <= M^2` where `t_r = |u^(r)|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceSequence {
    #[serde(rename = "M", with = "serde_q")]
    pub m: Q,
    pub entries: Vec<ResonanceEntry>,
}

impl ResonanceSequence {
    pub fn from_vectors(vectors: Vec<Vec<BigInt>>, m: &Q) -> Result<Self> {
        let entries = vectors
            .into_iter()
            .map(|u| ResonanceEntry {
                t_sq: rational::norm_sq_int(&u),
                u,
                quality: None,
            })
            .collect();
        let seq = ResonanceSequence { m: m.clone(), entries };
        seq.validate()?;
        Ok(seq)
    }

    /// One-dimensional sequence with the given sizes.
    pub fn from_sizes(sizes: &[i64], m: &Q) -> Result<Self> {
        ResonanceSequence::from_vectors(sizes.iter().map(|&s| vec![BigInt::from(s)]).collect(), m)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries.first().map_or(0, |e| e.u.len())
    }

    /// `u^(r)`, 1-based.
    pub fn vector(&self, r: usize) -> &[BigInt] {
        &self.entries[r - 1].u
    }

    /// `t_r^2`, 1-based.
    pub fn t_sq(&self, r: usize) -> &BigInt {
        &self.entries[r - 1].t_sq
    }

    /// Checks `t_r^2 = |u^(r)|^2` and `M^2 <= t_{r+1}^2 / t_r^2 <= M^4`.
    pub fn validate(&self) -> Result<()> {
        if self.m <= Q::one() {
            return Err(Error::InvalidParams("M must exceed 1".into()));
        }
        let dim = self.dim();
        let m2 = &self.m * &self.m;
        let m4 = &m2 * &m2;
        for (i, e) in self.entries.iter().enumerate() {
            if e.u.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.u.len(),
                });
            }
            if e.t_sq != rational::norm_sq_int(&e.u) || e.t_sq.is_zero() {
                return Err(Error::InvalidParams(format!("entry {}: t_sq is not |u|^2 > 0", i + 1)));
            }
            if i > 0 {
                let ratio = Q::new(e.t_sq.clone(), self.entries[i - 1].t_sq.clone());
                if ratio < m2 || ratio > m4 {
                    return Err(Error::InvalidParams(format!(
                        "t_{}/t_{} outside [M, M^2]",
                        i + 1,
                        i
                    )));
                }
            }
        }
        Ok(())
    }

    /// The list form `[{"u", "t_sq", "quality"}, ...]`.
    pub fn to_json_list(&self) -> serde_json::Value {
        serde_json::to_value(&self.entries).expect("entries serialize")
    }

    pub fn from_json_list(text: &str, m: &Q) -> Result<Self> {
        let entries: Vec<ResonanceEntry> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let seq = ResonanceSequence { m: m.clone(), entries };
        seq.validate()?;
        Ok(seq)
    }

    pub fn sizes_sq(&self) -> Vec<BigInt> {
        self.entries.iter().map(|e| e.t_sq.clone()).collect()
    }
}

/// Greedy thinning into the window `[M, M^2]`.
///
/// Keeps the first element. From each kept size `t`, later elements with
/// ratio below `M` are skipped; the first with ratio at least `M` is kept if
/// the ratio is at most `M^2`. Otherwise the gap is bridged by a padding
/// vector `(s, 0, ..., 0)` with `s` the smallest integer `>= M t`, and the
/// scan resumes from the padding.
pub fn lacunary_normalize(seq: &[Approximation], m: &Q) -> Result<ResonanceSequence> {
    if *m <= Q::one() {
        return Err(Error::InvalidParams("M must exceed 1".into()));
    }
    let first = seq.first().ok_or(Error::EmptySequence)?;
    let dim = first.u.len();
    let m2 = m * m;
    let m4 = &m2 * &m2;
    let mut entries = vec![ResonanceEntry {
        u: first.u.clone(),
        t_sq: first.t_sq.clone(),
        quality: Some(first.quality.clone()),
    }];
    let mut i = 1;
    while i < seq.len() {
        let current = qb(&entries.last().expect("non-empty").t_sq);
        let candidate = &seq[i];
        let ratio = qb(&candidate.t_sq) / &current;
        if ratio < m2 {
            i += 1;
            continue;
        }
        if ratio <= m4 {
            entries.push(ResonanceEntry {
                u: candidate.u.clone(),
                t_sq: candidate.t_sq.clone(),
                quality: Some(candidate.quality.clone()),
            });
            i += 1;
            continue;
        }
        // gap: pad with (s, 0, ..., 0), s = ceil(M t)
        let s = rational::ceil_sqrt(&(&m2 * &current));
        let s_sq = &s * &s;
        if qb(&s_sq) > &m4 * &current {
            return Err(Error::PaddingImpossible {
                t_sq: current.to_string(),
            });
        }
        let mut u = vec![BigInt::zero(); dim];
        u[0] = s;
        entries.push(ResonanceEntry {
            u,
            t_sq: s_sq,
            quality: None,
        });
    }
    let out = ResonanceSequence { m: m.clone(), entries };
    out.validate()?;
    Ok(out)
}

/// Builds the resonance sequence for `theta`: continued-fraction convergents
/// for a `1 x 1` system with an expansion, brute-force best approximations
/// otherwise, then lacunary thinning.
pub fn resonance_from_theta(theta: &ThetaMatrix, m: &Q, t_max: u64) -> Result<ResonanceSequence> {
    let approx = if theta.cf.is_some() {
        cf_approximations(theta, &BigInt::from(t_max))?
    } else {
        best_approximations(theta, t_max)
    };
    lacunary_normalize(&approx, m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub t: u64,
    #[serde(with = "serde_q")]
    pub psi_theta: Q,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub t_max: u64,
    pub checks: Vec<HypothesisCheck>,
    pub violations: Vec<u64>,
    pub hits_zero: bool,
    pub truncated_at: Option<u64>,
    pub warnings: Vec<String>,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Empirical check of `psi_theta(t) <= psi(t)` for `t <= t_max`.
///
/// `psi_theta` is a step function, so it is checked at every change point and
/// at the last `t` of every constant piece, where a decreasing `psi` is
/// smallest.
pub fn verify_hypothesis(theta: &ThetaMatrix, psi: &PsiSpec, t_max: u64) -> Result<HypothesisReport> {
    let mut warnings = Vec::new();
    let mut limit = t_max;
    let mut truncated_at = None;
    if let PsiSpec::Table(table) = psi {
        let last = table.last_t();
        if last < t_max {
            warnings.push(format!("psi table ends at t = {last} < t_max = {t_max}; truncated"));
            limit = last;
            truncated_at = Some(last);
        }
    }
    let records = psi_records(theta, limit, Execution::default());
    let mut points: Vec<(u64, Q)> = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        points.push((rec.t, rec.value.clone()));
        let end = records.get(i + 1).map_or(limit, |next| next.t - 1);
        if end > rec.t {
            points.push((end, rec.value.clone()));
        }
    }
    let hits_zero = records.last().is_some_and(|r| r.value.is_zero());
    if hits_zero {
        warnings.push("psi_theta reaches 0 (theta is rational or a rational surrogate)".into());
    }
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    for (t, value) in points {
        let Some(holds) = psi.dominates(t, &value)? else {
            continue;
        };
        if !holds {
            violations.push(t);
        }
        checks.push(HypothesisCheck {
            t,
            psi_theta: value,
            holds,
        });
    }
    Ok(HypothesisReport {
        t_max,
        checks,
        violations,
        hits_zero,
        truncated_at,
        warnings,
    })
}
