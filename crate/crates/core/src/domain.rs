//! Sequence specifications and the simple staircase domains built from them.

use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};
use crate::zeta::pseries_tail;

/// Closed-form or explicit description of a positive real sequence indexed from 1.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec<T> {
    /// `coefficient · k^exponent`
    Power { coefficient: T, exponent: T },
    /// `coefficient · ratio^k`
    Exponential { coefficient: T, ratio: T },
    /// Explicit prefix, continued by `tail` (evaluated at the global index).
    Explicit {
        values: Vec<T>,
        tail: Option<Box<SequenceSpec<T>>>,
    },
}

/// Tri-state answer to "is Σ bₖ finite?".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Summability {
    Yes,
    No,
    Unknown,
}

impl<T: Real> SequenceSpec<T> {
    pub fn power(coefficient: T, exponent: T) -> Self {
        Self::Power {
            coefficient,
            exponent,
        }
    }

    pub fn exponential(coefficient: T, ratio: T) -> Self {
        Self::Exponential { coefficient, ratio }
    }

    pub fn explicit(values: Vec<T>, tail: Option<SequenceSpec<T>>) -> Self {
        Self::Explicit {
            values,
            tail: tail.map(Box::new),
        }
    }

    /// Checks the parameters themselves, independent of any index.
    pub fn check_parameters(&self) -> Result<()> {
        let finite_positive = |name: &str, x: T| {
            if x > T::zero() && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{name} must be positive and finite, got {x}"
                )))
            }
        };
        match self {
            Self::Power {
                coefficient,
                exponent,
            } => {
                finite_positive("coefficient", *coefficient)?;
                if !exponent.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "exponent must be finite, got {exponent}"
                    )));
                }
                Ok(())
            }
            Self::Exponential { coefficient, ratio } => {
                finite_positive("coefficient", *coefficient)?;
                finite_positive("ratio", *ratio)
            }
            Self::Explicit { values, tail } => {
                for v in values {
                    finite_positive("explicit value", *v)?;
                }
                if values.is_empty() && tail.is_none() {
                    return Err(Error::InvalidSpec(
                        "explicit sequence with no values and no tail".into(),
                    ));
                }
                tail.as_ref().map_or(Ok(()), |t| t.check_parameters())
            }
        }
    }

    fn raw_eval(&self, k: usize) -> Result<T> {
        match self {
            Self::Power {
                coefficient,
                exponent,
            } => {
                let kk = T::from_usize_lossy(k);
                let pow = match integral_i32(*exponent) {
                    Some(p) => kk.powi(p),
                    None => kk.powf(*exponent),
                };
                Ok(*coefficient * pow)
            }
            Self::Exponential { coefficient, ratio } => {
                let pow = match i32::try_from(k) {
                    Ok(n) => ratio.powi(n),
                    Err(_) => ratio.powf(T::from_usize_lossy(k)),
                };
                Ok(*coefficient * pow)
            }
            Self::Explicit { values, tail } => {
                if k <= values.len() {
                    Ok(values[k - 1])
                } else if let Some(tail) = tail {
                    tail.raw_eval(k)
                } else {
                    Err(Error::OutOfRange {
                        index: k,
                        len: values.len(),
                    })
                }
            }
        }
    }

    /// Whether the sequence is certified (analytically) to tend to zero.
    pub fn tends_to_zero(&self) -> Option<bool> {
        match self {
            Self::Power { exponent, .. } => Some(*exponent < T::zero()),
            Self::Exponential { ratio, .. } => Some(*ratio < T::one()),
            Self::Explicit { tail, .. } => tail.as_ref().and_then(|t| t.tends_to_zero()),
        }
    }

    /// Analytic infimum of the terms with index `≥ start`, when one exists in closed form.
    fn analytic_infimum_from(&self, start: usize) -> Option<T> {
        match self {
            Self::Power { exponent, .. } => {
                if *exponent >= T::zero() {
                    self.raw_eval(start).ok()
                } else {
                    Some(T::zero())
                }
            }
            Self::Exponential { ratio, .. } => {
                if *ratio >= T::one() {
                    self.raw_eval(start).ok()
                } else {
                    Some(T::zero())
                }
            }
            Self::Explicit { values, tail } => {
                let prefix = values
                    .iter()
                    .skip(start.saturating_sub(1))
                    .copied()
                    .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))));
                let rest = match tail {
                    Some(t) => Some(t.analytic_infimum_from(start.max(values.len() + 1))?),
                    None => None,
                };
                match (prefix, rest) {
                    (Some(p), Some(r)) => Some(p.min(r)),
                    (p, r) => p.or(r),
                }
            }
        }
    }

    pub fn summability(&self) -> Summability {
        match self {
            Self::Power { exponent, .. } => {
                if *exponent < -T::one() {
                    Summability::Yes
                } else {
                    Summability::No
                }
            }
            Self::Exponential { ratio, .. } => {
                if *ratio < T::one() {
                    Summability::Yes
                } else {
                    Summability::No
                }
            }
            Self::Explicit { tail, .. } => tail
                .as_ref()
                .map_or(Summability::Unknown, |t| t.summability()),
        }
    }

    /// `Σ_{k ≥ start} term(k)` with a bound on its numerical error, when summable.
    pub fn tail_sum(&self, start: usize) -> Option<(T, T)> {
        let start = start.max(1);
        match self {
            Self::Power {
                coefficient,
                exponent,
            } => {
                if *exponent >= -T::one() {
                    return None;
                }
                let (s, err) = pseries_tail(-*exponent, start as u64);
                Some((*coefficient * s, *coefficient * err))
            }
            Self::Exponential { ratio, .. } => {
                if *ratio >= T::one() {
                    return None;
                }
                let first = self.raw_eval(start).ok()?;
                let sum = first / (T::one() - *ratio);
                Some((sum, sum * T::epsilon() * T::lit(4.0)))
            }
            Self::Explicit { values, tail } => {
                let tail = tail.as_ref()?;
                let (rest, err) = tail.tail_sum(start.max(values.len() + 1))?;
                let mut acc: CompensatedSum<T> = values.iter().skip(start - 1).copied().collect();
                acc.add(rest);
                Some((acc.value(), err))
            }
        }
    }
}

fn integral_i32<T: Real>(x: T) -> Option<i32> {
    if x.fract() == T::zero() {
        x.to_i32()
    } else {
        None
    }
}

/// The `k`-th term (1-based) of a sequence.
///
/// Explicit prefixes take precedence over the tail. A term that is not
/// finite is an [`Error::InvalidSpec`]; one that is zero (an underflowed
/// closed form) is an [`Error::NonPositiveTerm`].
pub fn eval_sequence<T: Real>(spec: &SequenceSpec<T>, k: usize) -> Result<T> {
    if k == 0 {
        return Err(Error::domain("sequence indices start at 1"));
    }
    let v = spec.raw_eval(k)?;
    if !v.is_finite() {
        Err(Error::InvalidSpec(format!("term {k} evaluates to {v}")))
    } else if v <= T::zero() {
        Err(Error::NonPositiveTerm { index: k })
    } else {
        Ok(v)
    }
}

#[derive(Debug, Default)]
struct Memo<T> {
    b: Vec<T>,
    f: Vec<T>,
    /// `a[i]` holds `a_{i+1}`, so it is one longer than `b` and `f`.
    a: Vec<T>,
    /// `b_prefix[i]` holds `Σ_{j ≤ i+1} b_j`.
    b_prefix: Vec<T>,
}

impl<T: Real> Memo<T> {
    fn len(&self) -> usize {
        self.b.len()
    }
}

/// A simple horn `Ω(a, b)`: interior of `⋃ₖ [aₖ, aₖ₊₁] × [0, bₖ]`.
///
/// Terms are memoized on demand. The memo only ever grows, under a lock, so
/// concurrent readers always see a consistent prefix.
#[derive(Debug)]
pub struct SimpleDomain<T> {
    b_spec: SequenceSpec<T>,
    f_spec: SequenceSpec<T>,
    b_sum: Option<T>,
    memo: RwLock<Memo<T>>,
}

impl<T: Real> Clone for SimpleDomain<T> {
    fn clone(&self) -> Self {
        let memo = self.memo.read().expect("domain memo poisoned");
        Self {
            b_spec: self.b_spec.clone(),
            f_spec: self.f_spec.clone(),
            b_sum: self.b_sum,
            memo: RwLock::new(Memo {
                b: memo.b.clone(),
                f: memo.f.clone(),
                a: memo.a.clone(),
                b_prefix: memo.b_prefix.clone(),
            }),
        }
    }
}

const MIN_GROWTH: usize = 16;

impl<T: Real> SimpleDomain<T> {
    pub fn new(b_spec: SequenceSpec<T>, f_spec: SequenceSpec<T>) -> Result<Self> {
        b_spec.check_parameters()?;
        f_spec.check_parameters()?;
        let b_sum = match b_spec.summability() {
            Summability::Yes => b_spec.tail_sum(1).map(|(s, _)| s),
            _ => None,
        };
        Ok(Self {
            b_spec,
            f_spec,
            b_sum,
            memo: RwLock::new(Memo {
                a: vec![T::zero()],
                ..Memo::default()
            }),
        })
    }

    /// `f(k) = k³`, `bₖ = k⁻²`: infinite area, summable heights.
    pub fn example() -> Self {
        Self::new(
            SequenceSpec::power(T::one(), T::lit(-2.0)),
            SequenceSpec::power(T::one(), T::lit(3.0)),
        )
        .expect("preset parameters are valid")
    }

    /// `f(k) = k`, `bₖ = 1/k`: heights not summable.
    pub fn harmonic() -> Self {
        Self::new(
            SequenceSpec::power(T::one(), -T::one()),
            SequenceSpec::power(T::one(), T::one()),
        )
        .expect("preset parameters are valid")
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        Self::new(spec.b.to_sequence()?, spec.f.to_sequence()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn b_spec(&self) -> &SequenceSpec<T> {
        &self.b_spec
    }

    pub fn f_spec(&self) -> &SequenceSpec<T> {
        &self.f_spec
    }

    /// `Σ bₖ` when certified summable; `None` otherwise.
    pub fn b_sum_estimate(&self) -> Option<T> {
        self.b_sum
    }

    pub fn b_summability(&self) -> Summability {
        self.b_spec.summability()
    }

    /// Number of memoized rectangles.
    pub fn cached_len(&self) -> usize {
        self.memo.read().expect("domain memo poisoned").len()
    }

    /// Grows the memo to cover at least `k` rectangles.
    pub fn warm(&self, k: usize) -> Result<()> {
        if self.memo.read().expect("domain memo poisoned").len() >= k {
            return Ok(());
        }
        let mut memo = self.memo.write().expect("domain memo poisoned");
        let len = memo.len();
        if len >= k {
            return Ok(());
        }
        let target = k.max(2 * len).max(MIN_GROWTH);
        for j in len + 1..=target {
            match self.next_terms(&memo, j) {
                Ok((b, f)) => {
                    let a_next = memo.a[j - 1] + f;
                    let prefix = memo.b_prefix.last().copied().unwrap_or_else(T::zero) + b;
                    memo.b.push(b);
                    memo.f.push(f);
                    memo.a.push(a_next);
                    memo.b_prefix.push(prefix);
                }
                // Speculative growth past `k` stops quietly at the first bad term.
                Err(_) if j > k => break,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn next_terms(&self, memo: &Memo<T>, j: usize) -> Result<(T, T)> {
        let b = eval_sequence(&self.b_spec, j)?;
        let f = eval_sequence(&self.f_spec, j)?;
        if let Some(&prev) = memo.b.last() {
            if b > prev {
                return Err(Error::InvalidSpec(format!(
                    "heights must be non-increasing: b_{j} = {b} > b_{} = {prev}",
                    j - 1
                )));
            }
        }
        Ok((b, f))
    }

    fn read<R>(&self, k: usize, get: impl FnOnce(&Memo<T>) -> R) -> Result<R> {
        if k == 0 {
            return Err(Error::domain("rectangle indices start at 1"));
        }
        self.warm(k)?;
        let memo = self.memo.read().expect("domain memo poisoned");
        Ok(get(&memo))
    }

    /// Height `bₖ`.
    pub fn b(&self, k: usize) -> Result<T> {
        self.read(k, |m| m.b[k - 1])
    }

    /// Width `f(k) = aₖ₊₁ − aₖ`.
    pub fn f(&self, k: usize) -> Result<T> {
        self.read(k, |m| m.f[k - 1])
    }

    /// Left edge `aₖ` of the k-th rectangle; `a₁ = 0`.
    pub fn a(&self, k: usize) -> Result<T> {
        if k == 1 {
            return Ok(T::zero());
        }
        self.read(k - 1, |m| m.a[k - 1])
    }

    /// `Σ_{j ≤ k} bⱼ`; zero for `k = 0`.
    pub fn b_partial_sum(&self, k: usize) -> Result<T> {
        if k == 0 {
            return Ok(T::zero());
        }
        self.read(k, |m| m.b_prefix[k - 1])
    }

    /// Copies `(f(j), b_j)` for `j = 1..=k`.
    pub fn boxes(&self, k: usize) -> Result<Vec<(T, T)>> {
        if k == 0 {
            return Ok(Vec::new());
        }
        self.read(k, |m| {
            m.f[..k]
                .iter()
                .copied()
                .zip(m.b[..k].iter().copied())
                .collect()
        })
    }
}

/// `aₖ` from the recursion `a₁ = 0`, `aₖ₊₁ = aₖ + f(k)`.
pub fn a_of<T: Real>(domain: &SimpleDomain<T>, k: usize) -> Result<T> {
    domain.a(k)
}

/// Outcome of a single validation check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub horizon: usize,
    pub checks: Vec<Check>,
    pub summable_b: Summability,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the defining conditions of a simple domain over `k ≤ horizon`.
///
/// Works from the sequence specs directly, so a domain whose memo would
/// refuse to grow is still reported on rather than rejected.
pub fn validate_domain<T: Real>(
    domain: &SimpleDomain<T>,
    horizon: usize,
) -> Result<ValidationReport> {
    if horizon < 2 {
        return Err(Error::domain(format!(
            "validation horizon must be at least 2, got {horizon}"
        )));
    }
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    let b_terms: Vec<Result<T>> = (1..=horizon)
        .map(|k| eval_sequence(domain.b_spec(), k))
        .collect();
    let f_terms: Vec<Result<T>> = (1..=horizon)
        .map(|k| eval_sequence(domain.f_spec(), k))
        .collect();

    let first_bad = |terms: &[Result<T>]| terms.iter().position(|t| t.is_err());
    match first_bad(&b_terms) {
        None => push("b_positive", true, format!("b_k > 0 for k <= {horizon}")),
        Some(i) => push(
            "b_positive",
            false,
            format!("{}", b_terms[i].as_ref().unwrap_err()),
        ),
    }
    match first_bad(&f_terms) {
        None => push("f_positive", true, format!("f(k) > 0 for k <= {horizon}")),
        Some(i) => push(
            "f_positive",
            false,
            format!("{}", f_terms[i].as_ref().unwrap_err()),
        ),
    }

    let b_ok: Vec<T> = b_terms
        .iter()
        .map_while(|t| t.as_ref().ok().copied())
        .collect();
    match b_ok.windows(2).position(|w| w[1] > w[0]) {
        None => push(
            "b_monotone",
            true,
            format!("b_(k+1) <= b_k for k < {}", b_ok.len()),
        ),
        Some(i) => push(
            "b_monotone",
            false,
            format!("b_{} = {} > b_{} = {}", i + 2, b_ok[i + 1], i + 1, b_ok[i]),
        ),
    }

    match domain.b_spec().tends_to_zero() {
        Some(true) => push("b_to_zero", true, "certified analytically".into()),
        Some(false) => push(
            "b_to_zero",
            false,
            "closed form does not tend to zero".into(),
        ),
        None => push(
            "b_to_zero",
            true,
            "not certifiable from the spec; unknown".into(),
        ),
    }

    let f_ok: Vec<T> = f_terms
        .iter()
        .map_while(|t| t.as_ref().ok().copied())
        .collect();
    let f_min = f_ok.iter().copied().fold(T::infinity(), T::min);
    let analytic = domain.f_spec().analytic_infimum_from(1);
    let (passed, detail) = match analytic {
        Some(inf) if inf <= T::zero() => (
            false,
            format!("closed form tends to zero (prefix min {f_min})"),
        ),
        Some(inf) => (
            f_min > T::zero(),
            format!("inf f = {} (prefix min {f_min})", inf.min(f_min)),
        ),
        None => (
            f_min > T::zero() && f_min.is_finite(),
            format!("prefix min {f_min} over k <= {horizon}"),
        ),
    };
    push("f_bounded_below", passed, detail);

    let summable_b = domain.b_summability();
    let detail = match domain.b_sum_estimate() {
        Some(s) => format!("sum b_k = {s}"),
        None => format!("{summable_b:?}").to_lowercase(),
    };
    push("b_summable", summable_b != Summability::No, detail);

    Ok(ValidationReport {
        horizon,
        checks,
        summable_b,
    })
}

/// JSON form of a sequence: `{"kind", "coefficient", "exponent", "values", "tail"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDoc {
    pub kind: SequenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Box<SequenceDoc>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Power,
    Exponential,
    Explicit,
}

/// JSON document describing a domain: `{"b": SequenceDoc, "f": SequenceDoc}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub b: SequenceDoc,
    pub f: SequenceDoc,
}

impl SequenceDoc {
    pub fn to_sequence<T: Real>(&self) -> Result<SequenceSpec<T>> {
        let cast = |name: &str, x: Option<f64>| -> Result<T> {
            let x = x.ok_or_else(|| {
                Error::InvalidSpec(format!("{:?} sequence needs `{name}`", self.kind))
            })?;
            T::from_f64(x)
                .ok_or_else(|| Error::InvalidSpec(format!("{name} = {x} not representable")))
        };
        let spec = match self.kind {
            SequenceKind::Power | SequenceKind::Exponential => {
                if !self.values.is_empty() || self.tail.is_some() {
                    return Err(Error::InvalidSpec(format!(
                        "{:?} sequence takes no `values` or `tail`",
                        self.kind
                    )));
                }
                let c = cast("coefficient", self.coefficient)?;
                let e = cast("exponent", self.exponent)?;
                if self.kind == SequenceKind::Power {
                    SequenceSpec::power(c, e)
                } else {
                    SequenceSpec::exponential(c, e)
                }
            }
            SequenceKind::Explicit => {
                if self.coefficient.is_some() || self.exponent.is_some() {
                    return Err(Error::InvalidSpec(
                        "explicit sequence takes `values` and `tail` only".into(),
                    ));
                }
                let values = self
                    .values
                    .iter()
                    .map(|&v| cast("values", Some(v)))
                    .collect::<Result<Vec<T>>>()?;
                let tail = self.tail.as_ref().map(|t| t.to_sequence()).transpose()?;
                SequenceSpec::explicit(values, tail)
            }
        };
        spec.check_parameters()?;
        Ok(spec)
    }

    pub fn from_sequence<T: Real>(spec: &SequenceSpec<T>) -> Self {
        let f = |x: &T| x.to_f64().unwrap_or(f64::NAN);
        match spec {
            SequenceSpec::Power {
                coefficient,
                exponent,
            } => Self {
                kind: SequenceKind::Power,
                coefficient: Some(f(coefficient)),
                exponent: Some(f(exponent)),
                values: Vec::new(),
                tail: None,
            },
            SequenceSpec::Exponential { coefficient, ratio } => Self {
                kind: SequenceKind::Exponential,
                coefficient: Some(f(coefficient)),
                exponent: Some(f(ratio)),
                values: Vec::new(),
                tail: None,
            },
            SequenceSpec::Explicit { values, tail } => Self {
                kind: SequenceKind::Explicit,
                coefficient: None,
                exponent: None,
                values: values.iter().map(f).collect(),
                tail: tail.as_ref().map(|t| Box::new(Self::from_sequence(t))),
            },
        }
    }
}

impl DomainSpec {
    pub fn of<T: Real>(domain: &SimpleDomain<T>) -> Self {
        Self {
            b: SequenceDoc::from_sequence(domain.b_spec()),
            f: SequenceDoc::from_sequence(domain.f_spec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> SimpleDomain<f64> {
        SimpleDomain::example()
    }

    #[test]
    fn eval_closed_forms() {
        assert_eq!(
            eval_sequence(&SequenceSpec::power(1.0, -2.0), 3).unwrap(),
            1.0 / 9.0
        );
        assert_eq!(
            eval_sequence(&SequenceSpec::power(1.0, 3.0), 2).unwrap(),
            8.0
        );
        assert_eq!(
            eval_sequence(&SequenceSpec::exponential(2.0, 0.5), 3).unwrap(),
            0.25
        );
    }

    #[test]
    fn explicit_prefix_then_tail() {
        let s = SequenceSpec::explicit(vec![0.5, 0.25], Some(SequenceSpec::power(1.0, -2.0)));
        assert_eq!(eval_sequence(&s, 2).unwrap(), 0.25);
        assert_eq!(eval_sequence(&s, 3).unwrap(), 1.0 / 9.0);
        let finite = SequenceSpec::explicit(vec![1.0_f64], None);
        assert!(matches!(
            eval_sequence(&finite, 2),
            Err(Error::OutOfRange { index: 2, len: 1 })
        ));
    }

    #[test]
    fn underflow_is_rejected() {
        let s = SequenceSpec::exponential(1.0_f64, 0.5);
        assert!(eval_sequence(&s, 1000).is_ok());
        assert!(matches!(
            eval_sequence(&s, 1100),
            Err(Error::NonPositiveTerm { index: 1100 })
        ));
        assert!(eval_sequence(&s, 0).is_err());
    }

    #[test]
    fn a_recursion() {
        let d = example();
        assert_eq!(d.a(1).unwrap(), 0.0);
        assert_eq!(d.a(2).unwrap(), 1.0);
        assert_eq!(d.a(4).unwrap(), 36.0);
        assert_eq!(a_of(&d, 3).unwrap(), 9.0);
        for k in 1..200 {
            assert_eq!(d.a(k + 1).unwrap() - d.a(k).unwrap(), d.f(k).unwrap());
        }
    }

    #[test]
    fn memo_grows_geometrically() {
        let d = example();
        d.b(3).unwrap();
        assert_eq!(d.cached_len(), MIN_GROWTH);
        d.b(17).unwrap();
        assert_eq!(d.cached_len(), 32);
        d.b(100).unwrap();
        assert_eq!(d.cached_len(), 100);
    }

    #[test]
    fn memo_stops_at_bad_terms_beyond_request() {
        let d = SimpleDomain::new(
            SequenceSpec::explicit(vec![1.0, 0.5, 0.25], None),
            SequenceSpec::power(1.0, 0.0),
        )
        .unwrap();
        assert_eq!(d.b(3).unwrap(), 0.25);
        assert_eq!(d.cached_len(), 3);
        assert!(matches!(d.b(4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn increasing_heights_are_refused_by_the_memo() {
        let d = SimpleDomain::new(SequenceSpec::power(1.0, 1.0), SequenceSpec::power(1.0, 1.0))
            .unwrap();
        assert!(matches!(d.b(2), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn partial_sums() {
        let d = example();
        let direct: f64 = (1..=10).map(|k| 1.0 / (k * k) as f64).sum();
        assert!((d.b_partial_sum(10).unwrap() - direct).abs() < 1e-15);
        assert_eq!(d.b_partial_sum(0).unwrap(), 0.0);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((d.b_sum_estimate().unwrap() - zeta2).abs() < 1e-15);
    }

    #[test]
    fn validate_example_and_harmonic() {
        let r = validate_domain(&example(), 100).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.summable_b, Summability::Yes);

        let h = validate_domain(&SimpleDomain::<f64>::harmonic(), 100).unwrap();
        assert_eq!(h.summable_b, Summability::No);
        for name in [
            "b_positive",
            "f_positive",
            "b_monotone",
            "b_to_zero",
            "f_bounded_below",
        ] {
            assert!(h.check(name).unwrap().passed, "{name}");
        }
        assert!(!h.check("b_summable").unwrap().passed);
    }

    #[test]
    fn validate_reports_increasing_b() {
        let d = SimpleDomain::new(SequenceSpec::power(1.0, 1.0), SequenceSpec::power(1.0, 1.0))
            .unwrap();
        let r = validate_domain(&d, 100).unwrap();
        assert!(!r.check("b_monotone").unwrap().passed);
        assert!(!r.passed());
        assert!(validate_domain(&d, 1).is_err());
    }

    #[test]
    fn validate_flags_vanishing_widths() {
        let d = SimpleDomain::new(
            SequenceSpec::power(1.0, -2.0),
            SequenceSpec::power(1.0, -0.5),
        )
        .unwrap();
        let r = validate_domain(&d, 50).unwrap();
        assert!(!r.check("f_bounded_below").unwrap().passed);
    }

    #[test]
    fn summability_of_explicit_and_exponential() {
        let tail = SequenceSpec::exponential(1.0_f64, 0.5);
        let s = SequenceSpec::explicit(vec![4.0, 2.0], Some(tail));
        assert_eq!(s.summability(), Summability::Yes);
        // 4 + 2 + Σ_{k≥3} 2^{-k} = 6.25
        assert!((s.tail_sum(1).unwrap().0 - 6.25).abs() < 1e-15);
        assert_eq!(
            SequenceSpec::<f64>::explicit(vec![1.0], None).summability(),
            Summability::Unknown
        );
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let text = r#"{"b": {"kind": "explicit", "values": [1.0], "tail": {"kind": "power", "coefficient": 0.5, "exponent": -2}},
                       "f": {"kind": "power", "coefficient": 1, "exponent": 3}}"#;
        let d = SimpleDomain::<f64>::from_json(text).unwrap();
        assert_eq!(d.b(1).unwrap(), 1.0);
        assert_eq!(d.b(2).unwrap(), 0.125);
        let back = serde_json::to_string(&DomainSpec::of(&d)).unwrap();
        let d2 = SimpleDomain::<f64>::from_json(&back).unwrap();
        assert_eq!(d2.b_spec(), d.b_spec());

        let unknown = r#"{"b": {"kind": "power", "coefficient": 1, "exponent": -2, "bogus": 1},
                          "f": {"kind": "power", "coefficient": 1, "exponent": 3}}"#;
        assert!(matches!(
            SimpleDomain::<f64>::from_json(unknown),
            Err(Error::Json(_))
        ));
        let missing = r#"{"b": {"kind": "power", "exponent": -2}, "f": {"kind": "power", "coefficient": 1, "exponent": 3}}"#;
        assert!(matches!(
            SimpleDomain::<f64>::from_json(missing),
            Err(Error::InvalidSpec(_))
        ));
        let extra_top = r#"{"b": {"kind": "power", "coefficient": 1, "exponent": -2}, "f": {"kind": "power", "coefficient": 1, "exponent": 3}, "g": 1}"#;
        assert!(SimpleDomain::<f64>::from_json(extra_top).is_err());
    }

    #[test]
    fn concurrent_readers_see_consistent_prefix() {
        use rayon::prelude::*;
        let d = example();
        let ok = (1..2000usize).into_par_iter().all(|k| {
            let a1 = d.a(k + 1).unwrap();
            let a0 = d.a(k).unwrap();
            a1 - a0 == d.f(k).unwrap()
        });
        assert!(ok);
    }
}
