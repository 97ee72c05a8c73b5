//! Truncated Laurent series in `(s − c)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Num, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational, to_f64, Rational};

/// Coefficient fields: exact rationals or floats.
pub trait Field: Num + Clone + Neg<Output = Self> + fmt::Debug + Send + Sync {
    fn from_rational(r: &Rational) -> Self;
}

impl Field for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Field for f64 {
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
}

pub const DEFAULT_TRUNCATION: i32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("coefficient of order {requested} is beyond the truncation order {order}")]
    TruncationExceeded { requested: i32, order: i32 },
    #[error("series centered at {left} and {right} cannot be combined")]
    CenterMismatch { left: String, right: String },
    #[error("series is not invertible: it vanishes to its truncation order")]
    NotInvertible,
    #[error("malformed series document: {0}")]
    Malformed(String),
}

/// `Σ_{k=low}^{T} a_k (s − c)^k + O((s − c)^{T+1})`.
///
/// `order = None` marks an exact Laurent polynomial. Stored coefficients
/// carry no leading or trailing zeros.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<F: Field> {
    center: Rational,
    low: i32,
    coeffs: Vec<F>,
    order: Option<i32>,
}

impl<F: Field> LaurentSeries<F> {
    /// Coefficients `a_low, a_{low+1}, …`.
    pub fn new(center: Rational, low: i32, coeffs: Vec<F>, order: Option<i32>) -> Self {
        let mut s = Self {
            center,
            low,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    pub fn zero(center: Rational) -> Self {
        Self::new(center, 0, Vec::new(), None)
    }

    pub fn one(center: Rational) -> Self {
        Self::constant(center, F::one())
    }

    pub fn constant(center: Rational, c: F) -> Self {
        Self::new(center, 0, vec![c], None)
    }

    /// `c (s − center)^k`.
    pub fn monomial(center: Rational, c: F, k: i32) -> Self {
        Self::new(center, k, vec![c], None)
    }

    /// `a_{−P}, …, a_T` with `T = len − P − 1`.
    pub fn from_pole_data(center: Rational, pole_order: usize, coeffs: Vec<F>) -> Self {
        let order = coeffs.len() as i32 - pole_order as i32 - 1;
        Self::new(center, -(pole_order as i32), coeffs, Some(order))
    }

    fn normalize(&mut self) {
        if let Some(t) = self.order {
            let keep = (t - self.low + 1).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.low += lead as i32;
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn order(&self) -> Option<i32> {
        self.order
    }

    pub fn with_order(mut self, order: i32) -> Self {
        self.order = Some(self.order.map_or(order, |t| t.min(order)));
        self.normalize();
        self
    }

    /// Index of the lowest nonzero coefficient; for a zero series with
    /// truncation `T` this is `T + 1`.
    pub fn valuation(&self) -> Option<i32> {
        if self.coeffs.is_empty() {
            self.order.map(|t| t + 1)
        } else {
            Some(self.low)
        }
    }

    pub fn pole_order(&self) -> usize {
        if self.coeffs.is_empty() {
            0
        } else {
            (-self.low).max(0) as usize
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_k`, refusing orders beyond the truncation.
    pub fn coefficient(&self, k: i32) -> Result<F, SeriesError> {
        if let Some(t) = self.order {
            if k > t {
                return Err(SeriesError::TruncationExceeded {
                    requested: k,
                    order: t,
                });
            }
        }
        let idx = k - self.low;
        Ok(if idx < 0 || idx as usize >= self.coeffs.len() {
            F::zero()
        } else {
            self.coeffs[idx as usize].clone()
        })
    }

    /// `(k, a_k)` for the stored nonzero range.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &F)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (self.low + i as i32, c))
    }

    fn highest_stored(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    fn check_center(&self, other: &Self) -> Result<(), SeriesError> {
        if self.center == other.center {
            Ok(())
        } else {
            Err(SeriesError::CenterMismatch {
                left: format_rational(&self.center),
                right: format_rational(&other.center),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let order = match (self.order, other.order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if self.is_zero() {
            return Ok(other.clone().with_order_opt(order));
        }
        if other.is_zero() {
            return Ok(self.clone().with_order_opt(order));
        }
        let low = self.low.min(other.low);
        let high = self.highest_stored().max(other.highest_stored());
        let coeffs = (low..=high)
            .map(|k| self.stored(k) + other.stored(k))
            .collect();
        Ok(Self::new(self.center.clone(), low, coeffs, order))
    }

    fn with_order_opt(self, order: Option<i32>) -> Self {
        match order {
            Some(t) => self.with_order(t),
            None => self,
        }
    }

    fn stored(&self, k: i32) -> F {
        let idx = k - self.low;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            F::zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let order = match (self.order, other.order) {
            (None, None) => None,
            (Some(t1), None) => other.valuation().map(|v2| t1 + v2),
            (None, Some(t2)) => self.valuation().map(|v1| t2 + v1),
            (Some(t1), Some(t2)) => {
                let v1 = self.valuation().unwrap_or(t1 + 1);
                let v2 = other.valuation().unwrap_or(t2 + 1);
                Some((t1 + v2).min(t2 + v1))
            }
        };
        // an exact zero factor yields an exact zero
        let order = if (self.is_zero() && self.order.is_none())
            || (other.is_zero() && other.order.is_none())
        {
            None
        } else {
            order
        };
        if self.is_zero() || other.is_zero() {
            return Ok(Self::new(self.center.clone(), 0, Vec::new(), order));
        }
        let mut coeffs = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(Self::new(
            self.center.clone(),
            self.low + other.low,
            coeffs,
            order,
        ))
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(
            self.center.clone(),
            self.low,
            self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
            self.order,
        )
    }

    /// Multiplicative inverse. Exact inputs are expanded to
    /// [`DEFAULT_TRUNCATION`] terms beyond the leading one.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let v = self.low;
        let relative = self.order.map_or(DEFAULT_TRUNCATION, |t| t - v);
        let lead = self.coeffs[0].clone();
        let n = relative.max(0) as usize + 1;
        // b_0 = 1/a_0, b_m = -(1/a_0) Σ_{i=1}^{m} a_i b_{m-i}
        let mut b: Vec<F> = Vec::with_capacity(n);
        b.push(F::one() / lead.clone());
        for m in 1..n {
            let mut acc = F::zero();
            for i in 1..=m {
                if i < self.coeffs.len() {
                    acc = acc + self.coeffs[i].clone() * b[m - i].clone();
                }
            }
            b.push(-(acc / lead.clone()));
        }
        Ok(Self::new(self.center.clone(), -v, b, Some(relative - v)))
    }

    /// Rota–Baxter projection onto the polar part `Σ_{k<0} a_k (s − c)^k`.
    pub fn polar_part(&self) -> Self {
        let coeffs = self
            .terms()
            .filter(|(k, _)| *k < 0)
            .map(|(_, c)| c.clone())
            .collect();
        let order = match self.order {
            Some(t) if t < -1 => Some(t),
            _ => None,
        };
        Self::new(self.center.clone(), self.low, coeffs, order)
    }

    /// `(1 − T) f`, the part regular at the center.
    pub fn regular_part(&self) -> Self {
        let terms: Vec<(i32, F)> = self
            .terms()
            .filter(|(k, _)| *k >= 0)
            .map(|(k, c)| (k, c.clone()))
            .collect();
        match terms.first() {
            None => Self::new(self.center.clone(), 0, Vec::new(), self.order),
            Some(&(low, _)) => Self::new(
                self.center.clone(),
                low,
                terms.into_iter().map(|(_, c)| c).collect(),
                self.order,
            ),
        }
    }

    /// Value of a regular series at the center, `a_0`.
    pub fn value_at_center(&self) -> Result<F, SeriesError> {
        self.coefficient(0)
    }

    /// Equality of every coefficient up to the smaller truncation order.
    pub fn agrees_with(&self, other: &Self) -> bool
    where
        F: PartialEq,
    {
        if self.center != other.center {
            return false;
        }
        let limit = match (self.order, other.order) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => {
                return self.low == other.low && self.coeffs == other.coeffs;
            }
        };
        let low = self.low.min(other.low);
        (low..=limit).all(|k| self.stored(k) == other.stored(k))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> LaurentSeries<G> {
        LaurentSeries::new(
            self.center.clone(),
            self.low,
            self.coeffs.iter().map(f).collect(),
            self.order,
        )
    }
}

impl LaurentSeries<Rational> {
    pub fn to_f64(&self) -> LaurentSeries<f64> {
        self.map(to_f64)
    }
}

impl LaurentSeries<f64> {
    /// Coefficientwise agreement within `tol` up to the smaller truncation order.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.center != other.center {
            return false;
        }
        let limit = match (self.order, other.order) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => self.highest_stored().max(other.highest_stored()),
        };
        let low = self.low.min(other.low);
        (low..=limit).all(|k| (self.stored(k) - other.stored(k)).abs() <= tol)
    }
}

/// Panics on mismatched centers; see [`LaurentSeries::try_add`].
impl<F: Field> Add for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;

    fn add(self, rhs: &LaurentSeries<F>) -> LaurentSeries<F> {
        self.try_add(rhs).expect("series centers differ")
    }
}

impl<F: Field> Neg for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;

    fn neg(self) -> LaurentSeries<F> {
        self.scale(&-F::one())
    }
}

impl<F: Field> Sub for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;

    fn sub(self, rhs: &LaurentSeries<F>) -> LaurentSeries<F> {
        self + &(-rhs)
    }
}

/// Panics on mismatched centers; see [`LaurentSeries::try_mul`].
impl<F: Field> Mul for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;

    fn mul(self, rhs: &LaurentSeries<F>) -> LaurentSeries<F> {
        self.try_mul(rhs).expect("series centers differ")
    }
}

impl<F: Field> fmt::Debug for LaurentSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = format_rational(&self.center);
        let parts: Vec<String> = self
            .terms()
            .map(|(k, a)| format!("{a:?}*(s-{c})^{k}"))
            .collect();
        let body = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        match self.order {
            Some(t) => write!(f, "{body} + O((s-{c})^{})", t + 1),
            None => write!(f, "{body}"),
        }
    }
}

/// `{"center": "p/q", "pole_order": n, "coeffs": [...]}`; coefficients may
/// be numbers or rational strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument {
    #[serde(default = "default_center")]
    pub center: String,
    #[serde(default)]
    pub pole_order: usize,
    pub coeffs: Vec<serde_json::Value>,
}

fn default_center() -> String {
    "1".into()
}

fn parse_center(text: &str) -> Result<Rational, SeriesError> {
    parse_rational(text).map_err(|e| SeriesError::Malformed(e.to_string()))
}

impl SeriesDocument {
    pub fn to_rational(&self) -> Result<LaurentSeries<Rational>, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => {
                    parse_rational(s).map_err(|e| SeriesError::Malformed(e.to_string()))
                }
                serde_json::Value::Number(n) if n.is_i64() => {
                    Ok(Rational::from_integer(n.as_i64().unwrap().into()))
                }
                other => Err(SeriesError::Malformed(format!(
                    "{other} is not an exact rational"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LaurentSeries::from_pole_data(
            parse_center(&self.center)?,
            self.pole_order,
            coeffs,
        ))
    }

    pub fn to_f64(&self) -> Result<LaurentSeries<f64>, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => parse_rational(s)
                    .map(|r| to_f64(&r))
                    .map_err(|e| SeriesError::Malformed(e.to_string())),
                serde_json::Value::Number(n) => n
                    .as_f64()
                    .ok_or_else(|| SeriesError::Malformed(format!("{n} is not representable"))),
                other => Err(SeriesError::Malformed(format!("{other} is not a number"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LaurentSeries::from_pole_data(
            parse_center(&self.center)?,
            self.pole_order,
            coeffs,
        ))
    }

    /// Document for an exactly known range `a_{−P}..a_T`.
    pub fn from_rational(s: &LaurentSeries<Rational>) -> Result<Self, SeriesError> {
        let p = s.pole_order() as i32;
        let t = s.order().unwrap_or_else(|| s.highest_stored().max(0));
        let coeffs = (-p..=t)
            .map(|k| {
                s.coefficient(k)
                    .map(|c| serde_json::Value::String(format_rational(&c)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            center: format_rational(s.center()),
            pole_order: p as usize,
            coeffs,
        })
    }

    pub fn from_f64(s: &LaurentSeries<f64>) -> Result<Self, SeriesError> {
        let p = s.pole_order() as i32;
        let t = s.order().unwrap_or_else(|| s.highest_stored().max(0));
        let coeffs = (-p..=t)
            .map(|k| s.coefficient(k).map(|c| serde_json::json!(c)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            center: format_rational(s.center()),
            pole_order: p as usize,
            coeffs,
        })
    }
}
