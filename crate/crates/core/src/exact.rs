//! Exact and floating-point evaluation of `g_{n,k} = (n!/k!)·[xⁿ] C(x)^k`,
//! the number of labelled structures on `n` vertices with `k` components.

use std::fmt;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::powerseries::{self, Coefficient, SeriesExact};
use crate::species::ConnectedClass;

/// Arbitrary-precision non-negative count; serialized as a decimal string.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(Integer);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(Integer::new())
    }

    pub fn as_integer(&self) -> &Integer {
        &self.0
    }

    pub fn into_inner(self) -> Integer {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// Natural logarithm (`-∞` for zero).
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.0.significant_bits().max(64) + 64;
        Float::with_val(bits, &self.0).ln().to_f64()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v = Integer::from_str_radix(s.trim(), 10)
            .map_err(|e| Error::Parse(format!("not a decimal integer: {s:?} ({e})")))?;
        Ok(BigCount(v))
    }
}

impl From<Integer> for BigCount {
    fn from(v: Integer) -> Self {
        BigCount(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(Integer::from(v))
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BigCount::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn check_args(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(())
}

/// `(n!/k!)·c` as an integer, or a model violation if it is not integral.
fn scale_to_count(c: &Rational, n: usize, k: usize) -> Result<BigCount> {
    let ratio = Integer::from(Integer::factorial(n as u32)) / Integer::from(Integer::factorial(k as u32));
    let v = Rational::from(c * &ratio);
    if *v.denom() != 1 {
        return Err(Error::ModelViolation(format!(
            "g_{{{n},{k}}} = {v} is not an integer"
        )));
    }
    Ok(BigCount(v.into_numer_denom().0))
}

/// `g_{n,k}` exactly. Zero when `k > n`.
pub fn count(class: &ConnectedClass, n: usize, k: usize) -> Result<BigCount> {
    check_args(n, k)?;
    if k > n {
        return Ok(BigCount::zero());
    }
    let c = class.egf_exact(n)?;
    let ck = powerseries::pow(&c, k as u64, n);
    scale_to_count(&ck.coeffs()[n], n, k)
}

/// `ln g_{n,k}` from floating-point series arithmetic at `prec` bits.
pub fn count_log(class: &ConnectedClass, n: usize, k: usize, prec: u32) -> Result<f64> {
    check_args(n, k)?;
    if k > n {
        return Ok(f64::NEG_INFINITY);
    }
    let c = class.egf_float(n, prec)?;
    let ck = powerseries::pow(&c, k as u64, n);
    let v = &ck.coeffs()[n];
    if v.is_zero() || v.is_negative() {
        // k - 1 singletons plus one component of size n - k + 1 is a witness
        let counts = class.coefficients(n - k + 1)?;
        if !counts.last().map_or(true, BigCount::is_zero) {
            return Err(Error::Precision(format!(
                "g_{{{n},{k}}} underflowed at {prec} bits"
            )));
        }
        return Ok(f64::NEG_INFINITY);
    }
    let mut l = Float::with_val(prec, v.ln_ref());
    l += Float::with_val(prec, n as u32 + 1).ln_gamma();
    l -= Float::with_val(prec, k as u32 + 1).ln_gamma();
    Ok(l.to_f64())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub k: usize,
    pub count: BigCount,
    pub log_count: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountTable {
    pub n: usize,
    pub rows: Vec<CountRow>,
}

/// `g_{n,k}` for every `k` in `k_lo..=k_hi`, by successive multiplication.
pub fn count_table(class: &ConnectedClass, n: usize, k_lo: usize, k_hi: usize) -> Result<CountTable> {
    check_args(n, k_lo)?;
    if k_hi < k_lo {
        return Err(Error::Domain(format!("empty k range {k_lo}..={k_hi}")));
    }
    let c = class.egf_exact(n)?;
    let mut ck: SeriesExact = powerseries::pow(&c, k_lo as u64, n);
    let mut rows = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        if k > k_lo {
            ck = powerseries::mul(&ck, &c, n);
        }
        let count = if k > n {
            BigCount::zero()
        } else {
            scale_to_count(&ck.coeffs()[n], n, k)?
        };
        let log_count = count.ln();
        rows.push(CountRow { k, count, log_count });
    }
    Ok(CountTable { n, rows })
}

/// `ln(n!)` in double precision.
pub fn ln_factorial(n: u64) -> f64 {
    crate::asymptotics::ln_gamma(n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::{builtin, from_json_str};
    use rug::ops::Pow;

    fn stirling2(n: usize, k: usize) -> Integer {
        let mut t = vec![vec![Integer::new(); k + 1]; n + 1];
        t[0][0] = Integer::from(1);
        for i in 1..=n {
            for j in 1..=k.min(i) {
                t[i][j] = Integer::from(&t[i - 1][j] * j as u32) + &t[i - 1][j - 1];
            }
        }
        t[n][k].clone()
    }

    #[test]
    fn forests_closed_form() {
        let trees = builtin("trees").unwrap();
        assert_eq!(count(&trees, 5, 1).unwrap(), BigCount::from(125u64));
        assert_eq!(count(&trees, 4, 2).unwrap(), BigCount::from(15u64));
        assert_eq!(count(&trees, 4, 4).unwrap(), BigCount::from(1u64));
        assert_eq!(count(&trees, 4, 5).unwrap(), BigCount::zero());
        assert_eq!(count(&trees, 3, 2).unwrap(), BigCount::from(3u64));
    }

    #[test]
    fn singletons_give_stirling_numbers() {
        // all connected structures of every size counted once: C = e^x − 1
        let doc = r#"{"name":"sets","coefficients":["1","1","1","1","1","1","1","1"]}"#;
        let sets = from_json_str(doc).unwrap();
        for k in 1..=8 {
            assert_eq!(count(&sets, 8, k).unwrap().into_inner(), stirling2(8, k));
        }
    }

    #[test]
    fn table_matches_pointwise() {
        let cacti = builtin("cacti").unwrap();
        let t = count_table(&cacti, 9, 1, 10).unwrap();
        for row in &t.rows {
            assert_eq!(row.count, count(&cacti, 9, row.k).unwrap());
        }
        assert!(t.rows.last().unwrap().count.is_zero());
    }

    #[test]
    fn float_log_agrees_with_exact() {
        let husimi = builtin("husimi").unwrap();
        for k in [1, 5, 12, 30] {
            let exact = count(&husimi, 30, k).unwrap().ln();
            let approx = count_log(&husimi, 30, k, 128).unwrap();
            assert!((exact - approx).abs() < 1e-12, "k = {k}: {exact} vs {approx}");
        }
    }

    #[test]
    fn bad_arguments() {
        let trees = builtin("trees").unwrap();
        assert!(matches!(count(&trees, 5, 0), Err(Error::Domain(_))));
        assert!(matches!(count(&trees, 0, 1), Err(Error::Domain(_))));
        assert!(count_table(&trees, 5, 3, 2).is_err());
    }

    #[test]
    fn bigcount_serde_round_trip() {
        let v = BigCount::from(Integer::from(10).pow(40));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "\"10000000000000000000000000000000000000000\"");
        let back: BigCount = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<BigCount>("\"12a\"").is_err());
    }
}
