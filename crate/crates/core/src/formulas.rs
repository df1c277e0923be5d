//! Closed-form quantities and certified inequality checks.
//!
//! Every check compares exact integers or rationals. Where a side is a power
//! of two with an irrational exponent, both sides are raised to a common
//! power first so the comparison stays exact.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `s(n) = ⌊n/3⌋·⌊(n+1)/3⌋·⌊(n+2)/3⌋`, the largest edge count of a tripartite
/// triple system on `n` vertices.
pub fn s(n: u64) -> u64 {
    (n / 3) * ((n + 1) / 3) * n.div_ceil(3)
}

/// Balanced part sizes `(⌊(n+2)/3⌋, ⌊(n+1)/3⌋, ⌊n/3⌋)`.
pub fn balanced_parts(n: u64) -> (u64, u64, u64) {
    (n.div_ceil(3), (n + 1) / 3, n / 3)
}

/// Binary entropy, with `H(0) = H(1) = 0`.
pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("entropy argument {x} outside [0, 1]")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `n! / (a! b! c!)`.
pub fn multinomial(n: u64, a: u64, b: u64, c: u64) -> Result<BigUint> {
    if a + b + c != n {
        return Err(Error::Domain(format!("{a} + {b} + {c} != {n}")));
    }
    Ok(binomial(n, a) * binomial(n - a, b))
}

/// `exp(-a² / (2pm))`, the lower-tail Chernoff bound for `Binomial(m, p)`.
pub fn chernoff_bound(m: u64, p: f64, a: f64) -> Result<f64> {
    if m == 0 || !(p > 0.0 && p <= 1.0) || a.is_nan() || a <= 0.0 {
        return Err(Error::Domain(format!(
            "chernoff_bound needs m >= 1, 0 < p <= 1, a > 0 (got m={m}, p={p}, a={a})"
        )));
    }
    Ok((-a * a / (2.0 * p * m as f64)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Relation {
    fn eval<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// One instance of a named inequality, decided exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub params: String,
    /// Exact decimal (or `p/q`) rendering of each side as compared.
    pub lhs: String,
    pub rhs: String,
    pub relation: Relation,
    pub holds: bool,
    /// Extra observational quantity, e.g. a ratio for a trend.
    pub note: Option<String>,
}

impl BoundCheck {
    fn new<T: PartialOrd + fmt::Display>(
        name: &str,
        params: String,
        lhs: T,
        relation: Relation,
        rhs: T,
    ) -> BoundCheck {
        let holds = relation.eval(&lhs, &rhs);
        BoundCheck {
            name: name.to_string(),
            params,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            relation,
            holds,
            note: None,
        }
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}]: {} {} {} -> {}",
            self.name,
            self.params,
            self.lhs,
            self.relation.symbol(),
            self.rhs,
            if self.holds { "holds" } else { "fails" }
        )?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// `T(n) < 3^n · 2^{s(n)}`; also notes `T(n) / (multinomial_balanced · 2^{s(n)})`.
pub fn check_t_bounds(n: u64, t_exact: &BigUint) -> BoundCheck {
    let rhs = BigUint::from(3u32).pow(n as u32) * pow2(s(n));
    let mut check = BoundCheck::new(
        "T(n) upper bound",
        format!("n={n}"),
        t_exact.clone(),
        Relation::Lt,
        rhs,
    );
    let (a, b, c) = balanced_parts(n);
    let denom = multinomial(n, a, b, c).unwrap() * pow2(s(n));
    let ratio = BigRational::new(BigInt::from(t_exact.clone()), BigInt::from(denom));
    check.note = Some(format!(
        "T(n)/(multinomial*2^s(n)) = {:.6}",
        ratio.to_f64().unwrap_or(f64::NAN)
    ));
    check
}

/// `T(n-2) < n² · 2^{-2n²/9 + n} · T(n)`, decided by raising both sides to
/// the ninth power: `T(n-2)^9 · 2^{2n² - 9n} < n^18 · T(n)^9`.
pub fn check_t_ratio(n: u64, t_n_minus_2: &BigUint, t_n: &BigUint) -> BoundCheck {
    let e = 2 * (n as i64) * (n as i64) - 9 * n as i64;
    let mut lhs = t_n_minus_2.pow(9);
    let mut rhs = BigUint::from(n).pow(18) * t_n.pow(9);
    if e >= 0 {
        lhs <<= e as u64;
    } else {
        rhs <<= (-e) as u64;
    }
    let mut check = BoundCheck::new(
        "T(n-2)/T(n) bound (9th powers)",
        format!("n={n}"),
        lhs,
        Relation::Lt,
        rhs,
    );
    check.note = Some("asymptotic statement; reported only".into());
    check
}

/// `s(n) - s(n-2) >= 2n²/9 - n` for every `3 <= n <= n_max`.
pub fn check_s_gap(n_max: u64) -> Result<Vec<BoundCheck>> {
    if n_max < 3 {
        return Err(Error::Domain(format!(
            "s-gap sweep needs n_max >= 3, got {n_max}"
        )));
    }
    Ok((3..=n_max)
        .map(|n| {
            let lhs = BigRational::from_integer(BigInt::from(s(n)) - BigInt::from(s(n - 2)));
            let n_big = BigInt::from(n);
            let rhs = BigRational::new(BigInt::from(2) * &n_big * &n_big, BigInt::from(9))
                - BigRational::from_integer(n_big);
            BoundCheck::new("s(n)-s(n-2) gap", format!("n={n}"), lhs, Relation::Ge, rhs)
        })
        .collect())
}

/// `C(n, xn) < 2^{H(x) n}` and `Σ_{i<=xn} C(n, i) < 2^{H(x) n}` for rational
/// `x = num/den` with `0 < x < 1/2` and `xn` integral.
///
/// With `k = xn`, `2^{H(x) n} = n^n / (k^k (n-k)^{n-k})` exactly.
pub fn check_entropy_binomial(n: u64, num: u64, den: u64) -> Result<[BoundCheck; 2]> {
    if den == 0 || num == 0 || 2 * num >= den {
        return Err(Error::Domain(format!("x = {num}/{den} must satisfy 0 < x < 1/2")));
    }
    if !(n * num).is_multiple_of(den) {
        return Err(Error::Domain(format!("x·n = {num}·{n}/{den} is not an integer")));
    }
    let k = n * num / den;
    let scale = BigUint::from(k).pow(k as u32) * BigUint::from(n - k).pow((n - k) as u32);
    let power = BigUint::from(n).pow(n as u32);
    let params = format!("n={n}, x={num}/{den}");

    let single = binomial(n, k) * &scale;
    let mut first = BoundCheck::new(
        "C(n,xn) < 2^(H(x)n)",
        params.clone(),
        single,
        Relation::Lt,
        power.clone(),
    );
    first.note = Some("both sides scaled by k^k (n-k)^(n-k)".into());

    let partial: BigUint = (0..=k).map(|i| binomial(n, i)).sum::<BigUint>() * &scale;
    let mut second = BoundCheck::new(
        "sum_{i<=xn} C(n,i) < 2^(H(x)n)",
        params,
        partial,
        Relation::Lt,
        power,
    );
    second.note = Some("both sides scaled by k^k (n-k)^(n-k)".into());
    Ok([first, second])
}

/// Largest `k < n/2` such that the partial-sum inequality holds for every
/// `1 <= k' <= k` (with `x = k'/n`); the empirical smallness threshold.
pub fn entropy_sum_threshold(n: u64) -> u64 {
    let power = BigUint::from(n).pow(n as u32);
    let mut partial = BigUint::one();
    let mut best = 0;
    for k in 1..n.div_ceil(2) {
        partial += binomial(n, k);
        let scale = BigUint::from(k).pow(k as u32) * BigUint::from(n - k).pow((n - k) as u32);
        if &partial * scale < power {
            best = k;
        } else {
            break;
        }
    }
    best
}

/// `3^n <= 0.6 n² · multinomial(n; balanced)` decided as `5·3^n <= 3n²·M`.
pub fn check_three_pow_vs_multinomial(n: u64) -> BoundCheck {
    let (a, b, c) = balanced_parts(n);
    let m = multinomial(n, a, b, c).unwrap();
    let lhs = BigUint::from(5u32) * BigUint::from(3u32).pow(n as u32);
    let rhs = BigUint::from(3u32) * BigUint::from(n * n) * m;
    let mut check = BoundCheck::new(
        "3^n <= 0.6 n^2 multinomial (x5)",
        format!("n={n}"),
        lhs,
        Relation::Le,
        rhs,
    );
    check.note = Some("both sides multiplied by 5".into());
    check
}

/// Smallest `n0 <= n_max` such that the `0.6 n²` bound holds for all `n0 <= n <= n_max`.
pub fn smallest_three_pow_threshold(n_max: u64) -> Option<u64> {
    let mut n0 = None;
    for n in 1..=n_max {
        if check_three_pow_vs_multinomial(n).holds {
            n0.get_or_insert(n);
        } else {
            n0 = None;
        }
    }
    n0
}
