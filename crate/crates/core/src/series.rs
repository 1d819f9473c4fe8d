//! Truncated power series in commuting formal variables with exact rational
//! coefficients.
//!
//! Every variable carries a positive integer weight. Chern roots have weight 1
//! and Pontryagin classes `p_j` have weight `2j`, so the weighted degree of a
//! monomial is its polynomial degree in the roots. A root is a 2-form, so the
//! differential-form degree of a monomial is twice its weighted degree.
//!
//! Terms are stored sparsely, keyed by exponent vectors listed in the fixed
//! variable order. Nothing in here touches floating point except
//! [`GradedSeries::eval_numeric`], which converts only its final result.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational coefficient. Always normalized with a positive denominator.
pub type Rational = BigRational;

/// Builds `num / den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("variable sets differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,
    #[error("exponential needs a vanishing constant term")]
    NonzeroConstant,
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("degree {degree} exceeds the truncation cap {cap}")]
    DegreeAboveCap { degree: u32, cap: u32 },
    #[error("odd form degree {0} has no component in an even-graded ring")]
    OddFormDegree(u32),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` must have positive weight")]
    ZeroWeight(String),
}

/// A formal variable with its weight (degree counted in roots).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub weight: u32,
}

impl Variable {
    pub fn root(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            weight: 1,
        }
    }

    pub fn weighted(name: impl Into<String>, weight: u32) -> Self {
        Variable {
            name: name.into(),
            weight,
        }
    }
}

/// Exponent vector, one entry per variable in ring order.
pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSeries {
    vars: Vec<Variable>,
    terms: BTreeMap<Exponents, Rational>,
    cap: u32,
}

impl GradedSeries {
    pub fn zero(vars: Vec<Variable>, cap: u32) -> Self {
        GradedSeries {
            vars,
            terms: BTreeMap::new(),
            cap,
        }
    }

    pub fn constant(vars: Vec<Variable>, value: Rational, cap: u32) -> Self {
        let mut s = Self::zero(vars, cap);
        let key = vec![0; s.vars.len()];
        s.insert(key, value);
        s
    }

    pub fn one(vars: Vec<Variable>, cap: u32) -> Self {
        Self::constant(vars, Rational::one(), cap)
    }

    /// Single monomial `coeff * prod vars^exps`; empty if it lies above the cap.
    pub fn monomial(
        vars: Vec<Variable>,
        exps: Exponents,
        coeff: Rational,
        cap: u32,
    ) -> Result<Self, SeriesError> {
        if exps.len() != vars.len() {
            return Err(SeriesError::VariableMismatch {
                left: vars.iter().map(|v| v.name.clone()).collect(),
                right: vec![format!("{} exponents", exps.len())],
            });
        }
        let mut s = Self::zero(vars, cap);
        if s.weighted_degree(&exps) <= cap {
            s.insert(exps, coeff);
        }
        Ok(s)
    }

    /// The series consisting of one variable, `name`.
    pub fn var(vars: Vec<Variable>, name: &str, cap: u32) -> Result<Self, SeriesError> {
        let pos = vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))?;
        let mut exps = vec![0; vars.len()];
        exps[pos] = 1;
        Self::monomial(vars, exps, Rational::one(), cap)
    }

    /// Series from `(exponents, coefficient)` pairs; like terms are summed.
    pub fn from_terms<I>(vars: Vec<Variable>, cap: u32, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        if let Some(v) = vars.iter().find(|v| v.weight == 0) {
            return Err(SeriesError::ZeroWeight(v.name.clone()));
        }
        let mut s = Self::zero(vars, cap);
        for (exps, c) in terms {
            if exps.len() != s.vars.len() {
                return Err(SeriesError::VariableMismatch {
                    left: s.variable_names(),
                    right: vec![format!("{} exponents", exps.len())],
                });
            }
            if s.weighted_degree(&exps) <= cap {
                s.accumulate(exps, c);
            }
        }
        Ok(s)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn weighted_degree(&self, exps: &[u32]) -> u32 {
        exps.iter()
            .zip(&self.vars)
            .map(|(e, v)| e * v.weight)
            .sum()
    }

    /// Largest weighted degree with a nonzero coefficient.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| self.weighted_degree(e)).max()
    }

    fn insert(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, c);
        }
    }

    fn accumulate(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    fn check_vars(&self, other: &Self) -> Result<(), SeriesError> {
        if self.vars != other.vars {
            return Err(SeriesError::VariableMismatch {
                left: self.variable_names(),
                right: other.variable_names(),
            });
        }
        Ok(())
    }

    /// Drops every term above `cap` and lowers the cap.
    pub fn truncate(&self, cap: u32) -> Self {
        let cap = cap.min(self.cap);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| self.weighted_degree(e) <= cap)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        GradedSeries {
            vars: self.vars.clone(),
            terms,
            cap,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_vars(other)?;
        let mut out = self.truncate(other.cap);
        for (e, c) in &other.terms {
            if out.weighted_degree(e) <= out.cap {
                out.accumulate(e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        GradedSeries {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            cap: self.cap,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars.clone(), self.cap);
        }
        GradedSeries {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
            cap: self.cap,
        }
    }

    /// Cauchy product truncated at the smaller of the two caps.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_vars(other)?;
        let cap = self.cap.min(other.cap);
        let mut out = Self::zero(self.vars.clone(), cap);
        for (ea, ca) in &self.terms {
            let da = self.weighted_degree(ea);
            if da > cap {
                continue;
            }
            for (eb, cb) in &other.terms {
                if da + other.weighted_degree(eb) > cap {
                    continue;
                }
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.accumulate(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.vars.clone(), self.cap);
        for _ in 0..n {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Splits into homogeneous components indexed by weighted degree.
    fn homogeneous_parts(&self) -> Vec<Self> {
        let mut parts = vec![Self::zero(self.vars.clone(), self.cap); self.cap as usize + 1];
        for (e, c) in &self.terms {
            let d = self.weighted_degree(e) as usize;
            if d < parts.len() {
                parts[d].terms.insert(e.clone(), c.clone());
            }
        }
        parts
    }

    /// Multiplicative inverse through the cap, by degreewise long division.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let a0 = self.constant_term();
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv_a0 = a0.recip();
        let a = self.homogeneous_parts();
        let mut b: Vec<Self> = Vec::with_capacity(a.len());
        b.push(Self::constant(self.vars.clone(), inv_a0.clone(), self.cap));
        for d in 1..a.len() {
            let mut acc = Self::zero(self.vars.clone(), self.cap);
            for j in 1..=d {
                if a[j].is_zero() || b[d - j].is_zero() {
                    continue;
                }
                acc = acc.add(&a[j].mul(&b[d - j])?)?;
            }
            b.push(acc.scale(&-inv_a0.clone()));
        }
        let mut out = Self::zero(self.vars.clone(), self.cap);
        for part in b {
            for (e, c) in part.terms {
                out.terms.insert(e, c);
            }
        }
        Ok(out)
    }

    /// `exp(self)` for a series with vanishing constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let mut out = Self::one(self.vars.clone(), self.cap);
        let mut term = out.clone();
        // Every variable has weight >= 1, so self^k vanishes once k > cap.
        for k in 1..=self.cap {
            term = term.mul(self)?.scale(&rat(1, k as i64));
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Homogeneous part of weighted degree `d`.
    pub fn extract_degree(&self, d: u32) -> Result<Self, SeriesError> {
        if d > self.cap {
            return Err(SeriesError::DegreeAboveCap {
                degree: d,
                cap: self.cap,
            });
        }
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| self.weighted_degree(e) == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Ok(GradedSeries {
            vars: self.vars.clone(),
            terms,
            cap: self.cap,
        })
    }

    /// Part of differential-form degree `form_degree` (twice the weighted degree).
    pub fn extract_form_degree(&self, form_degree: u32) -> Result<Self, SeriesError> {
        if form_degree % 2 == 1 {
            return Err(SeriesError::OddFormDegree(form_degree));
        }
        self.extract_degree(form_degree / 2)
    }

    /// Exact evaluation at rational points.
    pub fn eval_exact(&self, assignment: &BTreeMap<String, Rational>) -> Result<Rational, SeriesError> {
        let values = self
            .vars
            .iter()
            .map(|v| {
                assignment
                    .get(&v.name)
                    .cloned()
                    .ok_or_else(|| SeriesError::MissingAssignment(v.name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in values.iter().zip(e) {
                term *= num_traits::pow(x.clone(), k as usize);
            }
            total += term;
        }
        Ok(total)
    }

    /// Substitutes real values. Each value is converted to its exact binary
    /// rational, the sum is formed exactly and only the result is rounded.
    pub fn eval_numeric(&self, assignment: &BTreeMap<String, f64>) -> Result<f64, SeriesError> {
        let exact = assignment
            .iter()
            .map(|(k, &v)| {
                Rational::from_float(v)
                    .map(|r| (k.clone(), r))
                    .ok_or_else(|| SeriesError::MissingAssignment(k.clone()))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Ok(rational_to_f64(&self.eval_exact(&exact)?))
    }

    fn monomial_text(&self, exps: &[u32]) -> String {
        let factors: Vec<String> = exps
            .iter()
            .zip(&self.vars)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| {
                if *e == 1 {
                    v.name.clone()
                } else {
                    format!("{}^{}", v.name, e)
                }
            })
            .collect();
        factors.join("*")
    }

    /// Terms in display order: ascending degree, then descending exponent vector.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            self.weighted_degree(a)
                .cmp(&self.weighted_degree(b))
                .then_with(|| b.cmp(a))
        });
        v
    }
}

/// Rounds an exact rational to the nearest representable double.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: scale through a quotient.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        if r.is_negative() {
            -(n.abs() / d)
        } else {
            n / d
        }
    })
}

/// Plain-text dump, one `coefficient monomial` per line; stable for golden files.
impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (e, c) in self.sorted_terms() {
            let mono = self.monomial_text(e);
            if mono.is_empty() {
                writeln!(f, "{c}")?;
            } else {
                writeln!(f, "{c} {mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_ring() -> Vec<Variable> {
        vec![Variable::root("x")]
    }

    fn uni(coeffs: &[(u32, Rational)], cap: u32) -> GradedSeries {
        GradedSeries::from_terms(
            x_ring(),
            cap,
            coeffs.iter().map(|(e, c)| (vec![*e], c.clone())),
        )
        .unwrap()
    }

    #[test]
    fn additive_cancellation() {
        let a = uni(&[(0, rat(1, 1)), (2, rat(1, 1))], 4);
        let b = uni(&[(2, rat(-1, 1))], 4);
        assert_eq!(a.add(&b).unwrap(), GradedSeries::one(x_ring(), 4));

        let zero = GradedSeries::zero(x_ring(), 4);
        assert_eq!(a.add(&zero).unwrap(), a);

        let c = uni(&[(0, rat(1, 1)), (2, rat(-1, 24))], 4);
        let d = uni(&[(2, rat(1, 24))], 4);
        assert_eq!(c.add(&d).unwrap(), GradedSeries::one(x_ring(), 4));
    }

    #[test]
    fn add_takes_smaller_cap() {
        let a = uni(&[(0, rat(1, 1)), (4, rat(3, 1))], 4);
        let b = uni(&[(1, rat(1, 1))], 2);
        let s = a.add(&b).unwrap();
        assert_eq!(s.cap(), 2);
        assert_eq!(s, uni(&[(0, rat(1, 1)), (1, rat(1, 1))], 2));
    }

    #[test]
    fn mismatched_variables_rejected() {
        let a = GradedSeries::one(x_ring(), 2);
        let b = GradedSeries::one(vec![Variable::root("y")], 2);
        assert!(matches!(a.add(&b), Err(SeriesError::VariableMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(SeriesError::VariableMismatch { .. })));
    }

    #[test]
    fn product_and_truncation() {
        let p = uni(&[(0, rat(1, 1)), (2, rat(1, 1))], 4);
        let m = uni(&[(0, rat(1, 1)), (2, rat(-1, 1))], 4);
        assert_eq!(p.mul(&m).unwrap(), uni(&[(0, rat(1, 1)), (4, rat(-1, 1))], 4));
        assert_eq!(
            p.truncate(2).mul(&m.truncate(2)).unwrap(),
            GradedSeries::one(x_ring(), 2)
        );
    }

    #[test]
    fn inverse_examples() {
        let a = uni(&[(0, rat(1, 1)), (2, rat(1, 1))], 4);
        assert_eq!(
            a.invert().unwrap(),
            uni(&[(0, rat(1, 1)), (2, rat(-1, 1)), (4, rat(1, 1))], 4)
        );
        let two = GradedSeries::constant(x_ring(), rat(2, 1), 4);
        assert_eq!(two.invert().unwrap(), GradedSeries::constant(x_ring(), rat(1, 2), 4));
        assert_eq!(
            GradedSeries::zero(x_ring(), 3).invert(),
            Err(SeriesError::NotInvertible)
        );
    }

    #[test]
    fn inverse_of_two_cosh_half() {
        // Long-division oracle: b0 = 1/2, 2 b2 + b0/4 = 0, 2 b4 + b2/4 + b0/192 = 0.
        let b0 = rat(1, 2);
        let b2 = -(b0.clone() * rat(1, 4)) / rat(2, 1);
        let b4 = -(b2.clone() * rat(1, 4) + b0.clone() * rat(1, 192)) / rat(2, 1);
        assert_eq!(b2, rat(-1, 16));
        assert_eq!(b4, rat(5, 768));

        let a = uni(&[(0, rat(2, 1)), (2, rat(1, 4)), (4, rat(1, 192))], 4);
        let inv = a.invert().unwrap();
        assert_eq!(inv, uni(&[(0, b0), (2, b2), (4, b4)], 4));
        assert_eq!(a.mul(&inv).unwrap(), GradedSeries::one(x_ring(), 4));
    }

    #[test]
    fn exponential_examples() {
        let zero = GradedSeries::zero(x_ring(), 4);
        assert_eq!(zero.exp().unwrap(), GradedSeries::one(x_ring(), 4));

        let half = uni(&[(1, rat(1, 2))], 4);
        let plus = half.exp().unwrap();
        let minus = half.neg().exp().unwrap();
        // Oracle: sum_k (+-1/2)^k / k! term by term.
        let mut fact = rat(1, 1);
        let mut expected_plus = Vec::new();
        for k in 0..=4u32 {
            if k > 0 {
                fact *= rat(k as i64, 1);
            }
            let c = num_traits::pow(rat(1, 2), k as usize) / fact.clone();
            expected_plus.push((k, c));
        }
        assert_eq!(plus, uni(&expected_plus, 4));
        assert_eq!(
            plus.add(&minus).unwrap(),
            uni(&[(0, rat(2, 1)), (2, rat(1, 4)), (4, rat(1, 192))], 4)
        );
        assert_eq!(plus.mul(&minus).unwrap(), GradedSeries::one(x_ring(), 4));
        assert_eq!(
            GradedSeries::one(x_ring(), 4).exp(),
            Err(SeriesError::NonzeroConstant)
        );
    }

    #[test]
    fn degree_extraction() {
        let s = uni(&[(0, rat(1, 1)), (2, rat(1, 1)), (4, rat(1, 1))], 4);
        assert_eq!(s.extract_degree(4).unwrap(), uni(&[(4, rat(1, 1))], 4));
        assert_eq!(s.extract_degree(0).unwrap(), uni(&[(0, rat(1, 1))], 4));
        assert!(matches!(
            s.extract_degree(6),
            Err(SeriesError::DegreeAboveCap { .. })
        ));
        assert_eq!(s.extract_form_degree(3), Err(SeriesError::OddFormDegree(3)));
        assert_eq!(s.extract_form_degree(8).unwrap(), uni(&[(4, rat(1, 1))], 4));
    }

    #[test]
    fn numeric_evaluation() {
        let s = uni(&[(0, rat(1, 1)), (2, rat(1, 1))], 4);
        let at = |x: f64| BTreeMap::from([("x".to_string(), x)]);
        assert_eq!(s.eval_numeric(&at(0.0)).unwrap(), 1.0);
        assert_eq!(uni(&[(4, rat(1, 1))], 4).eval_numeric(&at(2.0)).unwrap(), 16.0);
        assert_eq!(
            s.eval_numeric(&BTreeMap::new()),
            Err(SeriesError::MissingAssignment("x".into()))
        );
    }

    #[test]
    fn display_is_sorted() {
        let vars = vec![Variable::root("u1"), Variable::root("v1")];
        let s = GradedSeries::from_terms(
            vars,
            4,
            vec![
                (vec![0, 2], rat(-1, 16)),
                (vec![0, 0], rat(1, 2)),
                (vec![2, 0], rat(-1, 48)),
            ],
        )
        .unwrap();
        assert_eq!(s.to_string(), "1/2\n-1/48 u1^2\n-1/16 v1^2\n");
    }
}
