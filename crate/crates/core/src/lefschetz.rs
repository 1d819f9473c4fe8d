//! Fixed-point index of an orientation-reversing involution on an odd
//! dimensional spin manifold:
//!
//! `ind D+ = 1/2 sum_q (sqrt(-1))^{m1 - mq} ∫_{F_q} Â(TF_q) [ch∆(N_q)]^{-1}`
//!
//! Each component supplies its characteristic numbers; the class side is
//! evaluated exactly and only converted to floating point in the report.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charclass::{self, parse_pontryagin_key, pontryagin_key, pontryagin_monomials, RootSet};
use crate::series::{rat, rational_to_f64, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LefschetzError {
    #[error("Empty: no fixed components supplied; a fixed-point-free involution is outside the formula")]
    Empty,
    #[error("CodimParity: component `{name}` has even codimension {codim}")]
    CodimParity { name: String, codim: u32 },
    #[error("DimParity: component `{name}` has odd dimension {dim}")]
    DimParity { name: String, dim: u32 },
    #[error("CodimMod4Mismatch: `{a}` (codim {codim_a}) and `{b}` (codim {codim_b}) differ mod 4")]
    CodimMod4Mismatch {
        a: String,
        b: String,
        codim_a: u32,
        codim_b: u32,
    },
    #[error("AmbientMismatch: `{a}` sits in dimension {dim_a} but `{b}` in dimension {dim_b}")]
    AmbientMismatch {
        a: String,
        b: String,
        dim_a: u32,
        dim_b: u32,
    },
    #[error("OrientationSign: component `{name}` has orientation {sign}, expected +1 or -1")]
    OrientationSign { name: String, sign: i32 },
    #[error("odd phase exponent m1 - mq = {0}; validate the component list first")]
    OddPhase(i64),
    #[error("component `{name}` lacks the characteristic number of `{monomial}`")]
    MissingCharNumber { name: String, monomial: String },
    #[error("component `{name}`: `{monomial}` is not a monomial of degree {dim}")]
    BadMonomial {
        name: String,
        monomial: String,
        dim: u32,
    },
    #[error(transparent)]
    CharClass(#[from] charclass::CharClassError),
}

/// Exact rational that deserializes from a JSON integer, float, or `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "String")]
pub struct ExactValue(pub Rational);

impl TryFrom<serde_json::Value> for ExactValue {
    type Error = String;

    fn try_from(v: serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(ExactValue(rat(i, 1)))
                } else {
                    let f = n.as_f64().ok_or("unrepresentable number")?;
                    Rational::from_float(f)
                        .map(ExactValue)
                        .ok_or_else(|| format!("non-finite value {f}"))
                }
            }
            serde_json::Value::String(s) => s
                .trim()
                .parse::<Rational>()
                .map(ExactValue)
                .map_err(|e| format!("bad rational `{s}`: {e}")),
            other => Err(format!("expected a number or \"p/q\" string, got {other}")),
        }
    }
}

impl From<ExactValue> for String {
    fn from(v: ExactValue) -> String {
        v.0.to_string()
    }
}

/// Where a fixed component sits inside a flat model torus `[0, 2π)^d`: the
/// hyperplane `x[normal_axis] = offset`, with tangent coordinates listed in
/// the order that defines its orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Locus {
    pub normal_axis: usize,
    pub offset: f64,
    pub tangent_axes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedComponentSpec {
    pub name: String,
    /// Dimension `2n'`.
    pub dim: u32,
    /// Codimension `2m + 1`.
    pub codim: u32,
    /// Orientation sign of the component, `+1` or `-1`.
    pub orientation: i32,
    /// Characteristic numbers keyed by Pontryagin monomial of degree `dim`,
    /// e.g. `"p1(T)"` or `"p1(T)*p1(N)"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub char_numbers: BTreeMap<String, ExactValue>,
    /// All positive-degree characteristic numbers vanish.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flat: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<Locus>,
}

impl FixedComponentSpec {
    /// An isolated fixed point of a codimension-`codim` component.
    pub fn point(name: impl Into<String>, codim: u32, orientation: i32) -> Self {
        FixedComponentSpec {
            name: name.into(),
            dim: 0,
            codim,
            orientation,
            char_numbers: BTreeMap::new(),
            flat: true,
            locus: None,
        }
    }

    pub fn flat(name: impl Into<String>, dim: u32, codim: u32, orientation: i32) -> Self {
        FixedComponentSpec {
            dim,
            ..Self::point(name, codim, orientation)
        }
    }

    pub fn with_char_number(mut self, monomial: &str, value: Rational) -> Self {
        self.flat = false;
        self.char_numbers.insert(monomial.to_string(), ExactValue(value));
        self
    }

    pub fn with_locus(mut self, locus: Locus) -> Self {
        self.locus = Some(locus);
        self
    }

    /// `m` in `codim = 2m + 1`.
    pub fn m(&self) -> u32 {
        self.codim.saturating_sub(1) / 2
    }

    pub fn ambient_dim(&self) -> u32 {
        self.dim + self.codim
    }

    pub fn roots(&self) -> RootSet {
        RootSet::for_component(self.dim, self.codim)
    }

    /// Value of `∫_F` on every Pontryagin monomial of top degree.
    pub fn pairing(&self) -> Result<BTreeMap<String, Rational>, LefschetzError> {
        let roots = self.roots();
        let top = self.dim / 2;
        let mut out = BTreeMap::new();
        if self.dim == 0 {
            // ∫ over a point of the constant class.
            let v = self
                .char_numbers
                .get("1")
                .map(|v| v.0.clone())
                .unwrap_or_else(Rational::one);
            out.insert("1".to_string(), v);
        } else {
            for e in pontryagin_monomials(&roots, top) {
                out.insert(pontryagin_key(&roots, &e), Rational::zero());
            }
        }
        if self.flat {
            return Ok(out);
        }
        let mut seen = 0;
        for (key, value) in &self.char_numbers {
            let exps = parse_pontryagin_key(&roots, key).ok_or_else(|| LefschetzError::BadMonomial {
                name: self.name.clone(),
                monomial: key.clone(),
                dim: self.dim,
            })?;
            let canonical = pontryagin_key(&roots, &exps);
            match out.get_mut(&canonical) {
                Some(slot) => {
                    *slot = value.0.clone();
                    seen += 1;
                }
                None => {
                    return Err(LefschetzError::BadMonomial {
                        name: self.name.clone(),
                        monomial: key.clone(),
                        dim: self.dim,
                    })
                }
            }
        }
        if self.dim > 0 && seen < out.len() {
            let missing = out
                .keys()
                .find(|k| {
                    !self.char_numbers.keys().any(|c| {
                        parse_pontryagin_key(&roots, c).map(|e| pontryagin_key(&roots, &e))
                            == Some((*k).clone())
                    })
                })
                .cloned()
                .unwrap_or_default();
            return Err(LefschetzError::MissingCharNumber {
                name: self.name.clone(),
                monomial: missing,
            });
        }
        Ok(out)
    }
}

/// Checks odd codimensions, the mod-4 congruence and a common odd ambient dimension.
pub fn validate(components: &[FixedComponentSpec]) -> Result<(), LefschetzError> {
    let first = components.first().ok_or(LefschetzError::Empty)?;
    for c in components {
        if c.codim % 2 == 0 {
            return Err(LefschetzError::CodimParity {
                name: c.name.clone(),
                codim: c.codim,
            });
        }
        if c.dim % 2 == 1 {
            return Err(LefschetzError::DimParity {
                name: c.name.clone(),
                dim: c.dim,
            });
        }
        if c.orientation != 1 && c.orientation != -1 {
            return Err(LefschetzError::OrientationSign {
                name: c.name.clone(),
                sign: c.orientation,
            });
        }
    }
    for (i, a) in components.iter().enumerate() {
        for b in &components[i + 1..] {
            if a.codim % 4 != b.codim % 4 {
                return Err(LefschetzError::CodimMod4Mismatch {
                    a: a.name.clone(),
                    b: b.name.clone(),
                    codim_a: a.codim,
                    codim_b: b.codim,
                });
            }
        }
    }
    for c in &components[1..] {
        if c.ambient_dim() != first.ambient_dim() {
            return Err(LefschetzError::AmbientMismatch {
                a: first.name.clone(),
                b: c.name.clone(),
                dim_a: first.ambient_dim(),
                dim_b: c.ambient_dim(),
            });
        }
    }
    Ok(())
}

/// `m1`: the largest `m` among the components.
pub fn m1(components: &[FixedComponentSpec]) -> u32 {
    components.iter().map(|c| c.m()).max().unwrap_or(0)
}

/// `(-1)^{(m1 - mq)/2}`, the real value of `(sqrt(-1))^{m1 - mq}`.
pub fn phase_sign(m1: u32, mq: u32) -> Result<i32, LefschetzError> {
    let diff = m1 as i64 - mq as i64;
    if diff % 2 != 0 {
        return Err(LefschetzError::OddPhase(diff));
    }
    Ok(if (diff / 2).rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `⟨[Â(TF)ch∆(N)^{-1}]_top, [F]⟩` without the phase, sign or 1/2.
pub fn characteristic_integral(spec: &FixedComponentSpec) -> Result<Rational, LefschetzError> {
    let roots = spec.roots();
    let top = charclass::density_top_form(&roots, spec.dim / 2)?;
    let pairing = spec.pairing()?;
    let mut total = Rational::zero();
    for (key, coeff) in &top {
        let value = pairing.get(key).ok_or_else(|| LefschetzError::MissingCharNumber {
            name: spec.name.clone(),
            monomial: key.clone(),
        })?;
        total += coeff * value;
    }
    Ok(total)
}

/// Exact contribution of one component.
pub fn component_contribution_exact(
    spec: &FixedComponentSpec,
    m1: u32,
) -> Result<Rational, LefschetzError> {
    let sign = phase_sign(m1, spec.m())? * spec.orientation;
    Ok(characteristic_integral(spec)? * rat(sign as i64, 2))
}

pub fn component_contribution(spec: &FixedComponentSpec, m1: u32) -> Result<f64, LefschetzError> {
    component_contribution_exact(spec, m1).map(|r| rational_to_f64(&r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub name: String,
    pub m: u32,
    pub value: f64,
    /// Exact value as `p/q`.
    pub exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LefschetzReport {
    pub contributions: Vec<Contribution>,
    pub total: f64,
    pub total_exact: String,
    pub m1: u32,
    pub notes: Vec<String>,
}

impl LefschetzReport {
    /// Report under the grading re-based on a component with `m = m_i`.
    pub fn rebase(&self, m_i: u32) -> Result<LefschetzReport, LefschetzError> {
        let exponent = grading_dependence(m_i, self.m1)?;
        let sign = if exponent == 0 { 1 } else { -1 };
        let flip = |s: &str| -> String {
            let r: Rational = s.parse().expect("report holds exact rationals");
            (r * rat(sign, 1)).to_string()
        };
        let contributions = self
            .contributions
            .iter()
            .map(|c| Contribution {
                name: c.name.clone(),
                m: c.m,
                value: c.value * sign as f64,
                exact: flip(&c.exact),
            })
            .collect();
        let mut notes = self.notes.clone();
        notes.push(format!(
            "grading re-based from m1 = {} to m = {m_i}: factor (sqrt(-1))^{exponent}",
            self.m1
        ));
        Ok(LefschetzReport {
            contributions,
            total: self.total * sign as f64,
            total_exact: flip(&self.total_exact),
            m1: self.m1,
            notes,
        })
    }
}

/// Power of `sqrt(-1)` (mod 4) relating the index computed with the grading
/// fixed by `m1` to the one fixed by `m_i`. Always 0 or 2.
pub fn grading_dependence(m_i: u32, m_1: u32) -> Result<u32, LefschetzError> {
    let diff = m_i as i64 - m_1 as i64;
    if diff % 2 != 0 {
        return Err(LefschetzError::OddPhase(diff));
    }
    Ok(diff.rem_euclid(4) as u32)
}

pub fn index(components: &[FixedComponentSpec]) -> Result<LefschetzReport, LefschetzError> {
    validate(components)?;
    let m1 = m1(components);
    let mut total = Rational::zero();
    let mut contributions = Vec::with_capacity(components.len());
    for c in components {
        let v = component_contribution_exact(c, m1)?;
        total += &v;
        contributions.push(Contribution {
            name: c.name.clone(),
            m: c.m(),
            value: rational_to_f64(&v),
            exact: v.to_string(),
        });
    }
    let mut notes = vec![format!("m1 = {m1} (largest m over {} components)", components.len())];
    if !total.is_integer() {
        notes.push("total is not an integer".to_string());
    }
    Ok(LefschetzReport {
        contributions,
        total: rational_to_f64(&total),
        total_exact: total.to_string(),
        m1,
        notes,
    })
}
