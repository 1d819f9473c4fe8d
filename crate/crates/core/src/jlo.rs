//! Deformed JLO character `ch_k(sqrt(t) D)` on the model geometries, the
//! higher-commutator supertraces of its small-time expansion, and the local
//! fixed-point formula for its limit.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lefschetz::{self, FixedComponentSpec, LefschetzError};
use crate::quadrature::simplex_rule;
use crate::series::Rational;
use crate::spectral::basis::{inner, Mode, ModeBasis, Scratch, SparseMatrix, SparseVec};
use crate::spectral::{GeometryError, ModelGeometry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JloError {
    #[error("JLO degree k = {0} must be even")]
    OddDegree(usize),
    #[error("need at least one function (f^0)")]
    NoFunctions,
    #[error("heat time must be positive, got {0}")]
    InvalidTime(f64),
    #[error("frequency vector has {got} entries, geometry has {expected} axes")]
    FrequencyArity { expected: usize, got: usize },
    #[error("basis padding {have} is below the {need} needed by the product chain")]
    PaddingInsufficient { need: u32, have: u32 },
    #[error("multi-index has {got} entries for {expected} commutator factors")]
    LambdaArity { expected: usize, got: usize },
    #[error("quadrature error estimate {error:e} exceeds tolerance {tolerance:e}")]
    NonConvergence { error: f64, tolerance: f64 },
    #[error("component `{0}` has no locus to restrict functions to")]
    MissingLocus(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("extrapolation needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample times must be positive and strictly decreasing")]
    TimesNotDecreasing,
    #[error("curve is not monotone: oscillation {oscillation:e} exceeds tolerance {tolerance:e}")]
    NoisyCurve { oscillation: f64, tolerance: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Lefschetz(#[from] LefschetzError),
}

/// Trigonometric polynomial `sum_q c_q e^{i q·x}` on a flat torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FunctionJson", into = "FunctionJson")]
pub struct FunctionSpec {
    terms: BTreeMap<Vec<i32>, Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FunctionJson {
    terms: Vec<FourierTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FourierTerm {
    freq: Vec<i32>,
    /// `[re, im]`
    coeff: Complex64,
}

impl From<FunctionJson> for FunctionSpec {
    fn from(j: FunctionJson) -> Self {
        FunctionSpec::from_terms(j.terms.into_iter().map(|t| (t.freq, t.coeff)))
    }
}

impl From<FunctionSpec> for FunctionJson {
    fn from(f: FunctionSpec) -> Self {
        FunctionJson {
            terms: f
                .terms
                .into_iter()
                .map(|(freq, coeff)| FourierTerm { freq, coeff })
                .collect(),
        }
    }
}

impl FunctionSpec {
    /// Sums coefficients of repeated frequencies and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<i32>, Complex64)>) -> Self {
        let mut map: BTreeMap<Vec<i32>, Complex64> = BTreeMap::new();
        for (q, c) in terms {
            *map.entry(q).or_default() += c;
        }
        map.retain(|_, c| *c != Complex64::default());
        FunctionSpec { terms: map }
    }

    pub fn constant(value: f64, axes: usize) -> Self {
        Self::from_terms([(vec![0; axes], Complex64::new(value, 0.0))])
    }

    /// `e^{i q·x}`
    pub fn plane_wave(q: Vec<i32>) -> Self {
        Self::from_terms([(q, Complex64::new(1.0, 0.0))])
    }

    /// `cos(n x_axis)`
    pub fn cos(axis: usize, n: i32, axes: usize) -> Self {
        let mut q = vec![0; axes];
        q[axis] = n;
        let mut mq = vec![0; axes];
        mq[axis] = -n;
        Self::from_terms([(q, Complex64::new(0.5, 0.0)), (mq, Complex64::new(0.5, 0.0))])
    }

    /// `sin(n x_axis)`
    pub fn sin(axis: usize, n: i32, axes: usize) -> Self {
        let mut q = vec![0; axes];
        q[axis] = n;
        let mut mq = vec![0; axes];
        mq[axis] = -n;
        Self::from_terms([(q, Complex64::new(0.0, -0.5)), (mq, Complex64::new(0.0, 0.5))])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|(p, a)| {
            other.terms.iter().map(move |(q, b)| {
                (p.iter().zip(q).map(|(x, y)| x + y).collect(), a * b)
            })
        }))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(q, c)| (q.clone(), c * s)))
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(q, c)| {
                let phase: f64 = q.iter().zip(x).map(|(&q, &x)| q as f64 * x).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// `∂f/∂x_j` for every axis.
    pub fn grad(&self, x: &[f64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::default(); x.len()];
        for (q, c) in &self.terms {
            let phase: f64 = q.iter().zip(x).map(|(&q, &x)| q as f64 * x).sum();
            let e = c * Complex64::from_polar(1.0, phase) * Complex64::i();
            for (j, &qj) in q.iter().enumerate() {
                g[j] += e * qj as f64;
            }
        }
        g
    }

    /// Largest `|q_j|` over all terms and axes.
    pub fn max_frequency(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|q| q.iter().map(|v| v.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|q| q.iter().all(|&v| v == 0))
    }

    /// Real-valued: `c_{-q} = conj(c_q)`.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(q, c)| {
            let neg: Vec<i32> = q.iter().map(|v| -v).collect();
            let other = self.terms.get(&neg).copied().unwrap_or_default();
            (other - c.conj()).norm() <= 1e-14 * (1.0 + c.norm())
        })
    }

    /// `f∘τ = f` for the involution of `geom`.
    pub fn is_tau_invariant(&self, geom: &ModelGeometry) -> bool {
        self.terms.iter().all(|(q, c)| {
            let r = geom.reflect_frequency(q);
            let other = self.terms.get(&r).copied().unwrap_or_default();
            (other - c).norm() <= 1e-14 * (1.0 + c.norm())
        })
    }

    fn check_arity(&self, axes: usize) -> Result<(), JloError> {
        match self.terms.keys().find(|q| q.len() != axes) {
            Some(q) => Err(JloError::FrequencyArity {
                expected: axes,
                got: q.len(),
            }),
            None => Ok(()),
        }
    }
}

/// Multiplication by `f` on the basis of `geom`; products leaving the basis
/// are dropped.
pub fn multiplication_matrix(geom: &ModelGeometry, f: &FunctionSpec) -> Result<SparseMatrix, JloError> {
    let basis = geom.basis();
    f.check_arity(basis.axes())?;
    let mut m = SparseMatrix::zeros(basis.len());
    for (col, mode) in basis.modes().iter().enumerate() {
        for (q, c) in f.terms() {
            let mut momentum = mode.momentum;
            for (a, qa) in q.iter().enumerate() {
                momentum[a] += 2 * qa;
            }
            let target = Mode {
                momentum,
                spin: mode.spin,
            };
            if let Some(row) = basis.index_of(&target) {
                m.push(row, col, *c);
            }
        }
    }
    Ok(m)
}

/// `[D, M_f] = D M_f - M_f D` on the basis of `geom`.
pub fn commutator_matrix(geom: &ModelGeometry, f: &FunctionSpec) -> Result<SparseMatrix, JloError> {
    let m = multiplication_matrix(geom, f)?;
    let d = geom.dirac();
    Ok(d.mul(&m).sub(&m.mul(d)))
}

/// A geometry at cutoff `K` re-expanded at cutoff `K + padding`, so that
/// chains of multiplications starting inside the `K`-box never leave the
/// basis.
#[derive(Debug, Clone)]
pub struct JloSpace {
    padded: ModelGeometry,
    inner: Vec<usize>,
    cutoff: u32,
    padding: u32,
}

impl JloSpace {
    /// Pads by exactly the sum of the maximal frequencies of `fs`.
    pub fn new(geom: &ModelGeometry, fs: &[FunctionSpec]) -> Result<Self, JloError> {
        Self::with_padding(geom, required_padding(fs), fs)
    }

    pub fn with_padding(geom: &ModelGeometry, padding: u32, fs: &[FunctionSpec]) -> Result<Self, JloError> {
        for f in fs {
            f.check_arity(geom.ambient_dim())?;
        }
        let need = required_padding(fs);
        if padding < need {
            return Err(JloError::PaddingInsufficient { need, have: padding });
        }
        let cutoff = geom.cutoff();
        let padded = geom.with_cutoff(cutoff + padding)?;
        let inner = padded
            .basis()
            .modes()
            .iter()
            .enumerate()
            .filter(|(_, m)| ModeBasis::within(m, cutoff))
            .map(|(i, _)| i)
            .collect();
        Ok(JloSpace {
            padded,
            inner,
            cutoff,
            padding,
        })
    }

    pub fn padded(&self) -> &ModelGeometry {
        &self.padded
    }

    /// Indices (in the padded basis) of the modes inside the original box.
    pub fn inner(&self) -> &[usize] {
        &self.inner
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn padding(&self) -> u32 {
        self.padding
    }
}

pub fn required_padding(fs: &[FunctionSpec]) -> u32 {
    fs.iter().map(FunctionSpec::max_frequency).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss-Legendre nodes per simplex dimension.
    pub nodes: usize,
    /// Largest accepted quadrature error estimate, relative to `max(1, |value|)`.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes: 8,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JloResult {
    pub k: usize,
    pub t: f64,
    pub value: Complex64,
    /// `|Q(n) - Q(ceil(n/2))|` for the simplex rule with `n` nodes.
    pub quadrature_error: f64,
    pub basis_cutoff: u32,
    /// Whether every input function is invariant under the involution. The
    /// computation does not require it.
    pub tau_invariant: bool,
}

/// Operators of one JLO evaluation on the padded basis.
struct Chain {
    f0: SparseMatrix,
    commutators: Vec<SparseMatrix>,
}

impl Chain {
    fn build(space: &JloSpace, fs: &[FunctionSpec]) -> Result<Self, JloError> {
        let geom = space.padded();
        Ok(Chain {
            f0: multiplication_matrix(geom, &fs[0])?,
            commutators: fs[1..]
                .iter()
                .map(|f| commutator_matrix(geom, f))
                .collect::<Result<_, _>>()?,
        })
    }
}

fn heat(v: &mut SparseVec, d2: &[f64], scale: f64) {
    for (i, x) in v.iter_mut() {
        *x *= (-scale * d2[*i]).exp();
    }
}

/// `Tr(τ̃ f^0 e^{-s_1 tD^2} C_1 e^{-(s_2-s_1)tD^2} ... C_k e^{-(1-s_k)tD^2})`
/// over the inner box, one value per simplex node.
fn chain_traces(space: &JloSpace, chain: &Chain, t: f64, nodes: &[Vec<f64>]) -> Vec<Complex64> {
    let geom = space.padded();
    let d2 = geom.d_squared();
    let tau = geom.tau_lift();
    let k = chain.commutators.len();
    let mut scratch = Scratch::new(d2.len());
    let mut out = vec![Complex64::default(); nodes.len()];
    for &i in space.inner() {
        let tau_col = tau.column(i);
        if tau_col.is_empty() {
            continue;
        }
        let start: SparseVec = vec![(i, Complex64::new(1.0, 0.0))];
        // C_k e_i does not depend on the node.
        let first = match chain.commutators.last() {
            Some(c) => c.apply_with(&start, &mut scratch),
            None => start.clone(),
        };
        for (slot, s) in out.iter_mut().zip(nodes) {
            let mut v = first.clone();
            let top = if k == 0 { 1.0 } else { s[k - 1] };
            let lead = (-(1.0 - top) * t * d2[i]).exp();
            for x in v.iter_mut() {
                x.1 *= lead;
            }
            for j in (0..k).rev() {
                if j + 1 < k {
                    heat(&mut v, d2, (s[j + 1] - s[j]) * t);
                    v = chain.commutators[j].apply_with(&v, &mut scratch);
                }
            }
            let s1 = if k == 0 { 1.0 } else { s[0] };
            heat(&mut v, d2, s1 * t);
            let v = chain.f0.apply_with(&v, &mut scratch);
            *slot += inner(tau_col, &v);
        }
    }
    out
}

fn simplex_value(space: &JloSpace, chain: &Chain, t: f64, k: usize, n: usize) -> Complex64 {
    let rule = simplex_rule(k, n);
    let nodes: Vec<Vec<f64>> = rule.iter().map(|r| r.s.clone()).collect();
    let traces = chain_traces(space, chain, t, &nodes);
    rule.iter()
        .zip(traces)
        .map(|(r, v)| v * r.weight)
        .sum::<Complex64>()
        * t.powf(k as f64 / 2.0)
}

/// `ch_k(sqrt(t) D)(f^0, ..., f^k)` with the `τ̃`-graded trace over the
/// cutoff box of `geom`.
pub fn jlo_ch_k(
    geom: &ModelGeometry,
    fs: &[FunctionSpec],
    t: f64,
    quad: QuadratureConfig,
) -> Result<JloResult, JloError> {
    if fs.is_empty() {
        return Err(JloError::NoFunctions);
    }
    let k = fs.len() - 1;
    if !k.is_multiple_of(2) {
        return Err(JloError::OddDegree(k));
    }
    if !(t > 0.0) {
        return Err(JloError::InvalidTime(t));
    }
    let space = JloSpace::new(geom, fs)?;
    let chain = Chain::build(&space, fs)?;
    let value = simplex_value(&space, &chain, t, k, quad.nodes);
    let quadrature_error = if k == 0 {
        0.0
    } else {
        (value - simplex_value(&space, &chain, t, k, quad.nodes.div_ceil(2))).norm()
    };
    let tolerance = quad.tolerance * value.norm().max(1.0);
    if quadrature_error > tolerance {
        return Err(JloError::NonConvergence {
            error: quadrature_error,
            tolerance,
        });
    }
    Ok(JloResult {
        k,
        t,
        value,
        quadrature_error,
        basis_cutoff: geom.cutoff(),
        tau_invariant: fs.iter().all(|f| f.is_tau_invariant(geom)),
    })
}

/// Multi-index `λ(p) = (λ_1, ..., λ_p)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaMulti(pub Vec<u32>);

impl LambdaMulti {
    pub fn p(&self) -> usize {
        self.0.len()
    }

    /// `|λ|`
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&l| l == 0)
    }

    /// `λ! = λ_1! ... λ_p!`
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .map(|&l| (1..=l).map(BigInt::from).product::<BigInt>())
            .product()
    }

    /// `λ̃! = (λ_1 + 1)(λ_1 + λ_2 + 2)...(λ_1 + ... + λ_p + p)`
    pub fn tilde_factorial(&self) -> BigInt {
        let mut partial = 0u64;
        let mut acc = BigInt::one();
        for (j, &l) in self.0.iter().enumerate() {
            partial += l as u64;
            acc *= BigInt::from(partial + j as u64 + 1);
        }
        acc
    }

    /// `(-1)^{|λ|} / (λ! λ̃!)`, the weight of the `λ` term in the small-time
    /// expansion of the JLO character.
    pub fn expansion_coefficient(&self) -> Rational {
        let sign = if self.weight().is_multiple_of(2) { 1 } else { -1 };
        Rational::new(BigInt::from(sign), self.factorial() * self.tilde_factorial())
    }
}

/// `Tr(τ̃ D^λ_t e^{-tD^2})` with
/// `D^λ = f^0 [D,f^1]^{[λ_1]} ... [D,f^p]^{[λ_p]}`,
/// `B^{[l]} = [D^2, B^{[l-1]}]` and `D^λ_t = t^{p/2 + |λ|} D^λ`.
pub fn d_lambda_supertrace(
    geom: &ModelGeometry,
    fs: &[FunctionSpec],
    lambda: &LambdaMulti,
    t: f64,
) -> Result<Complex64, JloError> {
    if fs.is_empty() {
        return Err(JloError::NoFunctions);
    }
    if lambda.p() != fs.len() - 1 {
        return Err(JloError::LambdaArity {
            expected: fs.len() - 1,
            got: lambda.p(),
        });
    }
    if !(t > 0.0) {
        return Err(JloError::InvalidTime(t));
    }
    let space = JloSpace::new(geom, fs)?;
    let mut chain = Chain::build(&space, fs)?;
    let d2 = space.padded().d_squared().to_vec();
    for (c, &l) in chain.commutators.iter_mut().zip(&lambda.0) {
        if l > 0 {
            *c = c.map_entries(|r, col, v| v * (d2[r] - d2[col]).powi(l as i32));
        }
    }
    // All heat factors collapse to e^{-tD^2} on the right: place the whole
    // exponential at the start of the chain.
    let tau = space.padded().tau_lift();
    let mut scratch = Scratch::new(d2.len());
    let mut acc = Complex64::default();
    for &i in space.inner() {
        let tau_col = tau.column(i);
        if tau_col.is_empty() {
            continue;
        }
        let mut v: SparseVec = vec![(i, Complex64::new((-t * d2[i]).exp(), 0.0))];
        for c in chain.commutators.iter().rev() {
            v = c.apply_with(&v, &mut scratch);
        }
        let v = chain.f0.apply_with(&v, &mut scratch);
        acc += inner(tau_col, &v);
    }
    let p = lambda.p() as f64;
    Ok(acc * t.powf(p / 2.0 + lambda.weight() as f64))
}

/// `det` of a small complex matrix by Gaussian elimination.
fn determinant(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))
            .unwrap_or(c);
        if a[pivot][c] == Complex64::default() {
            return Complex64::default();
        }
        if pivot != c {
            a.swap(pivot, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let factor = a[r][c] / a[c][c];
            for j in c..n {
                let sub = factor * a[c][j];
                a[r][j] -= sub;
            }
        }
    }
    det
}

/// `∫_F f^0 df^1 ∧ ... ∧ df^k` over a flat fixed torus with `k = dim F`,
/// by the trapezoid rule on a `grid^k` tensor grid (exact for trigonometric
/// polynomials of degree below `grid`).
pub fn integrate_on_locus(
    component: &FixedComponentSpec,
    fs: &[FunctionSpec],
    grid: usize,
) -> Result<Complex64, JloError> {
    let locus = component
        .locus
        .as_ref()
        .ok_or_else(|| JloError::MissingLocus(component.name.clone()))?;
    let k = fs.len() - 1;
    let axes = component.ambient_dim() as usize;
    for f in fs {
        f.check_arity(axes)?;
    }
    if locus.tangent_axes.len() != k {
        return Err(JloError::Unsupported(format!(
            "component `{}`: locus has {} tangent axes, form degree is {k}",
            component.name,
            locus.tangent_axes.len()
        )));
    }
    let h = 2.0 * PI / grid as f64;
    let mut x = vec![0.0; axes];
    x[locus.normal_axis] = locus.offset;
    let mut idx = vec![0usize; k];
    let mut acc = Complex64::default();
    loop {
        for (j, &a) in locus.tangent_axes.iter().enumerate() {
            x[a] = idx[j] as f64 * h;
        }
        let jac: Vec<Vec<Complex64>> = fs[1..]
            .iter()
            .map(|f| {
                let g = f.grad(&x);
                locus.tangent_axes.iter().map(|&a| g[a]).collect()
            })
            .collect();
        acc += fs[0].eval(&x) * determinant(jac);
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(acc * h.powi(k as i32));
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < grid {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Local formula for `lim_{t→0} ch_k(sqrt(t) D)(f^0, ..., f^k)`:
///
/// `1/(k! (2π sqrt(-1))^{k/2}) sum_q (sqrt(-1))^{m1-mq}/2 ∫_{F_q} f^0 df^1...df^k Â(TF_q) ch∆(N_q)^{-1}`.
///
/// On flat components the class factor is the constant `2^{-mq}`, so only
/// `k = dim F_q` contributes. `k = 0` with constant `f^0` reduces to the
/// Lefschetz contributions.
pub fn limit_rhs(
    components: &[FixedComponentSpec],
    fs: &[FunctionSpec],
    k: usize,
    grid: usize,
) -> Result<Complex64, JloError> {
    if !k.is_multiple_of(2) {
        return Err(JloError::OddDegree(k));
    }
    if fs.len() != k + 1 {
        return Err(JloError::Unsupported(format!(
            "{} functions given for degree {k}",
            fs.len()
        )));
    }
    lefschetz::validate(components)?;
    let m1 = lefschetz::m1(components);
    let mut total = Complex64::default();
    for comp in components {
        let base = lefschetz::component_contribution(comp, m1)?;
        let value = if k == 0 {
            if fs[0].is_constant() {
                fs[0].eval(&vec![0.0; comp.ambient_dim() as usize]) * base
            } else if comp.dim == 0 {
                let locus = comp
                    .locus
                    .as_ref()
                    .ok_or_else(|| JloError::MissingLocus(comp.name.clone()))?;
                let mut x = vec![0.0; comp.ambient_dim() as usize];
                x[locus.normal_axis] = locus.offset;
                fs[0].eval(&x) * base
            } else if comp.flat {
                Complex64::default()
            } else {
                return Err(JloError::Unsupported(format!(
                    "non-constant f^0 on curved component `{}`",
                    comp.name
                )));
            }
        } else if !comp.flat {
            return Err(JloError::Unsupported(format!(
                "k > 0 on curved component `{}`",
                comp.name
            )));
        } else if comp.dim as usize != k {
            Complex64::default()
        } else {
            let sign = lefschetz::phase_sign(m1, comp.m())? * comp.orientation;
            let class = 0.5f64.powi(comp.m() as i32);
            integrate_on_locus(comp, fs, grid)? * (sign as f64 * 0.5 * class)
        };
        total += value;
    }
    let kf: f64 = (1..=k).map(|j| j as f64).product();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    Ok(total / (kf * two_pi_i.powu(k as u32 / 2)))
}

/// Extrapolated `t → 0` value with an error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: Complex64,
    pub error: f64,
}

/// Polynomial (Richardson) extrapolation to `t = 0` in the variable
/// `h = t^exponent`; `exponent = 1/2` matches an `O(sqrt(t))` remainder.
/// The error bar is the change from dropping the largest `t`.
pub fn extrapolate_to_zero(
    samples: &[(f64, Complex64)],
    exponent: f64,
    tolerance: f64,
) -> Result<Extrapolation, JloError> {
    if samples.len() < 3 {
        return Err(JloError::TooFewSamples(samples.len()));
    }
    if samples.iter().any(|(t, _)| !(*t > 0.0)) || samples.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(JloError::TimesNotDecreasing);
    }
    for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
        let v: Vec<f64> = samples.iter().map(|(_, z)| part(*z)).collect();
        let steps: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
        let rising = steps.iter().any(|&d| d > tolerance);
        let falling = steps.iter().any(|&d| d < -tolerance);
        if rising && falling {
            let oscillation = steps.iter().map(|d| d.abs()).fold(0.0, f64::max);
            return Err(JloError::NoisyCurve {
                oscillation,
                tolerance,
            });
        }
    }
    let pts: Vec<(f64, Complex64)> = samples.iter().map(|(t, z)| (t.powf(exponent), *z)).collect();
    let full = neville_at_zero(&pts);
    let reduced = neville_at_zero(&pts[1..]);
    Ok(Extrapolation {
        value: full,
        error: (full - reduced).norm(),
    })
}

fn neville_at_zero(pts: &[(f64, Complex64)]) -> Complex64 {
    let mut p: Vec<Complex64> = pts.iter().map(|(_, z)| *z).collect();
    let n = pts.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (pts[i].0, pts[i + level].0);
            p[i] = p[i + 1] + (p[i + 1] - p[i]) * (hj / (hi - hj));
        }
    }
    p[0]
}

/// Fits `|value| = c t^p` by least squares in log-log coordinates; returns
/// `(c, p)`.
pub fn fit_power_law(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len() as f64;
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|(t, v)| (t.ln(), v.abs().max(f64::MIN_POSITIVE).ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let p = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    ((my - p * mx).exp(), p)
}

/// `f^0 = cos x cos y`, `f^1 = sin x`, `f^2 = sin y` on the 3-torus: a
/// `τ`-invariant triple for the `z`-reflection with non-vanishing limit.
pub fn torus_fixture() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::cos(0, 1, 3).mul(&FunctionSpec::cos(1, 1, 3)),
        FunctionSpec::sin(0, 1, 3),
        FunctionSpec::sin(1, 1, 3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;
    use crate::spectral::{heat_supertrace, GeometryStanza, LiftPhase, SpinStructure::*};

    fn circle(spin: crate::spectral::SpinStructure, k: u32) -> ModelGeometry {
        GeometryStanza::circle(spin, LiftPhase::Plus, k).build().unwrap()
    }

    fn torus(k: u32) -> ModelGeometry {
        GeometryStanza::torus3(2, [Periodic; 3], LiftPhase::Plus, k)
            .build()
            .unwrap()
    }

    #[test]
    fn function_algebra() {
        let s = FunctionSpec::sin(0, 1, 1);
        let c = FunctionSpec::cos(0, 1, 1);
        assert!(s.is_real() && c.is_real());
        assert!(!FunctionSpec::plane_wave(vec![1]).is_real());
        // 2 sin cos = sin 2x
        let prod = s.mul(&c).scale(Complex64::new(2.0, 0.0));
        assert_eq!(prod, FunctionSpec::sin(0, 2, 1));
        let x = [0.7];
        assert!((s.eval(&x).re - 0.7f64.sin()).abs() < 1e-15);
        assert!((s.grad(&x)[0].re - 0.7f64.cos()).abs() < 1e-15);
        assert_eq!(prod.max_frequency(), 2);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<FunctionSpec>(&json).unwrap(), s);
    }

    #[test]
    fn tau_invariance_flags() {
        let g = torus(2);
        assert!(torus_fixture().iter().all(|f| f.is_tau_invariant(&g)));
        assert!(FunctionSpec::cos(2, 1, 3).is_tau_invariant(&g));
        assert!(!FunctionSpec::sin(2, 1, 3).is_tau_invariant(&g));
    }

    #[test]
    fn commutator_of_constant_vanishes() {
        let g = torus(2);
        assert!(commutator_matrix(&g, &FunctionSpec::constant(3.0, 3)).unwrap().is_zero());
    }

    #[test]
    fn circle_commutator_is_symbol_difference() {
        // D = -i d/dθ, [D, e^{iθ}] e_n = e_{n+1}; compare with the derivative
        // of e^{-isD} M e^{isD} at s = 0, which is -i [D, M].
        let g = circle(Periodic, 5);
        let f = FunctionSpec::plane_wave(vec![1]);
        let c = commutator_matrix(&g, &f).unwrap();
        let m = multiplication_matrix(&g, &f).unwrap();
        let basis = g.basis();
        let h = 1e-6;
        for col in 0..basis.len() - 1 {
            let row = col + 1;
            assert_eq!(c.get(row, col), Complex64::new(1.0, 0.0));
            let dk = basis.mode(row).k(0) - basis.mode(col).k(0);
            let conj = |s: f64| Complex64::from_polar(1.0, -s * dk) * m.get(row, col);
            let fd = (conj(h) - conj(-h)) / (2.0 * h);
            assert!((fd - Complex64::new(0.0, -1.0) * c.get(row, col)).norm() < 1e-8);
        }
        assert_eq!(c.nnz(), basis.len() - 1);
    }

    #[test]
    fn leibniz_on_inner_columns() {
        let g = torus(3);
        let f = FunctionSpec::sin(0, 1, 3);
        let h = FunctionSpec::cos(1, 1, 3).mul(&FunctionSpec::cos(2, 1, 3));
        let space = JloSpace::new(&g, &[f.clone(), h.clone()]).unwrap();
        let pg = space.padded();
        let lhs = commutator_matrix(pg, &f.mul(&h)).unwrap();
        let rhs = commutator_matrix(pg, &f)
            .unwrap()
            .mul(&multiplication_matrix(pg, &h).unwrap())
            .add(&multiplication_matrix(pg, &f).unwrap().mul(&commutator_matrix(pg, &h).unwrap()));
        for &i in space.inner() {
            let a = lhs.column(i);
            let b = rhs.column(i);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.0, y.0);
                assert!((x.1 - y.1).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn padding_policy() {
        let g = torus(2);
        let fs = torus_fixture();
        assert_eq!(required_padding(&fs), 3);
        assert_eq!(
            JloSpace::with_padding(&g, 2, &fs).unwrap_err(),
            JloError::PaddingInsufficient { need: 3, have: 2 }
        );
        let space = JloSpace::new(&g, &fs).unwrap();
        assert_eq!(space.inner().len(), g.basis().len());
    }

    #[test]
    fn degree_zero_is_heat_supertrace() {
        for g in [circle(Periodic, 8), circle(Antiperiodic, 8), torus(3)] {
            let one = FunctionSpec::constant(1.0, g.ambient_dim());
            for t in [0.1, 0.5] {
                let r = jlo_ch_k(&g, std::slice::from_ref(&one), t, QuadratureConfig::default()).unwrap();
                assert!((r.value.re - heat_supertrace(&g, t).value).abs() <= 1e-14);
                assert_eq!(r.value.im, 0.0);
                assert_eq!(r.quadrature_error, 0.0);
            }
        }
    }

    #[test]
    fn constant_argument_kills_character() {
        let g = torus(2);
        let mut fs = torus_fixture();
        fs[1] = FunctionSpec::constant(2.0, 3);
        let r = jlo_ch_k(&g, &fs, 0.3, QuadratureConfig::default()).unwrap();
        assert_eq!(r.value, Complex64::default());
        assert!(matches!(
            jlo_ch_k(&g, &fs[..2], 0.3, QuadratureConfig::default()),
            Err(JloError::OddDegree(1))
        ));
    }

    #[test]
    fn quadrature_doubling_within_estimate() {
        let g = torus(3);
        let fs = torus_fixture();
        let q8 = jlo_ch_k(&g, &fs, 0.3, QuadratureConfig::default()).unwrap();
        let q16 = jlo_ch_k(&g, &fs, 0.3, QuadratureConfig { nodes: 16, tolerance: 1e-6 }).unwrap();
        assert!((q8.value - q16.value).norm() <= q8.quadrature_error.max(1e-15));
    }

    #[test]
    fn lambda_combinatorics() {
        let l = LambdaMulti(vec![1, 0]);
        assert_eq!(l.tilde_factorial(), BigInt::from(2 * 3));
        assert_eq!(l.factorial(), BigInt::from(1));
        assert_eq!(l.expansion_coefficient(), rat(-1, 6));
        let l = LambdaMulti(vec![2, 1, 3]);
        // (2+1)(3+2)(6+3)
        assert_eq!(l.tilde_factorial(), BigInt::from(135));
        assert_eq!(l.factorial(), BigInt::from(12));
        assert_eq!(l.expansion_coefficient(), rat(1, 1620));
        assert_eq!(LambdaMulti::default().expansion_coefficient(), rat(1, 1));
        assert_eq!(LambdaMulti(vec![0, 0]).tilde_factorial(), BigInt::from(2));
    }

    #[test]
    fn d_lambda_trivial_cases() {
        let g = circle(Periodic, 6);
        let one = FunctionSpec::constant(1.0, 1);
        let v = d_lambda_supertrace(&g, std::slice::from_ref(&one), &LambdaMulti::default(), 0.2).unwrap();
        assert!((v.re - heat_supertrace(&g, 0.2).value).abs() < 1e-14);
        let v = d_lambda_supertrace(&g, &[one.clone(), one], &LambdaMulti(vec![1]), 0.2).unwrap();
        assert_eq!(v, Complex64::default());
    }

    #[test]
    fn limit_rhs_cases() {
        let g = torus(2);
        let comps = g.fixed_components();
        let one = FunctionSpec::constant(1.0, 3);
        assert_eq!(limit_rhs(comps, std::slice::from_ref(&one), 0, 16).unwrap(), Complex64::default());
        let c = circle(Periodic, 2);
        let r = limit_rhs(c.fixed_components(), &[FunctionSpec::constant(1.0, 1)], 0, 16).unwrap();
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let fs = torus_fixture();
        let rhs = limit_rhs(comps, &fs, 2, 16).unwrap();
        assert!((rhs - Complex64::new(0.0, -PI / 4.0)).norm() < 1e-13, "{rhs}");
        let swapped = [fs[0].clone(), fs[2].clone(), fs[1].clone()];
        assert!((limit_rhs(comps, &swapped, 2, 16).unwrap() + rhs).norm() < 1e-13);
        let same = [fs[0].clone(), fs[1].clone(), fs[1].clone()];
        assert!(limit_rhs(comps, &same, 2, 16).unwrap().norm() < 1e-14);
        let plain = [one, fs[1].clone(), fs[2].clone()];
        assert!(limit_rhs(comps, &plain, 2, 16).unwrap().norm() < 1e-14);
    }

    #[test]
    fn extrapolation_model_curves() {
        let c = Complex64::new(0.3, -1.2);
        let flat: Vec<_> = [0.4, 0.2, 0.1].iter().map(|&t| (t, c)).collect();
        let e = extrapolate_to_zero(&flat, 0.5, 1e-12).unwrap();
        assert_eq!(e.value, c);
        assert_eq!(e.error, 0.0);
        let lin: Vec<_> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&t: &f64| (t, c + Complex64::new(0.7, 0.2) * t.sqrt()))
            .collect();
        let e = extrapolate_to_zero(&lin, 0.5, 1e-12).unwrap();
        assert!((e.value - c).norm() < 1e-12);
        assert!(matches!(extrapolate_to_zero(&lin[..2], 0.5, 1e-12), Err(JloError::TooFewSamples(2))));
        let noisy = vec![
            (0.4, Complex64::new(1.0, 0.0)),
            (0.2, Complex64::new(2.0, 0.0)),
            (0.1, Complex64::new(1.0, 0.0)),
        ];
        assert!(matches!(extrapolate_to_zero(&noisy, 0.5, 1e-3), Err(JloError::NoisyCurve { .. })));
        let rising = vec![(0.1, c), (0.2, c), (0.4, c)];
        assert_eq!(extrapolate_to_zero(&rising, 0.5, 1e-3), Err(JloError::TimesNotDecreasing));
    }

    #[test]
    fn power_law_fit() {
        let pts: Vec<(f64, f64)> = [0.4, 0.2, 0.1].iter().map(|&t: &f64| (t, 3.0 * t.powf(0.75))).collect();
        let (c, p) = fit_power_law(&pts);
        assert!((c - 3.0).abs() < 1e-12 && (p - 0.75).abs() < 1e-12);
    }
}
