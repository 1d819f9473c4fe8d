//! Â-genus and ch∆ series in Chern roots, and the change of presentation
//! from roots to Pontryagin classes.
//!
//! Roots are the 2π-normalized ("starred") Chern roots: `u1..un'` for the
//! tangent bundle of a fixed component and `v1..vm` for its normal bundle. The
//! one unpaired normal direction of an odd-codimension component has no root.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::{rat, Exponents, GradedSeries, Rational, SeriesError, Variable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharClassError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("series is not even in root `{0}`")]
    NotEven(String),
    #[error("series is not symmetric under exchanging `{0}` and `{1}`")]
    NotSymmetric(String, String),
    #[error("series ring does not match the root set")]
    RingMismatch,
}

/// Which bundle a root (or Pontryagin class) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bundle {
    Tangent,
    Normal,
}

impl Bundle {
    pub fn tag(self) -> &'static str {
        match self {
            Bundle::Tangent => "T",
            Bundle::Normal => "N",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSet {
    tangent: Vec<String>,
    normal: Vec<String>,
}

impl RootSet {
    /// Roots `u1..u{n_tangent}` and `v1..v{m_normal}`.
    pub fn new(n_tangent: usize, m_normal: usize) -> Self {
        RootSet {
            tangent: (1..=n_tangent).map(|i| format!("u{i}")).collect(),
            normal: (1..=m_normal).map(|i| format!("v{i}")).collect(),
        }
    }

    /// Root set of a fixed component of dimension `dim_f` and codimension
    /// `2m + 1`.
    pub fn for_component(dim_f: u32, codim: u32) -> Self {
        Self::new((dim_f / 2) as usize, (codim.saturating_sub(1) / 2) as usize)
    }

    pub fn n_tangent(&self) -> usize {
        self.tangent.len()
    }

    pub fn m_normal(&self) -> usize {
        self.normal.len()
    }

    pub fn tangent_names(&self) -> &[String] {
        &self.tangent
    }

    pub fn normal_names(&self) -> &[String] {
        &self.normal
    }

    /// Ring variables: tangent roots first, then normal roots.
    pub fn variables(&self) -> Vec<Variable> {
        self.tangent
            .iter()
            .chain(&self.normal)
            .map(Variable::root)
            .collect()
    }

    /// Pontryagin ring: `p1(T)..p{n'}(T)`, then `p1(N)..p{m}(N)`; `p_j` has weight `2j`.
    pub fn pontryagin_variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        for j in 1..=self.n_tangent() {
            out.push(Variable::weighted(pontryagin_name(j, Bundle::Tangent), 2 * j as u32));
        }
        for j in 1..=self.m_normal() {
            out.push(Variable::weighted(pontryagin_name(j, Bundle::Normal), 2 * j as u32));
        }
        out
    }

    /// Index ranges of the two root groups inside `variables()`.
    fn groups(&self) -> [(Bundle, std::ops::Range<usize>); 2] {
        let n = self.n_tangent();
        [
            (Bundle::Tangent, 0..n),
            (Bundle::Normal, n..n + self.m_normal()),
        ]
    }

    /// Top weighted degree of the owning component: `n'`, i.e. form degree `2n'`.
    pub fn default_cap(&self) -> u32 {
        self.n_tangent() as u32
    }
}

pub fn pontryagin_name(j: usize, bundle: Bundle) -> String {
    format!("p{j}({})", bundle.tag())
}

/// Coefficients of `(x/2)/sinh(x/2)` through degree `cap`, by long division of
/// `sinh(x/2)/(x/2) = sum (x/2)^{2j}/(2j+1)!`.
pub fn ahat_root_coefficients(cap: u32) -> Vec<Rational> {
    let ring = vec![Variable::root("x")];
    let mut terms = Vec::new();
    let mut fact = Rational::one();
    let mut j = 0u32;
    while 2 * j <= cap {
        // fact = (2j+1)!
        if j > 0 {
            fact *= rat(((2 * j) * (2 * j + 1)) as i64, 1);
        }
        let c = num_traits::pow(rat(1, 4), j as usize) / fact.clone();
        terms.push((vec![2 * j], c));
        j += 1;
    }
    let sinh_over = GradedSeries::from_terms(ring, cap, terms).expect("univariate ring");
    let inv = sinh_over.invert().expect("constant term is 1");
    (0..=cap).map(|d| inv.coeff(&[d])).collect()
}

/// Univariate coefficients placed on root number `pos` of the ring.
fn on_root(vars: &[Variable], pos: usize, coeffs: &[Rational], cap: u32) -> GradedSeries {
    let terms = coeffs.iter().enumerate().map(|(d, c)| {
        let mut e = vec![0; vars.len()];
        e[pos] = d as u32;
        (e, c.clone())
    });
    GradedSeries::from_terms(vars.to_vec(), cap, terms).expect("root ring")
}

/// `prod_a (u_a/2)/sinh(u_a/2)` over the tangent roots.
pub fn ahat_series(roots: &RootSet, cap: u32) -> GradedSeries {
    let vars = roots.variables();
    let coeffs = ahat_root_coefficients(cap);
    let mut out = GradedSeries::one(vars.clone(), cap);
    for pos in 0..roots.n_tangent() {
        out = out.mul(&on_root(&vars, pos, &coeffs, cap)).expect("same ring");
    }
    out
}

/// `ch∆(N) = prod_b (e^{v_b/2} + e^{-v_b/2})` over the normal roots.
pub fn ch_delta(roots: &RootSet, cap: u32) -> GradedSeries {
    let vars = roots.variables();
    let mut out = GradedSeries::one(vars.clone(), cap);
    for name in roots.normal_names() {
        let half = GradedSeries::var(vars.clone(), name, cap)
            .expect("root in ring")
            .scale(&rat(1, 2));
        let factor = half
            .exp()
            .and_then(|p| p.add(&half.neg().exp()?))
            .expect("zero constant term");
        out = out.mul(&factor).expect("same ring");
    }
    out
}

pub fn ch_delta_inverse(roots: &RootSet, cap: u32) -> GradedSeries {
    ch_delta(roots, cap)
        .invert()
        .expect("constant term 2^m is nonzero")
}

/// `Â(TF)·[ch∆(N)]^{-1}`, the integrand of the fixed-point contribution.
pub fn local_density(roots: &RootSet, cap: u32) -> GradedSeries {
    ahat_series(roots, cap)
        .mul(&ch_delta_inverse(roots, cap))
        .expect("same ring")
}

/// `e_j` of the squared roots in one group, as a series in the root ring.
fn elementary_in_squares(
    vars: &[Variable],
    group: std::ops::Range<usize>,
    j: usize,
    cap: u32,
) -> GradedSeries {
    let idx: Vec<usize> = group.collect();
    let mut terms = Vec::new();
    for subset in combinations(&idx, j) {
        let mut e = vec![0; vars.len()];
        for &i in &subset {
            e[i] = 2;
        }
        terms.push((e, Rational::one()));
    }
    GradedSeries::from_terms(vars.to_vec(), cap, terms).expect("root ring")
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Checks evenness in each root and symmetry under permutations within each
/// group (adjacent transpositions generate the symmetric group).
fn check_symmetric_even(s: &GradedSeries, roots: &RootSet) -> Result<(), CharClassError> {
    let vars = s.vars();
    for (e, _) in s.terms() {
        if let Some(i) = e.iter().position(|k| k % 2 == 1) {
            return Err(CharClassError::NotEven(vars[i].name.clone()));
        }
    }
    for (_, range) in roots.groups() {
        let idx: Vec<usize> = range.collect();
        for w in idx.windows(2) {
            let (i, j) = (w[0], w[1]);
            for (e, c) in s.terms() {
                let mut swapped = e.clone();
                swapped.swap(i, j);
                if &s.coeff(&swapped) != c {
                    return Err(CharClassError::NotSymmetric(
                        vars[i].name.clone(),
                        vars[j].name.clone(),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Rewrites a series that is even in every root and symmetric within each
/// bundle in terms of the Pontryagin classes `p_j = e_j(roots²)`.
///
/// Uses leading-term reduction: the lexicographically largest remaining term
/// has non-increasing exponents within each group, and the matching product of
/// elementary symmetric polynomials has exactly that leading term.
pub fn roots_to_pontryagin(
    s: &GradedSeries,
    roots: &RootSet,
) -> Result<GradedSeries, CharClassError> {
    let vars = roots.variables();
    if s.vars() != vars.as_slice() {
        return Err(CharClassError::RingMismatch);
    }
    check_symmetric_even(s, roots)?;
    let cap = s.cap();
    let pvars = roots.pontryagin_variables();

    // elementary[g][j-1] = e_j of group g in the root ring.
    let groups = roots.groups();
    let elementary: Vec<Vec<GradedSeries>> = groups
        .iter()
        .map(|(_, r)| {
            (1..=r.len())
                .map(|j| elementary_in_squares(&vars, r.clone(), j, cap))
                .collect()
        })
        .collect();

    let mut remainder = s.clone();
    let mut out_terms: Vec<(Exponents, Rational)> = Vec::new();
    while let Some((lead, c)) = remainder
        .terms()
        .last()
        .map(|(e, c)| (e.clone(), c.clone()))
    {
        // BTreeMap order is lexicographic on exponent vectors: last() is the leader.
        let mut pexp = Vec::with_capacity(pvars.len());
        let mut product = GradedSeries::one(vars.clone(), cap);
        for (g, (_, range)) in groups.iter().enumerate() {
            let half: Vec<u32> = lead[range.clone()].iter().map(|k| k / 2).collect();
            for j in 0..half.len() {
                let next = half.get(j + 1).copied().unwrap_or(0);
                let power = half[j] - next;
                pexp.push(power);
                if power > 0 {
                    product = product.mul(&elementary[g][j].pow(power))?;
                }
            }
        }
        remainder = remainder.sub(&product.scale(&c))?;
        out_terms.push((pexp, c));
    }
    Ok(GradedSeries::from_terms(pvars, cap, out_terms)?)
}

/// Substitutes `p_j = e_j(roots²)` back into a Pontryagin-basis series.
pub fn pontryagin_to_roots(
    p: &GradedSeries,
    roots: &RootSet,
) -> Result<GradedSeries, CharClassError> {
    if p.vars() != roots.pontryagin_variables().as_slice() {
        return Err(CharClassError::RingMismatch);
    }
    let vars = roots.variables();
    let cap = p.cap();
    let mut basis = Vec::new();
    for (_, range) in roots.groups() {
        for j in 1..=range.len() {
            basis.push(elementary_in_squares(&vars, range.clone(), j, cap));
        }
    }
    let mut out = GradedSeries::zero(vars.clone(), cap);
    for (e, c) in p.terms() {
        let mut term = GradedSeries::constant(vars.clone(), c.clone(), cap);
        for (k, b) in e.iter().zip(&basis) {
            if *k > 0 {
                term = term.mul(&b.pow(*k))?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Power sums `P_k = sum_i x_i^{2k}` of one bundle's squared roots, written in
/// that bundle's Pontryagin classes by Newton's identities
/// `P_k = sum_{i=1}^{k-1} (-1)^{i-1} e_i P_{k-i} + (-1)^{k-1} k e_k`.
///
/// Returns `P_1..P_{kmax}` in the Pontryagin ring of `roots`.
pub fn newton_power_sums(roots: &RootSet, bundle: Bundle, kmax: usize, cap: u32) -> Vec<GradedSeries> {
    let pvars = roots.pontryagin_variables();
    let count = match bundle {
        Bundle::Tangent => roots.n_tangent(),
        Bundle::Normal => roots.m_normal(),
    };
    let offset = match bundle {
        Bundle::Tangent => 0,
        Bundle::Normal => roots.n_tangent(),
    };
    let e = |i: usize| -> GradedSeries {
        if i == 0 {
            return GradedSeries::one(pvars.clone(), cap);
        }
        if i > count {
            return GradedSeries::zero(pvars.clone(), cap);
        }
        GradedSeries::var(pvars.clone(), &pvars[offset + i - 1].name, cap).expect("p-variable")
    };
    let mut sums: Vec<GradedSeries> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut pk = e(k).scale(&rat(k as i64, 1));
        if k % 2 == 0 {
            pk = pk.neg();
        }
        for i in 1..k {
            let mut t = e(i).mul(&sums[k - i - 1]).expect("same ring");
            if i % 2 == 0 {
                t = t.neg();
            }
            pk = pk.add(&t).expect("same ring");
        }
        sums.push(pk);
    }
    sums
}

/// All exponent vectors over the Pontryagin variables of `roots` with weighted
/// degree exactly `degree`.
pub fn pontryagin_monomials(roots: &RootSet, degree: u32) -> Vec<Exponents> {
    let weights: Vec<u32> = roots.pontryagin_variables().iter().map(|v| v.weight).collect();
    let mut out = Vec::new();
    let mut current = vec![0; weights.len()];
    fn rec(weights: &[u32], pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponents>) {
        if pos == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut k = 0;
        while k * weights[pos] <= left {
            cur[pos] = k;
            rec(weights, pos + 1, left - k * weights[pos], cur, out);
            k += 1;
        }
        cur[pos] = 0;
    }
    rec(&weights, 0, degree, &mut current, &mut out);
    out
}

/// Canonical text key for a Pontryagin monomial, e.g. `p1(T)^2*p1(N)`; `1` for
/// the empty monomial.
pub fn pontryagin_key(roots: &RootSet, exps: &[u32]) -> String {
    let names = roots.pontryagin_variables();
    let parts: Vec<String> = exps
        .iter()
        .zip(&names)
        .filter(|(k, _)| **k > 0)
        .map(|(k, v)| {
            if *k == 1 {
                v.name.clone()
            } else {
                format!("{}^{}", v.name, k)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Parses a monomial key in any factor order (`*` or whitespace separated,
/// repeated factors allowed) into an exponent vector for `roots`.
pub fn parse_pontryagin_key(roots: &RootSet, key: &str) -> Option<Exponents> {
    let names = roots.pontryagin_variables();
    let mut exps = vec![0u32; names.len()];
    let key = key.trim();
    if key == "1" {
        return Some(exps);
    }
    for factor in key.split(|c: char| c == '*' || c.is_whitespace()) {
        if factor.is_empty() {
            continue;
        }
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => (b, p.parse::<u32>().ok()?),
            None => (factor, 1),
        };
        let pos = names.iter().position(|v| v.name == base)?;
        exps[pos] += power;
    }
    Some(exps)
}

/// Degree-`d` coefficients of the Pontryagin-basis density, keyed canonically.
pub fn density_top_form(
    roots: &RootSet,
    degree: u32,
) -> Result<BTreeMap<String, Rational>, CharClassError> {
    let cap = degree.max(roots.default_cap());
    let p = roots_to_pontryagin(&local_density(roots, cap), roots)?;
    let top = p.extract_degree(degree)?;
    Ok(top
        .terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (pontryagin_key(roots, e), c.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(roots: &RootSet, cap: u32, pos: usize, coeffs: &[(u32, Rational)]) -> GradedSeries {
        let vars = roots.variables();
        GradedSeries::from_terms(
            vars.clone(),
            cap,
            coeffs.iter().map(|(d, c)| {
                let mut e = vec![0; vars.len()];
                e[pos] = *d;
                (e, c.clone())
            }),
        )
        .unwrap()
    }

    #[test]
    fn empty_products_are_one() {
        let r = RootSet::new(0, 0);
        assert_eq!(ahat_series(&r, 4), GradedSeries::one(vec![], 4));
        assert_eq!(ch_delta(&r, 4), GradedSeries::one(vec![], 4));
        assert_eq!(ch_delta_inverse(&r, 4), GradedSeries::one(vec![], 4));
        assert_eq!(local_density(&r, 4), GradedSeries::one(vec![], 4));
    }

    #[test]
    fn ahat_single_root() {
        let r = RootSet::new(1, 0);
        let expected = single(&r, 4, 0, &[(0, rat(1, 1)), (2, rat(-1, 24)), (4, rat(7, 5760))]);
        assert_eq!(ahat_series(&r, 4), expected);
    }

    #[test]
    fn ahat_two_roots_is_product_of_singles() {
        let r = RootSet::new(2, 0);
        let c = [(0, rat(1, 1)), (2, rat(-1, 24)), (4, rat(7, 5760))];
        let prod = single(&r, 4, 0, &c).mul(&single(&r, 4, 1, &c)).unwrap();
        let a = ahat_series(&r, 4);
        assert_eq!(a, prod);
        assert_eq!(a.coeff(&[2, 2]), rat(1, 576));
    }

    #[test]
    fn ch_delta_examples() {
        let r1 = RootSet::new(0, 1);
        assert_eq!(
            ch_delta(&r1, 4),
            single(&r1, 4, 0, &[(0, rat(2, 1)), (2, rat(1, 4)), (4, rat(1, 192))])
        );
        let r2 = RootSet::new(0, 2);
        assert_eq!(ch_delta(&r2, 0), GradedSeries::constant(r2.variables(), rat(4, 1), 0));
    }

    #[test]
    fn ch_delta_inverse_examples() {
        let r1 = RootSet::new(0, 1);
        assert_eq!(
            ch_delta_inverse(&r1, 2),
            single(&r1, 2, 0, &[(0, rat(1, 2)), (2, rat(-1, 16))])
        );
        assert_eq!(
            ch_delta_inverse(&r1, 4),
            single(&r1, 4, 0, &[(0, rat(1, 2)), (2, rat(-1, 16)), (4, rat(5, 768))])
        );
    }

    #[test]
    fn density_examples() {
        let r = RootSet::new(0, 1);
        assert_eq!(local_density(&r, 2).constant_term(), rat(1, 2));
        let r = RootSet::new(1, 0);
        assert_eq!(
            local_density(&r, 2).extract_degree(2).unwrap(),
            single(&r, 2, 0, &[(2, rat(-1, 24))])
        );
        let r = RootSet::new(1, 1);
        let d2 = local_density(&r, 2).extract_degree(2).unwrap();
        let vars = r.variables();
        let expected = GradedSeries::from_terms(
            vars,
            2,
            vec![(vec![2, 0], rat(-1, 48)), (vec![0, 2], rat(-1, 16))],
        )
        .unwrap();
        assert_eq!(d2, expected);
    }

    #[test]
    fn pontryagin_rewrite_of_sum_of_squares() {
        let r = RootSet::new(2, 0);
        let s = GradedSeries::from_terms(
            r.variables(),
            2,
            vec![(vec![2, 0], rat(1, 1)), (vec![0, 2], rat(1, 1))],
        )
        .unwrap();
        let p = roots_to_pontryagin(&s, &r).unwrap();
        assert_eq!(p, GradedSeries::var(r.pontryagin_variables(), "p1(T)", 2).unwrap());
    }

    #[test]
    fn pontryagin_rewrite_of_ahat() {
        let r = RootSet::new(2, 0);
        let p = roots_to_pontryagin(&ahat_series(&r, 4), &r).unwrap();
        let pv = r.pontryagin_variables();
        let expected = GradedSeries::from_terms(
            pv,
            4,
            vec![
                (vec![0, 0], rat(1, 1)),
                (vec![1, 0], rat(-1, 24)),
                (vec![2, 0], rat(7, 5760)),
                (vec![0, 1], rat(-4, 5760)),
            ],
        )
        .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn constant_series_maps_to_itself() {
        let r = RootSet::new(1, 1);
        let s = GradedSeries::constant(r.variables(), rat(3, 7), 4);
        let p = roots_to_pontryagin(&s, &r).unwrap();
        assert_eq!(p, GradedSeries::constant(r.pontryagin_variables(), rat(3, 7), 4));
    }

    #[test]
    fn asymmetric_or_odd_input_rejected() {
        let r = RootSet::new(2, 0);
        let odd = GradedSeries::var(r.variables(), "u1", 2).unwrap();
        assert_eq!(
            roots_to_pontryagin(&odd, &r),
            Err(CharClassError::NotEven("u1".into()))
        );
        let lopsided =
            GradedSeries::from_terms(r.variables(), 2, vec![(vec![2, 0], rat(1, 1))]).unwrap();
        assert_eq!(
            roots_to_pontryagin(&lopsided, &r),
            Err(CharClassError::NotSymmetric("u1".into(), "u2".into()))
        );
    }

    #[test]
    fn tangent_and_normal_groups_are_independent() {
        // u1^2 alone is symmetric when it is the only tangent root.
        let r = RootSet::new(1, 1);
        let s = GradedSeries::from_terms(r.variables(), 2, vec![(vec![2, 0], rat(1, 1))]).unwrap();
        let p = roots_to_pontryagin(&s, &r).unwrap();
        assert_eq!(p, GradedSeries::var(r.pontryagin_variables(), "p1(T)", 2).unwrap());
    }

    #[test]
    fn newton_identities_low_order() {
        let r = RootSet::new(3, 0);
        let sums = newton_power_sums(&r, Bundle::Tangent, 3, 6);
        let pv = r.pontryagin_variables();
        // P1 = e1, P2 = e1^2 - 2 e2, P3 = e1^3 - 3 e1 e2 + 3 e3.
        let expect = |terms: Vec<(Exponents, Rational)>| {
            GradedSeries::from_terms(pv.clone(), 6, terms).unwrap()
        };
        assert_eq!(sums[0], expect(vec![(vec![1, 0, 0], rat(1, 1))]));
        assert_eq!(
            sums[1],
            expect(vec![(vec![2, 0, 0], rat(1, 1)), (vec![0, 1, 0], rat(-2, 1))])
        );
        assert_eq!(
            sums[2],
            expect(vec![
                (vec![3, 0, 0], rat(1, 1)),
                (vec![1, 1, 0], rat(-3, 1)),
                (vec![0, 0, 1], rat(3, 1)),
            ])
        );
    }

    #[test]
    fn monomial_keys_round_trip() {
        let r = RootSet::new(2, 1);
        for d in 0..=4 {
            for e in pontryagin_monomials(&r, d) {
                let key = pontryagin_key(&r, &e);
                assert_eq!(parse_pontryagin_key(&r, &key), Some(e));
            }
        }
        assert_eq!(
            parse_pontryagin_key(&r, "p1(N) p1(T) p1(T)"),
            parse_pontryagin_key(&r, "p1(T)^2*p1(N)")
        );
        assert_eq!(parse_pontryagin_key(&r, "p3(T)"), None);
        assert_eq!(pontryagin_monomials(&r, 4).len(), 4);
    }
}
