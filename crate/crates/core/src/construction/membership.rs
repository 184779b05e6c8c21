use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize, Serializer};

use crate::algebra::{component_dimension, for_each_word, Field, FreePoly, Monomial, Scalar};

use super::echelon::{Echelon, Functional};
use super::params::ConstructionParams;
use super::projection::BlockProjector;
use super::spaces::{block_layout, span_basis, touching_in, Generator, Space, SpanQuery};
use super::{Budget, ConstructionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Elimination over every generator of the component.
    Full,
    /// Elimination over the generators reachable from the element's support
    /// (block spaces only).
    Localized,
    /// The block antisymmetrizer (block spaces only).
    Projection,
}

impl Route {
    pub fn default_for(space: Space) -> Route {
        match space {
            Space::B(_) | Space::BSum(_) => Route::Projection,
            _ => Route::Full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTerm {
    pub coeff: Scalar,
    pub generator: Generator,
}

/// A verdict together with evidence that can be checked by plain arithmetic:
/// a linear combination of spanning elements for members, a separating
/// functional for non-members.
#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub query: SpanQuery,
    pub element: FreePoly,
    pub route: Route,
    pub component_dimension: u128,
    /// Number of spanning elements the decision looked at.
    pub basis_size: usize,
    pub verdict: Verdict,
    pub witness: Vec<WitnessTerm>,
    pub functional: Option<Functional>,
}

#[derive(Serialize)]
struct TermJson {
    coeff: String,
    generator: String,
}

#[derive(Serialize)]
struct ValueJson {
    monomial: String,
    value: String,
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    query: &'a SpanQuery,
    element: String,
    route: Route,
    component_dimension: String,
    basis_size: usize,
    verdict: Verdict,
    witness: Vec<TermJson>,
    functional: Option<Vec<ValueJson>>,
}

impl Serialize for MembershipCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateJson {
            query: &self.query,
            element: self.element.to_string(),
            route: self.route,
            component_dimension: self.component_dimension.to_string(),
            basis_size: self.basis_size,
            verdict: self.verdict,
            witness: self
                .witness
                .iter()
                .map(|t| TermJson {
                    coeff: t.coeff.to_string(),
                    generator: t.generator.to_string(),
                })
                .collect(),
            functional: self.functional.as_ref().map(|f| {
                f.values
                    .iter()
                    .map(|(m, v)| ValueJson {
                        monomial: m.to_string(),
                        value: v.to_string(),
                    })
                    .collect()
            }),
        }
        .serialize(s)
    }
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }

    /// Re-checks the certificate without any elimination: a member witness
    /// must consist of genuine spanning elements summing to the element; a
    /// functional must vanish on every spanning element meeting its support
    /// and not on the element.
    pub fn verify(&self, params: &ConstructionParams, budget: &Budget) -> Result<(), ConstructionError> {
        let reject = |m: String| Err(ConstructionError::CertificateRejected(m));
        check_homogeneous(&self.element, &self.query)?;
        let field = self.element.field();
        match self.verdict {
            Verdict::Member => {
                let mut sum = FreePoly::zero(field);
                for t in &self.witness {
                    if !belongs(&t.generator, &self.query, params)? {
                        return reject(format!("{} is not a spanning element", t.generator));
                    }
                    sum.add_scaled(&t.generator.to_poly(field), &t.coeff);
                }
                if sum != self.element {
                    return reject("witness does not reproduce the element".into());
                }
                Ok(())
            }
            Verdict::NonMember => {
                let Some(f) = &self.functional else {
                    return reject("non-member without functional".into());
                };
                if f.eval(&self.element).is_zero() {
                    return reject("functional vanishes on the element".into());
                }
                match self.query.space {
                    Space::B(_) | Space::BSum(_) => {
                        let blocks = block_layout(params, self.query.space, self.query.length)?;
                        let floor = params.swap_rule.floor();
                        for m in f.support() {
                            for g in touching_in(m, &blocks, floor) {
                                if !f.eval(&g.to_poly(field)).is_zero() {
                                    return reject(format!("functional does not vanish on {g}"));
                                }
                            }
                        }
                    }
                    _ => {
                        for g in span_basis(&self.query, params, budget)? {
                            if !f.eval(&g.to_poly(field)).is_zero() {
                                return reject(format!("functional does not vanish on {g}"));
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

fn check_homogeneous(a: &FreePoly, q: &SpanQuery) -> Result<(), ConstructionError> {
    if a.monomials().all(|m| q.contains_monomial(m)) {
        Ok(())
    } else {
        Err(ConstructionError::NonHomogeneous {
            length: q.length,
            degree: q.degree,
        })
    }
}

/// Whether `g` is one of the spanning elements of the queried component.
fn belongs(g: &Generator, q: &SpanQuery, params: &ConstructionParams) -> Result<bool, ConstructionError> {
    let in_component = |m: &Monomial| q.contains_monomial(m);
    Ok(match (g, q.space) {
        (Generator::Repeat { word }, Space::B(_) | Space::BSum(_)) => {
            let blocks = block_layout(params, q.space, q.length)?;
            in_component(word)
                && blocks.iter().any(|b| {
                    let p = &b.positions;
                    (0..p.len()).any(|a| (a + 1..p.len()).any(|c| word.letters()[p[a]] == word.letters()[p[c]]))
                })
        }
        (Generator::Swap { s1, i, j, .. }, Space::B(_) | Space::BSum(_)) => {
            let blocks = block_layout(params, q.space, q.length)?;
            in_component(s1)
                && blocks
                    .iter()
                    .any(|b| b.positions.contains(i) && b.positions.contains(j))
                && Generator::swap(s1, *i, *j, params.swap_rule.floor()).as_ref() == Some(g)
        }
        (
            Generator::Derived {
                left,
                core,
                order,
                right,
            },
            space,
        ) => {
            let fits = left.len() + core.len() + right.len() == q.length
                && left.degree() + core.degree() + *order as u64 + right.degree() == q.degree;
            let core_ok = |k: u32, n: usize| core.len() == n && core.letters().iter().all(|&l| l < k as u64);
            fits && match space {
                Space::W(k) => {
                    let n = params.block_size(k)? as usize;
                    core_ok(k, n) && left.len() % n == 0
                }
                Space::I(k) => core_ok(k, 2 * params.block_size(k)? as usize),
                Space::ITruncated => (1..=params.k_max).any(|k| {
                    params
                        .block_size(k)
                        .map(|n| core_ok(k, 2 * n as usize))
                        .unwrap_or(false)
                }),
                _ => false,
            }
        }
        _ => false,
    })
}

/// An eliminated spanning set of one component, reusable across queries.
#[derive(Clone, Debug)]
pub struct ComponentSpan {
    query: SpanQuery,
    route: Route,
    generators: Vec<Generator>,
    echelon: Echelon,
}

impl ComponentSpan {
    /// Elimination over every generator of the component.
    pub fn full(query: SpanQuery, params: &ConstructionParams, budget: &Budget) -> Result<Self, ConstructionError> {
        let dim = component_dimension(query.length, query.degree);
        if dim > budget.max_component_dim {
            return Err(ConstructionError::Budget {
                what: "component dimension",
                estimate: dim,
                limit: budget.max_component_dim,
            });
        }
        let generators = span_basis(&query, params, budget)?;
        let mut columns = Vec::with_capacity(dim as usize);
        for_each_word(query.length, query.degree, u64::MAX, |w| columns.push(Monomial::new(w.to_vec())));
        Ok(Self::eliminate(query, Route::Full, generators, columns, params.field))
    }

    /// Elimination over the generators reachable from the support of `seed`
    /// by repeatedly following generators that share a monomial. The
    /// reachable set is closed, so membership of anything supported on it
    /// is decided exactly.
    pub fn localized(
        query: SpanQuery,
        params: &ConstructionParams,
        seed: &FreePoly,
        budget: &Budget,
    ) -> Result<Self, ConstructionError> {
        let blocks = match query.space {
            Space::B(_) | Space::BSum(_) => block_layout(params, query.space, query.length)?,
            other => {
                return Err(ConstructionError::InvalidParams(format!(
                    "localized elimination needs a block space, not {other}"
                )))
            }
        };
        check_homogeneous(seed, &query)?;
        let floor = params.swap_rule.floor();
        let mut closure: BTreeSet<Monomial> = seed.monomials().cloned().collect();
        let mut queue: Vec<Monomial> = closure.iter().cloned().collect();
        let mut gens = BTreeSet::new();
        while let Some(m) = queue.pop() {
            for g in touching_in(&m, &blocks, floor) {
                let mons: Vec<Monomial> = match &g {
                    Generator::Swap { s1, s2, .. } => vec![s1.clone(), s2.clone()],
                    Generator::Repeat { word } => vec![word.clone()],
                    Generator::Derived { .. } => unreachable!(),
                };
                for w in mons {
                    if closure.insert(w.clone()) {
                        if closure.len() as u128 > budget.max_component_dim {
                            return Err(ConstructionError::Budget {
                                what: "localized closure",
                                estimate: closure.len() as u128,
                                limit: budget.max_component_dim,
                            });
                        }
                        queue.push(w);
                    }
                }
                gens.insert(g);
            }
        }
        Ok(Self::eliminate(
            query,
            Route::Localized,
            gens.into_iter().collect(),
            closure.into_iter().collect(),
            params.field,
        ))
    }

    fn eliminate(
        query: SpanQuery,
        route: Route,
        generators: Vec<Generator>,
        columns: Vec<Monomial>,
        field: Field,
    ) -> Self {
        let mut echelon = Echelon::new(field, columns);
        for (i, g) in generators.iter().enumerate() {
            echelon.insert(i, &g.to_poly(field));
        }
        ComponentSpan {
            query,
            route,
            generators,
            echelon,
        }
    }

    pub fn query(&self) -> &SpanQuery {
        &self.query
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Dimension of the span inside the component (or the closure).
    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn normal_form(&self, a: &FreePoly) -> Result<FreePoly, ConstructionError> {
        check_homogeneous(a, &self.query)?;
        Ok(self.echelon.reduce(a).remainder)
    }

    pub fn certify(&self, a: &FreePoly) -> Result<MembershipCertificate, ConstructionError> {
        check_homogeneous(a, &self.query)?;
        let out = self.echelon.reduce(a);
        let (verdict, witness, functional) = if out.remainder.is_zero() {
            let witness = self
                .echelon
                .witness(&out.used)
                .into_iter()
                .map(|(g, coeff)| WitnessTerm {
                    coeff,
                    generator: self.generators[g].clone(),
                })
                .collect();
            (Verdict::Member, witness, None)
        } else {
            let (mu, _) = out.remainder.leading().expect("nonzero remainder");
            (Verdict::NonMember, Vec::new(), Some(self.echelon.functional(mu)))
        };
        Ok(MembershipCertificate {
            query: self.query,
            element: a.clone(),
            route: self.route,
            component_dimension: component_dimension(self.query.length, self.query.degree),
            basis_size: self.generators.len(),
            verdict,
            witness,
            functional,
        })
    }
}

/// Decides `a ∈ query` by the default route for the space.
pub fn member(
    a: &FreePoly,
    query: &SpanQuery,
    params: &ConstructionParams,
) -> Result<MembershipCertificate, ConstructionError> {
    member_with(a, query, params, Route::default_for(query.space), &Budget::default())
}

pub fn member_with(
    a: &FreePoly,
    query: &SpanQuery,
    params: &ConstructionParams,
    route: Route,
    budget: &Budget,
) -> Result<MembershipCertificate, ConstructionError> {
    check_homogeneous(a, query)?;
    match route {
        Route::Full => ComponentSpan::full(*query, params, budget)?.certify(a),
        Route::Localized => ComponentSpan::localized(*query, params, a, budget)?.certify(a),
        Route::Projection => {
            let projector = BlockProjector::new(params, query.space, query.length)?;
            let (witness, rest) = projector.decompose(a);
            let witness: Vec<WitnessTerm> = witness
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(generator, coeff)| WitnessTerm { coeff, generator })
                .collect();
            let dim = component_dimension(query.length, query.degree);
            if rest.is_zero() {
                Ok(MembershipCertificate {
                    query: *query,
                    element: a.clone(),
                    route,
                    component_dimension: dim,
                    basis_size: witness.len(),
                    verdict: Verdict::Member,
                    witness,
                    functional: None,
                })
            } else {
                let (mu, _) = rest.leading().expect("nonzero projection");
                let functional = projector.functional(mu)?;
                Ok(MembershipCertificate {
                    query: *query,
                    element: a.clone(),
                    route,
                    component_dimension: dim,
                    basis_size: witness.len(),
                    verdict: Verdict::NonMember,
                    witness: Vec::new(),
                    functional: Some(functional),
                })
            }
        }
    }
}

/// Reduction of `a` modulo the span with smallest-monomial pivots; zero
/// exactly for members, linear and idempotent.
pub fn normal_form(
    a: &FreePoly,
    query: &SpanQuery,
    params: &ConstructionParams,
) -> Result<FreePoly, ConstructionError> {
    let budget = Budget::default();
    let span = match query.space {
        Space::B(_) | Space::BSum(_) => ComponentSpan::localized(*query, params, a, &budget)?,
        _ => ComponentSpan::full(*query, params, &budget)?,
    };
    span.normal_form(a)
}

/// Sums certificates' witnesses by generator; used when several members are
/// combined into one.
pub fn merge_witnesses(terms: impl IntoIterator<Item = WitnessTerm>) -> Vec<WitnessTerm> {
    let mut map: BTreeMap<Generator, Scalar> = BTreeMap::new();
    for t in terms {
        let e = map
            .entry(t.generator)
            .or_insert_with(|| Scalar::zero(t.coeff.field()));
        *e = &*e + &t.coeff;
    }
    map.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(generator, coeff)| WitnessTerm { coeff, generator })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::SwapRule;

    const Q: Field = Field::Rationals;

    fn word(len: usize, set: &[(usize, u64)]) -> Monomial {
        let mut v = vec![0; len];
        for &(pos, l) in set {
            v[pos - 1] = l;
        }
        Monomial::new(v)
    }

    #[test]
    fn derivative_of_x0_power_needs_swaps_down_to_x0() {
        let d = FreePoly::monomial(Monomial::power(0, 9), Q).derive();
        let q = SpanQuery::new(Space::B(1), 9, 1);
        let allow = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let literal = allow.clone().with_swap_rule(SwapRule::PositiveOnly);
        for route in [Route::Full, Route::Localized, Route::Projection] {
            let c = member_with(&d, &q, &allow, route, &Budget::default()).unwrap();
            assert!(c.is_member());
            let c = member_with(&d, &q, &literal, route, &Budget::default()).unwrap();
            assert!(!c.is_member());
            assert!(c.verify(&literal, &Budget::default()).is_ok());
        }
    }

    #[test]
    fn zero_is_member_with_empty_witness() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        for route in [Route::Full, Route::Localized, Route::Projection] {
            let c = member_with(
                &FreePoly::zero(Q),
                &SpanQuery::new(Space::B(1), 9, 2),
                &p,
                route,
                &Budget::default(),
            )
            .unwrap();
            assert!(c.is_member());
            assert!(c.witness.is_empty());
        }
    }

    #[test]
    fn routes_agree_on_component() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let q = SpanQuery::new(Space::B(1), 9, 2);
        let span = ComponentSpan::full(q, &p, &Budget::default()).unwrap();
        for_each_word(9, 2, u64::MAX, |w| {
            let a = FreePoly::monomial(Monomial::new(w.to_vec()), Q);
            let full = span.certify(&a).unwrap();
            let proj = member_with(&a, &q, &p, Route::Projection, &Budget::default()).unwrap();
            let local = member_with(&a, &q, &p, Route::Localized, &Budget::default()).unwrap();
            assert_eq!(full.verdict, proj.verdict);
            assert_eq!(full.verdict, local.verdict);
            for c in [&full, &proj, &local] {
                c.verify(&p, &Budget::default()).unwrap();
            }
        });
    }

    #[test]
    fn normal_form_examples() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let x09 = FreePoly::monomial(Monomial::power(0, 9), Q);
        assert!(normal_form(&x09, &SpanQuery::new(Space::B(1), 9, 0), &p)
            .unwrap()
            .is_zero());
        let strict = p.clone().with_swap_rule(SwapRule::PositiveOnly);
        let a = FreePoly::monomial(word(9, &[(3, 1)]), Q);
        let q = SpanQuery::new(Space::B(1), 9, 1);
        assert_eq!(normal_form(&a, &q, &strict).unwrap(), a);
        // with zero swaps allowed the monomial reduces to minus its partner
        let nf = normal_form(&a, &q, &p).unwrap();
        assert_eq!(nf, FreePoly::monomial(word(9, &[(1, 1)]), Q).neg());
    }

    #[test]
    fn non_homogeneous_rejected() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let a = FreePoly::parse("1*x0 + 1*x1", Q).unwrap();
        assert!(matches!(
            member(&a, &SpanQuery::new(Space::B(1), 1, 0), &p),
            Err(ConstructionError::NonHomogeneous { .. })
        ));
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let a = FreePoly::monomial(Monomial::power(0, 9), Q);
        let mut c = member(&a, &SpanQuery::new(Space::B(1), 9, 0), &p).unwrap();
        c.witness[0].coeff = Scalar::from_i64(2, Q);
        assert!(c.verify(&p, &Budget::default()).is_err());
    }
}
