use std::collections::{BTreeMap, HashMap};

use crate::algebra::{Field, FreePoly, Monomial, Scalar};

/// A linear functional on a component, stored by its nonzero values on monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Functional {
    pub values: BTreeMap<Monomial, Scalar>,
}

impl Functional {
    pub fn eval(&self, p: &FreePoly) -> Scalar {
        let mut acc = Scalar::zero(p.field());
        for (m, c) in p.terms() {
            if let Some(v) = self.values.get(m) {
                acc = &acc + &(c * v);
            }
        }
        acc
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.values.keys()
    }
}

#[derive(Clone, Debug)]
struct Row {
    /// Sorted by column; the first entry is the pivot and equals 1.
    entries: Vec<(u32, Scalar)>,
    origin: usize,
    scale: Scalar,
    /// The row equals `scale * generator[origin] + sum(c * rows[j])`.
    steps: Vec<(usize, Scalar)>,
}

/// Result of reducing an element against the rows.
#[derive(Clone, Debug)]
pub struct ReduceOutcome {
    /// The normal form: supported on non-pivot monomials only.
    pub remainder: FreePoly,
    /// `(row, c)` with `input = remainder + sum(c * row)`.
    pub used: Vec<(usize, Scalar)>,
}

/// Sparse exact row echelon form over a fixed, canonically ordered set of
/// monomials. Pivots are the smallest monomial of each row.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    columns: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    rows: Vec<Row>,
    pivot_of: HashMap<u32, usize>,
}

impl Echelon {
    /// `columns` must be strictly increasing in the canonical order.
    pub fn new(field: Field, columns: Vec<Monomial>) -> Self {
        debug_assert!(columns.windows(2).all(|w| w[0] < w[1]));
        let index = columns
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        Echelon {
            field,
            columns,
            index,
            rows: Vec::new(),
            pivot_of: HashMap::new(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dimension(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Monomial] {
        &self.columns
    }

    fn pivot_column(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).and_then(|c| self.pivot_of.get(c)).copied()
    }

    /// Subtracts `c * row` from the working vector.
    fn eliminate(work: &mut BTreeMap<u32, Scalar>, row: &Row, c: &Scalar) {
        for (col, v) in &row.entries {
            let delta = c * v;
            match work.get_mut(col) {
                Some(x) => {
                    let nx = &*x - &delta;
                    if nx.is_zero() {
                        work.remove(col);
                    } else {
                        *x = nx;
                    }
                }
                None => {
                    work.insert(*col, -delta);
                }
            }
        }
    }

    /// Adds the generator with index `origin`. Returns `false` when it was
    /// already in the span. Every monomial must be one of the columns.
    pub fn insert(&mut self, origin: usize, poly: &FreePoly) -> bool {
        let mut work: BTreeMap<u32, Scalar> = BTreeMap::new();
        for (m, c) in poly.terms() {
            let col = *self
                .index
                .get(m)
                .unwrap_or_else(|| panic!("monomial {m} outside the component"));
            work.insert(col, c.clone());
        }
        let mut steps = Vec::new();
        // reduce until the leading column is free
        while let Some((&col, c)) = work.iter().next() {
            let Some(&r) = self.pivot_of.get(&col) else {
                break;
            };
            let c = c.clone();
            Self::eliminate(&mut work, &self.rows[r], &c);
            steps.push((r, -c));
        }
        let Some((&lead_col, lead)) = work.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        let entries = work.iter().map(|(&col, v)| (col, v * &inv)).collect();
        let steps = steps.into_iter().map(|(r, c)| (r, &c * &inv)).collect();
        self.pivot_of.insert(lead_col, self.rows.len());
        self.rows.push(Row {
            entries,
            origin,
            scale: inv,
            steps,
        });
        true
    }

    /// Fully reduces `poly`: the remainder carries no pivot monomial.
    pub fn reduce(&self, poly: &FreePoly) -> ReduceOutcome {
        let mut work: BTreeMap<u32, Scalar> = BTreeMap::new();
        let mut outside = FreePoly::zero(self.field);
        for (m, c) in poly.terms() {
            match self.index.get(m) {
                Some(&col) => {
                    work.insert(col, c.clone());
                }
                None => outside.add_term(m.clone(), c.clone()),
            }
        }
        let mut used = Vec::new();
        let mut cursor = 0u32;
        while let Some((&col, c)) = work.range(cursor..).next() {
            match self.pivot_of.get(&col) {
                Some(&r) => {
                    let c = c.clone();
                    Self::eliminate(&mut work, &self.rows[r], &c);
                    used.push((r, c));
                }
                None => cursor = col + 1,
            }
        }
        let mut remainder = outside;
        for (col, c) in work {
            remainder.add_term(self.columns[col as usize].clone(), c);
        }
        ReduceOutcome { remainder, used }
    }

    /// Expands row combinations into generator coefficients.
    pub fn witness(&self, used: &[(usize, Scalar)]) -> BTreeMap<usize, Scalar> {
        let mut pending: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (r, c) in used {
            accumulate(&mut pending, *r, c);
        }
        let mut gens = BTreeMap::new();
        while let Some((r, c)) = pending.pop_last() {
            let row = &self.rows[r];
            accumulate(&mut gens, row.origin, &(&c * &row.scale));
            for (s, cs) in &row.steps {
                accumulate(&mut pending, *s, &(&c * cs));
            }
        }
        gens
    }

    /// A functional vanishing on every row and equal to 1 on `target`, which
    /// must not be a pivot monomial.
    pub fn functional(&self, target: &Monomial) -> Functional {
        assert!(self.pivot_column(target).is_none(), "target is a pivot");
        let mut values = BTreeMap::new();
        values.insert(target.clone(), Scalar::one(self.field));
        let Some(&mu) = self.index.get(target) else {
            return Functional { values };
        };
        let mut by_col: BTreeMap<u32, Scalar> = BTreeMap::new();
        by_col.insert(mu, Scalar::one(self.field));
        let mut pivots: Vec<u32> = self.pivot_of.keys().copied().filter(|&p| p < mu).collect();
        pivots.sort_unstable();
        for &p in pivots.iter().rev() {
            let row = &self.rows[self.pivot_of[&p]];
            let mut acc = Scalar::zero(self.field);
            for (col, c) in &row.entries[1..] {
                if let Some(v) = by_col.get(col) {
                    acc = &acc + &(c * v);
                }
            }
            if !acc.is_zero() {
                by_col.insert(p, -acc);
            }
        }
        for (col, v) in by_col {
            values.insert(self.columns[col as usize].clone(), v);
        }
        Functional { values }
    }
}

fn accumulate(map: &mut BTreeMap<usize, Scalar>, key: usize, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(x) => {
            let nx = &*x + c;
            if nx.is_zero() {
                map.remove(&key);
            } else {
                *x = nx;
            }
        }
        None => {
            map.insert(key, c.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    fn p(s: &str) -> FreePoly {
        FreePoly::parse(s, Q).unwrap()
    }

    fn cols(words: &[&str]) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = words.iter().map(|w| Monomial::parse(w).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn member_and_witness() {
        let mut e = Echelon::new(Q, cols(&["x0.x1", "x1.x0", "x0.x0"]));
        let gens = [p("1*x0.x1 + 1*x1.x0"), p("2*x0.x1"), p("1*x0.x1 + -1*x1.x0")];
        assert!(e.insert(0, &gens[0]));
        assert!(e.insert(1, &gens[1]));
        assert!(!e.insert(2, &gens[2]));
        let q = p("3*x1.x0");
        let out = e.reduce(&q);
        assert!(out.remainder.is_zero());
        let w = e.witness(&out.used);
        let mut sum = FreePoly::zero(Q);
        for (g, c) in &w {
            sum.add_scaled(&gens[*g], c);
        }
        assert_eq!(sum, q);
    }

    #[test]
    fn functional_separates() {
        let mut e = Echelon::new(Q, cols(&["x0.x1", "x1.x0", "x0.x0"]));
        let gens = [p("1*x0.x0 + 1*x0.x1"), p("1*x0.x1 + -1*x1.x0")];
        for (i, g) in gens.iter().enumerate() {
            e.insert(i, g);
        }
        let q = p("1*x1.x0");
        let out = e.reduce(&q);
        assert!(!out.remainder.is_zero());
        let (mu, _) = out.remainder.leading().unwrap();
        let f = e.functional(mu);
        for g in &gens {
            assert!(f.eval(g).is_zero());
        }
        assert!(!f.eval(&q).is_zero());
    }
}
