//! Exact sparse multivariate Laurent polynomial arithmetic over the integers.
//!
//! The indeterminate universe is fixed: the seven invariant variables
//! `x, y, z, s, w, q, t`, a dynamically-indexed family of edge variables
//! `b_e` (one per edge id, for the multivariate form), and the three
//! cell-count variables `z1, z2, z3`. Coefficients are arbitrary-precision
//! integers; exponents are machine integers and may be negative (Laurent),
//! which intermediate reductions genuinely need.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// One indeterminate. The `Ord` derived from the variant order is the fixed
/// global variable order `x < y < z < s < w < q < t < b_e... < z1 < z2 < z3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
    Z,
    S,
    W,
    Q,
    T,
    /// Edge variable `b_e` for the multivariate form, indexed by edge id.
    Beta(u32),
    Z1,
    Z2,
    Z3,
}

impl Var {
    /// Variable name in the given basis. Only `x` and `y` are renamed by the
    /// shifted basis (they then denote `x-1` and `y-1` and print as `X`, `Y`).
    pub fn name(&self, basis: Basis) -> String {
        match (self, basis) {
            (Var::X, Basis::Standard) => "x".into(),
            (Var::Y, Basis::Standard) => "y".into(),
            (Var::X, Basis::Shifted) => "X".into(),
            (Var::Y, Basis::Shifted) => "Y".into(),
            (Var::Z, _) => "z".into(),
            (Var::S, _) => "s".into(),
            (Var::W, _) => "w".into(),
            (Var::Q, _) => "q".into(),
            (Var::T, _) => "t".into(),
            (Var::Beta(e), _) => format!("b{e}"),
            (Var::Z1, _) => "z1".into(),
            (Var::Z2, _) => "z2".into(),
            (Var::Z3, _) => "z3".into(),
        }
    }
}

/// Which symbols the `x`/`y` slots denote.
///
/// In the shifted basis the slots stand for `X = x-1` and `Y = y-1`; in the
/// standard basis they are plain `x` and `y`. Conversion is an exact ring
/// substitution, so round trips are identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Standard,
    Shifted,
}

/// Exponent vector of one monomial: sparse, canonical (no zero entries).
pub type Exponents = BTreeMap<Var, i32>;

/// A sparse multivariate Laurent polynomial with `BigInt` coefficients in
/// canonical form: keyed by exponent vector, no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Exponents, BigInt>,
}

impl Polynomial {
    /// The zero polynomial (empty term set).
    pub fn zero() -> Self {
        Polynomial::default()
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Polynomial::constant(1)
    }

    /// A constant polynomial.
    pub fn constant(c: impl Into<BigInt>) -> Self {
        let mut p = Polynomial::default();
        p.add_term(c.into(), Exponents::new());
        p
    }

    /// The single monomial `v^k`.
    pub fn var_pow(v: Var, k: i32) -> Self {
        let mut e = Exponents::new();
        if k != 0 {
            e.insert(v, k);
        }
        let mut p = Polynomial::default();
        p.add_term(BigInt::one(), e);
        p
    }

    /// The monomial `v` itself.
    pub fn var(v: Var) -> Self {
        Polynomial::var_pow(v, 1)
    }

    /// A single monomial with the given coefficient and exponents
    /// (zero exponents are dropped; a zero coefficient yields zero).
    pub fn monomial(c: impl Into<BigInt>, exps: &[(Var, i32)]) -> Self {
        let mut e = Exponents::new();
        for &(v, k) in exps {
            if k != 0 {
                *e.entry(v).or_insert(0) += k;
                if e[&v] == 0 {
                    e.remove(&v);
                }
            }
        }
        let mut p = Polynomial::default();
        p.add_term(c.into(), e);
        p
    }

    /// True iff this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored monomials.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in the internal (exponent-map) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of the given exponent vector (zero if absent).
    pub fn coeff(&self, exps: &[(Var, i32)]) -> BigInt {
        let mut e = Exponents::new();
        for &(v, k) in exps {
            if k != 0 {
                e.insert(v, k);
            }
        }
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    fn add_term(&mut self, c: BigInt, e: Exponents) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Ring sum.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }

    /// Ring difference.
    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(-c.clone(), e.clone());
        }
        out
    }

    /// Ring product.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = ea.clone();
                for (v, k) in eb {
                    let slot = e.entry(*v).or_insert(0);
                    *slot += k;
                    if *slot == 0 {
                        e.remove(v);
                    }
                }
                out.add_term(ca * cb, e);
            }
        }
        out
    }

    /// Multiply by a single monomial in place-free style (common fast path).
    pub fn mul_monomial(&self, c: impl Into<BigInt>, exps: &[(Var, i32)]) -> Polynomial {
        self.mul(&Polynomial::monomial(c, exps))
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact simultaneous substitution of the bound variables.
    ///
    /// Bindings are finite Laurent polynomials. A *negative* power of a
    /// binding is only defined when the binding is a single monomial with
    /// coefficient `±1` (a unit of the Laurent ring); every reduction in the
    /// invariant tower is of that shape. Anything else panics — that would be
    /// an internal misuse, not a user input error.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Polynomial>) -> Polynomial {
        let mut out = Polynomial::default();
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            let mut residual = Exponents::new();
            for (v, k) in e {
                match bindings.get(v) {
                    None => {
                        residual.insert(*v, *k);
                    }
                    Some(b) => {
                        if *k >= 0 {
                            term = term.mul(&b.pow(*k as u32));
                        } else {
                            term = term.mul(&b.unit_inverse_pow((-*k) as u32));
                        }
                    }
                }
            }
            for (re, rc) in term.terms {
                let mut e2 = residual.clone();
                for (v, k) in re {
                    let slot = e2.entry(v).or_insert(0);
                    *slot += k;
                    if *slot == 0 {
                        e2.remove(&v);
                    }
                }
                out.add_term(rc, e2);
            }
        }
        out
    }

    /// `self^-k` for a unit monomial (coefficient ±1), `k >= 1`.
    fn unit_inverse_pow(&self, k: u32) -> Polynomial {
        assert_eq!(
            self.terms.len(),
            1,
            "negative substitution power requires a single-monomial binding"
        );
        let (e, c) = self.terms.iter().next().unwrap();
        assert!(
            c.abs().is_one(),
            "negative substitution power requires a unit coefficient"
        );
        let mut inv = Exponents::new();
        for (v, x) in e {
            inv.insert(*v, -*x);
        }
        let mut p = Polynomial::default();
        p.add_term(c.clone(), inv);
        p.pow(k)
    }

    /// Convenience: substitute a set of variables each by an integer constant.
    pub fn eval_vars(&self, at: &[(Var, i64)]) -> Polynomial {
        let bindings: BTreeMap<Var, Polynomial> = at
            .iter()
            .map(|&(v, c)| (v, Polynomial::constant(c)))
            .collect();
        self.substitute(&bindings)
    }

    /// Exact basis conversion via `X = x-1`, `Y = y-1` (or the inverse).
    ///
    /// The `x`/`y` slots are reused: converting shifted→standard rewrites the
    /// slot previously meaning `x-1` as the polynomial `x-1`, after which the
    /// slot means plain `x`. Round trips are exact identities.
    ///
    /// Requires non-negative exponents of `x` and `y` — a negative power of
    /// `x-1` has no Laurent expansion. Every invariant here satisfies this
    /// (only `z`, `s`, `t` pick up negative exponents in reductions).
    pub fn to_basis(&self, from: Basis, to: Basis) -> Polynomial {
        if from == to {
            return self.clone();
        }
        assert!(
            self.is_polynomial_in(Var::X) && self.is_polynomial_in(Var::Y),
            "basis conversion requires non-negative x/y exponents"
        );
        let delta = match (from, to) {
            // X = x-1: a shifted-basis polynomial p(X) becomes p(x-1).
            (Basis::Shifted, Basis::Standard) => -1,
            // x = X+1: a standard-basis polynomial p(x) becomes p(X+1).
            (Basis::Standard, Basis::Shifted) => 1,
            _ => unreachable!(),
        };
        let mut bindings = BTreeMap::new();
        bindings.insert(
            Var::X,
            Polynomial::var(Var::X).add(&Polynomial::constant(delta)),
        );
        bindings.insert(
            Var::Y,
            Polynomial::var(Var::Y).add(&Polynomial::constant(delta)),
        );
        self.substitute(&bindings)
    }

    /// True iff every exponent of `v` across all terms is `>= 0`.
    pub fn is_polynomial_in(&self, v: Var) -> bool {
        self.terms
            .iter()
            .all(|(e, _)| e.get(&v).copied().unwrap_or(0) >= 0)
    }

    /// True iff no term carries a negative exponent of any variable.
    pub fn is_genuine_polynomial(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.values().all(|k| *k >= 0))
    }

    /// Terms in graded-lexicographic display order: higher total degree first,
    /// ties broken lexicographically (descending) over the fixed variable
    /// order. Deterministic, used for all rendering.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(ea, _), (eb, _)| {
            let da: i64 = ea.values().map(|k| *k as i64).sum();
            let db: i64 = eb.values().map(|k| *k as i64).sum();
            db.cmp(&da).then_with(|| {
                // Lexicographic over the fixed variable order, descending
                // exponent first. Absent variables count as exponent 0.
                let mut vars: Vec<Var> = ea.keys().chain(eb.keys()).copied().collect();
                vars.sort();
                vars.dedup();
                for v in vars {
                    let ka = ea.get(&v).copied().unwrap_or(0);
                    let kb = eb.get(&v).copied().unwrap_or(0);
                    match kb.cmp(&ka) {
                        std::cmp::Ordering::Equal => continue,
                        o => return o,
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
        v
    }

    /// Deterministic text rendering: terms joined by ` + `, coefficient
    /// (omitted when `1` with variables), variables as `name^exp` with `^1`
    /// elided. Shifted basis renders the `x`/`y` slots as `X`/`Y`.
    pub fn render(&self, basis: Basis) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.sorted_terms() {
            let mut piece = String::new();
            if e.is_empty() {
                piece.push_str(&c.to_string());
            } else {
                if *c != BigInt::one() {
                    piece.push_str(&c.to_string());
                    piece.push(' ');
                }
                let vars: Vec<String> = e
                    .iter()
                    .map(|(v, k)| {
                        if *k == 1 {
                            v.name(basis)
                        } else {
                            format!("{}^{}", v.name(basis), k)
                        }
                    })
                    .collect();
                piece.push_str(&vars.join(" "));
            }
            parts.push(piece);
        }
        parts.join(" + ")
    }

    /// JSON rendering: array of `{coeff, exponents}` objects in the canonical
    /// display order. Coefficients are decimal strings (they may exceed 64
    /// bits), exponent maps use the basis-dependent variable names.
    pub fn to_json(&self, basis: Basis) -> serde_json::Value {
        let arr: Vec<serde_json::Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                let exps: serde_json::Map<String, serde_json::Value> = e
                    .iter()
                    .map(|(v, k)| (v.name(basis), serde_json::Value::from(*k)))
                    .collect();
                serde_json::json!({ "coeff": c.to_string(), "exponents": exps })
            })
            .collect();
        serde_json::Value::Array(arr)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(Basis::Shifted))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(expr: &[(i64, &[(Var, i32)])]) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (c, exps) in expr {
            acc = acc.add(&Polynomial::monomial(*c, exps));
        }
        acc
    }

    #[test]
    fn add_disjoint_monomials() {
        // (X t^2) + (1) -> X t^2 + 1
        let a = Polynomial::monomial(1, &[(Var::X, 1), (Var::T, 2)]);
        let b = Polynomial::one();
        let sum = a.add(&b);
        assert_eq!(sum.term_count(), 2);
        assert_eq!(sum.render(Basis::Shifted), "X t^2 + 1");
    }

    #[test]
    fn add_zero_is_identity() {
        let a = p(&[(3, &[(Var::Z, 2)]), (-1, &[(Var::S, 1)])]);
        assert_eq!(a.add(&Polynomial::zero()), a);
    }

    #[test]
    fn add_cancellation_yields_empty() {
        let y1 = Polynomial::var(Var::Y);
        let sum = y1.add(&y1.mul(&Polynomial::constant(-1)));
        assert!(sum.is_zero());
        assert_eq!(sum.render(Basis::Shifted), "0");
    }

    #[test]
    fn mul_identity() {
        let a = Polynomial::monomial(1, &[(Var::X, 1), (Var::T, 2)]).add(&Polynomial::one());
        assert_eq!(a.mul(&Polynomial::one()), a);
    }

    #[test]
    fn mul_exponent_addition() {
        let zst = Polynomial::monomial(1, &[(Var::Z, 1), (Var::S, 1), (Var::T, 1)]);
        let sq = zst.mul(&zst);
        assert_eq!(
            sq,
            Polynomial::monomial(1, &[(Var::Z, 2), (Var::S, 2), (Var::T, 2)])
        );
    }

    #[test]
    fn mul_binomial_square() {
        // (Y + z s t^2)^2 = Y^2 + 2 Y z s t^2 + z^2 s^2 t^4, expanded by hand.
        let sum = Polynomial::var(Var::Y).add(&Polynomial::monomial(
            1,
            &[(Var::Z, 1), (Var::S, 1), (Var::T, 2)],
        ));
        let sq = sum.mul(&sum);
        let expect = p(&[
            (1, &[(Var::Y, 2)]),
            (2, &[(Var::Y, 1), (Var::Z, 1), (Var::S, 1), (Var::T, 2)]),
            (1, &[(Var::Z, 2), (Var::S, 2), (Var::T, 4)]),
        ]);
        assert_eq!(sq, expect);
    }

    #[test]
    fn substitute_laurent_shift() {
        // z^k s^C with s -> z^-1 gives z^(k-C).
        let m = Polynomial::monomial(1, &[(Var::Z, 5), (Var::S, 2)]);
        let mut b = BTreeMap::new();
        b.insert(Var::S, Polynomial::var_pow(Var::Z, -1));
        assert_eq!(m.substitute(&b), Polynomial::var_pow(Var::Z, 3));
    }

    #[test]
    fn substitute_empty_bindings_is_identity() {
        let a = p(&[(2, &[(Var::X, 1)]), (1, &[(Var::T, -3)])]);
        assert_eq!(a.substitute(&BTreeMap::new()), a);
    }

    #[test]
    fn substitute_evaluation() {
        // t -> 1 applied to X t^2 + 1 gives X + 1.
        let a = Polynomial::monomial(1, &[(Var::X, 1), (Var::T, 2)]).add(&Polynomial::one());
        let got = a.eval_vars(&[(Var::T, 1)]);
        assert_eq!(got, Polynomial::var(Var::X).add(&Polynomial::one()));
    }

    #[test]
    fn substitute_negative_power_of_unit_monomial() {
        // s^-2 with s -> z^2 t would need (z^2 t)^-2 = z^-4 t^-2.
        let m = Polynomial::monomial(1, &[(Var::S, -2)]);
        let mut b = BTreeMap::new();
        b.insert(Var::S, Polynomial::monomial(1, &[(Var::Z, 2), (Var::T, 1)]));
        assert_eq!(
            m.substitute(&b),
            Polynomial::monomial(1, &[(Var::Z, -4), (Var::T, -2)])
        );
    }

    #[test]
    fn to_basis_shifted_to_standard() {
        // X t^2 + 1 becomes (x-1) t^2 + 1 = x t^2 - t^2 + 1.
        let a = Polynomial::monomial(1, &[(Var::X, 1), (Var::T, 2)]).add(&Polynomial::one());
        let std = a.to_basis(Basis::Shifted, Basis::Standard);
        let expect = p(&[
            (1, &[(Var::X, 1), (Var::T, 2)]),
            (-1, &[(Var::T, 2)]),
            (1, &[]),
        ]);
        assert_eq!(std, expect);
    }

    #[test]
    fn to_basis_standard_to_shifted() {
        // x becomes X + 1.
        let x = Polynomial::var(Var::X);
        let sh = x.to_basis(Basis::Standard, Basis::Shifted);
        assert_eq!(sh, Polynomial::var(Var::X).add(&Polynomial::one()));
    }

    #[test]
    fn to_basis_round_trip() {
        let a = p(&[
            (1, &[(Var::X, 1), (Var::Z, 10), (Var::S, 1), (Var::W, 5), (Var::Q, 9), (Var::T, 6)]),
            (3, &[(Var::Y, 1), (Var::Z, 1), (Var::W, 1), (Var::Q, 3), (Var::T, 2)]),
            (1, &[(Var::Y, 2)]),
        ]);
        let rt = a
            .to_basis(Basis::Shifted, Basis::Standard)
            .to_basis(Basis::Standard, Basis::Shifted);
        assert_eq!(rt, a);
    }

    #[test]
    fn render_deterministic_graded_order() {
        let a = p(&[
            (1, &[]),
            (1, &[(Var::X, 1), (Var::Y, 1)]),
            (2, &[(Var::Y, 1)]),
            (1, &[(Var::X, 2)]),
        ]);
        // degree 2 first (x^2 before x y by lex-desc), then degree 1, then 0.
        assert_eq!(a.render(Basis::Standard), "x^2 + x y + 2 y + 1");
    }

    #[test]
    fn render_beta_and_counts() {
        let m = Polynomial::monomial(
            1,
            &[(Var::X, 1), (Var::Beta(0), 1), (Var::Z1, 6), (Var::Z2, 4)],
        );
        assert_eq!(m.render(Basis::Standard), "x b0 z1^6 z2^4");
    }

    #[test]
    fn json_rendering_shape() {
        let a = Polynomial::monomial(-2, &[(Var::Z, 3)]);
        let j = a.to_json(Basis::Standard);
        assert_eq!(
            j,
            serde_json::json!([{ "coeff": "-2", "exponents": { "z": 3 } }])
        );
    }

    #[test]
    fn coeff_lookup() {
        let a = p(&[(7, &[(Var::Z, 2), (Var::T, -1)])]);
        assert_eq!(a.coeff(&[(Var::Z, 2), (Var::T, -1)]), BigInt::from(7));
        assert_eq!(a.coeff(&[(Var::Z, 2)]), BigInt::from(0));
    }
}
