//! Canonical finite nested values and the Δ0 semantic evaluator.
//!
//! Sets are kept sorted and duplicate-free at every level, which makes
//! extensional equality plain structural equality and gives every value a
//! canonical form. [`eval_delta0`] is the brute-force truth oracle that the
//! rest of the crate is tested against.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::kernel::{Formula, ObjType, Term};

/// The reserved atom backing the distinguished constant `c0`; it is excluded
/// from user universes and is the `Get` default at sort `U`.
pub const C0: &str = "_c0";

/// A canonical nested value. Invariant: `Set` elements are strictly
/// increasing under [`Value::cmp_canonical`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Atom(String),
    UnitV,
    PairV(Box<Value>, Box<Value>),
    SetV(Vec<Value>),
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Value) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Value) -> Ordering {
        Value::cmp_canonical(self, other)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueError {
    #[error("heterogeneous set: elements {0} and {1} have incompatible shapes")]
    HeterogeneousSet(String, String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("enumeration budget exceeded for type {ty} (would need {need} > cap {cap})")]
    BudgetExceeded { ty: String, need: u128, cap: u64 },
}

impl Value {
    pub fn atom(name: impl Into<String>) -> Value {
        Value::Atom(name.into())
    }
    pub fn pair(a: Value, b: Value) -> Value {
        Value::PairV(Box::new(a), Box::new(b))
    }
    /// Build a set, canonicalizing (sorting and deduplicating) the elements.
    pub fn set(elems: Vec<Value>) -> Value {
        let mut elems = elems;
        elems.sort_by(Value::cmp_canonical);
        elems.dedup();
        Value::SetV(elems)
    }
    pub fn empty_set() -> Value {
        Value::SetV(vec![])
    }
    /// The canonical true/false of type `Bool = Set(Unit)`.
    pub fn bool_val(b: bool) -> Value {
        if b {
            Value::SetV(vec![Value::UnitV])
        } else {
            Value::SetV(vec![])
        }
    }
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::SetV(v) if v.is_empty() => Some(false),
            Value::SetV(v) if v == &[Value::UnitV] => Some(true),
            _ => None,
        }
    }

    /// The canonical total order: atoms lexicographically; pairs
    /// lexicographically; sets by length, then lexicographically on their
    /// (sorted) elements. Different shapes are ordered by constructor.
    pub fn cmp_canonical(a: &Value, b: &Value) -> Ordering {
        use Value::*;
        match (a, b) {
            (Atom(x), Atom(y)) => x.cmp(y),
            (UnitV, UnitV) => Ordering::Equal,
            (PairV(a1, a2), PairV(b1, b2)) => {
                Value::cmp_canonical(a1, b1).then_with(|| Value::cmp_canonical(a2, b2))
            }
            (SetV(xs), SetV(ys)) => xs.len().cmp(&ys.len()).then_with(|| {
                for (x, y) in xs.iter().zip(ys) {
                    match Value::cmp_canonical(x, y) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }),
            _ => a.rank().cmp(&b.rank()),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Atom(_) => 0,
            Value::UnitV => 1,
            Value::PairV(..) => 2,
            Value::SetV(_) => 3,
        }
    }

    /// Re-establish the canonical invariant bottom-up (sorting and
    /// deduplicating every set) and verify that sets are homogeneous.
    pub fn canonicalize(&self) -> Result<Value, ValueError> {
        match self {
            Value::Atom(_) | Value::UnitV => Ok(self.clone()),
            Value::PairV(a, b) => Ok(Value::pair(a.canonicalize()?, b.canonicalize()?)),
            Value::SetV(elems) => {
                let elems: Vec<Value> =
                    elems.iter().map(|e| e.canonicalize()).collect::<Result<_, _>>()?;
                for w in elems.windows(2) {
                    Shape::of(&w[0]).unify(&Shape::of(&w[1])).ok_or_else(|| {
                        ValueError::HeterogeneousSet(w[0].to_string(), w[1].to_string())
                    })?;
                }
                if let Some((first, rest)) = elems.split_first() {
                    let mut shape = Shape::of(first);
                    for e in rest {
                        shape = shape.unify(&Shape::of(e)).ok_or_else(|| {
                            ValueError::HeterogeneousSet(first.to_string(), e.to_string())
                        })?;
                    }
                }
                Ok(Value::set(elems))
            }
        }
    }

    /// Does this value inhabit the given type (atoms are type `U` regardless
    /// of their name)?
    pub fn has_type(&self, ty: &ObjType) -> bool {
        match (self, ty) {
            (Value::Atom(_), ObjType::U) => true,
            (Value::UnitV, ObjType::Unit) => true,
            (Value::PairV(a, b), ObjType::Prod(ta, tb)) => a.has_type(ta) && b.has_type(tb),
            (Value::SetV(elems), ObjType::SetOf(te)) => elems.iter().all(|e| e.has_type(te)),
            _ => false,
        }
    }
}

/// Structural shape used to detect heterogeneous sets; `SetUnknown` is the
/// shape of an empty set, which unifies with any set shape.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Atom,
    Unit,
    Pair(Box<Shape>, Box<Shape>),
    SetUnknown,
    Set(Box<Shape>),
}

impl Shape {
    fn of(v: &Value) -> Shape {
        match v {
            Value::Atom(_) => Shape::Atom,
            Value::UnitV => Shape::Unit,
            Value::PairV(a, b) => Shape::Pair(Box::new(Shape::of(a)), Box::new(Shape::of(b))),
            Value::SetV(elems) => match elems.first() {
                None => Shape::SetUnknown,
                Some(e) => Shape::Set(Box::new(Shape::of(e))),
            },
        }
    }

    fn unify(&self, other: &Shape) -> Option<Shape> {
        use Shape::*;
        match (self, other) {
            (Atom, Atom) => Some(Atom),
            (Unit, Unit) => Some(Unit),
            (Pair(a, b), Pair(c, d)) => {
                Some(Pair(Box::new(a.unify(c)?), Box::new(b.unify(d)?)))
            }
            (SetUnknown, s @ (SetUnknown | Set(_))) => Some(s.clone()),
            (s @ Set(_), SetUnknown) => Some(s.clone()),
            (Set(a), Set(b)) => Some(Set(Box::new(a.unify(b)?))),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => write!(f, "{a}"),
            Value::UnitV => write!(f, "()"),
            Value::PairV(a, b) => write!(f, "<{a},{b}>"),
            Value::SetV(elems) => {
                write!(f, "{{")?;
                for (i, e) in elems.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// A finite binding of variables to values plus the ambient atom universe.
#[derive(Debug, Clone, Default)]
pub struct Valuation {
    pub bindings: BTreeMap<String, Value>,
    pub universe: Vec<String>,
}

impl Valuation {
    pub fn new(universe: Vec<String>) -> Valuation {
        Valuation {
            bindings: BTreeMap::new(),
            universe,
        }
    }
    pub fn bind(mut self, name: impl Into<String>, v: Value) -> Valuation {
        self.bindings.insert(name.into(), v);
        self
    }
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }
}

/// Evaluate a first-order term under a valuation.
pub fn eval_term(t: &Term, v: &Valuation) -> Result<Value, ValueError> {
    match t {
        Term::Var(x) => v
            .get(x)
            .cloned()
            .ok_or_else(|| ValueError::UnboundVariable(x.clone())),
        Term::UnitVal => Ok(Value::UnitV),
        Term::Pair(a, b) => Ok(Value::pair(eval_term(a, v)?, eval_term(b, v)?)),
        Term::Proj1(a) => match eval_term(a, v)? {
            Value::PairV(x, _) => Ok(*x),
            other => Err(ValueError::TypeMismatch(format!(
                "projection of non-pair {other}"
            ))),
        },
        Term::Proj2(a) => match eval_term(a, v)? {
            Value::PairV(_, y) => Ok(*y),
            other => Err(ValueError::TypeMismatch(format!(
                "projection of non-pair {other}"
            ))),
        },
    }
}

/// Standard classical satisfaction for Δ0 formulas; bounded quantifiers range
/// over the members of the bound term's value.
pub fn eval_delta0(f: &Formula, v: &Valuation) -> Result<bool, ValueError> {
    match f {
        Formula::EqU(a, b) => Ok(eval_term(a, v)? == eval_term(b, v)?),
        Formula::NeqU(a, b) => Ok(eval_term(a, v)? != eval_term(b, v)?),
        Formula::Top => Ok(true),
        Formula::Bot => Ok(false),
        Formula::And(a, b) => Ok(eval_delta0(a, v)? && eval_delta0(b, v)?),
        Formula::Or(a, b) => Ok(eval_delta0(a, v)? || eval_delta0(b, v)?),
        Formula::ForallIn(x, _, t, body) => {
            let set = eval_term(t, v)?;
            let Value::SetV(elems) = set else {
                return Err(ValueError::TypeMismatch(format!(
                    "quantifier bound {t} is not a set"
                )));
            };
            for e in elems {
                let v2 = v.clone().bind(x.clone(), e);
                if !eval_delta0(body, &v2)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::ExistsIn(x, _, t, body) => {
            let set = eval_term(t, v)?;
            let Value::SetV(elems) = set else {
                return Err(ValueError::TypeMismatch(format!(
                    "quantifier bound {t} is not a set"
                )));
            };
            for e in elems {
                let v2 = v.clone().bind(x.clone(), e);
                if eval_delta0(body, &v2)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Default cap on exhaustive enumeration: exceeding it is an error, never a
/// silent truncation.
pub const ENUM_CAP: u64 = 1 << 16;

/// Number of values of type `ty` over `universe` atoms, saturating.
pub fn count_values(ty: &ObjType, universe_size: usize) -> u128 {
    match ty {
        ObjType::U => universe_size as u128,
        ObjType::Unit => 1,
        ObjType::Prod(a, b) => {
            count_values(a, universe_size).saturating_mul(count_values(b, universe_size))
        }
        ObjType::SetOf(e) => {
            let n = count_values(e, universe_size);
            if n >= 128 {
                u128::MAX
            } else {
                1u128.checked_shl(n as u32).unwrap_or(u128::MAX)
            }
        }
    }
}

/// Exhaustively enumerate all values of `ty` over the universe, in canonical
/// order, erroring if the count exceeds `cap`.
pub fn enumerate_values(
    ty: &ObjType,
    universe: &[String],
    cap: u64,
) -> Result<Vec<Value>, ValueError> {
    let need = count_values(ty, universe.len());
    if need > cap as u128 {
        return Err(ValueError::BudgetExceeded {
            ty: ty.to_string(),
            need,
            cap,
        });
    }
    let mut out = enumerate_unchecked(ty, universe);
    out.sort_by(Value::cmp_canonical);
    Ok(out)
}

fn enumerate_unchecked(ty: &ObjType, universe: &[String]) -> Vec<Value> {
    match ty {
        ObjType::U => universe.iter().map(Value::atom).collect(),
        ObjType::Unit => vec![Value::UnitV],
        ObjType::Prod(a, b) => {
            let xs = enumerate_unchecked(a, universe);
            let ys = enumerate_unchecked(b, universe);
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for x in &xs {
                for y in &ys {
                    out.push(Value::pair(x.clone(), y.clone()));
                }
            }
            out
        }
        ObjType::SetOf(e) => {
            let elems = enumerate_unchecked(e, universe);
            let mut out = Vec::with_capacity(1 << elems.len());
            for mask in 0u64..(1u64 << elems.len()) {
                let subset: Vec<Value> = elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, v)| v.clone())
                    .collect();
                out.push(Value::set(subset));
            }
            out
        }
    }
}

/// Draw a value of type `ty`: uniform over the exhaustive enumeration when the
/// space fits the cap, otherwise by geometric size control on sets.
pub fn sample_value<R: Rng>(ty: &ObjType, universe: &[String], rng: &mut R) -> Value {
    if count_values(ty, universe.len()) <= ENUM_CAP as u128 {
        let all = enumerate_unchecked(ty, universe);
        let mut all = all;
        all.sort_by(Value::cmp_canonical);
        let i = rng.gen_range(0..all.len());
        return all[i].clone();
    }
    sample_structural(ty, universe, rng)
}

/// Enumerate every valuation of a type context, as the cartesian product of
/// the per-variable value spaces.  The cap bounds the total product size.
pub fn enumerate_valuations(
    ctx: &crate::kernel::TypeContext,
    universe: &[String],
    cap: u64,
) -> Result<Vec<Valuation>, ValueError> {
    let mut total: u128 = 1;
    for ty in ctx.values() {
        total = total.saturating_mul(count_values(ty, universe.len()));
        if total > cap as u128 {
            return Err(ValueError::BudgetExceeded {
                ty: format!("context of {} variables", ctx.len()),
                need: total,
                cap,
            });
        }
    }
    let mut out = vec![Valuation::new(universe.to_vec())];
    for (name, ty) in ctx {
        let choices = enumerate_values(ty, universe, cap)?;
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for base in &out {
            for c in &choices {
                next.push(base.clone().bind(name.clone(), c.clone()));
            }
        }
        out = next;
    }
    Ok(out)
}

fn sample_structural<R: Rng>(ty: &ObjType, universe: &[String], rng: &mut R) -> Value {
    match ty {
        ObjType::U => {
            let i = rng.gen_range(0..universe.len());
            Value::atom(universe[i].clone())
        }
        ObjType::Unit => Value::UnitV,
        ObjType::Prod(a, b) => Value::pair(
            sample_structural(a, universe, rng),
            sample_structural(b, universe, rng),
        ),
        ObjType::SetOf(e) => {
            // geometric size control: mean ~2 elements, capped
            let mut n = 0usize;
            while n < 6 && rng.gen_bool(0.6) {
                n += 1;
            }
            let elems = (0..n).map(|_| sample_structural(e, universe, rng)).collect();
            Value::set(elems)
        }
    }
}

/// All terms reachable from a variable by projections, with their types.
fn accessible_terms(t: Term, ty: &ObjType, out: &mut Vec<(Term, ObjType)>) {
    if let ObjType::Prod(a, b) = ty {
        accessible_terms(Term::proj1(t.clone()), a, out);
        accessible_terms(Term::proj2(t.clone()), b, out);
    }
    out.push((t, ty.clone()));
}

/// Draw a well-typed Δ0 formula over the context, with quantifier nesting at
/// most `depth`.  Atoms compare `U`-typed accessible terms; quantifiers are
/// bounded by accessible set-typed terms and extend the vocabulary with the
/// bound variable.  Contexts without `U` or set terms fall back to `⊤`/`⊥`.
pub fn sample_formula<R: Rng>(
    ctx: &crate::kernel::TypeContext,
    depth: u32,
    rng: &mut R,
) -> Formula {
    let mut terms = Vec::new();
    for (name, ty) in ctx {
        accessible_terms(Term::var(name.clone()), ty, &mut terms);
    }
    let mut fresh = 0usize;
    sample_formula_at(&terms, depth, &mut fresh, rng)
}

fn sample_formula_at<R: Rng>(
    terms: &[(Term, ObjType)],
    depth: u32,
    fresh: &mut usize,
    rng: &mut R,
) -> Formula {
    let urs: Vec<&Term> = terms
        .iter()
        .filter(|(_, ty)| *ty == ObjType::U)
        .map(|(t, _)| t)
        .collect();
    let sets: Vec<(&Term, &ObjType)> = terms
        .iter()
        .filter_map(|(t, ty)| match ty {
            ObjType::SetOf(e) => Some((t, e.as_ref())),
            _ => None,
        })
        .collect();
    let atom = |rng: &mut R| -> Formula {
        if urs.len() < 2 || rng.gen_ratio(1, 8) {
            return if rng.gen_bool(0.5) {
                Formula::Top
            } else {
                Formula::Bot
            };
        }
        let a = urs[rng.gen_range(0..urs.len())].clone();
        let b = urs[rng.gen_range(0..urs.len())].clone();
        if rng.gen_bool(0.5) {
            Formula::EqU(a, b)
        } else {
            Formula::NeqU(a, b)
        }
    };
    if depth == 0 {
        return atom(rng);
    }
    match rng.gen_range(0..6u8) {
        0 => atom(rng),
        1 | 2 => {
            let l = sample_formula_at(terms, depth - 1, fresh, rng);
            let r = sample_formula_at(terms, depth - 1, fresh, rng);
            if rng.gen_bool(0.5) {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        _ if !sets.is_empty() => {
            let (bound, elem_ty) = sets[rng.gen_range(0..sets.len())];
            let name = format!("qf{fresh}");
            *fresh += 1;
            let mut inner = terms.to_vec();
            accessible_terms(Term::var(name.clone()), elem_ty, &mut inner);
            let body = sample_formula_at(&inner, depth - 1, fresh, rng);
            if rng.gen_bool(0.5) {
                Formula::forall(name, elem_ty.clone(), bound.clone(), body)
            } else {
                Formula::exists(name, elem_ty.clone(), bound.clone(), body)
            }
        }
        _ => atom(rng),
    }
}
