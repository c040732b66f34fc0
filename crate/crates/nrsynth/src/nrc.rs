//! NRC[Get]: abstract syntax, typing, evaluation, derived operators, and the
//! `Verify` compiler from Δ0 formulas to Boolean expressions.
//!
//! The core language is variables, unit, pairing/projection, singleton, big
//! union (`⋃{e2 | x ∈ e1}`), empty set, binary union, difference, and `Get`
//! (singleton extraction with a type-directed default). Booleans are values
//! of type `Set(Unit)`: `∅` is false, `{()}` is true. Everything else —
//! conditionals, equality, membership, intersection, boolean connectives — is
//! sugar elaborated into the core before typing, sizing, or evaluation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kernel::{fresh_name, Formula, ObjType, Term, TypeContext};
use crate::values::{Valuation, Value, ValueError, C0};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NrcExpr {
    Var(String),
    UnitE,
    PairE(Box<NrcExpr>, Box<NrcExpr>),
    ProjE(u8, Box<NrcExpr>),
    SingletonE(Box<NrcExpr>),
    /// `⋃ { body | binder ∈ source }`
    BigUnionE(String, Box<NrcExpr>, Box<NrcExpr>),
    EmptyE(ObjType),
    UnionE(Box<NrcExpr>, Box<NrcExpr>),
    DiffE(Box<NrcExpr>, Box<NrcExpr>),
    GetE(Box<NrcExpr>),
}

use NrcExpr::*;

impl NrcExpr {
    pub fn var(x: impl Into<String>) -> NrcExpr {
        Var(x.into())
    }
    pub fn pair(a: NrcExpr, b: NrcExpr) -> NrcExpr {
        PairE(Box::new(a), Box::new(b))
    }
    pub fn proj(i: u8, e: NrcExpr) -> NrcExpr {
        assert!(i == 1 || i == 2);
        ProjE(i, Box::new(e))
    }
    pub fn singleton(e: NrcExpr) -> NrcExpr {
        SingletonE(Box::new(e))
    }
    pub fn bigunion(x: impl Into<String>, source: NrcExpr, body: NrcExpr) -> NrcExpr {
        BigUnionE(x.into(), Box::new(source), Box::new(body))
    }
    pub fn union(a: NrcExpr, b: NrcExpr) -> NrcExpr {
        UnionE(Box::new(a), Box::new(b))
    }
    pub fn diff(a: NrcExpr, b: NrcExpr) -> NrcExpr {
        DiffE(Box::new(a), Box::new(b))
    }
    pub fn get(e: NrcExpr) -> NrcExpr {
        GetE(Box::new(e))
    }
    /// The Boolean constant `true = {()}`.
    pub fn tt() -> NrcExpr {
        NrcExpr::singleton(UnitE)
    }
    /// The Boolean constant `false = ∅ : Set(Unit)`.
    pub fn ff() -> NrcExpr {
        EmptyE(ObjType::Unit)
    }

    /// Embed a first-order term as an NRC expression.
    pub fn from_term(t: &Term) -> NrcExpr {
        match t {
            Term::Var(x) => Var(x.clone()),
            Term::UnitVal => UnitE,
            Term::Pair(a, b) => NrcExpr::pair(NrcExpr::from_term(a), NrcExpr::from_term(b)),
            Term::Proj1(a) => NrcExpr::proj(1, NrcExpr::from_term(a)),
            Term::Proj2(a) => NrcExpr::proj(2, NrcExpr::from_term(a)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            UnitE | EmptyE(_) => {}
            PairE(a, b) | UnionE(a, b) | DiffE(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            ProjE(_, e) | SingletonE(e) | GetE(e) => e.collect_free(bound, out),
            BigUnionE(x, src, body) => {
                src.collect_free(bound, out);
                let fresh_here = bound.insert(x.clone());
                body.collect_free(bound, out);
                if fresh_here {
                    bound.remove(x);
                }
            }
        }
    }

    /// Capture-avoiding substitution of expression `e` for variable `x`.
    pub fn substitute(&self, x: &str, e: &NrcExpr) -> NrcExpr {
        match self {
            Var(y) if y == x => e.clone(),
            Var(_) | UnitE | EmptyE(_) => self.clone(),
            PairE(a, b) => NrcExpr::pair(a.substitute(x, e), b.substitute(x, e)),
            UnionE(a, b) => NrcExpr::union(a.substitute(x, e), b.substitute(x, e)),
            DiffE(a, b) => NrcExpr::diff(a.substitute(x, e), b.substitute(x, e)),
            ProjE(i, a) => NrcExpr::proj(*i, a.substitute(x, e)),
            SingletonE(a) => NrcExpr::singleton(a.substitute(x, e)),
            GetE(a) => NrcExpr::get(a.substitute(x, e)),
            BigUnionE(y, src, body) => {
                let src2 = src.substitute(x, e);
                if y == x {
                    NrcExpr::bigunion(y.clone(), src2, (**body).clone())
                } else if e.free_vars().contains(y) && body.free_vars().contains(x) {
                    let mut avoid = body.free_vars();
                    avoid.extend(e.free_vars());
                    avoid.insert(x.to_string());
                    let y2 = fresh_name(y, &avoid);
                    let renamed = body.substitute(y, &Var(y2.clone()));
                    NrcExpr::bigunion(y2, src2, renamed.substitute(x, e))
                } else {
                    NrcExpr::bigunion(y.clone(), src2, body.substitute(x, e))
                }
            }
        }
    }

    /// Core node count (sugar has been elaborated away by construction).
    pub fn size(&self) -> usize {
        match self {
            Var(_) | UnitE | EmptyE(_) => 1,
            PairE(a, b) | UnionE(a, b) | DiffE(a, b) => 1 + a.size() + b.size(),
            ProjE(_, e) | SingletonE(e) | GetE(e) => 1 + e.size(),
            BigUnionE(_, src, body) => 1 + src.size() + body.size(),
        }
    }

    /// Is every big union iterating over a plain variable?
    pub fn is_composition_free(&self) -> bool {
        match self {
            Var(_) | UnitE | EmptyE(_) => true,
            PairE(a, b) | UnionE(a, b) | DiffE(a, b) => {
                a.is_composition_free() && b.is_composition_free()
            }
            ProjE(_, e) | SingletonE(e) | GetE(e) => e.is_composition_free(),
            BigUnionE(_, src, body) => {
                matches!(**src, Var(_)) && src.is_composition_free() && body.is_composition_free()
            }
        }
    }
}

impl fmt::Display for NrcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var(x) => write!(f, "(var {x})"),
            UnitE => write!(f, "(unit)"),
            PairE(a, b) => write!(f, "(pair {a} {b})"),
            ProjE(i, e) => write!(f, "(p{i} {e})"),
            SingletonE(e) => write!(f, "(sing {e})"),
            BigUnionE(x, src, body) => write!(f, "(bigcup {x} {src} {body})"),
            EmptyE(t) => write!(f, "(empty {t})"),
            UnionE(a, b) => write!(f, "(cup {a} {b})"),
            DiffE(a, b) => write!(f, "(diff {a} {b})"),
            GetE(e) => write!(f, "(get {e})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NrcError {
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("type mismatch at {path}: {msg}")]
    TypeMismatch { path: String, msg: String },
    #[error("case at sort U requires Get, which is disabled")]
    CaseAtUrType,
}

/// Compute the output type of `e` under `env` (Fig. 1 typing).
pub fn typecheck_nrc(env: &TypeContext, e: &NrcExpr) -> Result<ObjType, NrcError> {
    fn go(env: &TypeContext, e: &NrcExpr, path: &str) -> Result<ObjType, NrcError> {
        let mismatch = |msg: String| NrcError::TypeMismatch {
            path: path.to_string(),
            msg,
        };
        match e {
            Var(x) => env
                .get(x)
                .cloned()
                .ok_or_else(|| NrcError::UnknownVariable(x.clone())),
            UnitE => Ok(ObjType::Unit),
            PairE(a, b) => Ok(ObjType::prod(
                go(env, a, &format!("{path}.1"))?,
                go(env, b, &format!("{path}.2"))?,
            )),
            ProjE(i, a) => match go(env, a, &format!("{path}.arg"))? {
                ObjType::Prod(l, r) => Ok(if *i == 1 { *l } else { *r }),
                other => Err(mismatch(format!("projection of non-product {other}"))),
            },
            SingletonE(a) => Ok(ObjType::set(go(env, a, &format!("{path}.elem"))?)),
            BigUnionE(x, src, body) => {
                let src_ty = go(env, src, &format!("{path}.src"))?;
                let ObjType::SetOf(elem) = src_ty else {
                    return Err(mismatch(format!("big union over non-set {src_ty}")));
                };
                let mut env2 = env.clone();
                env2.insert(x.clone(), *elem);
                let body_ty = go(&env2, body, &format!("{path}.body"))?;
                match body_ty {
                    ObjType::SetOf(_) => Ok(body_ty),
                    other => Err(mismatch(format!("big union body has non-set type {other}"))),
                }
            }
            EmptyE(t) => Ok(ObjType::set(t.clone())),
            UnionE(a, b) | DiffE(a, b) => {
                let ta = go(env, a, &format!("{path}.l"))?;
                let tb = go(env, b, &format!("{path}.r"))?;
                if ta != tb || !matches!(ta, ObjType::SetOf(_)) {
                    return Err(mismatch(format!(
                        "set operation between {ta} and {tb}"
                    )));
                }
                Ok(ta)
            }
            GetE(a) => match go(env, a, &format!("{path}.arg"))? {
                ObjType::SetOf(t) => Ok(*t),
                other => Err(mismatch(format!("Get of non-set {other}"))),
            },
        }
    }
    go(env, e, "")
}

/// The default element `d_T` returned by `Get` on non-singletons.
pub fn default_value(t: &ObjType) -> Value {
    match t {
        ObjType::U => Value::atom(C0),
        ObjType::Unit => Value::UnitV,
        ObjType::Prod(a, b) => Value::pair(default_value(a), default_value(b)),
        ObjType::SetOf(_) => Value::empty_set(),
    }
}

/// Evaluate a (typechecked) expression. `Get` is total via defaults, so the
/// only possible failures are unbound variables or ill-typed environments.
pub fn eval_nrc(e: &NrcExpr, env: &Valuation) -> Result<Value, ValueError> {
    match e {
        Var(x) => env
            .get(x)
            .cloned()
            .ok_or_else(|| ValueError::UnboundVariable(x.clone())),
        UnitE => Ok(Value::UnitV),
        PairE(a, b) => Ok(Value::pair(eval_nrc(a, env)?, eval_nrc(b, env)?)),
        ProjE(i, a) => match eval_nrc(a, env)? {
            Value::PairV(x, y) => Ok(if *i == 1 { *x } else { *y }),
            other => Err(ValueError::TypeMismatch(format!(
                "projection of non-pair {other}"
            ))),
        },
        SingletonE(a) => Ok(Value::set(vec![eval_nrc(a, env)?])),
        BigUnionE(x, src, body) => {
            let Value::SetV(elems) = eval_nrc(src, env)? else {
                return Err(ValueError::TypeMismatch("big union over non-set".into()));
            };
            let mut out: Vec<Value> = Vec::new();
            for elem in elems {
                let env2 = env.clone().bind(x.clone(), elem);
                let Value::SetV(part) = eval_nrc(body, &env2)? else {
                    return Err(ValueError::TypeMismatch("big union body not a set".into()));
                };
                out.extend(part);
            }
            Ok(Value::set(out))
        }
        EmptyE(_) => Ok(Value::empty_set()),
        UnionE(a, b) => {
            let (Value::SetV(mut xs), Value::SetV(ys)) = (eval_nrc(a, env)?, eval_nrc(b, env)?)
            else {
                return Err(ValueError::TypeMismatch("union of non-sets".into()));
            };
            xs.extend(ys);
            Ok(Value::set(xs))
        }
        DiffE(a, b) => {
            let (Value::SetV(xs), Value::SetV(ys)) = (eval_nrc(a, env)?, eval_nrc(b, env)?)
            else {
                return Err(ValueError::TypeMismatch("difference of non-sets".into()));
            };
            Ok(Value::set(
                xs.into_iter().filter(|x| !ys.contains(x)).collect(),
            ))
        }
        GetE(a) => {
            let Value::SetV(xs) = eval_nrc(a, env)? else {
                return Err(ValueError::TypeMismatch("Get of non-set".into()));
            };
            if xs.len() == 1 {
                Ok(xs.into_iter().next().unwrap())
            } else {
                // need the element type for the default; recover it from the
                // static type when available, else from the first element's
                // shape. Evaluation is always run on typechecked expressions
                // in practice, so we thread the type through `GetDefault`.
                Err(ValueError::TypeMismatch(
                    "Get on non-singleton requires a typed evaluation; use eval_nrc_typed".into(),
                ))
            }
        }
    }
}

/// Evaluate with enough type information to make `Get` total: `env_types`
/// assigns types to the free variables of `e`.
pub fn eval_nrc_typed(
    e: &NrcExpr,
    env_types: &TypeContext,
    env: &Valuation,
) -> Result<Value, ValueError> {
    match e {
        GetE(a) => {
            let Value::SetV(xs) = eval_nrc_typed(a, env_types, env)? else {
                return Err(ValueError::TypeMismatch("Get of non-set".into()));
            };
            if xs.len() == 1 {
                Ok(xs.into_iter().next().unwrap())
            } else {
                let ty = typecheck_nrc(env_types, e)
                    .map_err(|err| ValueError::TypeMismatch(err.to_string()))?;
                Ok(default_value(&ty))
            }
        }
        BigUnionE(x, src, body) => {
            let Value::SetV(elems) = eval_nrc_typed(src, env_types, env)? else {
                return Err(ValueError::TypeMismatch("big union over non-set".into()));
            };
            let src_ty = typecheck_nrc(env_types, src)
                .map_err(|err| ValueError::TypeMismatch(err.to_string()))?;
            let ObjType::SetOf(elem_ty) = src_ty else {
                return Err(ValueError::TypeMismatch("big union over non-set".into()));
            };
            let mut env_types2 = env_types.clone();
            env_types2.insert(x.clone(), *elem_ty);
            let mut out: Vec<Value> = Vec::new();
            for elem in elems {
                let env2 = env.clone().bind(x.clone(), elem);
                let Value::SetV(part) = eval_nrc_typed(body, &env_types2, &env2)? else {
                    return Err(ValueError::TypeMismatch("big union body not a set".into()));
                };
                out.extend(part);
            }
            Ok(Value::set(out))
        }
        Var(_) | UnitE | EmptyE(_) => eval_nrc(e, env),
        PairE(a, b) => Ok(Value::pair(
            eval_nrc_typed(a, env_types, env)?,
            eval_nrc_typed(b, env_types, env)?,
        )),
        ProjE(i, a) => match eval_nrc_typed(a, env_types, env)? {
            Value::PairV(x, y) => Ok(if *i == 1 { *x } else { *y }),
            other => Err(ValueError::TypeMismatch(format!(
                "projection of non-pair {other}"
            ))),
        },
        SingletonE(a) => Ok(Value::set(vec![eval_nrc_typed(a, env_types, env)?])),
        UnionE(a, b) => {
            let (Value::SetV(mut xs), Value::SetV(ys)) = (
                eval_nrc_typed(a, env_types, env)?,
                eval_nrc_typed(b, env_types, env)?,
            ) else {
                return Err(ValueError::TypeMismatch("union of non-sets".into()));
            };
            xs.extend(ys);
            Ok(Value::set(xs))
        }
        DiffE(a, b) => {
            let (Value::SetV(xs), Value::SetV(ys)) = (
                eval_nrc_typed(a, env_types, env)?,
                eval_nrc_typed(b, env_types, env)?,
            ) else {
                return Err(ValueError::TypeMismatch("difference of non-sets".into()));
            };
            Ok(Value::set(
                xs.into_iter().filter(|x| !ys.contains(x)).collect(),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Derived operators
// ---------------------------------------------------------------------------

/// Sugar operators over already-elaborated subexpressions. Elaboration
/// happens before typing, sizing and evaluation, so all reported sizes are
/// core sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NrcSugar {
    /// `if cond then then_ else else_`; branch type must be a set type (or
    /// any type if `Get` is allowed — see [`elaborate_sugar_with`]).
    CaseE(NrcExpr, NrcExpr, NrcExpr, ObjType),
    EqE(ObjType, NrcExpr, NrcExpr),
    MemE(ObjType, NrcExpr, NrcExpr),
    NotE(NrcExpr),
    AndE(NrcExpr, NrcExpr),
    OrE(NrcExpr, NrcExpr),
    IntersectE(ObjType, NrcExpr, NrcExpr),
    MapE(String, NrcExpr, NrcExpr),
}

/// Elaborate a sugar operator into core NRC, allowing `Get` (the default).
pub fn elaborate_sugar(s: &NrcSugar) -> Result<NrcExpr, NrcError> {
    elaborate_sugar_with(s, true)
}

/// Elaborate with `Get` optionally forbidden; `case` at sort `U` (or any
/// non-set branch type reachable only through `Get`) is then rejected.
pub fn elaborate_sugar_with(s: &NrcSugar, allow_get: bool) -> Result<NrcExpr, NrcError> {
    Ok(match s {
        NrcSugar::CaseE(b, e1, e2, branch_ty) => case_expr_with(b, e1, e2, branch_ty, allow_get)?,
        NrcSugar::EqE(ty, a, b) => eq_expr(ty, a, b),
        NrcSugar::MemE(ty, a, b) => mem_expr(ty, a, b),
        NrcSugar::NotE(b) => not_expr(b.clone()),
        NrcSugar::AndE(a, b) => and_expr(a.clone(), b.clone()),
        NrcSugar::OrE(a, b) => NrcExpr::union(a.clone(), b.clone()),
        NrcSugar::IntersectE(elem_ty, a, b) => intersect_expr(elem_ty, a.clone(), b.clone()),
        NrcSugar::MapE(x, src, body) => {
            NrcExpr::bigunion(x.clone(), src.clone(), NrcExpr::singleton(body.clone()))
        }
    })
}

/// `¬ b  =  {()} ∖ b`.
pub fn not_expr(b: NrcExpr) -> NrcExpr {
    NrcExpr::diff(NrcExpr::tt(), b)
}

/// Boolean conjunction: `⋃ { b2 | _ ∈ b1 }`.
pub fn and_expr(b1: NrcExpr, b2: NrcExpr) -> NrcExpr {
    let mut avoid = b2.free_vars();
    avoid.extend(b1.free_vars());
    let x = fresh_name("_w", &avoid);
    NrcExpr::bigunion(x, b1, b2)
}

/// Boolean disjunction is plain union at `Bool`.
pub fn or_expr(b1: NrcExpr, b2: NrcExpr) -> NrcExpr {
    NrcExpr::union(b1, b2)
}

/// `case(B, E1, E2) = ⋃{E1 | x∈B} ∪ ⋃{E2 | x∈¬B}` at set branch types; at
/// other branch types it wraps both branches in singletons and extracts with
/// `Get`.
pub fn case_expr(b: &NrcExpr, e1: &NrcExpr, e2: &NrcExpr, branch_ty: &ObjType) -> NrcExpr {
    case_expr_with(b, e1, e2, branch_ty, true).expect("case elaboration with Get enabled")
}

fn case_expr_with(
    b: &NrcExpr,
    e1: &NrcExpr,
    e2: &NrcExpr,
    branch_ty: &ObjType,
    allow_get: bool,
) -> Result<NrcExpr, NrcError> {
    if matches!(branch_ty, ObjType::SetOf(_)) {
        let mut avoid = e1.free_vars();
        avoid.extend(e2.free_vars());
        avoid.extend(b.free_vars());
        let x = fresh_name("_w", &avoid);
        Ok(NrcExpr::union(
            NrcExpr::bigunion(x.clone(), b.clone(), e1.clone()),
            NrcExpr::bigunion(x, not_expr(b.clone()), e2.clone()),
        ))
    } else if allow_get {
        // lift to Set(branch_ty), select, then extract
        let lifted = case_expr_with(
            b,
            &NrcExpr::singleton(e1.clone()),
            &NrcExpr::singleton(e2.clone()),
            &ObjType::set(branch_ty.clone()),
            allow_get,
        )?;
        Ok(NrcExpr::get(lifted))
    } else {
        Err(NrcError::CaseAtUrType)
    }
}

/// `E1 ∩ E2 = ⋃{ case(x ∈ E2, {x}, ∅) | x ∈ E1 }`.
pub fn intersect_expr(elem_ty: &ObjType, a: NrcExpr, b: NrcExpr) -> NrcExpr {
    let mut avoid = a.free_vars();
    avoid.extend(b.free_vars());
    let x = fresh_name("_x", &avoid);
    let cond = mem_expr(elem_ty, &NrcExpr::var(x.clone()), &b);
    let body = case_expr(
        &cond,
        &NrcExpr::singleton(NrcExpr::var(x.clone())),
        &EmptyE(elem_ty.clone()),
        &ObjType::set(elem_ty.clone()),
    );
    NrcExpr::bigunion(x, a, body)
}

/// Boolean emptiness test for a set expression: true iff the set is empty.
pub fn is_empty_expr(s: NrcExpr) -> NrcExpr {
    let x = fresh_name("_x", &s.free_vars());
    not_expr(NrcExpr::bigunion(x, s, NrcExpr::tt()))
}

/// `=_T` as a Boolean NRC expression, by induction on `T`.
pub fn eq_expr(ty: &ObjType, a: &NrcExpr, b: &NrcExpr) -> NrcExpr {
    match ty {
        ObjType::Unit => NrcExpr::tt(),
        ObjType::U => is_empty_expr(NrcExpr::diff(
            NrcExpr::singleton(a.clone()),
            NrcExpr::singleton(b.clone()),
        )),
        ObjType::Prod(l, r) => and_expr(
            eq_expr(l, &NrcExpr::proj(1, a.clone()), &NrcExpr::proj(1, b.clone())),
            eq_expr(r, &NrcExpr::proj(2, a.clone()), &NrcExpr::proj(2, b.clone())),
        ),
        ObjType::SetOf(elem) => and_expr(sub_expr(elem, a, b), sub_expr(elem, b, a)),
    }
}

/// `⊆` as a Boolean NRC expression: no element of `a` is missing from `b`.
pub fn sub_expr(elem_ty: &ObjType, a: &NrcExpr, b: &NrcExpr) -> NrcExpr {
    let mut avoid = a.free_vars();
    avoid.extend(b.free_vars());
    let x = fresh_name("_x", &avoid);
    not_expr(NrcExpr::bigunion(
        x.clone(),
        a.clone(),
        not_expr(mem_expr(elem_ty, &NrcExpr::var(x), b)),
    ))
}

/// `∈_T` as a Boolean NRC expression: `⋃ { a =_T y | y ∈ b }`.
pub fn mem_expr(elem_ty: &ObjType, a: &NrcExpr, b: &NrcExpr) -> NrcExpr {
    let mut avoid = a.free_vars();
    avoid.extend(b.free_vars());
    let y = fresh_name("_y", &avoid);
    NrcExpr::bigunion(y.clone(), b.clone(), eq_expr(elem_ty, a, &NrcExpr::var(y)))
}

/// Compile a Δ0 formula into a Boolean NRC expression (`Verify_φ`): for every
/// valuation, the result evaluates to `{()}` iff the formula holds.
pub fn compile_verify(f: &Formula) -> NrcExpr {
    match f {
        Formula::EqU(a, b) => eq_expr(&ObjType::U, &NrcExpr::from_term(a), &NrcExpr::from_term(b)),
        Formula::NeqU(a, b) => not_expr(eq_expr(
            &ObjType::U,
            &NrcExpr::from_term(a),
            &NrcExpr::from_term(b),
        )),
        Formula::Top => NrcExpr::tt(),
        Formula::Bot => NrcExpr::ff(),
        Formula::And(a, b) => and_expr(compile_verify(a), compile_verify(b)),
        Formula::Or(a, b) => or_expr(compile_verify(a), compile_verify(b)),
        Formula::ForallIn(x, _, t, body) => not_expr(NrcExpr::bigunion(
            x.clone(),
            NrcExpr::from_term(t),
            not_expr(compile_verify(body)),
        )),
        Formula::ExistsIn(x, _, t, body) => NrcExpr::bigunion(
            x.clone(),
            NrcExpr::from_term(t),
            compile_verify(body),
        ),
    }
}
