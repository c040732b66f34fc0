//! Reduction of nested relational types to monadic types.
//!
//! A monadic type is built from `U` with `Set` alone, so it is a `U_n`:
//! `U_0 = U`, `U_{n+1} = Set(U_n)`.  Arbitrary types embed into monadic ones
//! through a Kuratowski encoding of pairs `(a, b) ↦ {{a}, {a, b}}`, with
//! upcasts (iterated singletons) lifting both components to a common depth
//! first.  [`convert_expr`] performs the embedding in NRC,
//! [`convert_inv_expr`] inverts it in NRC[Get], and [`im_convert_formula`]
//! is a Δ0 predicate holding exactly on the embedding's image.

use crate::kernel::{expand_eq, expand_mem, fresh_name, Formula, ObjType, SugarAtom, Term};
use crate::nrc::{case_expr, eq_expr, intersect_expr, NrcExpr};

/// The depth `d(T)`: `Convert` maps values of `T` to values of `U_{d(T)}`.
pub type MonadicDepth = u64;

pub fn depth_of(t: &ObjType) -> MonadicDepth {
    match t {
        ObjType::U | ObjType::Unit => 0,
        ObjType::SetOf(s) => 1 + depth_of(s),
        ObjType::Prod(a, b) => 2 + depth_of(a).max(depth_of(b)),
    }
}

/// The monadic type `U_d`.
pub fn monadic_type(d: MonadicDepth) -> ObjType {
    (0..d).fold(ObjType::U, |t, _| ObjType::set(t))
}

/// `↑`: the `(m − n)`-fold singleton embedding `U_n → U_m`.
pub fn up_expr(n: MonadicDepth, m: MonadicDepth, e: NrcExpr) -> NrcExpr {
    (n..m).fold(e, |e, _| NrcExpr::singleton(e))
}

/// `↓`: the `(m − n)`-fold `Get`, inverse to [`up_expr`] on its image.
pub fn down_expr(m: MonadicDepth, n: MonadicDepth, e: NrcExpr) -> NrcExpr {
    (n..m).fold(e, |e, _| NrcExpr::get(e))
}

/// `AllPairs_T : Set(T) → Set(T × T)`, all pairs of *distinct* elements of
/// the input; empty exactly when the input has at most one element.
pub fn all_pairs_expr(x: &NrcExpr) -> NrcExpr {
    let avoid = x.free_vars();
    let z = fresh_name("apz", &avoid);
    let y = fresh_name("apy", &avoid);
    NrcExpr::bigunion(
        z.clone(),
        x.clone(),
        NrcExpr::bigunion(
            y.clone(),
            NrcExpr::diff(x.clone(), NrcExpr::singleton(NrcExpr::var(&z))),
            NrcExpr::singleton(NrcExpr::pair(NrcExpr::var(&y), NrcExpr::var(&z))),
        ),
    )
}

fn pair_hat(n1: MonadicDepth, n2: MonadicDepth, e1: NrcExpr, e2: NrcExpr) -> NrcExpr {
    let m = n1.max(n2);
    let u1 = up_expr(n1, m, e1);
    let u2 = up_expr(n2, m, e2);
    NrcExpr::union(
        NrcExpr::singleton(NrcExpr::singleton(u1.clone())),
        NrcExpr::singleton(NrcExpr::union(
            NrcExpr::singleton(u1),
            NrcExpr::singleton(u2),
        )),
    )
}

/// `P̂air_{n1,n2} : U_{n1} × U_{n2} → U_{max(n1,n2)+2}` as an expression
/// free in `x1` and `x2`: the Kuratowski set `{{↑x1}, {↑x1, ↑x2}}`.
pub fn kuratowski_pair_expr(n1: MonadicDepth, n2: MonadicDepth) -> NrcExpr {
    pair_hat(n1, n2, NrcExpr::var("x1"), NrcExpr::var("x2"))
}

fn proj_hat(i: u8, n1: MonadicDepth, n2: MonadicDepth, x: &NrcExpr) -> NrcExpr {
    let m = n1.max(n2);
    let elem = monadic_type(m + 1);
    let inner = monadic_type(m);
    let ap = all_pairs_expr(x);
    let pair_t = ObjType::prod(elem.clone(), elem);
    // a degenerate encoding {{↑a}} has no pair of distinct elements
    let degenerate = eq_expr(
        &ObjType::set(pair_t.clone()),
        &ap,
        &NrcExpr::EmptyE(pair_t),
    );
    let n = if i == 1 { n1 } else { n2 };
    let from_tower = down_expr(m + 2, n, x.clone());
    let proper = if i == 1 {
        // ⋃ { π1 z ∩ π2 z | z ∈ AllPairs(x) } is the singleton {↑x1}
        let z = fresh_name("kpz", &x.free_vars());
        let both = intersect_expr(
            &inner,
            NrcExpr::proj(1, NrcExpr::var(&z)),
            NrcExpr::proj(2, NrcExpr::var(&z)),
        );
        down_expr(m + 1, n1, NrcExpr::bigunion(z, ap, both))
    } else {
        // single out the two-element set {↑x1, ↑x2}, remove ↑x1, downcast
        let first = up_expr(n1, m + 1, proj_hat(1, n1, n2, x));
        let two = NrcExpr::get(NrcExpr::diff(
            x.clone(),
            NrcExpr::singleton(first.clone()),
        ));
        down_expr(m + 1, n2, NrcExpr::diff(two, first))
    };
    case_expr(&degenerate, &from_tower, &proper, &monadic_type(n))
}

/// `π̂_i : U_{max(n1,n2)+2} → U_{n_i}` as an expression free in `x`,
/// satisfying `π̂_i(P̂air(a1, a2)) = a_i` — including for the degenerate
/// encoding `P̂air(a, a) = {{↑a}}`.
pub fn kuratowski_proj_expr(i: u8, n1: MonadicDepth, n2: MonadicDepth) -> NrcExpr {
    proj_hat(i, n1, n2, &NrcExpr::var("x"))
}

fn freshk(k: &mut u64) -> String {
    let v = format!("k{k}");
    *k += 1;
    v
}

fn convert_of(t: &ObjType, e: NrcExpr, k: &mut u64) -> NrcExpr {
    match t {
        ObjType::U => e,
        // unit collapses to the reserved default atom
        ObjType::Unit => NrcExpr::get(NrcExpr::EmptyE(ObjType::U)),
        ObjType::SetOf(s) => {
            let z = freshk(k);
            let body = convert_of(s, NrcExpr::var(&z), k);
            NrcExpr::bigunion(z, e, NrcExpr::singleton(body))
        }
        ObjType::Prod(a, b) => {
            let ca = convert_of(a, NrcExpr::proj(1, e.clone()), k);
            let cb = convert_of(b, NrcExpr::proj(2, e), k);
            pair_hat(depth_of(a), depth_of(b), ca, cb)
        }
    }
}

/// `Convert_T : T → U_{d(T)}` as an NRC expression free in `x`: an
/// injection of arbitrary instances into monadic ones.
pub fn convert_expr(t: &ObjType) -> NrcExpr {
    convert_of(t, NrcExpr::var("x"), &mut 0)
}

fn convert_inv_of(t: &ObjType, e: NrcExpr, k: &mut u64) -> NrcExpr {
    match t {
        ObjType::U => e,
        ObjType::Unit => NrcExpr::UnitE,
        ObjType::SetOf(s) => {
            let z = freshk(k);
            let body = convert_inv_of(s, NrcExpr::var(&z), k);
            NrcExpr::bigunion(z, e, NrcExpr::singleton(body))
        }
        ObjType::Prod(a, b) => {
            let (da, db) = (depth_of(a), depth_of(b));
            let pa = convert_inv_of(a, proj_hat(1, da, db, &e), k);
            let pb = convert_inv_of(b, proj_hat(2, da, db, &e), k);
            NrcExpr::pair(pa, pb)
        }
    }
}

/// `Convert⁻¹_T : U_{d(T)} → T` as an NRC[Get] expression free in `x`, a
/// left inverse of [`convert_expr`]: `Convert⁻¹(Convert(o)) = o`.
pub fn convert_inv_expr(t: &ObjType) -> NrcExpr {
    convert_inv_of(t, NrcExpr::var("x"), &mut 0)
}

/// `IsSing(x)` for `x : Set(elem)`: exactly one element.
pub fn is_sing_formula(elem: &ObjType, x: &Term) -> Formula {
    let avoid = x.free_vars();
    let z = fresh_name("sz", &avoid);
    let w = fresh_name("sw", &avoid);
    Formula::exists(
        z.clone(),
        elem.clone(),
        x.clone(),
        Formula::forall(
            w.clone(),
            elem.clone(),
            x.clone(),
            expand_eq(elem, &Term::var(w), &Term::var(z)),
        ),
    )
}

/// `IsTwo(x)` for `x : Set(elem)`: exactly two distinct elements.
pub fn is_two_formula(elem: &ObjType, x: &Term) -> Formula {
    let avoid = x.free_vars();
    let z = fresh_name("tz", &avoid);
    let z2 = fresh_name("tv", &avoid);
    let w = fresh_name("tw", &avoid);
    Formula::exists(
        z.clone(),
        elem.clone(),
        x.clone(),
        Formula::exists(
            z2.clone(),
            elem.clone(),
            x.clone(),
            Formula::and(
                expand_eq(elem, &Term::var(&z), &Term::var(&z2)).negate(),
                Formula::forall(
                    w.clone(),
                    elem.clone(),
                    x.clone(),
                    Formula::or(
                        expand_eq(elem, &Term::var(&w), &Term::var(&z)),
                        expand_eq(elem, &Term::var(&w), &Term::var(&z2)),
                    ),
                ),
            ),
        ),
    )
}

/// `Im_P̂air_{m,m}(x)`: `x : U_{m+2}` is a Kuratowski pair of `U_m` values.
/// With `literal` the `IsTwo` clause keeps the containment direction exactly
/// as printed in the source material, which is unsatisfiable on proper
/// pairs; the default flips it to "the singleton's element is in the
/// two-element set".
fn im_pair_mm(m: MonadicDepth, x: &Term, literal: bool) -> Formula {
    let elem = monadic_type(m + 1);
    let inner = monadic_type(m);
    let avoid = x.free_vars();
    let z = fresh_name("pz", &avoid);
    let z2 = fresh_name("pv", &avoid);
    let sing_branch = Formula::and(
        is_sing_formula(&elem, x),
        Formula::exists(
            z.clone(),
            elem.clone(),
            x.clone(),
            is_sing_formula(&inner, &Term::var(&z)),
        ),
    );
    let y = fresh_name("py", &avoid);
    let containment = if literal {
        Formula::forall(
            y.clone(),
            inner.clone(),
            Term::var(&z),
            expand_mem(&inner, &Term::var(&y), &Term::var(&z2)),
        )
    } else {
        Formula::forall(
            y.clone(),
            inner.clone(),
            Term::var(&z2),
            expand_mem(&inner, &Term::var(&y), &Term::var(&z)),
        )
    };
    let two_branch = Formula::and(
        is_two_formula(&elem, x),
        Formula::exists(
            z.clone(),
            elem.clone(),
            x.clone(),
            Formula::exists(
                z2.clone(),
                elem.clone(),
                x.clone(),
                Formula::and(
                    Formula::and(
                        is_two_formula(&inner, &Term::var(&z)),
                        is_sing_formula(&inner, &Term::var(&z2)),
                    ),
                    containment,
                ),
            ),
        ),
    );
    Formula::or(sing_branch, two_branch)
}

/// A singleton tower `U_from → U_to`: `y` is an iterated singleton down to
/// depth `to`, whose core satisfies `core`.
fn im_tower(
    y: &Term,
    from: MonadicDepth,
    to: MonadicDepth,
    core: &dyn Fn(&Term) -> Formula,
) -> Formula {
    if from == to {
        return core(y);
    }
    let below = monadic_type(from - 1);
    let z = fresh_name("uz", &y.free_vars());
    Formula::and(
        is_sing_formula(&below, y),
        Formula::forall(
            z.clone(),
            below,
            y.clone(),
            im_tower(&Term::var(&z), from - 1, to, core),
        ),
    )
}

fn im_convert_of(t: &ObjType, x: &Term, literal: bool) -> Formula {
    match t {
        // every atom is its own image; the unit image is the single default
        // atom, which the constant-free Δ0 term language cannot name
        ObjType::U | ObjType::Unit => Formula::Top,
        ObjType::SetOf(s) => {
            let z = fresh_name("mz", &x.free_vars());
            Formula::forall(
                z.clone(),
                monadic_type(depth_of(s)),
                x.clone(),
                im_convert_of(s, &Term::var(&z), literal),
            )
        }
        ObjType::Prod(a, b) => {
            let (da, db) = (depth_of(a), depth_of(b));
            let m = da.max(db);
            let elem = monadic_type(m + 1);
            let inner = monadic_type(m);
            let avoid = x.free_vars();
            let shape = im_pair_mm(m, x, literal);
            // first component: the content of any singleton element of x
            let s = fresh_name("cs", &avoid);
            let av = fresh_name("ca", &avoid);
            let comp1 = Formula::forall(
                s.clone(),
                elem.clone(),
                x.clone(),
                SugarAtom::Implies(
                    is_sing_formula(&inner, &Term::var(&s)),
                    Formula::forall(
                        av.clone(),
                        inner.clone(),
                        Term::var(&s),
                        im_tower(&Term::var(&av), m, da, &|c| im_convert_of(a, c, literal)),
                    ),
                )
                .expand(),
            );
            // second component, degenerate pair {{↑a}}: the same content
            let bv = fresh_name("cb", &avoid);
            let deg2 = SugarAtom::Implies(
                is_sing_formula(&elem, x),
                Formula::forall(
                    s.clone(),
                    elem.clone(),
                    x.clone(),
                    Formula::forall(
                        bv.clone(),
                        inner.clone(),
                        Term::var(&s),
                        im_tower(&Term::var(&bv), m, db, &|c| im_convert_of(b, c, literal)),
                    ),
                ),
            )
            .expand();
            // second component, proper pair: the element outside every
            // singleton of x is ↑x2
            let tv = fresh_name("ct", &avoid);
            let sv = fresh_name("cu", &avoid);
            let outside = Formula::forall(
                sv.clone(),
                elem.clone(),
                x.clone(),
                SugarAtom::Implies(
                    is_sing_formula(&inner, &Term::var(&sv)),
                    SugarAtom::Not(expand_mem(&inner, &Term::var(&bv), &Term::var(&sv)))
                        .expand(),
                )
                .expand(),
            );
            let nondeg2 = Formula::forall(
                tv.clone(),
                elem.clone(),
                x.clone(),
                Formula::forall(
                    bv.clone(),
                    inner.clone(),
                    Term::var(&tv),
                    SugarAtom::Implies(
                        outside,
                        im_tower(&Term::var(&bv), m, db, &|c| im_convert_of(b, c, literal)),
                    )
                    .expand(),
                ),
            );
            Formula::and(Formula::and(shape, comp1), Formula::and(deg2, nondeg2))
        }
    }
}

/// `Im_Convert_T`, a Δ0 formula free in `x : U_{d(T)}` holding exactly on
/// the image of [`convert_expr`] (up to the unit caveat in the module
/// docs).
pub fn im_convert_formula(t: &ObjType) -> Formula {
    im_convert_of(t, &Term::var("x"), false)
}

/// [`im_convert_formula`] with the pair-image containment kept literally as
/// printed in the source material; rejects every proper pair, and is kept
/// only for comparison.
pub fn im_convert_formula_literal(t: &ObjType) -> Formula {
    im_convert_of(t, &Term::var("x"), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::typecheck_formula;
    use crate::nrc::{eval_nrc_typed, typecheck_nrc};
    use crate::values::{enumerate_values, eval_delta0, Valuation, Value};
    use crate::kernel::TypeContext;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn uni() -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }
    fn a(n: &str) -> Value {
        Value::atom(n)
    }
    fn set(xs: Vec<Value>) -> Value {
        Value::set(xs)
    }

    fn eval1(e: &NrcExpr, ty: &ObjType, v: &Value, universe: &[&str]) -> Value {
        let mut ctx = TypeContext::new();
        ctx.insert("x".to_string(), ty.clone());
        let env = Valuation::new(universe.iter().map(|s| s.to_string()).collect())
            .bind("x", v.clone());
        eval_nrc_typed(e, &ctx, &env).unwrap()
    }

    #[test]
    fn depth_clauses() {
        // [PAPER] d(U) = 0
        assert_eq!(depth_of(&ObjType::U), 0);
        // [TRIVIAL] d(Set(T)) = 1 + d(T), d(Unit) = 0
        assert_eq!(depth_of(&ObjType::set(ObjType::U)), 1);
        assert_eq!(depth_of(&ObjType::Unit), 0);
        // [DERIVED] d(U × Set(U)) = 2 + max(0, 1)
        assert_eq!(depth_of(&ObjType::prod(ObjType::U, ObjType::set(ObjType::U))), 3);
        assert_eq!(monadic_type(2), ObjType::set(ObjType::set(ObjType::U)));
    }

    #[test]
    fn kuratowski_pair_values() {
        // [PAPER] P̂air_{0,0}(a, b) = {{a}, {a,b}}
        let p = kuratowski_pair_expr(0, 0);
        let mut ctx = TypeContext::new();
        ctx.insert("x1".to_string(), ObjType::U);
        ctx.insert("x2".to_string(), ObjType::U);
        let env = Valuation::new(vec!["a".into(), "b".into()])
            .bind("x1", a("a"))
            .bind("x2", a("b"));
        assert_eq!(
            eval_nrc_typed(&p, &ctx, &env).unwrap(),
            set(vec![set(vec![a("a")]), set(vec![a("a"), a("b")])])
        );
        // [DERIVED] the degenerate pair collapses to {{a}}
        let env2 = Valuation::new(vec!["a".into()]).bind("x1", a("a")).bind("x2", a("a"));
        assert_eq!(
            eval_nrc_typed(&p, &ctx, &env2).unwrap(),
            set(vec![set(vec![a("a")])])
        );
    }

    #[test]
    fn projection_laws_exhaustive() {
        // [PAPER] π̂_i(P̂air(a1, a2)) = a_i, exhaustively over three atoms
        // for depths (n1, n2) ∈ {0, 1}²
        for n1 in 0..2u64 {
            for n2 in 0..2u64 {
                let m = n1.max(n2);
                let enc_ty = monadic_type(m + 2);
                let p1 = kuratowski_proj_expr(1, n1, n2);
                let p2 = kuratowski_proj_expr(2, n1, n2);
                let vs1 = enumerate_values(&monadic_type(n1), &uni(), 1 << 10).unwrap();
                let vs2 = enumerate_values(&monadic_type(n2), &uni(), 1 << 10).unwrap();
                for v1 in &vs1 {
                    for v2 in &vs2 {
                        let pair = kuratowski_pair_expr(n1, n2);
                        let mut ctx = TypeContext::new();
                        ctx.insert("x1".to_string(), monadic_type(n1));
                        ctx.insert("x2".to_string(), monadic_type(n2));
                        let env = Valuation::new(uni())
                            .bind("x1", v1.clone())
                            .bind("x2", v2.clone());
                        let enc = eval_nrc_typed(&pair, &ctx, &env).unwrap();
                        assert_eq!(
                            &eval1(&p1, &enc_ty, &enc, &["a", "b", "c"]),
                            v1,
                            "first projection at ({n1},{n2}) on {v1}, {v2}"
                        );
                        assert_eq!(
                            &eval1(&p2, &enc_ty, &enc, &["a", "b", "c"]),
                            v2,
                            "second projection at ({n1},{n2}) on {v1}, {v2}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn convert_round_trips() {
        // [DERIVED] Convert⁻¹ ∘ Convert is the identity on 200 samples at
        // three mixed types
        let types = [
            ObjType::prod(ObjType::U, ObjType::set(ObjType::U)),
            ObjType::set(ObjType::prod(ObjType::U, ObjType::U)),
            ObjType::prod(ObjType::set(ObjType::U), ObjType::prod(ObjType::U, ObjType::Unit)),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for t in &types {
            let conv = convert_expr(t);
            let inv = convert_inv_expr(t);
            let mono = monadic_type(depth_of(t));
            // the converted value has the advertised monadic type
            let mut ctx = TypeContext::new();
            ctx.insert("x".to_string(), t.clone());
            assert_eq!(typecheck_nrc(&ctx, &conv).unwrap(), mono);
            for _ in 0..200 {
                let o = crate::values::sample_value(t, &uni(), &mut rng);
                let enc = eval1(&conv, t, &o, &["a", "b", "c"]);
                assert!(enc.has_type(&mono));
                assert_eq!(eval1(&inv, &mono, &enc, &["a", "b", "c"]), o, "type {t}");
            }
        }
    }

    #[test]
    fn image_formula_is_exact_on_pairs() {
        // [DERIVED] at T = U × U over two atoms, Im_Convert holds on a
        // U_2 value iff it is the encoding of some pair; on each such value
        // Convert(Convert⁻¹(v)) = v
        let t = ObjType::prod(ObjType::U, ObjType::U);
        let mono = monadic_type(depth_of(&t));
        let im = im_convert_formula(&t);
        let mut ctx = TypeContext::new();
        ctx.insert("x".to_string(), mono.clone());
        typecheck_formula(&ctx, &im).unwrap();
        let two: Vec<String> = vec!["a".into(), "b".into()];
        let conv = convert_expr(&t);
        let inv = convert_inv_expr(&t);
        let image: BTreeSet<Value> = enumerate_values(&t, &two, 1 << 10)
            .unwrap()
            .into_iter()
            .map(|o| eval1(&conv, &t, &o, &["a", "b"]))
            .collect();
        for v in enumerate_values(&mono, &two, 1 << 10).unwrap() {
            let env = Valuation::new(two.clone()).bind("x", v.clone());
            let holds = eval_delta0(&im, &env).unwrap();
            assert_eq!(holds, image.contains(&v), "candidate {v}");
            if holds {
                let back = eval1(&conv, &t, &eval1(&inv, &mono, &v, &["a", "b"]), &["a", "b"]);
                assert_eq!(back, v);
            }
        }
    }

    #[test]
    fn image_formula_rejects_non_kuratowski_set() {
        // [DERIVED] {{a},{b,c}} with three distinct atoms decomposes as no
        // Kuratowski pair
        let t = ObjType::prod(ObjType::U, ObjType::U);
        let im = im_convert_formula(&t);
        let v = set(vec![set(vec![a("a")]), set(vec![a("b"), a("c")])]);
        let env = Valuation::new(uni()).bind("x", v);
        assert!(!eval_delta0(&im, &env).unwrap());
    }

    #[test]
    fn literal_pair_image_rejects_proper_pairs() {
        // [DERIVED] the containment direction as printed rejects the
        // encoding of ⟨a, b⟩ with a ≠ b, while the corrected form accepts it
        let t = ObjType::prod(ObjType::U, ObjType::U);
        let v = set(vec![set(vec![a("a")]), set(vec![a("a"), a("b")])]);
        let env = Valuation::new(uni()).bind("x", v);
        assert!(eval_delta0(&im_convert_formula(&t), &env).unwrap());
        assert!(!eval_delta0(&im_convert_formula_literal(&t), &env).unwrap());
    }

    #[test]
    fn image_formula_on_monadic_type_is_total() {
        // [TRIVIAL] Convert is the identity on Set(U), so every value is in
        // the image
        let t = ObjType::set(ObjType::U);
        let im = im_convert_formula(&t);
        let two: Vec<String> = vec!["a".into(), "b".into()];
        for v in enumerate_values(&monadic_type(1), &two, 1 << 10).unwrap() {
            let env = Valuation::new(two.clone()).bind("x", v);
            assert!(eval_delta0(&im, &env).unwrap());
        }
    }
}
