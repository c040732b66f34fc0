//! Program synthesis from functionality proofs.
//!
//! The higher-type interpolation pass walks a core, projection-normalized
//! proof of `Θ; Γ ⊢ t = u` (or `t ⊆ u`, `t ∈ u`) whose hypotheses are
//! partitioned into a left part owning `t` and a right part owning `u`, and
//! produces an NRC[Get] expression `E` over the common variables with
//! `t = E = u` (respectively `t ⊆ E ⊆ u`, `t ∈ E`) in every model of the
//! hypotheses.  Right rules at set and Ur-element types splice in Boolean
//! interpolants of their premises, compiled to `Verify` expressions; left
//! rules combine premise expressions with unions.
//!
//! [`synthesize_from_functionality`] is the end-to-end pipeline: check the
//! proof, eliminate admissible rules, normalize projections, then synthesize
//! with the two copies of the specification as the two sides.  The module
//! also provides the domain-check expression and the converse encoding of an
//! NRC expression as a Δ0 implicit definition.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::calculus::{
    check_proof, elaborate_admissible, normalize_projections, theta_members_projection_free,
    CheckError, CheckedProof, ProofNode, Rhs, Rule, Sequent, Side,
};
use crate::interpolate::{interpolate_node, InterpolateError, Partition};
use crate::kernel::{
    expand_eq, expand_mem, expand_sub, fresh_name, Formula, ObjType, Term, TypeContext,
};
use crate::nrc::{case_expr, compile_verify, typecheck_nrc, NrcError, NrcExpr};

/// Synthesized expressions stay within `SYNTHESIS_SIZE_FACTOR · nodes · max
/// sequent size` of the input proof.
pub const SYNTHESIS_SIZE_FACTOR: usize = 50;

/// Which clause of the interpolation invariant produced the expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseKind {
    /// `t = E = u` (equality goal).
    Equal,
    /// `t ⊆ E ⊆ u` (inclusion goal).
    Between,
    /// `t ∈ E` (membership goal).
    Bounding,
}

/// A specification `Σ(o_in, o_out, a⃗)` together with a functionality proof.
///
/// The proof must derive `Σ, Σ′ ⊢ o_out =_T o_out′` where `Σ′` renames
/// `o_out` and every auxiliary variable to its primed copy (`name + "'"`).
#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    /// Types of the input, output and auxiliary variables (unprimed).
    pub ctx: TypeContext,
    pub sigma: Formula,
    pub input_var: String,
    pub output_var: String,
    pub aux_vars: Vec<String>,
    pub proof: ProofNode,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub expr: NrcExpr,
    pub kind: ClauseKind,
    pub expr_size: usize,
    pub proof_nodes: usize,
    pub max_sequent_size: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Nrc(#[from] NrcError),
    #[error(transparent)]
    Interpolate(#[from] InterpolateError),
    #[error("variable side violation: {detail}")]
    VariableSideViolation { detail: String },
    #[error("rule {rule} is not handled by synthesis; eliminate admissible rules first")]
    UnsupportedRule { rule: &'static str },
    #[error("synthesis unsupported here: {detail}")]
    Unsupported { detail: String },
    #[error("problem shape: {detail}")]
    ProblemShape { detail: String },
    #[error("domain checks require an auxiliary-variable-free specification")]
    AuxVarsPresent,
}

/// Free variables of the hypotheses on one side.  Unlike Boolean
/// interpolation, the synthesis invariant does *not* count the goal to the
/// right: its terms are constrained by the `FV(t) ⊆ L`, `FV(u) ⊆ R`
/// precondition instead.
fn hyp_side_vars(seq: &Sequent, part: &Partition, side: Side) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (a, s) in seq.theta.iter().zip(&part.theta) {
        if *s == side {
            out.extend(a.free_vars());
        }
    }
    for (g, s) in seq.gamma.iter().zip(&part.gamma) {
        if *s == side {
            out.extend(g.free_vars());
        }
    }
    out
}

fn hyp_common_vars(seq: &Sequent, part: &Partition) -> BTreeSet<String> {
    hyp_side_vars(seq, part, Side::Left)
        .intersection(&hyp_side_vars(seq, part, Side::Right))
        .cloned()
        .collect()
}

fn flip(s: Side) -> Side {
    match s {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    }
}

/// Swap the two sides of a partition.  The invariant is symmetric up to
/// reversing the orientation of the goal, which is how rules whose premise
/// goal flips the two terms (`∈_Set`-R, `=_U`-R) recurse.
fn swap(part: &Partition) -> Partition {
    Partition {
        theta: part.theta.iter().map(|s| flip(*s)).collect(),
        gamma: part.gamma.iter().map(|s| flip(*s)).collect(),
    }
}

/// A closed expression evaluating to the default value of a type.
fn default_expr(ty: &ObjType) -> NrcExpr {
    match ty {
        ObjType::U => NrcExpr::get(NrcExpr::EmptyE(ObjType::U)),
        ObjType::Unit => NrcExpr::UnitE,
        ObjType::Prod(a, b) => NrcExpr::pair(default_expr(a), default_expr(b)),
        ObjType::SetOf(t) => NrcExpr::EmptyE((**t).clone()),
    }
}

fn clause_kind(rhs: &Rhs) -> ClauseKind {
    match rhs {
        Rhs::Eq(..) => ClauseKind::Equal,
        Rhs::Sub(..) => ClauseKind::Between,
        Rhs::Mem(..) => ClauseKind::Bounding,
    }
}

/// The type of the synthesized expression for a goal.
fn clause_type(rhs: &Rhs) -> ObjType {
    match rhs {
        Rhs::Eq(ty, _, _) => ty.clone(),
        Rhs::Sub(ty, _, _) | Rhs::Mem(ty, _, _) => ObjType::set(ty.clone()),
    }
}

/// Higher-type interpolation over a checked, core-only, projection-normalized
/// proof.  The partition labels the root hypotheses; the first goal term must
/// be confined to the left side's variables and the second to the right's.
pub fn synthesize_rhs(cp: &CheckedProof, part: &Partition) -> Result<SynthesisResult, SynthError> {
    if let Some(rule) = first_admissible(&cp.root) {
        return Err(SynthError::UnsupportedRule { rule });
    }
    if !theta_members_projection_free(&cp.root) {
        return Err(SynthError::Unsupported {
            detail: "proof has projections in Θ member terms; normalize it first".into(),
        });
    }
    let concl = &cp.root.conclusion;
    if part.theta.len() != concl.theta.len() || part.gamma.len() != concl.gamma.len() {
        return Err(SynthError::ProblemShape {
            detail: "partition does not cover the root hypotheses".into(),
        });
    }
    let (Rhs::Eq(_, t, u) | Rhs::Sub(_, t, u) | Rhs::Mem(_, t, u)) = &concl.rhs;
    for (term, side) in [(t, Side::Left), (u, Side::Right)] {
        let allowed = hyp_side_vars(concl, part, side);
        if !term.free_vars().is_subset(&allowed) {
            return Err(SynthError::VariableSideViolation {
                detail: format!("goal term `{term}` is not confined to the {side:?} hypotheses"),
            });
        }
    }
    let expr = synth_node(&cp.root, part)?;
    let common = hyp_common_vars(concl, part);
    if !expr.free_vars().is_subset(&common) {
        return Err(SynthError::Unsupported {
            detail: format!("synthesized `{expr}` escapes the common variables {common:?}"),
        });
    }
    let budget = SYNTHESIS_SIZE_FACTOR * cp.nodes * cp.max_sequent_size;
    assert!(
        expr.size() <= budget,
        "synthesized expression of size {} exceeds the budget {budget}",
        expr.size()
    );
    Ok(SynthesisResult {
        expr_size: expr.size(),
        kind: clause_kind(&concl.rhs),
        proof_nodes: cp.nodes,
        max_sequent_size: cp.max_sequent_size,
        expr,
    })
}

fn first_admissible(node: &ProofNode) -> Option<&'static str> {
    if !node.rule.is_core() {
        return Some(node.rule.name());
    }
    node.premises.iter().find_map(first_admissible)
}

fn synth_node(node: &ProofNode, part: &Partition) -> Result<NrcExpr, SynthError> {
    let concl = &node.conclusion;
    match &node.rule {
        Rule::Contraction { gamma_idx } => {
            let mut child = part.clone();
            child.gamma.push(part.gamma[*gamma_idx]);
            synth_node(&node.premises[0], &child)
        }
        Rule::MemUrR { .. } => {
            let Rhs::Mem(_, t, _) = &concl.rhs else {
                unreachable!("checked proof");
            };
            Ok(NrcExpr::singleton(NrcExpr::from_term(t)))
        }
        // Soundness makes the two inclusions agree, so the first premise's
        // between-expression is already equal to both sides.
        Rule::EqSetR => synth_node(&node.premises[0], part),
        Rule::EqProdR => Ok(NrcExpr::pair(
            synth_node(&node.premises[0], part)?,
            synth_node(&node.premises[1], part)?,
        )),
        Rule::EqUnitR => Ok(NrcExpr::UnitE),
        Rule::EqUrR { fresh } => {
            // Premise goal `u ∈ z` flips the orientation (its member is the
            // conclusion's right term), so the synthesis recursion swaps the
            // partition; the fresh hypothesis `t ∈ z` lands with the old
            // left side.
            let mut child = swap(part);
            child.theta.push(Side::Right);
            let inner = synth_node(&node.premises[0], &child)?;
            // Boolean interpolation of the premise with `t ∈ z` on the left
            // yields θ(i⃗, z) equivalent to `t ∈ z`, so `{t}` is the unique
            // singleton satisfying θ and Get extracts its element.
            let mut bool_part = part.clone();
            bool_part.theta.push(Side::Left);
            let theta = interpolate_node(&node.premises[0], &bool_part)?;
            let mut avoid = theta.free_vars();
            avoid.extend(inner.free_vars());
            avoid.insert(fresh.clone());
            let x = fresh_name("x", &avoid);
            let verify = compile_verify(&theta)
                .substitute(fresh, &NrcExpr::singleton(NrcExpr::var(&x)));
            let body = case_expr(
                &verify,
                &NrcExpr::singleton(NrcExpr::var(&x)),
                &NrcExpr::EmptyE(ObjType::U),
                &ObjType::set(ObjType::U),
            );
            Ok(NrcExpr::get(NrcExpr::bigunion(x, inner, body)))
        }
        Rule::SubsetR { fresh } => {
            let Rhs::Sub(elem, _, _) = &concl.rhs else {
                unreachable!("checked proof");
            };
            let mut child = part.clone();
            child.theta.push(Side::Left);
            let inner = synth_node(&node.premises[0], &child)?;
            let theta = interpolate_node(&node.premises[0], &child)?;
            // `E = {z ∈ E′ | θ}`; the Verify compilation of θ keeps the
            // eigenvariable free, and the big union binds it.
            let body = case_expr(
                &compile_verify(&theta),
                &NrcExpr::singleton(NrcExpr::var(fresh)),
                &NrcExpr::EmptyE(elem.clone()),
                &ObjType::set(elem.clone()),
            );
            Ok(NrcExpr::bigunion(fresh.clone(), inner, body))
        }
        Rule::MemSetR { .. } => {
            // Premise goal `t = u` has the hypothesis's member (right side)
            // first, so the orientation — and hence the partition — swaps.
            let inner = synth_node(&node.premises[0], &swap(part))?;
            Ok(NrcExpr::singleton(inner))
        }
        Rule::BotL { .. } | Rule::NeqL { .. } => Ok(default_expr(&clause_type(&concl.rhs))),
        Rule::AndL { gamma_idx } => {
            let mut child = part.clone();
            child.gamma.insert(gamma_idx + 1, part.gamma[*gamma_idx]);
            synth_node(&node.premises[0], &child)
        }
        Rule::OrL { .. } => Ok(NrcExpr::union(
            synth_node(&node.premises[0], part)?,
            synth_node(&node.premises[1], part)?,
        )),
        Rule::ForallL { theta_idx, .. } => {
            let inner = synth_node(&node.premises[0], part)?;
            let common = hyp_common_vars(concl, part);
            let extra: BTreeSet<String> = inner
                .free_vars()
                .difference(&common)
                .cloned()
                .collect();
            if extra.is_empty() {
                return Ok(inner);
            }
            // The premise expression picked up variables of the
            // instantiating term `t`; rebind them by iterating a fresh
            // variable over the quantifier's (common) bound and reaching
            // each of them through its projection path in `t`.
            let atom = &concl.theta[*theta_idx];
            let mut avoid = inner.free_vars();
            avoid.extend(atom.free_vars());
            let binder = fresh_name("u", &avoid);
            let mut leaves = Vec::new();
            nrc_pattern_paths(&atom.member, NrcExpr::var(&binder), &mut leaves)?;
            let mut body = inner;
            for x in &extra {
                let Some((_, path)) = leaves.iter().find(|(leaf, _)| leaf == x) else {
                    return Err(SynthError::Unsupported {
                        detail: format!(
                            "premise expression variable {x} is not reachable from `{}`",
                            atom.member
                        ),
                    });
                };
                body = body.substitute(x, path);
            }
            Ok(NrcExpr::bigunion(
                binder,
                NrcExpr::from_term(&atom.set),
                body,
            ))
        }
        Rule::ExistsL { gamma_idx, fresh } => {
            let mut child = part.clone();
            child.theta.push(part.gamma[*gamma_idx]);
            let inner = synth_node(&node.premises[0], &child)?;
            if !inner.free_vars().contains(fresh) {
                return Ok(inner);
            }
            let Formula::ExistsIn(_, _, bound, _) = &concl.gamma[*gamma_idx] else {
                unreachable!("checked proof");
            };
            Ok(NrcExpr::bigunion(
                fresh.clone(),
                NrcExpr::from_term(bound),
                inner,
            ))
        }
        Rule::EqSubst {
            gamma_idx,
            var_side,
        } => {
            let mut child = part.clone();
            child.gamma.remove(*gamma_idx);
            let inner = synth_node(&node.premises[0], &child)?;
            let common = hyp_common_vars(concl, part);
            if inner.free_vars().is_subset(&common) {
                return Ok(inner);
            }
            let Formula::EqU(a, b) = &concl.gamma[*gamma_idx] else {
                unreachable!("checked proof");
            };
            let (var, repl) = match var_side {
                Side::Left => (a, b),
                Side::Right => (b, a),
            };
            let (Term::Var(v), Term::Var(r)) = (var, repl) else {
                return Err(SynthError::Unsupported {
                    detail: format!(
                        "cannot rewrite `{repl}` back to `{var}` in a synthesized expression"
                    ),
                });
            };
            // The premise is the conclusion rewritten along the equation;
            // rewriting the expression back is sound because the equation
            // is itself among the hypotheses.
            Ok(inner.substitute(r, &NrcExpr::var(v)))
        }
        Rule::TimesBeta { .. } => synth_node(&node.premises[0], part),
        Rule::TimesEta {
            var,
            fresh_fst,
            fresh_snd,
        } => {
            let inner = synth_node(&node.premises[0], part)?;
            Ok(inner
                .substitute(fresh_fst, &NrcExpr::proj(1, NrcExpr::var(var)))
                .substitute(fresh_snd, &NrcExpr::proj(2, NrcExpr::var(var))))
        }
        other => Err(SynthError::UnsupportedRule { rule: other.name() }),
    }
}

fn nrc_pattern_paths(
    t: &Term,
    at: NrcExpr,
    out: &mut Vec<(String, NrcExpr)>,
) -> Result<(), SynthError> {
    match t {
        Term::Var(x) => {
            out.push((x.clone(), at));
            Ok(())
        }
        Term::UnitVal => Ok(()),
        Term::Pair(a, b) => {
            nrc_pattern_paths(a, NrcExpr::proj(1, at.clone()), out)?;
            nrc_pattern_paths(b, NrcExpr::proj(2, at), out)
        }
        Term::Proj1(_) | Term::Proj2(_) => Err(SynthError::Unsupported {
            detail: format!("hypothesis member `{t}` contains a projection"),
        }),
    }
}

/// Primed copy of a variable name as used in functionality sequents.
pub fn primed(name: &str) -> String {
    format!("{name}'")
}

/// The full pipeline of Theorem 4.2: check, eliminate admissible rules,
/// normalize projections, then synthesize with `Σ` on the left and its
/// primed copy on the right.
pub fn synthesize_from_functionality(p: &SynthesisProblem) -> Result<SynthesisResult, SynthError> {
    let mut declared: BTreeSet<String> = p.aux_vars.iter().cloned().collect();
    declared.insert(p.input_var.clone());
    declared.insert(p.output_var.clone());
    if !p.sigma.free_vars().is_subset(&declared) {
        return Err(SynthError::ProblemShape {
            detail: "specification mentions undeclared variables".into(),
        });
    }
    let mut full_ctx = p.ctx.clone();
    let mut sigma_primed = p
        .sigma
        .substitute(&p.output_var, &Term::var(primed(&p.output_var)));
    for name in p.aux_vars.iter().chain([&p.output_var]) {
        let Some(ty) = p.ctx.get(name) else {
            return Err(SynthError::ProblemShape {
                detail: format!("no declared type for variable {name}"),
            });
        };
        full_ctx.insert(primed(name), ty.clone());
    }
    for name in &p.aux_vars {
        sigma_primed = sigma_primed.substitute(name, &Term::var(primed(name)));
    }
    let out_ty = p.ctx.get(&p.output_var).cloned().ok_or_else(|| {
        SynthError::ProblemShape {
            detail: format!("no declared type for output {}", p.output_var),
        }
    })?;
    let expected = Sequent::new(
        vec![],
        vec![p.sigma.clone(), sigma_primed],
        Rhs::Eq(
            out_ty,
            Term::var(&p.output_var),
            Term::var(primed(&p.output_var)),
        ),
    );
    if !expected.matches(&p.proof.conclusion) {
        return Err(SynthError::ProblemShape {
            detail: format!(
                "proof concludes `{}`, expected the functionality sequent `{expected}`",
                p.proof.conclusion
            ),
        });
    }
    let checked = check_proof(&full_ctx, &p.proof)?;
    let core = elaborate_admissible(&checked)?;
    let normalized = normalize_projections(&core)?;
    let part = Partition::new(vec![], vec![Side::Left, Side::Right]);
    let result = synthesize_rhs(&normalized, &part)?;
    let inputs: BTreeSet<String> = [p.input_var.clone()].into();
    if !result.expr.free_vars().is_subset(&inputs) {
        return Err(SynthError::VariableSideViolation {
            detail: format!(
                "synthesized expression depends on {:?}, not only the input",
                result.expr.free_vars()
            ),
        });
    }
    Ok(result)
}

/// The Boolean expression `⋃{Verify_Σ | o_out ∈ {E}}` deciding whether an
/// input is in the domain of the specification; only available when `Σ` has
/// no auxiliary variables.
pub fn domain_check(
    sigma: &Formula,
    output_var: &str,
    aux_vars: &[String],
    expr: &NrcExpr,
) -> Result<NrcExpr, SynthError> {
    if !aux_vars.is_empty() {
        return Err(SynthError::AuxVarsPresent);
    }
    Ok(NrcExpr::bigunion(
        output_var,
        NrcExpr::singleton(expr.clone()),
        compile_verify(sigma),
    ))
}

/// An NRC expression re-encoded as a Δ0 formula over its free variables and
/// one output variable.
#[derive(Debug, Clone)]
pub struct ImplicitDefinition {
    pub formula: Formula,
    pub output_var: String,
    pub output_ty: ObjType,
}

/// Encode a typechecked expression as a Δ0 formula `Σ_E` with
/// `Σ_E(x⃗, o) ⇔ eval(e, x⃗) = o`, by structural induction after rewriting
/// big unions to iterate over (projections of) variables only.
///
/// `Get` at types involving `U` is encoded on its singleton branch only: the
/// default Ur-element is not denotable by a term, so the formula constrains
/// the output only where the extraction is well-formed.
pub fn encode_as_implicit_definition(
    ctx: &TypeContext,
    e: &NrcExpr,
    output_var: &str,
) -> Result<ImplicitDefinition, SynthError> {
    let output_ty = typecheck_nrc(ctx, e)?;
    let mut fuel = 10_000u32;
    let e = compose_free(ctx, e, &mut fuel)?;
    let mut env = ctx.clone();
    env.insert(output_var.to_string(), output_ty.clone());
    let formula = eq_enc(&env, &e, &Term::var(output_var), &output_ty)?;
    Ok(ImplicitDefinition {
        formula,
        output_var: output_var.to_string(),
        output_ty,
    })
}

/// View an expression as a first-order term, when it is one.
fn to_term(e: &NrcExpr) -> Option<Term> {
    match e {
        NrcExpr::Var(x) => Some(Term::var(x)),
        NrcExpr::UnitE => Some(Term::UnitVal),
        NrcExpr::PairE(a, b) => Some(Term::pair(to_term(a)?, to_term(b)?)),
        NrcExpr::ProjE(1, a) => Some(Term::proj1(to_term(a)?)),
        NrcExpr::ProjE(2, a) => Some(Term::proj2(to_term(a)?)),
        _ => None,
    }
}

/// Rewrite toward the composition-free normal form: big unions over
/// singletons substitute, over binary unions split, over empty collapse, and
/// nested big unions reassociate outward.
fn spend(fuel: &mut u32) -> Result<(), SynthError> {
    *fuel = fuel.checked_sub(1).ok_or(SynthError::Unsupported {
        detail: "composition-free normalization did not terminate in budget".into(),
    })?;
    Ok(())
}

fn compose_free(env: &TypeContext, e: &NrcExpr, fuel: &mut u32) -> Result<NrcExpr, SynthError> {
    Ok(match e {
        NrcExpr::Var(_) | NrcExpr::UnitE | NrcExpr::EmptyE(_) => e.clone(),
        NrcExpr::PairE(a, b) => NrcExpr::pair(
            compose_free(env, a, fuel)?,
            compose_free(env, b, fuel)?,
        ),
        NrcExpr::UnionE(a, b) => NrcExpr::union(
            compose_free(env, a, fuel)?,
            compose_free(env, b, fuel)?,
        ),
        NrcExpr::DiffE(a, b) => NrcExpr::diff(
            compose_free(env, a, fuel)?,
            compose_free(env, b, fuel)?,
        ),
        NrcExpr::SingletonE(a) => NrcExpr::singleton(compose_free(env, a, fuel)?),
        NrcExpr::ProjE(i, a) => match compose_free(env, a, fuel)? {
            NrcExpr::PairE(x, y) => {
                spend(fuel)?;
                if *i == 1 {
                    *x
                } else {
                    *y
                }
            }
            a => NrcExpr::proj(*i, a),
        },
        NrcExpr::GetE(a) => match compose_free(env, a, fuel)? {
            NrcExpr::SingletonE(x) => {
                spend(fuel)?;
                *x
            }
            a => NrcExpr::get(a),
        },
        NrcExpr::BigUnionE(x, src, body) => {
            let src = compose_free(env, src, fuel)?;
            let src_ty = typecheck_nrc(env, &src)?;
            let ObjType::SetOf(elem) = src_ty else {
                unreachable!("typechecked big union");
            };
            let mut env2 = env.clone();
            env2.insert(x.clone(), (*elem).clone());
            let body = compose_free(&env2, body, fuel)?;
            match src {
                NrcExpr::SingletonE(f) => {
                    spend(fuel)?;
                    compose_free(env, &body.substitute(x, &f), fuel)?
                }
                NrcExpr::EmptyE(_) => {
                    spend(fuel)?;
                    let ObjType::SetOf(out_elem) = typecheck_nrc(&env2, &body)? else {
                        unreachable!("typechecked big union body");
                    };
                    NrcExpr::EmptyE(*out_elem)
                }
                NrcExpr::UnionE(a, b) => {
                    spend(fuel)?;
                    let left = NrcExpr::bigunion(x.clone(), *a, body.clone());
                    let right = NrcExpr::bigunion(x.clone(), *b, body);
                    compose_free(env, &NrcExpr::union(left, right), fuel)?
                }
                NrcExpr::BigUnionE(y, inner_src, inner_body) => {
                    spend(fuel)?;
                    let mut avoid = body.free_vars();
                    avoid.insert(x.clone());
                    avoid.extend(env.keys().cloned());
                    let y2 = fresh_name(&y, &avoid);
                    let inner_body = inner_body.substitute(&y, &NrcExpr::var(&y2));
                    let reassoc = NrcExpr::bigunion(
                        y2,
                        *inner_src,
                        NrcExpr::bigunion(x.clone(), inner_body, body),
                    );
                    compose_free(env, &reassoc, fuel)?
                }
                src => NrcExpr::bigunion(x.clone(), src, body),
            }
        }
    })
}

fn fresh_for(env: &TypeContext, extra: &[&Term], base: &str) -> String {
    let mut avoid: BTreeSet<String> = env.keys().cloned().collect();
    for t in extra {
        avoid.extend(t.free_vars());
    }
    fresh_name(base, &avoid)
}

fn set_elem(env: &TypeContext, e: &NrcExpr) -> Result<ObjType, SynthError> {
    match typecheck_nrc(env, e)? {
        ObjType::SetOf(t) => Ok(*t),
        other => Err(SynthError::Unsupported {
            detail: format!("expected a set expression, found one of type {other}"),
        }),
    }
}

/// `q = e` as a Δ0 formula.
fn eq_enc(env: &TypeContext, e: &NrcExpr, q: &Term, ty: &ObjType) -> Result<Formula, SynthError> {
    if let Some(t) = to_term(e) {
        return Ok(expand_eq(ty, q, &t));
    }
    match e {
        NrcExpr::PairE(a, b) => {
            let ObjType::Prod(ta, tb) = ty else {
                unreachable!("typechecked pair");
            };
            Ok(Formula::and(
                eq_enc(env, a, &Term::proj1(q.clone()), ta)?,
                eq_enc(env, b, &Term::proj2(q.clone()), tb)?,
            ))
        }
        NrcExpr::GetE(a) => {
            let Some(ta) = to_term(a) else {
                return Err(SynthError::Unsupported {
                    detail: format!("`{a}` under Get is not reducible to a term"),
                });
            };
            let w = fresh_for(env, &[q, &ta], "w");
            let w2 = fresh_name("w2", &[w.clone()].into_iter().collect());
            let unique = Formula::forall(
                w2.clone(),
                ty.clone(),
                ta.clone(),
                expand_eq(ty, &Term::var(&w2), &Term::var(&w)),
            );
            let singleton_branch = Formula::exists(
                w.clone(),
                ty.clone(),
                ta.clone(),
                Formula::and(unique.clone(), expand_eq(ty, q, &Term::var(&w))),
            );
            match default_formula(env, ty, q) {
                Some(default) => {
                    let not_singleton =
                        Formula::exists(w, ty.clone(), ta, unique).negate();
                    Ok(Formula::or(
                        singleton_branch,
                        Formula::and(not_singleton, default),
                    ))
                }
                None => Ok(singleton_branch),
            }
        }
        _ => {
            let ObjType::SetOf(elem) = ty else {
                return Err(SynthError::Unsupported {
                    detail: format!("cannot encode `{e}` at type {ty}"),
                });
            };
            match e {
                NrcExpr::SingletonE(f) => {
                    let z = fresh_for(env, &[q], "q2");
                    let mut env2 = env.clone();
                    env2.insert(z.clone(), (**elem).clone());
                    Ok(Formula::and(
                        Formula::exists(z.clone(), (**elem).clone(), q.clone(), Formula::Top),
                        Formula::forall(
                            z.clone(),
                            (**elem).clone(),
                            q.clone(),
                            eq_enc(&env2, f, &Term::var(&z), elem)?,
                        ),
                    ))
                }
                NrcExpr::EmptyE(_) => {
                    let z = fresh_for(env, &[q], "z");
                    Ok(Formula::forall(z, (**elem).clone(), q.clone(), Formula::Bot))
                }
                _ => {
                    // general set expression: mutual inclusion, with the
                    // forward direction bounded by the output variable
                    let z = fresh_for(env, &[q], "z");
                    let mut env2 = env.clone();
                    env2.insert(z.clone(), (**elem).clone());
                    let fwd = Formula::forall(
                        z.clone(),
                        (**elem).clone(),
                        q.clone(),
                        mem_enc(&env2, e, &Term::var(&z), elem)?,
                    );
                    let bwd = sub_enc(env, e, q, elem)?;
                    Ok(Formula::and(fwd, bwd))
                }
            }
        }
    }
}

/// `z ∈ e` as a Δ0 formula (`e` of type `Set(elem)`).
fn mem_enc(env: &TypeContext, e: &NrcExpr, z: &Term, elem: &ObjType) -> Result<Formula, SynthError> {
    if let Some(t) = to_term(e) {
        return Ok(expand_mem(elem, z, &t));
    }
    match e {
        NrcExpr::EmptyE(_) => Ok(Formula::Bot),
        NrcExpr::SingletonE(f) => eq_enc(env, f, z, elem),
        NrcExpr::UnionE(a, b) => Ok(Formula::or(
            mem_enc(env, a, z, elem)?,
            mem_enc(env, b, z, elem)?,
        )),
        NrcExpr::DiffE(a, b) => Ok(Formula::and(
            mem_enc(env, a, z, elem)?,
            mem_enc(env, b, z, elem)?.negate(),
        )),
        NrcExpr::BigUnionE(x, src, body) => {
            let Some(ts) = to_term(src) else {
                return Err(SynthError::Unsupported {
                    detail: format!("big union over `{src}` is not composition-free"),
                });
            };
            let src_elem = set_elem(env, src)?;
            let x2 = fresh_for(env, &[z, &ts], x);
            let body = body.substitute(x, &NrcExpr::var(&x2));
            let mut env2 = env.clone();
            env2.insert(x2.clone(), src_elem.clone());
            Ok(Formula::exists(
                x2,
                src_elem,
                ts,
                mem_enc(&env2, &body, z, elem)?,
            ))
        }
        NrcExpr::GetE(a) => {
            // z ∈ Get(a): only a singleton {w} contributes (the default set
            // is empty), so ∃w∈a (a = {w} ∧ z ∈ w).
            let Some(ta) = to_term(a) else {
                return Err(SynthError::Unsupported {
                    detail: format!("`{a}` under Get is not reducible to a term"),
                });
            };
            let set_ty = ObjType::set(elem.clone());
            let w = fresh_for(env, &[z, &ta], "w");
            let w2 = fresh_name("w2", &[w.clone()].into_iter().collect());
            let unique = Formula::forall(
                w2.clone(),
                set_ty.clone(),
                ta.clone(),
                expand_eq(&set_ty, &Term::var(&w2), &Term::var(&w)),
            );
            Ok(Formula::exists(
                w.clone(),
                set_ty,
                ta,
                Formula::and(unique, expand_mem(elem, z, &Term::var(&w))),
            ))
        }
        _ => Err(SynthError::Unsupported {
            detail: format!("cannot encode membership in `{e}`"),
        }),
    }
}

/// `e ⊆ target` as a Δ0 formula.
fn sub_enc(
    env: &TypeContext,
    e: &NrcExpr,
    target: &Term,
    elem: &ObjType,
) -> Result<Formula, SynthError> {
    if let Some(t) = to_term(e) {
        return Ok(expand_sub(elem, &t, target));
    }
    match e {
        NrcExpr::EmptyE(_) => Ok(Formula::Top),
        NrcExpr::UnionE(a, b) => Ok(Formula::and(
            sub_enc(env, a, target, elem)?,
            sub_enc(env, b, target, elem)?,
        )),
        NrcExpr::SingletonE(f) => {
            // {F} ⊆ target ⇔ F ∈ target
            let w = fresh_for(env, &[target], "w");
            let mut env2 = env.clone();
            env2.insert(w.clone(), elem.clone());
            Ok(Formula::exists(
                w.clone(),
                elem.clone(),
                target.clone(),
                eq_enc(&env2, f, &Term::var(&w), elem)?,
            ))
        }
        NrcExpr::DiffE(a, b) => fa_mem(env, a, elem, &|env2, w| {
            Ok(Formula::or(
                mem_enc(env2, b, w, elem)?,
                expand_mem(elem, w, target),
            ))
        }),
        NrcExpr::BigUnionE(x, src, body) => {
            let Some(ts) = to_term(src) else {
                return Err(SynthError::Unsupported {
                    detail: format!("big union over `{src}` is not composition-free"),
                });
            };
            let src_elem = set_elem(env, src)?;
            let x2 = fresh_for(env, &[target, &ts], x);
            let body = body.substitute(x, &NrcExpr::var(&x2));
            let mut env2 = env.clone();
            env2.insert(x2.clone(), src_elem.clone());
            Ok(Formula::forall(
                x2,
                src_elem,
                ts,
                sub_enc(&env2, &body, target, elem)?,
            ))
        }
        NrcExpr::GetE(a) => {
            let Some(ta) = to_term(a) else {
                return Err(SynthError::Unsupported {
                    detail: format!("`{a}` under Get is not reducible to a term"),
                });
            };
            let set_ty = ObjType::set(elem.clone());
            let w = fresh_for(env, &[target, &ta], "w");
            let w2 = fresh_name("w2", &[w.clone()].into_iter().collect());
            let unique = Formula::forall(
                w2.clone(),
                set_ty.clone(),
                ta.clone(),
                expand_eq(&set_ty, &Term::var(&w2), &Term::var(&w)),
            );
            // a = {w} implies w ⊆ target; otherwise Get yields ∅ ⊆ target.
            Ok(Formula::forall(
                w.clone(),
                set_ty,
                ta,
                Formula::or(
                    unique.negate(),
                    expand_sub(elem, &Term::var(&w), target),
                ),
            ))
        }
        _ => Err(SynthError::Unsupported {
            detail: format!("cannot encode inclusion of `{e}`"),
        }),
    }
}

/// `∀w ∈ e. body(w)` as a Δ0 formula, for set expressions whose elements can
/// be enumerated by bounded quantifiers.
fn fa_mem(
    env: &TypeContext,
    e: &NrcExpr,
    elem: &ObjType,
    body: &dyn Fn(&TypeContext, &Term) -> Result<Formula, SynthError>,
) -> Result<Formula, SynthError> {
    if let Some(t) = to_term(e) {
        let w = fresh_for(env, &[&t], "w");
        let mut env2 = env.clone();
        env2.insert(w.clone(), elem.clone());
        return Ok(Formula::forall(
            w.clone(),
            elem.clone(),
            t,
            body(&env2, &Term::var(&w))?,
        ));
    }
    match e {
        NrcExpr::EmptyE(_) => Ok(Formula::Top),
        NrcExpr::UnionE(a, b) => Ok(Formula::and(
            fa_mem(env, a, elem, body)?,
            fa_mem(env, b, elem, body)?,
        )),
        NrcExpr::SingletonE(f) => match to_term(f) {
            Some(t) => body(env, &t),
            None => Err(SynthError::Unsupported {
                detail: format!("cannot quantify over the non-term singleton `{{{f}}}`"),
            }),
        },
        NrcExpr::DiffE(a, b) => fa_mem(env, a, elem, &|env2, w| {
            Ok(Formula::or(mem_enc(env2, b, w, elem)?, body(env2, w)?))
        }),
        NrcExpr::BigUnionE(x, src, inner) => {
            let Some(ts) = to_term(src) else {
                return Err(SynthError::Unsupported {
                    detail: format!("big union over `{src}` is not composition-free"),
                });
            };
            let src_elem = set_elem(env, src)?;
            let x2 = fresh_for(env, &[&ts], x);
            let inner = inner.substitute(x, &NrcExpr::var(&x2));
            let mut env2 = env.clone();
            env2.insert(x2.clone(), src_elem.clone());
            Ok(Formula::forall(
                x2,
                src_elem,
                ts,
                fa_mem(&env2, &inner, elem, body)?,
            ))
        }
        _ => Err(SynthError::Unsupported {
            detail: format!("cannot quantify over the elements of `{e}`"),
        }),
    }
}

/// `q = default(ty)` when the default value is term-denotable (no `U`: the
/// reserved default atom has no term syntax).
fn default_formula(env: &TypeContext, ty: &ObjType, q: &Term) -> Option<Formula> {
    match ty {
        ObjType::U => None,
        ObjType::Unit => Some(Formula::Top),
        ObjType::Prod(a, b) => Some(Formula::and(
            default_formula(env, a, &Term::proj1(q.clone()))?,
            default_formula(env, b, &Term::proj2(q.clone()))?,
        )),
        ObjType::SetOf(elem) => {
            let z = fresh_for(env, &[q], "z");
            Some(Formula::forall(z, (**elem).clone(), q.clone(), Formula::Bot))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{rule_premises, ThetaAtom};
    use crate::values::{enumerate_valuations, eval_delta0, Value};
    use crate::nrc::eval_nrc_typed;

    fn u() -> ObjType {
        ObjType::U
    }

    fn ctx_of(vars: &[(&str, ObjType)]) -> TypeContext {
        vars.iter()
            .map(|(n, t)| (n.to_string(), t.clone()))
            .collect()
    }

    /// Build a linear proof by applying single-premise rules in order; the
    /// last rule must close its goal.
    fn chain(ctx: &TypeContext, concl: Sequent, rules: &[Rule]) -> ProofNode {
        let (first, rest) = rules.split_first().expect("nonempty rule chain");
        let premises = rule_premises(ctx, &concl, first).expect("rule applies");
        if premises.is_empty() {
            assert!(rest.is_empty(), "rules left over after the proof closed");
            return ProofNode::new(first.clone(), concl, vec![]);
        }
        assert_eq!(premises.len(), 1, "chain rules must have one premise");
        let (seq, ctx2) = premises.into_iter().next().unwrap();
        ProofNode::new(first.clone(), concl, vec![chain(&ctx2, seq, rest)])
    }

    fn subset_of(a: &Value, b: &Value) -> bool {
        let (Value::SetV(xs), Value::SetV(ys)) = (a, b) else {
            panic!("subset check on non-sets");
        };
        xs.iter().all(|x| ys.contains(x))
    }

    /// Exhaustively check the clause contract: in every model of all the
    /// hypotheses, the synthesized expression sits in the required relation
    /// to the goal terms.
    fn assert_clause(
        proof: &CheckedProof,
        result: &SynthesisResult,
        universe: &[&str],
        min_models: usize,
    ) {
        let universe: Vec<String> = universe.iter().map(|s| s.to_string()).collect();
        let vals = enumerate_valuations(&proof.ctx, &universe, 1 << 14).unwrap();
        let concl = &proof.root.conclusion;
        let mut models = 0usize;
        'vals: for v in &vals {
            for atom in &concl.theta {
                if !eval_delta0(&atom.expand(), v).unwrap() {
                    continue 'vals;
                }
            }
            for g in &concl.gamma {
                if !eval_delta0(g, v).unwrap() {
                    continue 'vals;
                }
            }
            models += 1;
            let e = eval_nrc_typed(&result.expr, &proof.ctx, v).unwrap();
            match &concl.rhs {
                Rhs::Eq(_, t, st) => {
                    use crate::values::eval_term;
                    assert_eq!(eval_term(t, v).unwrap(), e, "t = E fails in {v:?}");
                    assert_eq!(e, eval_term(st, v).unwrap(), "E = u fails in {v:?}");
                }
                Rhs::Sub(_, t, st) => {
                    use crate::values::eval_term;
                    assert!(
                        subset_of(&eval_term(t, v).unwrap(), &e),
                        "t ⊆ E fails in {v:?}"
                    );
                    assert!(
                        subset_of(&e, &eval_term(st, v).unwrap()),
                        "E ⊆ u fails in {v:?}"
                    );
                }
                Rhs::Mem(_, t, _) => {
                    use crate::values::eval_term;
                    let Value::SetV(es) = &e else {
                        panic!("bounding expression did not evaluate to a set");
                    };
                    assert!(
                        es.contains(&eval_term(t, v).unwrap()),
                        "t ∈ E fails in {v:?}"
                    );
                }
            }
        }
        assert!(models >= min_models, "only {models} models exercised");
    }

    // [TRIVIAL] A membership goal discharged by its hypothesis synthesizes
    // the singleton of the member.
    #[test]
    fn membership_goal_emits_the_member_singleton() {
        let ctx = ctx_of(&[("x", u()), ("s", ObjType::set(u())), ("r", ObjType::set(u()))]);
        let concl = Sequent::new(
            vec![
                ThetaAtom::new(u(), Term::var("x"), Term::var("s")),
                ThetaAtom::new(u(), Term::var("x"), Term::var("r")),
            ],
            vec![],
            Rhs::Mem(u(), Term::var("x"), Term::var("r")),
        );
        let proof = check_proof(&ctx, &chain(&ctx, concl, &[Rule::MemUrR { theta_idx: 1 }]))
            .unwrap();
        let part = Partition::new(vec![Side::Left, Side::Right], vec![]);
        let result = synthesize_rhs(&proof, &part).unwrap();
        assert_eq!(result.expr, NrcExpr::singleton(NrcExpr::var("x")));
        assert_eq!(result.kind, ClauseKind::Bounding);
        assert_clause(&proof, &result, &["a", "b"], 1);
    }

    // [DERIVED] A disjunction of refuted branches synthesizes the union of
    // the per-branch defaults, here ∅ ∪ ∅.
    #[test]
    fn refuted_branches_union_defaults() {
        let ctx = ctx_of(&[("x", u()), ("s", ObjType::set(u())), ("r", ObjType::set(u()))]);
        let bad = Formula::NeqU(Term::var("x"), Term::var("x"));
        let concl = Sequent::new(
            vec![
                ThetaAtom::new(u(), Term::var("x"), Term::var("s")),
                ThetaAtom::new(u(), Term::var("x"), Term::var("r")),
            ],
            vec![Formula::or(bad.clone(), bad)],
            Rhs::Mem(u(), Term::var("x"), Term::var("r")),
        );
        let rule = Rule::OrL { gamma_idx: 0 };
        let premises = rule_premises(&ctx, &concl, &rule).unwrap();
        let premises = premises
            .into_iter()
            .map(|(seq, _)| ProofNode::new(Rule::NeqL { gamma_idx: 0 }, seq, vec![]))
            .collect();
        let proof = check_proof(&ctx, &ProofNode::new(rule, concl, premises)).unwrap();
        let part = Partition::new(vec![Side::Left, Side::Right], vec![Side::Left]);
        let result = synthesize_rhs(&proof, &part).unwrap();
        assert_eq!(
            result.expr,
            NrcExpr::union(NrcExpr::EmptyE(u()), NrcExpr::EmptyE(u()))
        );
        // the hypothesis is unsatisfiable, so the contract holds vacuously
        assert_clause(&proof, &result, &["a"], 0);
    }

    // [DERIVED] An inclusion s ⊆ r proved through a middle set m common to
    // both hypotheses synthesizes a set over m alone that is between s and
    // r in every model; checked by exhaustive enumeration.
    #[test]
    fn inclusion_chain_filters_through_the_common_set() {
        let ctx = ctx_of(&[
            ("s", ObjType::set(u())),
            ("m", ObjType::set(u())),
            ("r", ObjType::set(u())),
        ]);
        let s_in_m = Formula::forall(
            "w",
            u(),
            Term::var("s"),
            Formula::exists(
                "v",
                u(),
                Term::var("m"),
                Formula::EqU(Term::var("w"), Term::var("v")),
            ),
        );
        let m_in_r = Formula::forall(
            "w",
            u(),
            Term::var("m"),
            Formula::exists(
                "v",
                u(),
                Term::var("r"),
                Formula::EqU(Term::var("w"), Term::var("v")),
            ),
        );
        let concl = Sequent::new(
            vec![],
            vec![s_in_m, m_in_r],
            Rhs::Sub(u(), Term::var("s"), Term::var("r")),
        );
        let root = chain(
            &ctx,
            concl,
            &[
                Rule::SubsetR { fresh: "z".into() },
                Rule::ForallL { gamma_idx: 0, theta_idx: 0 },
                Rule::ExistsL { gamma_idx: 0, fresh: "v".into() },
                Rule::ForallL { gamma_idx: 1, theta_idx: 1 },
                Rule::ExistsL { gamma_idx: 1, fresh: "v2".into() },
                Rule::EqSubst { gamma_idx: 0, var_side: Side::Right },
                Rule::EqSubst { gamma_idx: 0, var_side: Side::Right },
                Rule::MemUrR { theta_idx: 2 },
            ],
        );
        let proof = check_proof(&ctx, &root).unwrap();
        let part = Partition::new(vec![], vec![Side::Left, Side::Right]);
        let result = synthesize_rhs(&proof, &part).unwrap();
        assert_eq!(result.kind, ClauseKind::Between);
        assert_eq!(
            result.expr.free_vars(),
            ["m".to_string()].into_iter().collect()
        );
        assert_clause(&proof, &result, &["a", "b"], 4);
    }

    fn identity_problem() -> SynthesisProblem {
        let ctx = ctx_of(&[("x", u()), ("o", u())]);
        let sigma = Formula::EqU(Term::var("o"), Term::var("x"));
        let concl = Sequent::new(
            vec![],
            vec![
                sigma.clone(),
                Formula::EqU(Term::var("o'"), Term::var("x")),
            ],
            Rhs::Eq(u(), Term::var("o"), Term::var("o'")),
        );
        let mut full_ctx = ctx.clone();
        full_ctx.insert("o'".into(), u());
        let proof = chain(
            &full_ctx,
            concl,
            &[
                Rule::EqUrR { fresh: "z".into() },
                Rule::EqSubst { gamma_idx: 0, var_side: Side::Left },
                Rule::EqSubst { gamma_idx: 0, var_side: Side::Left },
                Rule::MemUrR { theta_idx: 0 },
            ],
        );
        SynthesisProblem {
            ctx,
            sigma,
            input_var: "x".into(),
            output_var: "o".into(),
            aux_vars: vec![],
            proof,
        }
    }

    // [DERIVED] The identity specification o = x is functional; the
    // synthesized program evaluates to the input on every atom, checked by
    // enumeration.
    #[test]
    fn functionality_of_identity_extracts_the_input() {
        let p = identity_problem();
        let result = synthesize_from_functionality(&p).unwrap();
        assert_eq!(result.kind, ClauseKind::Equal);
        assert_eq!(
            result.expr.free_vars(),
            ["x".to_string()].into_iter().collect()
        );
        let universe = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let ctx = ctx_of(&[("x", u())]);
        for v in enumerate_valuations(&ctx, &universe, 100).unwrap() {
            let out = eval_nrc_typed(&result.expr, &ctx, &v).unwrap();
            assert_eq!(&out, v.get("x").unwrap());
        }
    }

    // [TRIVIAL] Domain checks are only defined for specifications without
    // auxiliary variables.
    #[test]
    fn domain_check_requires_no_aux_vars() {
        let p = identity_problem();
        let e = NrcExpr::var("x");
        assert!(matches!(
            domain_check(&p.sigma, "o", &["a".into()], &e),
            Err(SynthError::AuxVarsPresent)
        ));
    }

    // [DERIVED] The identity specification is total, so its domain check is
    // true (the singleton of unit) on every input atom.
    #[test]
    fn domain_check_accepts_every_identity_input() {
        let p = identity_problem();
        let dom = domain_check(&p.sigma, "o", &[], &NrcExpr::var("x")).unwrap();
        let ctx = ctx_of(&[("x", u())]);
        let universe = vec!["a".to_string(), "b".to_string()];
        for v in enumerate_valuations(&ctx, &universe, 100).unwrap() {
            let out = eval_nrc_typed(&dom, &ctx, &v).unwrap();
            assert_eq!(out, Value::set(vec![Value::UnitV]));
        }
    }

    // [TRIVIAL] Term-shaped expressions encode to the expanded equality.
    #[test]
    fn term_expressions_encode_to_expanded_equality() {
        let ctx = ctx_of(&[("x", ObjType::set(u()))]);
        let def = encode_as_implicit_definition(&ctx, &NrcExpr::var("x"), "o").unwrap();
        assert_eq!(
            def.formula,
            expand_eq(&ObjType::set(u()), &Term::var("o"), &Term::var("x"))
        );
        assert_eq!(def.output_ty, ObjType::set(u()));
    }

    // [PAPER] A singleton {x} encodes as non-emptiness plus uniqueness of
    // the element: (∃q2 ∈ o. ⊤) ∧ (∀q2 ∈ o. q2 = x).
    #[test]
    fn singleton_encoding_states_nonemptiness_and_uniqueness() {
        let ctx = ctx_of(&[("x", u())]);
        let def = encode_as_implicit_definition(
            &ctx,
            &NrcExpr::singleton(NrcExpr::var("x")),
            "o",
        )
        .unwrap();
        let expected = Formula::and(
            Formula::exists("q2", u(), Term::var("o"), Formula::Top),
            Formula::forall(
                "q2",
                u(),
                Term::var("o"),
                Formula::EqU(Term::var("q2"), Term::var("x")),
            ),
        );
        assert_eq!(def.formula, expected);
    }

    // [DERIVED] The flatten transformation's implicit definition holds of
    // exactly the graphs of its evaluation, checked exhaustively over a
    // two-atom universe.
    #[test]
    fn flatten_encoding_agrees_with_evaluation() {
        // ⋃{ ⋃{ {⟨π1 g, x⟩} | x ∈ π2 g } | g ∈ gs }
        let flatten = NrcExpr::bigunion(
            "g",
            NrcExpr::var("gs"),
            NrcExpr::bigunion(
                "x",
                NrcExpr::proj(2, NrcExpr::var("g")),
                NrcExpr::singleton(NrcExpr::pair(
                    NrcExpr::proj(1, NrcExpr::var("g")),
                    NrcExpr::var("x"),
                )),
            ),
        );
        let gs_ty = ObjType::set(ObjType::prod(u(), ObjType::set(u())));
        let ctx = ctx_of(&[("gs", gs_ty)]);
        let def = encode_as_implicit_definition(&ctx, &flatten, "o").unwrap();
        let mut full = ctx.clone();
        full.insert("o".into(), def.output_ty.clone());
        let universe = vec!["a".to_string(), "b".to_string()];
        for v in enumerate_valuations(&full, &universe, 1 << 13).unwrap() {
            let holds = eval_delta0(&def.formula, &v).unwrap();
            let out = eval_nrc_typed(&flatten, &ctx, &v).unwrap();
            assert_eq!(holds, &out == v.get("o").unwrap(), "disagrees in {v:?}");
        }
    }

    // [DERIVED] Get at a set type encodes both the singleton branch and the
    // default (empty) branch; checked exhaustively against evaluation.
    #[test]
    fn get_encoding_covers_the_default_branch() {
        let e = NrcExpr::get(NrcExpr::var("s"));
        let ctx = ctx_of(&[("s", ObjType::set(ObjType::set(u())))]);
        let def = encode_as_implicit_definition(&ctx, &e, "o").unwrap();
        assert_eq!(def.output_ty, ObjType::set(u()));
        let mut full = ctx.clone();
        full.insert("o".into(), ObjType::set(u()));
        let universe = vec!["a".to_string()];
        for v in enumerate_valuations(&full, &universe, 100).unwrap() {
            let holds = eval_delta0(&def.formula, &v).unwrap();
            let out = eval_nrc_typed(&e, &ctx, &v).unwrap();
            assert_eq!(holds, &out == v.get("o").unwrap(), "disagrees in {v:?}");
        }
    }

    // [DERIVED] Big unions over singleton sources substitute away before
    // encoding, so both spellings produce the same formula.
    #[test]
    fn big_union_over_singleton_normalizes_away() {
        let ctx = ctx_of(&[("x", u())]);
        let direct = NrcExpr::singleton(NrcExpr::var("x"));
        let composed = NrcExpr::bigunion(
            "y",
            NrcExpr::singleton(NrcExpr::var("x")),
            NrcExpr::singleton(NrcExpr::var("y")),
        );
        let a = encode_as_implicit_definition(&ctx, &direct, "o").unwrap();
        let b = encode_as_implicit_definition(&ctx, &composed, "o").unwrap();
        assert_eq!(a.formula, b.formula);
    }
}
