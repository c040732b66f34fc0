//! Craig interpolation for core sequent proofs.
//!
//! Given a core-only proof of `Θ; Γ ⊢ ρ` and a partition of the hypotheses
//! (each Θ-atom and each Γ-formula tagged [`Side::Left`] or [`Side::Right`]),
//! [`interpolate`] produces a Δ0 formula `θ` such that
//!
//! * the left hypotheses entail `θ`,
//! * the right hypotheses together with `θ` entail the goal `ρ` (the goal
//!   always counts to the right), and
//! * `θ` only mentions variables common to both sides.
//!
//! The interpolant is built by a single bottom-up pass over the proof tree:
//! each rule either threads the premise interpolants through unchanged,
//! combines them with a connective, or — where a rule moves a term across the
//! partition boundary — rebinds the offending variables with a bounded
//! quantifier over the set that both sides can see.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::calculus::{CheckedProof, ProofNode, Rule, Sequent, Side, ThetaAtom};
use crate::kernel::{expand_eq, fresh_name, Formula, ObjType, Term, TypeContext};
use crate::values::{enumerate_valuations, eval_delta0, ValueError};

/// Interpolant sizes stay within `INTERPOLANT_SIZE_FACTOR · nodes · max
/// sequent size` of the input proof.
pub const INTERPOLANT_SIZE_FACTOR: usize = 16;

/// Assignment of every hypothesis of a sequent to one of the two sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub theta: Vec<Side>,
    pub gamma: Vec<Side>,
}

impl Partition {
    pub fn new(theta: Vec<Side>, gamma: Vec<Side>) -> Partition {
        Partition { theta, gamma }
    }

    /// Build a partition from the index lists of the *left* hypotheses;
    /// everything not listed goes right.
    pub fn from_left_indices(seq: &Sequent, theta_left: &[usize], gamma_left: &[usize]) -> Partition {
        let theta = (0..seq.theta.len())
            .map(|i| side_if(theta_left.contains(&i)))
            .collect();
        let gamma = (0..seq.gamma.len())
            .map(|i| side_if(gamma_left.contains(&i)))
            .collect();
        Partition { theta, gamma }
    }

    fn fits(&self, seq: &Sequent) -> bool {
        self.theta.len() == seq.theta.len() && self.gamma.len() == seq.gamma.len()
    }
}

fn side_if(left: bool) -> Side {
    if left {
        Side::Left
    } else {
        Side::Right
    }
}

/// Result of a successful interpolation.
#[derive(Debug, Clone)]
pub struct Interpolant {
    pub formula: Formula,
    /// Variables common to the two sides (the goal counts to the right).
    pub common: BTreeSet<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterpolateError {
    #[error("partition mismatch: {detail}")]
    PartitionMismatch { detail: String },
    #[error("rule {rule} is admissible; eliminate admissible rules before interpolating")]
    UnsupportedRule { rule: &'static str },
    #[error("no interpolant construction applies: {detail}")]
    Unsupported { detail: String },
    #[error("interpolant `{formula}` mentions non-common variable(s) {vars:?}")]
    VariableCondition { formula: String, vars: Vec<String> },
}

/// Free variables of one side of a partitioned sequent.  The right side
/// always includes the goal.
fn side_vars(seq: &Sequent, part: &Partition, side: Side) -> BTreeSet<String> {
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
    if side == Side::Right {
        out.extend(seq.rhs.free_vars());
    }
    out
}

/// Variables an interpolant for this partitioned sequent may mention.
pub fn common_vars(seq: &Sequent, part: &Partition) -> BTreeSet<String> {
    side_vars(seq, part, Side::Left)
        .intersection(&side_vars(seq, part, Side::Right))
        .cloned()
        .collect()
}

/// Connective-level simplification: collapse `⊤`/`⊥` units and absorbers,
/// including under bounded quantifiers (`∀x∈t.⊤ ≡ ⊤`, `∃x∈t.⊥ ≡ ⊥`).
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::And(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Bot, _) | (_, Formula::Bot) => Formula::Bot,
            (Formula::Top, x) | (x, Formula::Top) => x,
            (a, b) => Formula::and(a, b),
        },
        Formula::Or(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, _) | (_, Formula::Top) => Formula::Top,
            (Formula::Bot, x) | (x, Formula::Bot) => x,
            (a, b) => Formula::or(a, b),
        },
        Formula::ForallIn(x, ty, t, body) => match simplify(body) {
            Formula::Top => Formula::Top,
            body => Formula::forall(x.clone(), ty.clone(), t.clone(), body),
        },
        Formula::ExistsIn(x, ty, t, body) => match simplify(body) {
            Formula::Bot => Formula::Bot,
            body => Formula::exists(x.clone(), ty.clone(), t.clone(), body),
        },
        _ => f.clone(),
    }
}

/// Interpolate a checked, core-only proof under a partition of its root
/// hypotheses.
pub fn interpolate(proof: &CheckedProof, part: &Partition) -> Result<Interpolant, InterpolateError> {
    if let Some(rule) = first_admissible(&proof.root) {
        return Err(InterpolateError::UnsupportedRule { rule });
    }
    if !part.fits(&proof.root.conclusion) {
        return Err(InterpolateError::PartitionMismatch {
            detail: format!(
                "partition covers {}+{} hypotheses, sequent has {}+{}",
                part.theta.len(),
                part.gamma.len(),
                proof.root.conclusion.theta.len(),
                proof.root.conclusion.gamma.len()
            ),
        });
    }
    let formula = interp_node(&proof.root, part)?;
    let budget = INTERPOLANT_SIZE_FACTOR * proof.nodes * proof.max_sequent_size;
    assert!(
        formula.size() <= budget,
        "interpolant of size {} exceeds the budget {budget}",
        formula.size()
    );
    let common = common_vars(&proof.root.conclusion, part);
    Ok(Interpolant { formula, common })
}

fn first_admissible(node: &ProofNode) -> Option<&'static str> {
    if !node.rule.is_core() {
        return Some(node.rule.name());
    }
    node.premises.iter().find_map(first_admissible)
}

/// Interpolate a single (sub)proof node without the root-level bookkeeping;
/// used by synthesis, which interpolates premises with partitions of its own.
pub(crate) fn interpolate_node(
    node: &ProofNode,
    part: &Partition,
) -> Result<Formula, InterpolateError> {
    interp_node(node, part)
}

fn interp_node(node: &ProofNode, part: &Partition) -> Result<Formula, InterpolateError> {
    let concl = &node.conclusion;
    if !part.fits(concl) {
        return Err(InterpolateError::PartitionMismatch {
            detail: format!("at `{concl}`"),
        });
    }
    let formula = build(node, part)?;
    let formula = simplify(&formula);
    let common = common_vars(concl, part);
    let extra: Vec<String> = formula.free_vars().difference(&common).cloned().collect();
    if !extra.is_empty() {
        return Err(InterpolateError::VariableCondition {
            formula: formula.to_string(),
            vars: extra,
        });
    }
    Ok(formula)
}

fn build(node: &ProofNode, part: &Partition) -> Result<Formula, InterpolateError> {
    let concl = &node.conclusion;
    match &node.rule {
        Rule::Contraction { gamma_idx } => {
            let mut child = part.clone();
            child.gamma.push(part.gamma[*gamma_idx]);
            interp_node(&node.premises[0], &child)
        }
        Rule::MemUrR { theta_idx } => Ok(match part.theta[*theta_idx] {
            Side::Left => concl.theta[*theta_idx].expand(),
            Side::Right => Formula::Top,
        }),
        Rule::EqSetR | Rule::EqProdR => Ok(Formula::and(
            interp_node(&node.premises[0], part)?,
            interp_node(&node.premises[1], part)?,
        )),
        Rule::EqUnitR => Ok(Formula::Top),
        // The fresh membership hypothesis joins the right side: the goal
        // (which mentions the eigenvariable) is on the right, so this keeps
        // the eigenvariable out of the common vocabulary and the premise
        // interpolant passes through unchanged.
        Rule::EqUrR { .. } | Rule::SubsetR { .. } => {
            let mut child = part.clone();
            child.theta.push(Side::Right);
            interp_node(&node.premises[0], &child)
        }
        Rule::MemSetR { theta_idx } => {
            let inner = interp_node(&node.premises[0], part)?;
            match part.theta[*theta_idx] {
                Side::Right => Ok(inner),
                // The premise proves `t = u` with `t`'s variables available
                // on the right (via the equality goal); the conclusion hides
                // them again, so either re-expose the hypothesis `t ∈ v`
                // (when `t` is common) or bind `t` existentially over `v`
                // (when it is private to the left).
                Side::Left => {
                    let atom = &concl.theta[*theta_idx];
                    guard_or_bind(atom, inner, &common_vars(concl, part), Side::Left)
                }
            }
        }
        Rule::BotL { gamma_idx } => Ok(match part.gamma[*gamma_idx] {
            Side::Left => Formula::Bot,
            Side::Right => Formula::Top,
        }),
        Rule::NeqL { gamma_idx } => {
            let hyp = &concl.gamma[*gamma_idx];
            let common = common_vars(concl, part);
            let visible = hyp.free_vars().is_subset(&common);
            Ok(match (part.gamma[*gamma_idx], visible) {
                (Side::Left, true) => hyp.clone(),
                (Side::Left, false) => Formula::Bot,
                (Side::Right, true) => hyp.negate(),
                (Side::Right, false) => Formula::Top,
            })
        }
        Rule::AndL { gamma_idx } => {
            let mut child = part.clone();
            child.gamma.insert(gamma_idx + 1, part.gamma[*gamma_idx]);
            interp_node(&node.premises[0], &child)
        }
        Rule::OrL { gamma_idx } => {
            let a = interp_node(&node.premises[0], part)?;
            let b = interp_node(&node.premises[1], part)?;
            Ok(match part.gamma[*gamma_idx] {
                Side::Left => Formula::or(a, b),
                Side::Right => Formula::and(a, b),
            })
        }
        Rule::ForallL {
            gamma_idx,
            theta_idx,
        } => {
            let inner = interp_node(&node.premises[0], part)?;
            let atom_side = part.theta[*theta_idx];
            if part.gamma[*gamma_idx] == atom_side {
                return Ok(inner);
            }
            // Cross-sided instantiation: the premise assumes `φ[t/y]` on the
            // quantifier's side, which the conclusion can only justify with
            // the membership `t ∈ b` from the other side.
            let atom = &concl.theta[*theta_idx];
            guard_or_bind(atom, inner, &common_vars(concl, part), atom_side)
        }
        Rule::ExistsL { gamma_idx, .. } => {
            let mut child = part.clone();
            child.theta.push(part.gamma[*gamma_idx]);
            interp_node(&node.premises[0], &child)
        }
        Rule::EqSubst {
            gamma_idx,
            var_side,
        } => {
            let mut child = part.clone();
            let hyp_side = child.gamma.remove(*gamma_idx);
            let inner = interp_node(&node.premises[0], &child)?;
            let eq = &concl.gamma[*gamma_idx];
            let Formula::EqU(a, b) = eq else {
                unreachable!("checked proof: eq-subst rewrites an equality");
            };
            let var = match var_side {
                Side::Left => a,
                Side::Right => b,
            };
            // If the rewritten variable is invisible to the opposite side,
            // the substitution only touched the equality's own side and the
            // premise interpolant passes through.
            let opposite = match hyp_side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            };
            let opp_vars = side_vars(concl, part, opposite);
            if let Term::Var(v) = var {
                if !opp_vars.contains(v) {
                    return Ok(inner);
                }
            }
            // Otherwise re-expose the equality itself, which must then be
            // common vocabulary.
            if !eq.free_vars().is_subset(&common_vars(concl, part)) {
                return Err(InterpolateError::Unsupported {
                    detail: format!(
                        "rewriting with `{eq}` crosses the partition but is not common"
                    ),
                });
            }
            Ok(match hyp_side {
                Side::Left => Formula::and(eq.clone(), inner),
                Side::Right => Formula::or(eq.negate(), inner),
            })
        }
        Rule::TimesBeta { .. } => interp_node(&node.premises[0], part),
        Rule::TimesEta {
            var,
            fresh_fst,
            fresh_snd,
        } => {
            let inner = interp_node(&node.premises[0], part)?;
            Ok(inner
                .substitute(fresh_fst, &Term::proj1(Term::var(var)))
                .substitute(fresh_snd, &Term::proj2(Term::var(var))))
        }
        other => Err(InterpolateError::UnsupportedRule { rule: other.name() }),
    }
}

/// Repair an interpolant whose free variables include the member term of a
/// hypothesis `t ∈ v` that the opposite side cannot see.
///
/// * If `t`'s variables are all common anyway, conjoin (for a left
///   hypothesis) or guard by (for a right one) the expanded membership.
/// * If they are all private, rebind them with a bounded quantifier over `v`
///   — existential for a left hypothesis, universal for a right one.
fn guard_or_bind(
    atom: &ThetaAtom,
    inner: Formula,
    common: &BTreeSet<String>,
    atom_side: Side,
) -> Result<Formula, InterpolateError> {
    let tvars = atom.member.free_vars();
    if tvars.is_subset(common) {
        return Ok(match atom_side {
            Side::Left => Formula::and(atom.expand(), inner),
            Side::Right => Formula::or(atom.expand().negate(), inner),
        });
    }
    bind_member(atom, inner, common, atom_side == Side::Left)
}

/// `∃y∈v. θ'` (or `∀`): rebind the variables of the member pattern `t`
/// through projections of a single bound variable. Private pattern leaves are
/// substituted away; common ones are pinned with an equation instead (guarded
/// negatively under a universal), so a mixed pattern `⟨k, w⟩` with common `k`
/// becomes `∃y∈v (π₁y = k ∧ θ[π₂y/w])`.
fn bind_member(
    atom: &ThetaAtom,
    inner: Formula,
    common: &BTreeSet<String>,
    existential: bool,
) -> Result<Formula, InterpolateError> {
    let wrap = |x: String, body: Formula| {
        if existential {
            Formula::exists(x, atom.elem_ty.clone(), atom.set.clone(), body)
        } else {
            Formula::forall(x, atom.elem_ty.clone(), atom.set.clone(), body)
        }
    };
    if let Term::Var(x) = &atom.member {
        if !common.contains(x) {
            // Deliberate capture: the binder shadows the free occurrences.
            return Ok(wrap(x.clone(), inner));
        }
    }
    let mut avoid = inner.free_vars();
    avoid.extend(atom.set.free_vars());
    avoid.extend(atom.member.free_vars());
    let binder = fresh_name("w", &avoid);
    let mut leaves = Vec::new();
    pattern_paths(&atom.member, &atom.elem_ty, Term::var(&binder), &mut leaves)?;
    let mut seen = BTreeSet::new();
    let mut body = inner;
    for (x, ty, path) in leaves {
        if !seen.insert(x.clone()) {
            return Err(InterpolateError::Unsupported {
                detail: format!("member pattern `{}` repeats variable {x}", atom.member),
            });
        }
        if common.contains(&x) {
            let eq = expand_eq(&ty, &path, &Term::var(&x));
            body = if existential {
                Formula::and(eq, body)
            } else {
                Formula::or(eq.negate(), body)
            };
        } else {
            body = body.substitute(&x, &path);
        }
    }
    Ok(wrap(binder, body))
}

fn pattern_paths(
    t: &Term,
    ty: &ObjType,
    at: Term,
    out: &mut Vec<(String, ObjType, Term)>,
) -> Result<(), InterpolateError> {
    match t {
        Term::Var(x) => {
            out.push((x.clone(), ty.clone(), at));
            Ok(())
        }
        Term::UnitVal => Ok(()),
        Term::Pair(a, b) => {
            let ObjType::Prod(ta, tb) = ty else {
                return Err(InterpolateError::Unsupported {
                    detail: format!("pair member `{t}` at non-product type {ty}"),
                });
            };
            pattern_paths(a, ta, Term::proj1(at.clone()), out)?;
            pattern_paths(b, tb, Term::proj2(at), out)
        }
        Term::Proj1(_) | Term::Proj2(_) => Err(InterpolateError::Unsupported {
            detail: format!("member term `{t}` contains a projection; normalize the proof first"),
        }),
    }
}

/// Exhaustively check the interpolation contract over all valuations of the
/// context, reporting (up to five) violating valuations.
pub fn contract_violations(
    ctx: &TypeContext,
    seq: &Sequent,
    part: &Partition,
    interpolant: &Formula,
    universe: &[String],
    cap: u64,
) -> Result<Vec<String>, ValueError> {
    let mut out = Vec::new();
    for val in enumerate_valuations(ctx, universe, cap)? {
        let holds = |f: &Formula| eval_delta0(f, &val);
        let side_holds = |side: Side| -> Result<bool, ValueError> {
            for (a, s) in seq.theta.iter().zip(&part.theta) {
                if *s == side && !holds(&a.expand())? {
                    return Ok(false);
                }
            }
            for (g, s) in seq.gamma.iter().zip(&part.gamma) {
                if *s == side && !holds(g)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let theta_holds = holds(interpolant)?;
        if side_holds(Side::Left)? && !theta_holds {
            out.push(format!("left side holds but interpolant fails at {val:?}"));
        }
        if side_holds(Side::Right)? && theta_holds && !holds(&seq.rhs.expand())? {
            out.push(format!(
                "right side and interpolant hold but the goal fails at {val:?}"
            ));
        }
        if out.len() >= 5 {
            break;
        }
    }
    Ok(out)
}
