//! Field operations on programs. Each combinator places its operands side by
//! side (renaming the right operand's species on collision) and adds one
//! fresh species whose reactions read the operands without changing them.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::One;

use super::{compile_rational, ClaimedLimit, CompileError, Composition, CompositionKind, Sign, SignedProgram};
use crate::model::{Crn, CrnBuilder, Species};

/// Name without a trailing `_<digits>` suffix.
fn base_of(name: &str) -> &str {
    match name.rsplit_once('_') {
        Some((head, tail)) if !head.is_empty() && !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) => head,
        _ => name,
    }
}

fn fresh_name(base: &str, used: &HashSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !used.contains(n))
        .expect("unbounded suffixes")
}

/// Renames the species of `p` that collide with `used`, recursively through
/// its recorded operands so the composition tree stays consistent.
fn rename_apart(p: &SignedProgram, used: &mut HashSet<String>) -> SignedProgram {
    let own: HashSet<String> = p.crn().species_names().iter().map(|s| s.to_string()).collect();
    let mut taken: HashSet<String> = used.union(&own).cloned().collect();
    let mut names = Vec::new();
    for s in p.crn().species_names() {
        let name = if used.contains(s) {
            let n = fresh_name(base_of(s), &taken);
            taken.insert(n.clone());
            n
        } else {
            s.to_string()
        };
        names.push(name);
    }
    used.extend(names.iter().cloned());
    apply_names(p, &names)
}

fn apply_names(p: &SignedProgram, names: &[String]) -> SignedProgram {
    let species: Vec<Species> = names.iter().map(|n| Species::new(n).expect("valid name")).collect();
    let mut out = p.clone();
    out.replace_crn(p.crn().renamed(species).expect("same length"));
    if let Some(c) = out.composition_mut() {
        for (op, block) in c.operands.iter_mut().zip(c.blocks.clone()) {
            *op = apply_names(op, &names[block]);
        }
    }
    out
}

struct Layout {
    crn: Crn,
    operands: Vec<SignedProgram>,
    blocks: Vec<std::ops::Range<usize>>,
    names: Vec<String>,
    used: HashSet<String>,
}

fn layout(operands: &[&SignedProgram]) -> Result<Layout, CompileError> {
    let mut used = HashSet::new();
    let mut crn: Option<Crn> = None;
    let mut renamed = Vec::new();
    let mut blocks = Vec::new();
    let mut names = Vec::new();
    for p in operands {
        let r = rename_apart(p, &mut used);
        let start = crn.as_ref().map_or(0, Crn::num_species);
        crn = Some(match crn {
            None => r.crn().clone(),
            Some(c) => c.disjoint_union(r.crn(), &[])?,
        });
        blocks.push(start..start + r.crn().num_species());
        names.push(r.designated_name().to_string());
        renamed.push(r);
    }
    Ok(Layout {
        crn: crn.expect("at least one operand"),
        operands: renamed,
        blocks,
        names,
        used,
    })
}

fn finish(
    kind: CompositionKind,
    lay: Layout,
    fresh: &str,
    extra: CrnBuilder,
    sign: Sign,
    limit: ClaimedLimit,
) -> Result<SignedProgram, CompileError> {
    let crn = lay.crn.extended(extra)?;
    let fresh_index = crn.index_of(fresh).expect("fresh species present");
    let program = SignedProgram::from_parts(crn, fresh_index, sign, limit, 1)?;
    Ok(program.with_composition(Composition {
        kind,
        operands: lay.operands,
        blocks: lay.blocks,
        fresh: fresh_index,
    }))
}

fn one() -> BigRational {
    BigRational::one()
}

fn require_nonnegative(p: &SignedProgram) -> Result<(), CompileError> {
    if p.sign() == Sign::Negative {
        return Err(CompileError::NegativeOperand);
    }
    Ok(())
}

/// `X -> X + U`, `Y -> Y + U`, `U -> 0`: `u' = x + y - u`.
pub fn add(a: &SignedProgram, b: &SignedProgram) -> Result<SignedProgram, CompileError> {
    require_nonnegative(a)?;
    require_nonnegative(b)?;
    let lay = layout(&[a, b])?;
    let u = fresh_name("U", &lay.used);
    let (x, y) = (lay.names[0].as_str(), lay.names[1].as_str());
    let extra = CrnBuilder::new()
        .reaction(&[(x, 1)], &[(x, 1), (&u, 1)], one())?
        .reaction(&[(y, 1)], &[(y, 1), (&u, 1)], one())?
        .reaction(&[(&u, 1)], &[], one())?;
    let limit = ClaimedLimit::Sum(Box::new(a.limit().clone()), Box::new(b.limit().clone()));
    let sign = if a.sign() == Sign::Zero && b.sign() == Sign::Zero {
        Sign::Zero
    } else {
        Sign::Positive
    };
    finish(CompositionKind::Add, lay, &u, extra, sign, limit)
}

/// `X + Y -> X + Y + U`, `U -> 0`: `u' = xy - u`. Magnitudes multiply; signs multiply.
pub fn multiply(a: &SignedProgram, b: &SignedProgram) -> Result<SignedProgram, CompileError> {
    let lay = layout(&[a, b])?;
    let u = fresh_name("U", &lay.used);
    let (x, y) = (lay.names[0].as_str(), lay.names[1].as_str());
    let extra = CrnBuilder::new()
        .reaction(&[(x, 1), (y, 1)], &[(x, 1), (y, 1), (&u, 1)], one())?
        .reaction(&[(&u, 1)], &[], one())?;
    let limit = ClaimedLimit::Product(Box::new(a.limit().clone()), Box::new(b.limit().clone()));
    finish(CompositionKind::Multiply, lay, &u, extra, a.sign().times(b.sign()), limit)
}

/// `0 -> Y`, `X + Y -> X`: `y' = 1 - xy`, converging to `1/|α|`. Sign is kept.
pub fn reciprocal(a: &SignedProgram) -> Result<SignedProgram, CompileError> {
    if a.sign() == Sign::Zero || a.limit().is_known_zero() {
        return Err(CompileError::DivisionByZero);
    }
    let lay = layout(&[a])?;
    let y = fresh_name("Y", &lay.used);
    let x = lay.names[0].as_str();
    let extra = CrnBuilder::new()
        .reaction(&[], &[(&y, 1)], one())?
        .reaction(&[(x, 1), (&y, 1)], &[(x, 1)], one())?;
    let limit = ClaimedLimit::Reciprocal(Box::new(a.limit().clone()));
    finish(CompositionKind::Reciprocal, lay, &y, extra, a.sign(), limit)
}

/// First stage of subtraction for `|α| > |β|`: `0 -> Y`, `X1 + Y -> X1`,
/// `X2 + Y -> X2 + 2Y`, so `y' = 1 - (x1 - x2) y` converges to `1/(|α| - |β|)`.
pub fn subtract_stage(a: &SignedProgram, b: &SignedProgram) -> Result<SignedProgram, CompileError> {
    let lay = layout(&[a, b])?;
    let y = fresh_name("Y", &lay.used);
    let (x1, x2) = (lay.names[0].as_str(), lay.names[1].as_str());
    let extra = CrnBuilder::new()
        .reaction(&[], &[(&y, 1)], one())?
        .reaction(&[(x1, 1), (&y, 1)], &[(x1, 1)], one())?
        .reaction(&[(x2, 1), (&y, 1)], &[(x2, 1), (&y, 2)], one())?;
    let diff = ClaimedLimit::Difference(Box::new(a.limit().clone()), Box::new(b.limit().clone()));
    let limit = ClaimedLimit::Reciprocal(Box::new(diff));
    finish(CompositionKind::SubtractStage, lay, &y, extra, Sign::Positive, limit)
}

/// `|α| - |β|` for `|α| >= |β|`, as the reciprocal of [`subtract_stage`].
/// Equal magnitudes give the zero program; the order is decided exactly.
pub fn subtract(a: &SignedProgram, b: &SignedProgram) -> Result<SignedProgram, CompileError> {
    match a.limit().compare(b.limit())? {
        Ordering::Less => Err(CompileError::WrongOrder),
        Ordering::Equal => zero_program(),
        Ordering::Greater => {
            let stage = subtract_stage(a, b)?;
            let mut out = reciprocal(&stage)?;
            // 1/(1/(a - b)) is reported as a - b
            let limit = ClaimedLimit::Difference(Box::new(a.limit().clone()), Box::new(b.limit().clone()));
            out = SignedProgram::from_parts(out.crn().clone(), out.designated(), Sign::Positive, limit, out.speedup())?
                .with_composition(out.composition().cloned().expect("reciprocal is a composition"));
            Ok(out)
        }
    }
}

fn zero_program() -> Result<SignedProgram, CompileError> {
    compile_rational(&0.into(), &1.into())
}

/// Same network computing the negated number.
pub fn negate(a: &SignedProgram) -> SignedProgram {
    let mut out = a.clone();
    out.set_sign(a.sign().negate());
    out
}

fn with_sign(mut p: SignedProgram, sign: Sign) -> SignedProgram {
    if p.sign() != Sign::Zero {
        p.set_sign(sign);
    }
    p
}

/// Sum of two signed numbers: same signs add magnitudes, opposite signs
/// subtract the smaller magnitude from the larger.
pub fn signed_add(a: &SignedProgram, b: &SignedProgram) -> Result<SignedProgram, CompileError> {
    let (sa, sb) = (a.sign(), b.sign());
    if sa == Sign::Zero || sb == Sign::Zero || sa == sb {
        let sign = if sa == Sign::Zero { sb } else { sa };
        let mag = add(&with_sign(a.clone(), Sign::Positive), &with_sign(b.clone(), Sign::Positive))?;
        return Ok(with_sign(mag, sign));
    }
    let (pa, pb) = (with_sign(a.clone(), Sign::Positive), with_sign(b.clone(), Sign::Positive));
    match a.limit().compare(b.limit())? {
        Ordering::Equal => zero_program(),
        Ordering::Greater => Ok(with_sign(subtract(&pa, &pb)?, sa)),
        Ordering::Less => Ok(with_sign(subtract(&pb, &pa)?, sb)),
    }
}
