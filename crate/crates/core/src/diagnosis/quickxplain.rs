//! QuickXPlain: a minimal subset of the candidates that is inconsistent with
//! the background.

use super::DiagnosisError;
use crate::formula::Formula;
use crate::reasoner::{FormulaId, Reasoner};

/// Returns positions into `candidates` of a minimal conflict, or `None` when
/// `background ∪ candidates` is consistent. Positions come back sorted.
pub fn quickxplain(
    r: &mut Reasoner,
    background: &[FormulaId],
    candidates: &[FormulaId],
) -> Result<Option<Vec<usize>>, DiagnosisError> {
    if !r.is_consistent(background) {
        return Err(DiagnosisError::InconsistentBackground);
    }
    let mut all = background.to_vec();
    all.extend_from_slice(candidates);
    if r.is_consistent(&all) {
        return Ok(None);
    }
    let positions: Vec<usize> = (0..candidates.len()).collect();
    let mut base = background.to_vec();
    let mut conflict = qx(r, &mut base, false, &positions, candidates);
    conflict.sort_unstable();
    Ok(Some(conflict))
}

fn qx(r: &mut Reasoner, base: &mut Vec<FormulaId>, changed: bool, c: &[usize], ids: &[FormulaId]) -> Vec<usize> {
    if changed && !r.is_consistent(base) {
        return Vec::new();
    }
    if c.len() == 1 {
        return c.to_vec();
    }
    let (c1, c2) = c.split_at(c.len() / 2);
    let mark = base.len();
    base.extend(c1.iter().map(|&i| ids[i]));
    let d2 = qx(r, base, true, c2, ids);
    base.truncate(mark);
    base.extend(d2.iter().map(|&i| ids[i]));
    let d1 = qx(r, base, !d2.is_empty(), c1, ids);
    base.truncate(mark);
    let mut out = d1;
    out.extend(d2);
    out
}

/// [`quickxplain`] over plain formulas.
pub fn quickxplain_formulas(
    background: &[Formula],
    candidates: &[Formula],
) -> Result<Option<Vec<usize>>, DiagnosisError> {
    let mut r = Reasoner::new();
    let b = r.intern_all(background);
    let c = r.intern_all(candidates);
    quickxplain(&mut r, &b, &c)
}
