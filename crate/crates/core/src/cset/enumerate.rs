//! Guarded enumeration of transformations with per-object filters.
//!
//! A filter is called on every prefix `t_c(0), ..., t_c(k)` of a candidate
//! component and must be prefix-closed: once it rejects a prefix it must
//! reject every extension. Injectivity, shortness and measure decrease all
//! have this property, which lets candidate components be generated by
//! pruned backtracking instead of filtering all `|Y(c)|^|X(c)|` functions.

use super::{check_compatible, Instance, Transformation};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::theory::ObId;

/// Default bound on candidate transformations (and on homomorphism search
/// nodes).
pub const DEFAULT_GUARD: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationGuard {
    pub limit: u64,
    pub force: bool,
}

impl Default for EnumerationGuard {
    fn default() -> Self {
        EnumerationGuard { limit: DEFAULT_GUARD, force: false }
    }
}

impl EnumerationGuard {
    pub fn new(limit: u64) -> Self {
        EnumerationGuard { limit, force: false }
    }

    pub fn forced() -> Self {
        EnumerationGuard { limit: DEFAULT_GUARD, force: true }
    }

    fn exceeded(&self, count: u128) -> bool {
        !self.force && count > self.limit as u128
    }
}

/// Filter admitting every function.
pub fn all_components(_: ObId, _: &[usize]) -> bool {
    true
}

/// Filter admitting injective components.
pub fn injective_components(_: ObId, prefix: &[usize]) -> bool {
    match prefix.split_last() {
        Some((last, rest)) => !rest.contains(last),
        None => true,
    }
}

/// `n^k` as an exact count, saturating at `u128::MAX`.
pub fn count_functions(k: usize, n: usize) -> u128 {
    (0..k).fold(1u128, |acc, _| acc.saturating_mul(n as u128))
}

/// All admissible transformations `x -> y` in lexicographic order of their
/// component tuples. Fixed objects contribute only the identity.
pub fn enumerate_transformations<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    filter: &dyn Fn(ObId, &[usize]) -> bool,
    guard: EnumerationGuard,
) -> Result<Transformations> {
    check_compatible(x, y)?;
    let th = x.theory();
    let mut lists = Vec::with_capacity(th.num_objects());
    let mut total: u128 = 1;
    for c in th.objects() {
        let list = if x.is_fixed(c) {
            let id: Vec<usize> = (0..x.card(c)).collect();
            if filter_accepts(filter, c, &id) {
                vec![id]
            } else {
                Vec::new()
            }
        } else {
            components(c, x.card(c), y.card(c), filter, guard)?
        };
        total = total.saturating_mul(list.len() as u128);
        lists.push(list);
    }
    if guard.exceeded(total) {
        return Err(Error::GuardExceeded { count: total.to_string(), guard: guard.limit });
    }
    Ok(Transformations::new(lists, total))
}

fn filter_accepts(filter: &dyn Fn(ObId, &[usize]) -> bool, c: ObId, f: &[usize]) -> bool {
    (0..=f.len()).all(|k| filter(c, &f[..k]))
}

fn components(
    c: ObId,
    k: usize,
    n: usize,
    filter: &dyn Fn(ObId, &[usize]) -> bool,
    guard: EnumerationGuard,
) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if !filter(c, &[]) {
        return Ok(out);
    }
    let mut prefix = Vec::with_capacity(k);
    let mut err = None;
    extend(c, k, n, filter, guard, &mut prefix, &mut out, &mut err);
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    c: ObId,
    k: usize,
    n: usize,
    filter: &dyn Fn(ObId, &[usize]) -> bool,
    guard: EnumerationGuard,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    err: &mut Option<Error>,
) {
    if err.is_some() {
        return;
    }
    if prefix.len() == k {
        out.push(prefix.clone());
        if guard.exceeded(out.len() as u128) {
            *err = Some(Error::GuardExceeded { count: format!("more than {}", guard.limit), guard: guard.limit });
        }
        return;
    }
    for v in 0..n {
        prefix.push(v);
        if filter(c, prefix) {
            extend(c, k, n, filter, guard, prefix, out, err);
        }
        prefix.pop();
        if err.is_some() {
            return;
        }
    }
}

/// Iterator over the product of per-object candidate lists, last object
/// varying fastest.
#[derive(Clone, Debug)]
pub struct Transformations {
    lists: Vec<Vec<Vec<usize>>>,
    idx: Vec<usize>,
    total: u128,
    done: bool,
}

impl Transformations {
    fn new(lists: Vec<Vec<Vec<usize>>>, total: u128) -> Self {
        let done = lists.iter().any(Vec::is_empty);
        let idx = vec![0; lists.len()];
        Transformations { lists, idx, total, done }
    }

    /// Number of transformations the iterator yields in total.
    pub fn count_total(&self) -> u128 {
        self.total
    }

    /// Candidate components per object.
    pub fn candidates(&self) -> &[Vec<Vec<usize>>] {
        &self.lists
    }
}

impl Iterator for Transformations {
    type Item = Transformation;

    fn next(&mut self) -> Option<Transformation> {
        if self.done {
            return None;
        }
        let t = Transformation {
            components: self.idx.iter().zip(&self.lists).map(|(&i, l)| l[i].clone()).collect(),
        };
        self.done = true;
        for pos in (0..self.idx.len()).rev() {
            self.idx[pos] += 1;
            if self.idx[pos] < self.lists[pos].len() {
                self.done = false;
                break;
            }
            self.idx[pos] = 0;
        }
        Some(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{BuiltinTheory, Theory};
    use std::sync::Arc;

    fn graph(nv: usize, edges: &[(usize, usize)]) -> Instance<f64> {
        let t = Arc::new(Theory::builtin(BuiltinTheory::Graph));
        Instance::from_named(
            t,
            &[("V", nv), ("E", edges.len())],
            &[("src", edges.iter().map(|e| e.0).collect()), ("tgt", edges.iter().map(|e| e.1).collect())],
        )
        .unwrap()
    }

    fn cycle(n: usize) -> Instance<f64> {
        graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    #[test]
    fn small_counts() {
        let one = graph(1, &[]);
        let three = graph(3, &[]);
        let g = EnumerationGuard::default();
        assert_eq!(enumerate_transformations(&one, &one, &all_components, g).unwrap().count(), 1);
        let ts: Vec<_> = enumerate_transformations(&one, &three, &all_components, g).unwrap().collect();
        assert_eq!(ts.len(), 3);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn injective_cycle_maps() {
        let it = enumerate_transformations(&cycle(2), &cycle(4), &injective_components, EnumerationGuard::default())
            .unwrap();
        assert_eq!(it.count_total(), 144);
        assert_eq!(it.count(), 144);
    }

    #[test]
    fn guard_reports_count_and_escape_hatch() {
        let x = graph(8, &[]);
        let y = graph(8, &[]);
        let err = enumerate_transformations(&x, &y, &all_components, EnumerationGuard::new(1000)).unwrap_err();
        assert!(err.to_string().contains("--force"), "{err}");
        let forced = EnumerationGuard { limit: 1000, force: true };
        let it = enumerate_transformations(&graph(4, &[]), &graph(4, &[]), &all_components, forced).unwrap();
        assert_eq!(it.count_total(), 256);
    }

    #[test]
    fn fixed_objects_contribute_the_identity() {
        let x = cycle(3).with_fixed(ObId(1));
        let it = enumerate_transformations(&x, &x, &all_components, EnumerationGuard::default()).unwrap();
        assert_eq!(it.count_total(), 27);
        assert!(it.into_iter().all(|t| t.components[1] == [0, 1, 2]));
    }
}
