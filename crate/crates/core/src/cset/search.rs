//! Exact homomorphism search by backtracking.
//!
//! Variables are the pairs `(c, x)` in object declaration order with elements
//! ascending; values are tried in ascending order, so the first homomorphism
//! found is the lexicographically least one.

use super::{check_compatible, Instance, Transformation, DEFAULT_GUARD};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::theory::GenId;

const UNSET: usize = usize::MAX;

/// Searches for a natural transformation `x -> y`, pinning fixed objects to
/// the identity.
pub fn find_homomorphism<T: Real>(x: &Instance<T>, y: &Instance<T>) -> Result<Option<Transformation>> {
    find_homomorphism_with_limit(x, y, DEFAULT_GUARD)
}

/// As [`find_homomorphism`] with an explicit bound on search nodes.
pub fn find_homomorphism_with_limit<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    node_limit: u64,
) -> Result<Option<Transformation>> {
    check_compatible(x, y)?;
    let th = x.theory();
    let vars: Vec<(usize, usize)> =
        th.objects().flat_map(|c| (0..x.card(c)).map(move |i| (c.0, i))).collect();

    // For every object, the generators leaving it and the preimages of each
    // element under the generators entering it.
    let mut out_gens = vec![Vec::new(); th.num_objects()];
    let mut in_gens: Vec<Vec<(GenId, Vec<Vec<usize>>)>> = vec![Vec::new(); th.num_objects()];
    for g in th.generators() {
        out_gens[th.dom(g).0].push(g);
        let mut pre = vec![Vec::new(); x.card(th.cod(g))];
        for (i, &j) in x.map(g).iter().enumerate() {
            pre[j].push(i);
        }
        in_gens[th.cod(g).0].push((g, pre));
    }

    let mut s = Search {
        x,
        y,
        vars,
        out_gens,
        in_gens,
        assign: x.cards().iter().map(|&n| vec![UNSET; n]).collect(),
        nodes: 0,
        limit: node_limit,
    };
    if s.solve(0)? {
        Ok(Some(Transformation { components: s.assign }))
    } else {
        Ok(None)
    }
}

struct Search<'a, T> {
    x: &'a Instance<T>,
    y: &'a Instance<T>,
    vars: Vec<(usize, usize)>,
    out_gens: Vec<Vec<GenId>>,
    in_gens: Vec<Vec<(GenId, Vec<Vec<usize>>)>>,
    assign: Vec<Vec<usize>>,
    nodes: u64,
    limit: u64,
}

impl<T: Real> Search<'_, T> {
    fn solve(&mut self, k: usize) -> Result<bool> {
        let Some(&(c, i)) = self.vars.get(k) else { return Ok(true) };
        let th = self.x.theory();
        let candidates = if self.x.is_fixed(th.objects().nth(c).unwrap()) { i..i + 1 } else { 0..self.y.cards()[c] };
        for v in candidates {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::SearchLimit(self.limit));
            }
            self.assign[c][i] = v;
            if self.consistent(c, i) && self.solve(k + 1)? {
                return Ok(true);
            }
        }
        self.assign[c][i] = UNSET;
        Ok(false)
    }

    /// Checks every naturality constraint touching `(c, i)` whose two sides
    /// are both assigned.
    fn consistent(&self, c: usize, i: usize) -> bool {
        let th = self.x.theory();
        let ok = |g: GenId, src: usize| {
            let (d, cd) = (th.dom(g).0, th.cod(g).0);
            let a = self.assign[d][src];
            let b = self.assign[cd][self.x.map(g)[src]];
            a == UNSET || b == UNSET || self.y.map(g)[a] == b
        };
        self.out_gens[c].iter().all(|&g| ok(g, i))
            && self.in_gens[c].iter().all(|(g, pre)| pre[i].iter().all(|&s| ok(*g, s)))
    }
}
