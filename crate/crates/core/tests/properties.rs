mod common;

use std::collections::HashSet;

use common::*;
use cset_transport::builtins::{discrete_graph, weak_graph};
use cset_transport::cset::{find_homomorphism, is_natural};
use cset_transport::ext::ExtReal as Ext;
use cset_transport::hausdorff::{hausdorff_distance, ComponentClass};
use cset_transport::lp::{export_lp, parse_lp, solve, LpStatus};
use cset_transport::markov::{compose_kernels, FiniteKernel as Kernel};
use cset_transport::mm::shortest_path_metric;
use cset_transport::relax::{markov_feasible, wasserstein_cset_distance, wasserstein_cset_lp, WassersteinClass};
use cset_transport::transport::wasserstein_measures;
use cset_transport::{HausdorffConfig, MeasureData, Order};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn ext() -> impl Strategy<Value = Ext<f64>> {
    prop_oneof![4 => (0.0..100.0f64).prop_map(Ext::Finite), 1 => Just(Ext::Inf)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ext_real_laws(a in ext(), b in ext(), c in ext()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert!(((a + b) + c).approx_eq(&(a + (b + c)), 1e-9));
        prop_assert_eq!(a + Ext::zero(), a);
        prop_assert_eq!(Ext::<f64>::zero() * Ext::Inf, Ext::zero());
        prop_assert!(a <= a + b);
        prop_assert_eq!(a.max(b), b.max(a));
    }

    #[test]
    fn shortest_paths_are_metrics(seed: u64) {
        let mut r = rng(seed);
        let nv = r.gen_range(1..=5);
        let ne = r.gen_range(0..=7);
        let x = discrete_graph::<f64>(nv, &random_edges(&mut r, nv, ne)).unwrap();
        let d = shortest_path_metric(&x, None).unwrap();
        prop_assert!(d.validate().is_ok());
        for i in 0..nv {
            prop_assert_eq!(d.get(i, i), Ext::zero());
            for j in 0..nv {
                for k in 0..nv {
                    prop_assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k));
                }
            }
        }
    }

    #[test]
    fn pushforward_preserves_mass(seed: u64) {
        let mut r = rng(seed);
        let (n, m) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let mu = MeasureData::new(random_weights(&mut r, n)).unwrap();
        let f: Vec<usize> = (0..n).map(|_| r.gen_range(0..m)).collect();
        let pushed = mu.pushforward(&f, m).unwrap();
        prop_assert!((pushed.total() - mu.total()).abs() <= 1e-9);
    }

    #[test]
    fn homomorphisms_found_are_natural_and_feasible(seed: u64) {
        let mut r = rng(seed);
        let x = random_graph(&mut r, 4, 5);
        let y = random_graph(&mut r, 4, 5);
        if let Some(t) = find_homomorphism(&x, &y).unwrap() {
            prop_assert!(is_natural(&x, &y, &t).unwrap());
            prop_assert!(markov_feasible(&x, &y, false).unwrap().is_some());
        }
    }

    #[test]
    fn isomorphic_graphs_admit_measure_preserving_kernels(seed: u64) {
        let mut r = rng(seed);
        let nv = r.gen_range(1..=4);
        let ne = r.gen_range(0..=5);
        let edges = random_edges(&mut r, nv, ne);
        let mut perm: Vec<usize> = (0..nv).collect();
        perm.shuffle(&mut r);
        let mut renamed: Vec<(usize, usize)> = edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
        renamed.shuffle(&mut r);
        let x = discrete_graph::<f64>(nv, &edges).unwrap();
        let y = discrete_graph::<f64>(nv, &renamed).unwrap();
        prop_assert!(markov_feasible(&x, &y, true).unwrap().is_some());
    }

    #[test]
    fn lp_text_round_trips(seed: u64) {
        let mut r = rng(seed);
        let model = random_lp(&mut r, 5, 5);
        let back = parse_lp(&export_lp(&model)).unwrap();
        prop_assert_eq!(back.num_vars(), model.num_vars());
        prop_assert_eq!(back.num_constraints(), model.num_constraints());
        let (a, b) = (solve(&model).unwrap(), solve(&back).unwrap());
        prop_assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            prop_assert!((a.objective.unwrap() - b.objective.unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn exact_and_float_solvers_agree(seed: u64) {
        let mut r = rng(seed);
        let model = random_lp(&mut r, 5, 5);
        let float = solve(&model).unwrap();
        let exact = solve(&model.map_scalar::<BigRational>()).unwrap();
        prop_assert_eq!(float.status, exact.status);
        if float.status == LpStatus::Optimal {
            let v = num_traits::ToPrimitive::to_f64(exact.objective.as_ref().unwrap()).unwrap();
            prop_assert!((float.objective.unwrap() - v).abs() <= 1e-6);
        }
    }

    #[test]
    fn kernel_composition_stays_stochastic(seed: u64) {
        let mut r = rng(seed);
        let (a, b, c) = (r.gen_range(1..=4), r.gen_range(1..=4), r.gen_range(1..=4));
        let mn = compose_kernels(&random_kernel(&mut r, a, b), &random_kernel(&mut r, b, c)).unwrap();
        for i in 0..a {
            prop_assert!((mn.row(i).iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            prop_assert!(mn.row(i).iter().all(|&v| v >= 0.0));
        }
        prop_assert!(compose_kernels(&Kernel::identity(a), &mn).unwrap().approx_eq(&mn, 1e-12));
    }

    #[test]
    fn self_distances_vanish(seed: u64) {
        let mut r = rng(seed);
        let nv = r.gen_range(1..=3);
        let ne = r.gen_range(0..=3);
        let x = random_weak_graph(&mut r, nv, ne);
        for class in [ComponentClass::MmShort, ComponentClass::MeasureDecreasing] {
            let cfg = HausdorffConfig::new(Order::one(), class);
            prop_assert_eq!(hausdorff_distance(&x, &x, &cfg).unwrap().distance, Ext::zero());
        }
        for class in [WassersteinClass::MmShort, WassersteinClass::NoShort] {
            let d = wasserstein_cset_distance(&x, &x, Order::one(), class).unwrap().distance;
            prop_assert!(d.finite().is_some_and(|v| v <= 1e-7));
        }
    }

    #[test]
    fn dropping_shortness_never_increases_distance(seed: u64) {
        let mut r = rng(seed);
        let (nvx, nex) = (r.gen_range(1..=3), r.gen_range(0..=3));
        let (nvy, ney) = (r.gen_range(1..=3), r.gen_range(0..=3));
        let x = random_weak_graph(&mut r, nvx, nex);
        let y = random_weak_graph(&mut r, nvy, ney);
        let mm = wasserstein_cset_distance(&x, &y, Order::one(), WassersteinClass::MmShort).unwrap().distance;
        let free = wasserstein_cset_distance(&x, &y, Order::one(), WassersteinClass::NoShort).unwrap().distance;
        prop_assert!(free.approx_le(&mm, 1e-7));
    }

    #[test]
    fn attributed_sets_reduce_to_transport(seed: u64) {
        let mut r = rng(seed);
        let (nx, ny) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let x = random_attributed_set(&mut r, nx, 5, true);
        let y = random_attributed_set(&mut r, ny, 5, true);
        let p = Order::new(if seed % 2 == 0 { 1.0 } else { 2.0 }).unwrap();
        let w = wasserstein_cset_distance(&x, &y, p, WassersteinClass::MmShort).unwrap().distance;
        let (ox, oa) = (x.ob("X").unwrap(), x.ob("A").unwrap());
        let attr = x.theory().generator("attr").unwrap();
        let mx = x.measure(ox).unwrap().pushforward(x.map(attr), 5).unwrap();
        let my = y.measure(ox).unwrap().pushforward(y.map(attr), 5).unwrap();
        let want = wasserstein_measures(&mx, &my, x.metric(oa).unwrap(), p).unwrap();
        prop_assert!(w.approx_eq(&want, 1e-7));
    }

    #[test]
    fn pinned_cells_are_exactly_the_infinite_ones(seed: u64) {
        let mut r = rng(seed);
        let (nvx, nex) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let (nvy, ney) = (r.gen_range(1..=3), r.gen_range(0..=3));
        let x = weak_graph::<f64>(nvx, &random_edges(&mut r, nvx, nex)).unwrap();
        let y = weak_graph::<f64>(nvy, &random_edges(&mut r, nvy, ney)).unwrap();
        let prog = wasserstein_cset_lp(&x, &y, Order::one(), WassersteinClass::MmShort).unwrap();
        let pinned: HashSet<_> = prog.pinned.iter().copied().collect();
        for pc in &prog.layout.object_couplings {
            let dy = prog.cost_vectors[pc.object.0].1.as_ref().unwrap();
            let dx = prog.cost_vectors[pc.object.0].0.as_ref().unwrap();
            let n = x.card(pc.object);
            prop_assert!(dx[pc.pair.0 * n + pc.pair.1].is_finite());
            for (k, v) in pc.vars.iter().enumerate() {
                prop_assert_eq!(pinned.contains(v), dy[k].is_inf());
            }
        }
        for delta in prog.cost_vectors.iter().flat_map(|(a, b)| [a, b]).flatten() {
            let n = (delta.len() as f64).sqrt() as usize;
            for i in 0..n {
                prop_assert_eq!(delta[i * n + i], Ext::zero());
            }
        }
    }
}
