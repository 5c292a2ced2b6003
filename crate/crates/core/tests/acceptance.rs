use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steiner_core::bounds::{
    dual_ascent, select_root, upper_bound_pipeline, ConstantHeuristic, DualAscentHeuristic, OneTreeHeuristic,
    SteinerHeuristic, ZeroHeuristic,
};
use steiner_core::graph::{validate_tree, Cost, Instance, Network, NetworkBuilder, VertexId};
use steiner_core::reductions::{unreduce, Reducer};
use steiner_core::solver::{
    combine_step, dreyfus_wagner, ds_star, solve, DwTable, SearchConfig, SolveConfig, TerminalMask,
    TerminalOrder,
};

const CORPUS: u64 = 500;
const SMALL_CORPUS: u64 = 100;

fn random_instance(seed: u64, max_n: usize, max_t: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=max_n);
    let mut b = NetworkBuilder::new(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        b.add_edge(u, v, rng.gen_range(1..=20)).unwrap();
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            b.add_edge(u, v, rng.gen_range(1..=20)).unwrap();
        }
    }
    let k = rng.gen_range(2..=max_t.min(n));
    let mut terms: Vec<VertexId> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        terms.swap(i, j);
    }
    terms.truncate(k);
    Instance::new(b.build().unwrap(), terms).unwrap()
}

struct Case {
    instance: Instance,
    optimum: Cost,
}

fn corpus() -> Vec<Case> {
    (0..CORPUS)
        .map(|seed| {
            let instance = random_instance(90_000 + seed, 14, 6);
            let optimum = optimum(&instance);
            Case { instance, optimum }
        })
        .collect()
}

fn optimum(inst: &Instance) -> Cost {
    dreyfus_wagner(inst, inst.terminals()[0]).unwrap().0
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

/// All masks `J` over `order` with the root bit set.
fn root_sets(order: &TerminalOrder) -> impl Iterator<Item = TerminalMask> {
    let k = order.others().len();
    (0..1u128 << k).map(|b| TerminalMask::from_bits(b).union(TerminalMask::root()))
}

#[derive(Default)]
struct SearchRecord {
    terminals: usize,
    zero_expansions: u64,
    da_expansions: u64,
    onetree_re_expansions: u64,
}

type Outcome = Result<String, String>;

fn c1_worked_example() -> Outcome {
    // row c of the DW table, terminal bits a=0, b=1, d=2
    let l = |m: TerminalMask| match m.bits() {
        0b001 => Some(12),
        0b010 => Some(11),
        0b100 => Some(16),
        0b011 => Some(17),
        0b101 => Some(22),
        0b110 => Some(26),
        _ => None,
    };
    let ad = combine_step(TerminalMask::from_bits(0b101), l).map(|x| x.0);
    let abd = combine_step(TerminalMask::from_bits(0b111), l).map(|x| x.0);
    if ad == Some(28) && abd == Some(33) {
        Ok("l(c,{a,d}) = 28, l(c,{a,b,d}) = 33".into())
    } else {
        Err(format!("got {ad:?} and {abd:?}"))
    }
}

fn c2_oracle(corpus: &[Case], records: &mut Vec<SearchRecord>) -> Outcome {
    let mut runs = 0;
    for (i, case) in corpus.iter().enumerate() {
        let inst = &case.instance;
        let root = select_root(inst);
        let order = TerminalOrder::new(inst, root).unwrap();
        let mut rec = SearchRecord {
            terminals: inst.terminals().len(),
            ..Default::default()
        };
        for pruning in [false, true] {
            let config = SearchConfig { pruning, deadline: None };
            let mut heuristics: Vec<Box<dyn SteinerHeuristic>> = vec![
                Box::new(ZeroHeuristic),
                Box::new(OneTreeHeuristic::new(inst, order.clone())),
                Box::new(DualAscentHeuristic::new(inst, order.clone())),
            ];
            for h in heuristics.iter_mut() {
                let name = h.name();
                let out = ds_star(inst, root, h.as_mut(), &config).map_err(|e| format!("instance {i} {name}: {e}"))?;
                if out.cost != case.optimum {
                    return Err(format!("instance {i} {name} pruning={pruning}: {} vs {}", out.cost, case.optimum));
                }
                runs += 1;
                match (name, pruning) {
                    ("onetree", _) => rec.onetree_re_expansions += out.stats.re_expansions,
                    ("zero", true) => rec.zero_expansions = out.stats.expansions,
                    ("da", true) => rec.da_expansions = out.stats.expansions,
                    _ => {}
                }
            }
        }
        records.push(rec);
    }
    Ok(format!("{runs} searches agree with DW"))
}

fn c3_end_to_end(corpus: &[Case]) -> Outcome {
    for (i, case) in corpus.iter().enumerate() {
        let s = solve(&case.instance, &SolveConfig::default()).map_err(|e| format!("instance {i}: {e}"))?;
        if s.cost != case.optimum {
            return Err(format!("instance {i}: {} vs {}", s.cost, case.optimum));
        }
        match validate_tree(&case.instance, &s.tree) {
            Ok(c) if c == case.optimum => {}
            other => return Err(format!("instance {i}: tree check {other:?}")),
        }
    }
    Ok(format!("{} instances solved and validated", corpus.len()))
}

fn c4_admissibility() -> Outcome {
    let mut checks = 0u64;
    for seed in 0..SMALL_CORPUS {
        let inst = random_instance(70_000 + seed, 10, 5);
        let root = inst.terminals()[0];
        let order = TerminalOrder::new(&inst, root).unwrap();
        let table = DwTable::build(inst.network(), inst.terminals()).unwrap();
        let mut da = DualAscentHeuristic::new(&inst, order.clone());
        let mut onetree = OneTreeHeuristic::new(&inst, order.clone());
        for set in root_sets(&order) {
            let verts: Vec<VertexId> = order.vertices(set).collect();
            let dw_mask = table.mask_of(&verts).unwrap();
            for u in 0..inst.network().vertex_count() {
                let best = table.best(u, dw_mask).unwrap();
                for h in [&mut da as &mut dyn SteinerHeuristic, &mut onetree] {
                    let value = h.eval(u, set);
                    if value > best {
                        return Err(format!("seed {seed} {} h({u}, {verts:?}) = {value} > {best}", h.name()));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (u, J) pairs, no violations"))
}

/// Searches for `h(u, I) > h(v, I') + l*(v, (I \\ I') + u)` with `I' ⊆ I`.
fn c5_inconsistency(corpus: &[Case], admissible: bool) -> Outcome {
    let mut checked = 0u64;
    for (i, case) in corpus.iter().enumerate() {
        let inst = &case.instance;
        let network = inst.network();
        let root = select_root(inst);
        let order = TerminalOrder::new(inst, root).unwrap();
        let mut da = DualAscentHeuristic::new(inst, order.clone());
        let n = network.vertex_count();
        let sets: Vec<TerminalMask> = root_sets(&order).collect();
        let h: Vec<Vec<Cost>> = sets.iter().map(|&s| (0..n).map(|u| da.eval(u, s)).collect()).collect();
        for u in 0..n {
            let mut terms = inst.terminals().to_vec();
            if !inst.is_terminal(u) {
                terms.push(u);
            }
            let table = DwTable::build(network, &terms).unwrap();
            for (a, &big) in sets.iter().enumerate() {
                for (b, &small) in sets.iter().enumerate() {
                    if !small.is_subset_of(big) {
                        continue;
                    }
                    let mut joined: Vec<VertexId> = order.vertices(big.difference(small)).collect();
                    joined.push(u);
                    let mask = table.mask_of(&joined).unwrap();
                    for v in 0..n {
                        checked += 1;
                        let l = table.best(v, mask).unwrap();
                        if h[a][u] > h[b][v] + l {
                            let msg = format!(
                                "instance {i}: h({u}, {:?}) = {} > h({v}, {:?}) + l* = {} + {l}",
                                order.vertices(big).collect::<Vec<_>>(),
                                h[a][u],
                                order.vertices(small).collect::<Vec<_>>(),
                                h[b][v],
                            );
                            return if admissible { Ok(msg) } else { Err(format!("{msg}, but admissibility failed")) };
                        }
                    }
                }
            }
        }
    }
    Err(format!("no violation among {checked} sampled (u, v, I, I')"))
}

fn c6_no_re_expansions(records: &[SearchRecord]) -> Outcome {
    let total: u64 = records.iter().map(|r| r.onetree_re_expansions).sum();
    if total == 0 {
        Ok(format!("0 re-expansions over {} instances", records.len()))
    } else {
        Err(format!("{total} re-expansions"))
    }
}

type Op = fn(&mut Reducer) -> usize;

fn gate(inst: &Instance, expected: Cost, op: Op) -> Result<usize, String> {
    let mut r = Reducer::new(inst);
    let changes = op(&mut r);
    let res = r.finish();
    let reduced = &res.reduced;
    let (cost, tree) = dreyfus_wagner(reduced, reduced.terminals()[0]).map_err(|e| e.to_string())?;
    if cost + res.offset != expected {
        return Err(format!("{} + {} != {expected}", cost, res.offset));
    }
    let back = unreduce(inst, &res, &tree).map_err(|e| e.to_string())?;
    match validate_tree(inst, &back) {
        Ok(c) if c == expected => Ok(changes),
        other => Err(format!("unreduced tree {other:?}")),
    }
}

fn triangle_with_center(side: Cost) -> Instance {
    let edges = [(0, 1, side), (1, 2, side), (0, 2, side), (3, 0, 3), (3, 1, 3), (3, 2, 3)];
    Instance::new(Network::from_edges(4, edges).unwrap(), [0, 1, 2]).unwrap()
}

fn c7_reduction_gates(corpus: &[Case]) -> Outcome {
    let ops: [(&str, Op); 7] = [
        ("simple", |r| r.simple_reductions()),
        ("long_edges", |r| r.long_edge_test()),
        ("steiner_distance", |r| r.steiner_distance_test()),
        ("ntdk", |r| r.ntdk_test(4)),
        ("dual_ascent", |r| r.dual_ascent_elimination_auto()),
        ("short_links", |r| r.short_links_test()),
        ("nearest_vertex", |r| r.nearest_vertex_test()),
    ];
    let mut fired = Vec::new();
    for (name, op) in ops {
        let mut count = 0;
        for (i, case) in corpus.iter().enumerate() {
            let changes = gate(&case.instance, case.optimum, op).map_err(|e| format!("{name} instance {i}: {e}"))?;
            count += usize::from(changes > 0);
        }
        if count == 0 {
            return Err(format!("{name} never applied"));
        }
        fired.push(format!("{name} {count}"));
    }

    // triangle of 4s: the center is redundant, optimum 8
    let fix = triangle_with_center(4);
    let opt = optimum(&fix);
    match gate(&fix, opt, |r| r.ntdk_test(4)) {
        Ok(1) if opt == 8 => {}
        other => return Err(format!("ntdk fixture: optimum {opt}, gate {other:?}")),
    }
    // sides of 7: the center is needed, optimum 9
    let fix = triangle_with_center(7);
    let opt = optimum(&fix);
    match gate(&fix, opt, |r| r.ntdk_test(4)) {
        Ok(0) if opt == 9 => {}
        other => return Err(format!("ntdk fixture (sides 7): optimum {opt}, gate {other:?}")),
    }
    Ok(format!("all ops preserve the optimum; applied on {}", fired.join(", ")))
}

fn c8_negative_control(corpus: &[Case]) -> Outcome {
    let mut wrong = 0;
    for case in corpus {
        let inst = &case.instance;
        let root = select_root(inst);
        let mut h = ConstantHeuristic { value: 1_000_000, root };
        let config = SearchConfig { pruning: false, deadline: None };
        match ds_star(inst, root, &mut h, &config) {
            Ok(out) if out.cost == case.optimum => {}
            _ => wrong += 1,
        }
    }
    if wrong > 0 {
        Ok(format!("{wrong} of {} costs wrong", corpus.len()))
    } else {
        Err("inadmissible heuristic never produced a wrong cost".into())
    }
}

fn c9_heuristic_benefit(records: &[SearchRecord]) -> Outcome {
    let big: Vec<&SearchRecord> = records.iter().filter(|r| r.terminals >= 4).collect();
    let da = median(big.iter().map(|r| r.da_expansions).collect());
    let zero = median(big.iter().map(|r| r.zero_expansions).collect());
    let worse = big.iter().filter(|r| r.da_expansions > r.zero_expansions).count();
    let msg = format!("{} instances, median expansions da {da} vs zero {zero}, da worse on {worse}", big.len());
    if da <= zero {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c10_sandwich(corpus: &[Case]) -> Outcome {
    let (mut tight_lower, mut tight_upper) = (0, 0);
    for (i, case) in corpus.iter().enumerate() {
        let inst = &case.instance;
        let root = select_root(inst);
        let lower = dual_ascent(inst, root, None).map_err(|e| e.to_string())?.lower_bound;
        let upper = upper_bound_pipeline(inst, root).map_err(|e| e.to_string())?.cost();
        if !(lower <= case.optimum && case.optimum <= upper) {
            return Err(format!("instance {i}: {lower} <= {} <= {upper} fails", case.optimum));
        }
        tight_lower += usize::from(lower == case.optimum);
        tight_upper += usize::from(upper == case.optimum);
    }
    Ok(format!("holds on all; lower bound tight on {tight_lower}, upper bound on {tight_upper}"))
}

fn report(id: u32, name: &str, started: Instant, outcome: &Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    let (tag, detail) = match outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2} {tag} {name} ({secs:.1}s): {detail}");
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;

    let t = Instant::now();
    ok &= report(1, "worked example", t, &c1_worked_example());

    let t = Instant::now();
    let cases = corpus();
    println!("corpus: {} instances built in {:.1}s", cases.len(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let mut records = Vec::new();
    ok &= report(2, "oracle equivalence", t, &c2_oracle(&cases, &mut records));

    let t = Instant::now();
    ok &= report(3, "end-to-end", t, &c3_end_to_end(&cases));

    let t = Instant::now();
    let admissibility = c4_admissibility();
    ok &= report(4, "admissibility", t, &admissibility);

    let t = Instant::now();
    ok &= report(5, "da inconsistency witness", t, &c5_inconsistency(&cases, admissibility.is_ok()));

    let t = Instant::now();
    ok &= report(6, "onetree re-expansions", t, &c6_no_re_expansions(&records));

    let t = Instant::now();
    ok &= report(7, "reduction gates", t, &c7_reduction_gates(&cases));

    let t = Instant::now();
    ok &= report(8, "negative control", t, &c8_negative_control(&cases));

    let t = Instant::now();
    ok &= report(9, "heuristic benefit", t, &c9_heuristic_benefit(&records));

    let t = Instant::now();
    ok &= report(10, "bound sandwich", t, &c10_sandwich(&cases));

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
