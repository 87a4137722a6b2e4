mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unlk::deformations::{
    bifurcation, continue_c, default_flatten_width, default_grid, slope_check, special_deformation, Family, TrackOptions, TruncationData,
};
use unlk::ingest::{ingest, rasterize, IngestOptions, RasterOptions};
use unlk::morse_tree::models::{double_mountain, single_mountain};
use unlk::morse_tree::{nu_forest, nu_oracle, nu_recursive, spectrum, PlaneTree, Source};
use unlk::profile::RhoProfile;
use unlk::rational::{fmt_q, q, qi, to_f64, Q};
use unlk::reeb_surface::models::{genus2_figure, torus_minimal};
use unlk::reeb_surface::{
    core_graph, core_graph_with_order, dispersion_check, heavy, superheavy, zeta, zeta_scan, Cell, StripOrder, SurfaceReebGraph,
};
use unlk::report::DecompositionReport;
use unlk::sphere::{capped_orbit, counterexample, sphere_fixed_points, HeightProfile};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let trees: Vec<PlaneTree> = (0..200).map(|_| common::random_tree(&mut r, 4, 12)).collect();
    let mut fails = 0;
    for t in &trees {
        if nu_recursive(t).map_err(|e| e.to_string())? != nu_oracle(t).map_err(|e| e.to_string())? {
            fails += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(fails == 0, || format!("{fails} mismatches"))?;
    check(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("200 trees, 0 mismatches, {secs:.2} s"))
}

fn worked_examples() -> Outcome {
    let (s, d) = (single_mountain(), double_mountain());
    for (t, want) in [(&s, q(3, 4)), (&d, q(7, 10))] {
        let (r, o) = (nu_recursive(t).unwrap(), nu_oracle(t).unwrap());
        check(r == want && o == want, || format!("recursive {} oracle {} want {}", fmt_q(&r), fmt_q(&o), fmt_q(&want)))?;
    }
    let (b, a0, a1) = (q(15, 16), q(7, 10), q(37, 60));
    let formula = b.min(a0.max(a1));
    check(formula == nu_recursive(&d).unwrap(), || format!("min(b, max(a0, a1)) = {}", fmt_q(&formula)))?;
    let actions: Vec<Q> = spectrum(&d).unwrap().into_iter().map(|e| e.action).collect();
    check([q(15, 16), q(7, 10), q(37, 60)].iter().all(|x| actions.contains(x)), || "b, a0, a1 not all in the spectrum".into())?;
    Ok("single 3/4, double 7/10 = min(15/16, max(7/10, 37/60))".into())
}

fn max_formula() -> Outcome {
    let mut r = rng(3);
    for i in 0..100 {
        let a = common::random_tree(&mut r, 3, 12);
        let b = common::random_tree(&mut r, 3, 12);
        let (na, nb) = (nu_recursive(&a).unwrap(), nu_recursive(&b).unwrap());
        let f = nu_forest(&[a.clone(), b.clone()]).unwrap();
        check(f == na.clone().max(nb.clone()), || format!("pair {i}: forest {} parts {} {}", fmt_q(&f), fmt_q(&na), fmt_q(&nb)))?;
        for (t, n) in [(&a, &na), (&b, &nb)] {
            check(*n >= Q::zero(), || format!("pair {i}: negative value"))?;
            check(spectrum(t).unwrap().iter().any(|e| &e.action == n), || format!("pair {i}: value not in spectrum"))?;
        }
    }
    Ok("100 pairs exact; values nonnegative and spectral".into())
}

fn simple_bump() -> Outcome {
    let mut r = rng(4);
    for i in 0..50 {
        let (t, a1) = common::random_simple_bump(&mut r);
        let nu = nu_recursive(&t).unwrap();
        let f_a1 = t.edges[0].annulus.level_at(&a1).unwrap();
        check(nu == &f_a1 + &a1, || format!("bump {i}: {} vs f(a1) + a1 = {}", fmt_q(&nu), fmt_q(&(&f_a1 + &a1))))?;
        let hit = spectrum(&t).unwrap().into_iter().filter(|e| e.action == nu).collect::<Vec<_>>();
        let at_a1 = hit.iter().any(|e| matches!(&e.source, Source::Orbit(o) if o.k == -1 && o.area == a1));
        check(at_a1, || format!("bump {i}: achieving orbit is not at a1"))?;
        let nonzero_min = spectrum(&t).unwrap().into_iter().map(|e| e.action).filter(|a| !a.is_zero()).min().unwrap();
        check(nonzero_min == nu, || format!("bump {i}: not the smallest nonzero action"))?;
        check(nu == nu_oracle(&t).unwrap(), || format!("bump {i}: oracle differs"))?;
    }
    Ok("50 profiles, value f(a1) + a1 at the increasing rho = -1 orbit".into())
}

fn ids(report: &DecompositionReport) -> DecompositionReport {
    let mut r = report.clone();
    r.essential_saddles.sort();
    r.core_edges.sort();
    for d in &mut r.disks {
        d.vertices.sort();
        d.edges.sort();
    }
    r.disks.sort_by(|a, b| a.root_edge.cmp(&b.root_edge));
    r
}

fn shuffled(g: &SurfaceReebGraph, r: &mut ChaCha8Rng) -> SurfaceReebGraph {
    let mut perm: Vec<usize> = (0..g.vertices.len()).collect();
    perm.shuffle(r);
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut out = g.clone();
    out.vertices = perm.iter().map(|&o| g.vertices[o].clone()).collect();
    for e in &mut out.edges {
        e.ends = [inv[e.ends[0]], inv[e.ends[1]]];
        if r.gen_bool(0.5) {
            e.ends.swap(0, 1);
        }
    }
    out.edges.shuffle(r);
    out
}

fn genus2_figure_counts() -> Outcome {
    let g = genus2_figure();
    let d = core_graph(&g).unwrap();
    let rep = DecompositionReport::new(&g, &d);
    let counts = (rep.essential_saddles.len(), rep.disks.len(), rep.core_edges.len());
    check(counts == (6, 4, 7), || format!("counts {counts:?}"))?;
    check(d == core_graph_with_order(&g, StripOrder::HighestFirst).unwrap(), || "strip order changes the result".into())?;
    let base = ids(&rep);
    let mut r = rng(5);
    for _ in 0..20 {
        let h = shuffled(&g, &mut r);
        for order in [StripOrder::LowestFirst, StripOrder::HighestFirst] {
            let other = ids(&DecompositionReport::new(&h, &core_graph_with_order(&h, order).unwrap()));
            check(other == base, || "relabelling changes the decomposition".into())?;
        }
    }
    Ok("6 essential saddles, 4 disks, 7 core edges; order independent".into())
}

fn quasi_state() -> Outcome {
    let mut r = rng(6);
    for i in 0..50 {
        let genus = 1 + i % 3;
        let g = common::random_surface(&mut r, genus as u32);
        let z = zeta(&g).unwrap();
        let lo = g.vertices.iter().map(|v| v.level.clone()).min().unwrap() - qi(1);
        let hi = g.vertices.iter().map(|v| v.level.clone()).max().unwrap();
        let ts: Vec<Q> = (0..=12).map(|k| &lo + (&hi - &lo) * q(k, 12)).collect();
        let s = zeta_scan(&g, &ts).unwrap();
        check(s.value == z, || format!("graph {i}: zeta {} scan {}", fmt_q(&z), fmt_q(&s.value)))?;
        let factor = q(r.gen_range(1..=9), r.gen_range(1..=9));
        let mut scaled = g.clone();
        for e in &mut scaled.edges {
            e.annulus = e.annulus.as_ref().map(|a| a.rescaled_areas(&factor));
        }
        check(zeta(&scaled).unwrap() == z, || format!("graph {i}: area rescaling moves zeta"))?;
        let shift = q(r.gen_range(-20..=20), 7);
        check(zeta(&g.shifted(&shift)).unwrap() == &z + &shift, || format!("graph {i}: shift"))?;
        let (a, b) = dispersion_check(&g).unwrap();
        check(a == b, || format!("graph {i}: dispersion {} vs {}", fmt_q(&a), fmt_q(&b)))?;
    }
    Ok("50 graphs of genus 1-3".into())
}

fn all_cells(g: &SurfaceReebGraph) -> Vec<Cell> {
    g.vertices.iter().map(|v| Cell::Vertex(v.id.clone())).chain(g.edges.iter().map(|e| Cell::Edge(e.id.clone()))).collect()
}

fn heaviness() -> Outcome {
    let g = torus_minimal();
    let d = core_graph(&g).unwrap();
    let one = vec![Cell::Edge(g.edges[d.core_edges[0]].id.clone())];
    check(heavy(&g, &one).unwrap() && !superheavy(&g, &one).unwrap(), || "single core edge".into())?;
    let core: Vec<Cell> = d
        .core_vertices
        .iter()
        .map(|&v| Cell::Vertex(g.vertices[v].id.clone()))
        .chain(d.core_edges.iter().map(|&e| Cell::Edge(g.edges[e].id.clone())))
        .collect();
    check(superheavy(&g, &core).unwrap(), || "all core cells".into())?;
    for disk in &d.disks {
        let branch: Vec<Cell> = disk
            .vertices
            .iter()
            .map(|&v| Cell::Vertex(g.vertices[v].id.clone()))
            .chain(disk.edges.iter().map(|&e| Cell::Edge(g.edges[e].id.clone())))
            .collect();
        check(!heavy(&g, &branch).unwrap() && !superheavy(&g, &branch).unwrap(), || "disk branch".into())?;
    }
    let mut r = rng(7);
    let mut supers = 0;
    for i in 0..100 {
        let g = if i % 2 == 0 { torus_minimal() } else { common::random_surface(&mut r, 1 + (i % 3) as u32) };
        let cells = all_cells(&g);
        let p = if i % 5 == 0 { 0.95 } else { 0.4 };
        let pick: Vec<Cell> = cells.into_iter().filter(|_| r.gen_bool(p)).collect();
        let (h, s) = (heavy(&g, &pick).unwrap(), superheavy(&g, &pick).unwrap());
        supers += s as usize;
        check(!s || h, || format!("set {i}: superheavy but not heavy"))?;
    }
    Ok(format!("torus cases hold; 100 random sets, {supers} superheavy, all heavy"))
}

fn deformation() -> Outcome {
    let mut r = rng(8);
    let mut slopes = 0;
    for i in 0..20 {
        let g = common::random_truncation_profile(&mut r);
        let td = TruncationData::new(&g).unwrap();
        for k in 0..td.h_k.len() {
            let (a, b) = (&td.tau[k + 1], &td.tau[k]);
            for j in 0..10 {
                let s = a + (b - a) * q(j, 10);
                let total = special_deformation(&td, &s).unwrap().pl().total();
                check(total == &td.h * (Q::one() - &s), || format!("profile {i}, layer {k}: integral {}", fmt_q(&total)))?;
            }
        }
        let w = default_flatten_width(&g);
        let Ok(fam) = Family::special(&g, Some(&w), vec![]) else { continue };
        let d = bifurcation(&fam, &default_grid(129), TrackOptions::default()).map_err(|e| format!("profile {i}: {e}"))?;
        let Family::Special { td: flat, .. } = &fam else { unreachable!() };
        let rep = slope_check(&d, to_f64(&flat.h), 1e-6);
        check(rep.pass, || format!("profile {i}: {rep:?}"))?;
        slopes += 1;
    }
    let g = RhoProfile::new(vec![(qi(2), qi(0)), (qi(3), q(5, 2)), (qi(4), qi(0))]).unwrap();
    let fam = Family::special(&g, None, vec![single_mountain()]).unwrap();
    let h = 2.5;
    let d = bifurcation(&fam, &default_grid(257), TrackOptions::default()).unwrap();
    check(slope_check(&d, h, 1e-6).pass, || "constructed family slopes".into())?;
    let c_in = to_f64(&fam.inside_value().unwrap().unwrap());
    let path = continue_c(&d, h + c_in, 1e-9).map_err(|e| e.to_string())?;
    let drop = path[0].1 - path.last().unwrap().1;
    check((drop - h).abs() <= 1e-9, || format!("c(K0) - c(K1) = {drop}"))?;
    Ok(format!("20 profiles exact; {slopes} tracked within slope bound; c(K0) - c(K1) = {drop}"))
}

fn recapping(hp: &HeightProfile) -> Result<usize, String> {
    let mut n = 0;
    for o in sphere_fixed_points(hp).map_err(|e| e.to_string())? {
        for m in -3..=3 {
            let a = capped_orbit(hp, &o.z, o.k, m).map_err(|e| e.to_string())?;
            let b = capped_orbit(hp, &o.z, o.k, m + 1).map_err(|e| e.to_string())?;
            check(&a.action - &b.action == Q::one() && a.cz_index - b.cz_index == 2, || format!("recapping at z = {}", fmt_q(&o.z)))?;
            n += 1;
        }
    }
    Ok(n)
}

fn sphere_counterexample() -> Outcome {
    let r = counterexample(&q(1, 10), &q(1, 100)).map_err(|e| e.to_string())?;
    let gap = r.c1.clone().max(r.c2.clone()) - &r.c_sum;
    check(gap == r.gap, || "gap is not max(c1, c2) - c_sum".into())?;
    check(gap >= q(5, 100), || format!("gap {}", fmt_q(&gap)))?;
    check(r.c2 >= q(48, 100) && r.c2 <= q(52, 100), || format!("c2 {}", fmt_q(&r.c2)))?;
    check(r.c_sum >= q(38, 100) && r.c_sum <= q(44, 100), || format!("c_sum {}", fmt_q(&r.c_sum)))?;
    let mut orbits = 0;
    for hp in [&r.h, &r.h2] {
        orbits += recapping(hp)?;
    }
    Ok(format!(
        "gap {:.4}, c2 {:.4}, c_sum {:.4}; recapping checked on {orbits} capped orbits",
        to_f64(&gap),
        to_f64(&r.c2),
        to_f64(&r.c_sum)
    ))
}

fn ingest_round_trip() -> Outcome {
    let mut lines = Vec::new();
    for (name, t) in [("single", single_mountain()), ("double", double_mountain())] {
        let exact = to_f64(&nu_recursive(&t).unwrap());
        let mut errs = Vec::new();
        for n in [128, 256, 512] {
            let g = rasterize(&t, RasterOptions { size: n, margin: 3 }).map_err(|e| e.to_string())?;
            let res = ingest(&g, IngestOptions { n_levels: 256, ..Default::default() }).map_err(|e| e.to_string())?;
            let got = to_f64(&nu_forest(&res.trees).unwrap());
            errs.push((got - exact).abs() / exact);
        }
        check(errs[2] < 0.02, || format!("{name}: error {:.4} at 512", errs[2]))?;
        check(errs[0] > errs[1] && errs[1] > errs[2], || format!("{name}: errors {errs:?} not decreasing"))?;
        lines.push(format!("{name} {:.1e}/{:.1e}/{:.1e}", errs[0], errs[1], errs[2]));
    }
    Ok(format!("relative errors at 128/256/512: {}", lines.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("worked examples", worked_examples),
        ("max formula", max_formula),
        ("simple bump", simple_bump),
        ("genus-2 figure", genus2_figure_counts),
        ("quasi-state", quasi_state),
        ("heaviness", heaviness),
        ("deformation", deformation),
        ("sphere counterexample", sphere_counterexample),
        ("ingest round-trip", ingest_round_trip),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
