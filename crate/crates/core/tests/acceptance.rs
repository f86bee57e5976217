//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cyltree::fixtures::{self, gen_star, line2_swap, star_symmetries};
use cyltree::forest::enumerate_class_pairs;
use cyltree::gen::{gen_random, GenParams};
use cyltree::rn::{
    build_rn, cross_connected_components, observed_ccc_census, predicted_ccc_census, CccKind, DEFAULT_CAP,
};
use cyltree::tc::{TcNode, TcPoint};
use cyltree::verify::{
    brute_force_between, check_equivariance, check_lemma_suite, check_oracle, check_phi, check_rn_is_subdivision,
    Analysis, Outcome, LEMMAS,
};
use cyltree::window::{ValidWindow, Window};

type Criterion = Result<String, String>;
type Check = (&'static str, fn() -> Criterion);

fn vw(w: Window) -> ValidWindow {
    ValidWindow::new(w).expect("valid window")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn census() -> Criterion {
    let mut slowest = Duration::ZERO;
    for k in 3..=8 {
        let t = Instant::now();
        let w = vw(gen_star(k, false).unwrap());
        let cccs = cross_connected_components(&w, false, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let y = w.cylinder_ix("Y").unwrap();
        let got = observed_ccc_census(&cccs, y);
        let predicted = predicted_ccc_census(&w, "Y").unwrap();
        let elapsed = t.elapsed();
        slowest = slowest.max(elapsed);
        ensure(got.peripheral_count == k, || {
            format!("k={k}: {} peripheral", got.peripheral_count)
        })?;
        ensure(got.has_non_peripheral == (k != 3), || {
            format!("k={k}: non-peripheral {}", got.has_non_peripheral)
        })?;
        ensure(got == predicted, || format!("k={k}: prediction {predicted:?}"))?;
        ensure(elapsed < Duration::from_secs(1), || format!("k={k} took {elapsed:?}"))?;
    }
    let w = vw(fixtures::line2());
    let cccs = cross_connected_components(&w, false, DEFAULT_CAP).map_err(|e| e.to_string())?;
    for c in w.cylinders() {
        let n = cccs
            .iter()
            .filter(
                |x| matches!(x.kind, CccKind::Peripheral { cyl, .. } | CccKind::NonPeripheral { cyl } if cyl == c.ix),
            )
            .count();
        ensure(n == 1, || format!("line2 cylinder {} has {n} components", c.id))?;
    }
    Ok(format!("k = 3..8 match, line2 one per cylinder, slowest {slowest:?}"))
}

/// Stars recomputed from brute-force betweenness by subset enumeration.
fn oracle_stars(w: &ValidWindow) -> Vec<Vec<usize>> {
    let cccs = cross_connected_components(w, false, DEFAULT_CAP).unwrap();
    let n = cccs.len();
    let separated =
        |a: usize, b: usize| (0..n).any(|k| k != a && k != b && brute_force_between(w, &cccs, a, k, b).unwrap());
    let ok = |set: &[usize]| set.iter().all(|&a| set.iter().all(|&b| a == b || !separated(a, b)));
    let subsets: Vec<Vec<usize>> = (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.len() >= 2 && ok(s))
        .collect();
    let mut maximal: Vec<Vec<usize>> = subsets
        .iter()
        .filter(|s| {
            !subsets
                .iter()
                .any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)))
        })
        .cloned()
        .collect();
    maximal.sort();
    maximal
}

fn star4_numbers() -> Criterion {
    let t = Instant::now();
    let w = vw(fixtures::star4());
    let pairs = enumerate_class_pairs(&w, "Y", DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(pairs.len() == 7, || format!("{} class pairs", pairs.len()))?;
    let rn = build_rn(&w, false, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let peripheral = rn
        .cccs
        .iter()
        .filter(|c| matches!(c.kind, CccKind::Peripheral { .. }))
        .count();
    let non: Vec<_> = rn
        .cccs
        .iter()
        .filter(|c| matches!(c.kind, CccKind::NonPeripheral { .. }))
        .collect();
    ensure(rn.cccs.len() == 5 && peripheral == 4, || {
        format!("{} components, {peripheral} peripheral", rn.cccs.len())
    })?;
    ensure(non.len() == 1 && non[0].members.len() == 3, || {
        "non-peripheral component is not 3 pairs".into()
    })?;
    ensure(rn.stars.len() == 4, || format!("{} stars", rn.stars.len()))?;
    ensure(rn.stars == oracle_stars(&w), || {
        "stars differ from the brute-force recomputation".into()
    })?;
    ensure((rn.vertex_count(), rn.edge_count()) == (9, 8), || {
        format!("RN {}/{}", rn.vertex_count(), rn.edge_count())
    })?;
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "7 pairs, 5 components (4+1 of 3 pairs), 4 stars, RN 9/8 in {elapsed:?}"
    ))
}

fn subdivision(windows: Vec<(String, Window)>, with_qh: bool) -> Criterion {
    let t = Instant::now();
    let count = windows.len();
    for (name, w) in windows {
        let w = vw(w);
        match check_rn_is_subdivision(&w, with_qh, DEFAULT_CAP).map_err(|e| format!("{name}: {e}"))? {
            Outcome::Isomorphism(_) => {}
            Outcome::Failure(c) => return Err(format!("{name}: {} on {:?}", c.reason, c.cccs)),
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{count} windows, zero failures, {elapsed:?}"))
}

fn subdivision_plain() -> Criterion {
    let mut ws: Vec<(String, Window)> = fixtures::all().into_iter().map(|(n, w)| (n.to_owned(), w)).collect();
    let p = GenParams {
        max_vertices: 10,
        max_cylinders: 4,
        qh: false,
    };
    for seed in 0..500 {
        ws.push((
            format!("random seed {seed}"),
            gen_random(seed, &p).map_err(|e| e.to_string())?,
        ));
    }
    subdivision(ws, false)
}

fn subdivision_qh() -> Criterion {
    let mut ws = vec![("qh4".to_owned(), fixtures::qh4())];
    for k in 4..=8 {
        ws.push((format!("qh star {k}"), gen_star(k, true).unwrap()));
    }
    let p = GenParams {
        max_vertices: 10,
        max_cylinders: 4,
        qh: true,
    };
    for seed in 0..200 {
        ws.push((
            format!("random qh seed {seed}"),
            gen_random(seed, &p).map_err(|e| e.to_string())?,
        ));
    }
    subdivision(ws, true)
}

fn lemma_suite() -> Criterion {
    let mut totals = [0usize; LEMMAS.len()];
    let mut on = |name: &str, w: Window, want: &[usize]| -> Result<(), String> {
        let reports = check_lemma_suite(&vw(w), DEFAULT_CAP).map_err(|e| e.to_string())?;
        for (i, r) in reports.iter().enumerate() {
            ensure(r.passed(), || format!("{name}/{}: {:?}", r.check, r.failures))?;
            totals[i] += r.instances;
        }
        for &i in want {
            ensure(reports[i].instances > 0, || {
                format!("{name}/{} has no instances", LEMMAS[i])
            })?;
        }
        Ok(())
    };
    for (name, w) in fixtures::all() {
        let want: &[usize] = match name {
            "line2" => &[0, 1],
            "star4" => &[2],
            "qh4" => &[3, 4, 7],
            "star4_line" => &[5, 6],
            _ => &[],
        };
        on(name, w, want)?;
    }
    let counts: Vec<String> = LEMMAS.iter().zip(totals).map(|(n, c)| format!("{n}={c}")).collect();
    Ok(counts.join(" "))
}

fn oracle_agreement() -> Criterion {
    let mut total = 0;
    for (name, w) in fixtures::all() {
        let w = vw(w);
        for with_qh in [false, true] {
            let r = check_oracle(&w, with_qh, DEFAULT_CAP).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("{name}: {:?}", r.failures))?;
            if name == "star4" && !with_qh {
                ensure(r.instances == 60, || format!("star4 has {} triples", r.instances))?;
            }
            total += r.instances;
        }
    }
    Ok(format!("{total} ordered triples agree (star4: 60)"))
}

fn phi_contract() -> Criterion {
    let mut total = 0;
    for (name, w) in fixtures::all() {
        let w = vw(w);
        for with_qh in [false, true] {
            let r = check_phi(&w, with_qh, DEFAULT_CAP).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("{name}: {:?}", r.failures))?;
            total += r.instances;
        }
    }
    let w = vw(fixtures::line2());
    let a = Analysis::new(&w, false, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let y1 = a.sd.tc.node_index(TcNode::Cyl(w.cylinder_ix("Y1").unwrap())).unwrap();
    ensure(a.images[0] == TcPoint::Node(y1), || {
        "line2 Y1 component is not sent to its cylinder".into()
    })?;
    let neighbours: BTreeSet<String> =
        a.sd.tc
            .edges()
            .iter()
            .filter_map(|&(p, q)| {
                if q == y1 {
                    Some(p)
                } else if p == y1 {
                    Some(q)
                } else {
                    None
                }
            })
            .map(|n| a.sd.tc.label(&w, n))
            .collect();
    ensure(neighbours == BTreeSet::from(["a".to_owned(), "u".to_owned()]), || {
        format!("Y1 neighbours {neighbours:?}")
    })?;
    Ok(format!("{total} instances; line2 image of Y1 has valence 2 (a, u)"))
}

fn equivariance() -> Criterion {
    let mut total = 0;
    for k in 3..=8 {
        for qh in [false, true] {
            let w = vw(gen_star(k, qh).unwrap());
            let r = check_equivariance(&w, &star_symmetries(k, qh), qh, DEFAULT_CAP).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("star k={k} qh={qh}: {:?}", r.failures))?;
            total += r.instances;
        }
    }
    let w = vw(fixtures::line2());
    let r = check_equivariance(&w, &[line2_swap()], false, DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("line2 swap: {:?}", r.failures))?;
    total += r.instances;
    Ok(format!(
        "dihedral generators for k = 3..8 and the line2 swap, {total} instances"
    ))
}

fn main() -> ExitCode {
    let criteria: [Check; 8] = [
        ("CCC census on stars and line2", census),
        ("STAR4 exhaustive numbers", star4_numbers),
        ("RN is a subdivision of the hull (no QH)", subdivision_plain),
        ("RN is a subdivision of the hull (with QH)", subdivision_qh),
        ("lemma battery", lemma_suite),
        ("oracle agreement on betweenness", oracle_agreement),
        ("Φ contract", phi_contract),
        ("symmetry", equivariance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
