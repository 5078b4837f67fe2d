//! Acceptance suite. Prints one PASS/FAIL line per criterion followed by
//! indented details.
//!
//! Two published numbers cannot be reproduced: the size-8, core-4 table entry
//! (its row does not add up to its own total) and the second eigenvalue at
//! polygon sizes 6 and 7 (the published values are lower eigenvalues of the
//! same matrix). Those criteria print FAIL. The process exits nonzero only
//! when a failure differs from these documented discrepancies.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rayon::prelude::*;

use tangle_cli::{cmd_count, flip_involution_failures, CliConfig, CountArgs};
use tangle_core::counting::{verify_against_bruteforce, CountTable, DEFAULT_H_CAP};
use tangle_core::duality::{diagonal_node, layout_to_pair, pair_to_layout, rotate, rotation_graph_isomorphic};
use tangle_core::flip_graph::{is_connected, Adjacency, FlipGraph, InducedTriGraph};
use tangle_core::known::{MIXING, CORE_COUNTS, CORE_COUNT_ERRATA};
use tangle_core::polygon::{enumerate_disjoint_pairs, enumerate_triangulations, Diagonal, DisjointPair, Side, Triangulation};
use tangle_core::sampling::{chi_square_uniformity, exact_outcomes, Sampler, SamplerConfig};
use tangle_core::spectral::{power_extremes, spectral_report};
use tangle_core::tanglegram::{census_by_core_size, enumerate_tanglegrams, Layout};

#[derive(Default)]
struct Verdict {
    /// Failures that match a documented discrepancy.
    documented: Vec<String>,
    /// Any other failure.
    unexpected: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.unexpected.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn within(&mut self, elapsed: Duration, limit_secs: f64, what: &str) {
        let secs = elapsed.as_secs_f64();
        self.note(format!("{what}: {secs:.2} s (limit {limit_secs} s)"));
        self.require(secs < limit_secs, format!("{what} took {secs:.2} s"));
    }

    fn passed(&self) -> bool {
        self.documented.is_empty() && self.unexpected.is_empty()
    }
}

fn tri(n: usize, pairs: &[(usize, usize)]) -> Triangulation {
    Triangulation::from_pairs(n, pairs).unwrap()
}

/// Published decimals are sometimes rounded and sometimes truncated, so a
/// value agrees to `places` when either reproduces the published digits.
fn agrees(value: f64, published: f64, places: u32) -> bool {
    let scale = 10f64.powi(places as i32);
    let digits = (published * scale).round();
    (value * scale).round() == digits || (value * scale + 1e-9).floor() == digits
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn core_count_reproduction() -> Verdict {
    let mut v = Verdict::default();
    let dir = tempfile::tempdir().unwrap();
    let cfg = CliConfig { cache_dir: dir.path().to_path_buf() };
    let args = CountArgs { max_n: 8, h_cap: DEFAULT_H_CAP, out: None };
    let start = Instant::now();
    let mut cold = Vec::new();
    cmd_count(&cfg, &args, &mut cold).unwrap();
    v.within(start.elapsed(), 30.0, "count --max-n 8, cold cache");
    let mut warm = Vec::new();
    cmd_count(&cfg, &args, &mut warm).unwrap();
    v.require(cold == warm, "warm-cache rerun changed the output");

    let csv = String::from_utf8(cold).unwrap();
    let mut cells: BTreeMap<(usize, String), u64> = BTreeMap::new();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        cells.insert((f[0].parse().unwrap(), f[1].to_string()), f[2].parse().unwrap());
    }
    let mut compared = 0;
    for &(n, row, total) in CORE_COUNTS {
        for (k, &published) in (2..).zip(row) {
            compared += 1;
            let got = cells.get(&(n, k.to_string())).copied();
            if got == Some(published) {
                continue;
            }
            let erratum = CORE_COUNT_ERRATA.iter().find(|e| e.0 == n && e.1 == k);
            let msg = format!("t_{{{n},{k}}}: computed {got:?}, published {published}");
            match erratum {
                Some(&(_, _, p, correct)) if p == published && got == Some(correct) => {
                    let row_sum: u64 = row.iter().sum();
                    v.documented.push(format!(
                        "{msg}; the published row sums to {row_sum} against its own total {total}, \
                         and the computed value {correct} restores the total"
                    ));
                }
                _ => v.unexpected.push(msg),
            }
        }
        compared += 1;
        let got = cells.get(&(n, "total".to_string())).copied();
        v.require(got == Some(total), format!("t_{n}: computed {got:?}, published {total}"));
    }
    v.note(format!("{compared} published entries compared"));
    v
}

fn flip_graph_census(graphs: &mut BTreeMap<usize, FlipGraph>) -> Verdict {
    let mut v = Verdict::default();
    let mut small = Duration::ZERO;
    for row in MIXING {
        let start = Instant::now();
        let g = FlipGraph::build(row.n).unwrap();
        let degree = 2 * (row.n - 3);
        let regular = g.degree() == degree && (0..g.vertex_count()).all(|i| g.neighbors(i).len() == degree);
        let simple = g.is_simple() && g.is_symmetric();
        let connected = is_connected(&g);
        let elapsed = start.elapsed();
        v.note(format!(
            "n={}: |V|={} (published {}), {}-regular={regular}, simple={simple}, connected={connected}",
            row.n,
            g.vertex_count(),
            row.vertices,
            degree
        ));
        v.require(g.vertex_count() == row.vertices, format!("|V(D_{})| = {}", row.n, g.vertex_count()));
        v.require(regular && simple && connected, format!("D_{} structure", row.n));
        if row.n <= 8 {
            small += elapsed;
        } else {
            v.within(elapsed, 120.0, &format!("n = {}", row.n));
        }
        graphs.insert(row.n, g);
    }
    v.within(small, 10.0, "n = 5..8");
    v
}

fn spectral_reproduction(graphs: &BTreeMap<usize, FlipGraph>) -> Verdict {
    let mut v = Verdict::default();
    for row in MIXING {
        let g = &graphs[&row.n];
        let start = Instant::now();
        let (sigma2, sigma2_abs, spectrum) = if row.n <= 8 {
            let r = spectral_report(g).unwrap();
            v.require(
                r.tv_iterations == row.tv_iterations,
                format!("n={}: {} TV iterations, published {}", row.n, r.tv_iterations, row.tv_iterations),
            );
            v.note(format!(
                "n={}: tv_iterations={} (published {})",
                row.n, r.tv_iterations, row.tv_iterations
            ));
            (r.sigma2, r.sigma2_abs, r.leading_eigenvalues)
        } else {
            let (top, bottom) = power_extremes(g);
            (top, top.abs().max(bottom.abs()), Vec::new())
        };
        let elapsed = start.elapsed();
        if row.n == 8 {
            v.within(elapsed, 300.0, "n = 8 spectrum and TV");
        }
        v.note(format!(
            "n={}: sigma2={sigma2:.6} signed, {sigma2_abs:.6} modulus (published {:.4}, checked to {} places)",
            row.n, row.sigma2, row.decimals
        ));
        if agrees(sigma2, row.sigma2, row.decimals) {
            continue;
        }
        let msg = format!(
            "n={}: second eigenvalue {sigma2:.6} (modulus {sigma2_abs:.6}) vs published {:.4}",
            row.n, row.sigma2
        );
        match spectrum.iter().position(|&x| agrees(x, row.sigma2, row.decimals)) {
            Some(i) if (row.n == 6 || row.n == 7) && i > 1 => {
                let leading: Vec<String> = spectrum.iter().take(i + 1).map(|x| format!("{x:.6}")).collect();
                v.documented.push(format!(
                    "{msg}; the published value is eigenvalue #{} in decreasing order [{}]",
                    i + 1,
                    leading.join(", ")
                ));
            }
            _ => v.unexpected.push(msg),
        }
    }
    v
}

fn diameter_bounds(graphs: &BTreeMap<usize, FlipGraph>) -> Verdict {
    let mut v = Verdict::default();
    for n in 5..=8 {
        let d = graphs[&n].diameter().unwrap();
        v.require(d <= 4 * n - 16, format!("diam(D_{n}) = {d} exceeds {}", 4 * n - 16));
        let bases = enumerate_triangulations(n).unwrap();
        let induced: Vec<Result<usize, _>> = bases.par_iter().map(|s| InducedTriGraph::new(s).diameter()).collect();
        let disconnected = induced.iter().filter(|r| r.is_err()).count();
        let worst = induced.iter().filter_map(|r| r.as_ref().ok()).max().copied().unwrap_or(0);
        v.require(disconnected == 0, format!("n={n}: {disconnected} disconnected induced graphs"));
        v.require(worst <= 2 * n - 8, format!("n={n}: induced diameter {worst} exceeds {}", 2 * n - 8));
        v.note(format!(
            "n={n}: diam(D_n)={d} <= {}; {} bases, all induced graphs connected={}, max diameter {worst} <= {}",
            4 * n - 16,
            bases.len(),
            disconnected == 0,
            2 * n - 8
        ));
    }
    v
}

fn bijection_and_rotations(graphs: &BTreeMap<usize, FlipGraph>) -> Verdict {
    let mut v = Verdict::default();
    for n in 4..=8 {
        let pairs: Vec<DisjointPair> = match graphs.get(&n) {
            Some(g) => g.vertices().to_vec(),
            None => enumerate_disjoint_pairs(n).unwrap(),
        };
        let ok = pairs.par_iter().all(|p| {
            let l = pair_to_layout(p);
            layout_to_pair(&l).ok() == Some(*p) && pair_to_layout(&layout_to_pair(&l).unwrap()) == l
        });
        v.require(ok, format!("round trip fails on D_{n}"));
        v.note(format!("D_{n}: {} round trips ok={ok}", pairs.len()));
    }
    for k in 4..=7 {
        let iso = rotation_graph_isomorphic(k).unwrap();
        v.require(iso, format!("rotation graph of size {k} is not isomorphic to D_{}", k + 1));
        v.note(format!("rotation graph of size {k} isomorphic to D_{}: {iso}", k + 1));
    }
    let pentagon: Layout = "(o((oo)o))|((oo)(oo))".parse().unwrap();
    let expected = DisjointPair::new(tri(5, &[(2, 4), (2, 5)]), tri(5, &[(1, 3), (3, 5)])).unwrap();
    v.require(layout_to_pair(&pentagon).ok() == Some(expected), "pentagon figure pair");
    let before = DisjointPair::new(tri(6, &[(1, 4), (1, 5), (2, 4)]), tri(6, &[(1, 3), (3, 6), (4, 6)])).unwrap();
    let after = DisjointPair::new(tri(6, &[(1, 3), (1, 4), (1, 5)]), tri(6, &[(2, 6), (3, 6), (4, 6)])).unwrap();
    let layout = pair_to_layout(&before);
    let node = diagonal_node(&layout.left, Diagonal::new(6, 2, 4).unwrap()).unwrap();
    let r = rotate(&layout, Side::First, node).unwrap();
    let reproduced = r.double && layout_to_pair(&r.layout).ok() == Some(after);
    v.require(reproduced, "hexagon double flip example");
    v.note(format!("hexagon double flip {before} -> {after} as a double rotation at {layout}: {reproduced}"));
    v
}

fn sampler_exactness() -> Verdict {
    let mut v = Verdict::default();
    let start = Instant::now();
    let tables = CountTable::compute(5).unwrap();
    let sampler = Sampler::new(&tables, SamplerConfig::default()).unwrap();
    for n in [4usize, 5] {
        let t_n = tables.t(n).unwrap().clone();
        let half = BigRational::new(1.into(), (t_n.clone() * 2u8).into());
        let whole = BigRational::new(1.into(), t_n.clone().into());
        let histories = exact_outcomes(|s| {
            sampler.sample(n, s).map(|o| {
                let blocks: Vec<String> = o.trace.children.iter().map(|c| c.code.clone()).collect();
                (o.trace.code.clone(), o.trace.layout.clone(), blocks, o.trace.duplicate)
            })
        })
        .unwrap();
        v.require(histories.values().all(|p| *p == half), format!("n={n}: a history differs from 1/(2 t_n)"));
        let mut totals: BTreeMap<String, BigRational> = BTreeMap::new();
        for ((code, ..), p) in &histories {
            *totals.entry(code.clone()).or_default() += p;
        }
        let support: BTreeSet<String> =
            enumerate_tanglegrams(n, true).unwrap().iter().map(|t| t.code().to_string()).collect();
        let exact = totals.keys().cloned().collect::<BTreeSet<_>>() == support && totals.values().all(|p| *p == whole);
        v.require(exact, format!("n={n}: exact output distribution is not uniform over the support"));
        v.require(BigUint::from(support.len()) == t_n, format!("n={n}: support size"));
        v.note(format!(
            "n={n}: {} histories each 1/{}, {} tanglegrams each exactly 1/{t_n}",
            histories.len(),
            &t_n * 2u8,
            totals.len()
        ));

        let draws: Vec<String> = (0..100_000u64)
            .into_par_iter()
            .map(|i| sampler.sample(n, &mut sampler.stream(i)).unwrap().tanglegram.code().to_string())
            .collect();
        let mut counts = BTreeMap::new();
        for d in draws {
            *counts.entry(d).or_insert(0u64) += 1;
        }
        match chi_square_uniformity(&counts, &support, 0.01) {
            Ok(r) => {
                v.require(r.passed, format!("n={n}: chi-square {:.2} > {:.2}", r.statistic, r.critical_value));
                v.note(format!(
                    "n={n}: 10^5 draws, chi-square {:.2} on {} dof, critical {:.2}, p = {:.3}",
                    r.statistic, r.degrees_of_freedom, r.critical_value, r.p_value
                ));
            }
            Err(e) => v.unexpected.push(format!("n={n}: {e}")),
        }
    }
    v.within(start.elapsed(), 60.0, "expansion and sampling");
    v
}

fn flip_involution() -> Verdict {
    let mut v = Verdict::default();
    for n in 4..=7 {
        let (moves, failures) = flip_involution_failures(n).unwrap();
        v.require(failures == 0, format!("n={n}: {failures} of {moves} moves fail"));
        v.note(format!("n={n}: {moves} moves, {failures} failures"));
    }
    v
}

fn census_agreement() -> Verdict {
    let mut v = Verdict::default();
    let start = Instant::now();
    let table = CountTable::compute(6).unwrap();
    for &(n, row, total) in CORE_COUNTS.iter().filter(|r| r.0 <= 6) {
        let report = verify_against_bruteforce(&table, n).unwrap();
        let published: Vec<usize> = row.iter().map(|&x| x as usize).collect();
        let sum: usize = report.observed.iter().sum();
        v.require(report.observed == published, format!("n={n}: census {:?} vs {:?}", report.observed, published));
        v.require(sum as u64 == total, format!("n={n}: {sum} planar vs {total}"));
        v.note(format!("n={n}: enumerated by core size {:?}, total {sum}", report.observed));
    }
    let census = census_by_core_size(4).unwrap();
    let size4: Vec<(usize, usize)> = census.into_iter().collect();
    v.require(size4 == vec![(2, 3), (3, 3), (4, 5)], format!("size-4 breakdown {size4:?}"));
    let all4 = enumerate_tanglegrams(4, false).unwrap();
    let nonplanar_irreducible = all4.iter().filter(|t| !t.is_planar() && t.is_irreducible()).count();
    v.require(all4.len() == 13 && nonplanar_irreducible == 2, "size-4 tanglegram count");
    v.note(format!(
        "size 4: {} tanglegrams, {} non-planar irreducible, planar core sizes {size4:?}",
        all4.len(),
        nonplanar_irreducible
    ));
    v.require(table.t(6).unwrap() == &big(649), "t_6");
    v.within(start.elapsed(), 300.0, "census");
    v
}

fn main() {
    let mut graphs = BTreeMap::new();
    type Run<'a> = Box<dyn FnOnce(&mut BTreeMap<usize, FlipGraph>) -> Verdict + 'a>;
    let criteria: Vec<(&str, Run)> = vec![
        ("core count reproduction", Box::new(|_| core_count_reproduction())),
        ("flip-graph census", Box::new(flip_graph_census)),
        ("spectral and mixing reproduction", Box::new(|g| spectral_reproduction(g))),
        ("diameter bounds", Box::new(|g| diameter_bounds(g))),
        ("bijection and rotation correspondence", Box::new(|g| bijection_and_rotations(g))),
        ("sampler exactness", Box::new(|_| sampler_exactness())),
        ("flip involution and closure", Box::new(|_| flip_involution())),
        ("brute-force census agreement", Box::new(|_| census_agreement())),
    ];
    let mut unexpected = 0;
    let mut failed = 0;
    for (i, (title, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let verdict = run(&mut graphs);
        let status = if verdict.passed() {
            "PASS"
        } else if verdict.unexpected.is_empty() {
            "FAIL (documented discrepancy)"
        } else {
            "FAIL"
        };
        println!("criterion {} [PRIMARY] {title}: {status} ({:.1} s)", i + 1, start.elapsed().as_secs_f64());
        for d in verdict.unexpected.iter().chain(&verdict.documented) {
            println!("    mismatch: {d}");
        }
        for n in &verdict.notes {
            println!("    {n}");
        }
        failed += usize::from(!verdict.passed());
        unexpected += usize::from(!verdict.unexpected.is_empty());
    }
    println!("acceptance: {} of 8 criteria pass, {failed} fail, {unexpected} with undocumented failures", 8 - failed);
    if unexpected > 0 {
        std::process::exit(1);
    }
}
