//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Each criterion is checked against an oracle written here,
//! independently of the code path it exercises.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use alexsheaf::random::{
    random_monotone_map, random_morphism, random_poset, random_preorder, random_sheaf,
};
use alexsheaf::sheaf::VerifyOptions;
use alexsheaf::{CellularSheaf, Field, MonotoneMap, OpenSet, Poset, PreOrder};
use alexsheaf_cli::document;
use alexsheaf_cli::model::Model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BOUND: usize = 20;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn cli(args: &[&str]) -> (i32, String) {
    let outcome = alexsheaf_cli::run(std::iter::once("alexsheaf").chain(args.iter().copied()));
    (outcome.code, outcome.stdout + &outcome.stderr)
}

fn cli_json(args: &[&str]) -> (i32, Value) {
    let mut all: Vec<&str> = args.to_vec();
    all.push("--json");
    let (code, out) = cli(&all);
    let json = serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad JSON ({e}): {out}"));
    (code, json)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. Worked examples against tuple enumeration over F_5

const P: u64 = 5;

/// Entries of a matrix over F_5 as residues.
fn residues(m: &alexsheaf::Matrix) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|s| s.to_string().parse::<u64>().expect("residue"))
                .collect()
        })
        .collect()
}

fn apply_mod(m: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % P)
        .collect()
}

/// Counts tuples `(s_g)` over the minimal elements `g` of `U` such that, for
/// every `t ∈ U`, all `ρ_{g t}(s_g)` with `g <= t` coincide, and returns the
/// exponent `k` with count `= 5^k`.
fn enumerated_dim(sheaf: &CellularSheaf, open: &OpenSet) -> usize {
    let base = sheaf.base();
    let gens: Vec<usize> = open
        .members()
        .iter()
        .copied()
        .filter(|&x| !open.members().iter().any(|&y| base.lt(y, x)))
        .collect();
    let dims: Vec<usize> = gens.iter().map(|&g| sheaf.stalk_dim(g)).collect();
    let total: usize = dims.iter().sum();
    let maps: Vec<Vec<(usize, Vec<Vec<u64>>)>> = open
        .members()
        .iter()
        .map(|&t| {
            gens.iter()
                .enumerate()
                .filter(|&(_, &g)| base.leq(g, t))
                .map(|(i, &g)| (i, residues(sheaf.restriction(g, t).expect("related"))))
                .collect()
        })
        .collect();
    let mut count: u64 = 0;
    let mut digits = vec![0u64; total];
    loop {
        let mut parts = Vec::with_capacity(gens.len());
        let mut at = 0;
        for &d in &dims {
            parts.push(&digits[at..at + d]);
            at += d;
        }
        let ok = maps.iter().all(|per_target| {
            let images: Vec<Vec<u64>> = per_target
                .iter()
                .map(|(i, m)| apply_mod(m, parts[*i]))
                .collect();
            images.windows(2).all(|w| w[0] == w[1])
        });
        if ok {
            count += 1;
        }
        // next tuple
        let mut i = 0;
        loop {
            if i == total {
                let mut k = 0;
                while count > 1 {
                    assert_eq!(count % P, 0, "solution count is a power of 5");
                    count /= P;
                    k += 1;
                }
                return k;
            }
            digits[i] += 1;
            if digits[i] < P {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn worked_examples() -> Verdict {
    let cases: &[(&str, &str)] = &[
        ("example1_square.sheaf", "open:U"),
        ("example1_square.sheaf", "star:q1,star:q2"),
        ("example1_square.sheaf", "star:p"),
        ("example2_span.sheaf", "open:U"),
        ("example3_two_targets.sheaf", "open:U"),
        ("example4_fan.sheaf", "open:U"),
        ("example4_fan.sheaf", "star:q"),
    ];
    let f5 = Field::prime(5).unwrap();
    let mut summary = Vec::new();
    for &(file, spec) in cases {
        let path = fixture(file);
        let text = std::fs::read_to_string(&path).unwrap();
        let model = Model::new(document::parse(&text).unwrap(), Some(f5)).unwrap();
        let poset = model.poset().unwrap();
        let sheaf = model
            .sheaf(&poset, model.sheaf_block(None).unwrap())
            .unwrap();
        let open = model
            .open_spec(&document::Spanned::new(spec.to_string(), 0, 0))
            .unwrap();
        let oracle = enumerated_dim(&sheaf, &open);

        let p = path.to_str().unwrap();
        let (code5, json5) = cli_json(&["sections", p, "--open", spec, "--field", "fp:5"]);
        let (code_q, json_q) = cli_json(&["sections", p, "--open", spec]);
        ensure(code5 == 0 && code_q == 0, || {
            format!("{file} {spec}: exit codes {code5}/{code_q}")
        })?;
        let (dim5, dim_q) = (
            json5["data"]["dim"].as_u64().unwrap(),
            json_q["data"]["dim"].as_u64().unwrap(),
        );
        ensure(dim5 == oracle as u64, || {
            format!("{file} {spec}: F_5 dim {dim5}, enumeration {oracle}")
        })?;
        ensure(dim_q == dim5, || {
            format!("{file} {spec}: Q dim {dim_q} vs F_5 dim {dim5}")
        })?;
        summary.push(format!(
            "{}[{spec}]={oracle}",
            file.trim_end_matches(".sheaf")
        ));
    }
    // closed forms: equalizer of two, multi-equalizers, full product
    let expect = ["3", "3", "1", "4", "2", "4", "2"];
    for (s, e) in summary.iter().zip(expect) {
        ensure(s.ends_with(&format!("={e}")), || {
            format!("{s}, closed form gives {e}")
        })?;
    }
    Ok(summary.join(" "))
}

// ---------------------------------------------------------------------------
// 2 and 3. Stalks and axiom suites on a random corpus

fn corpus() -> Vec<CellularSheaf> {
    (0..200u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(1..=6);
            let base = random_poset(&mut rng, n, 0.45);
            random_sheaf(&mut rng, &base, Field::Rationals, 3)
        })
        .collect()
}

fn stalk_theorem(corpus: &[CellularSheaf]) -> Verdict {
    let mut points = 0;
    for (i, s) in corpus.iter().enumerate() {
        for p in 0..s.base().len() {
            let report = s.stalk_at(p, BOUND).map_err(|e| e.to_string())?;
            ensure(report.holds(), || {
                format!(
                    "sheaf {i} at {}: dim {} vs limit {}",
                    s.base().name(p),
                    report.theorem_dim,
                    report.oracle_dim
                )
            })?;
            let (dense, witness) =
                alexsheaf::sheaf::dense_stalk_oracle(s, p, BOUND).map_err(|e| e.to_string())?;
            ensure(dense == s.stalk_dim(p) && witness.is_invertible(), || {
                format!("sheaf {i} at {}: dense limit dim {dense}", s.base().name(p))
            })?;
            points += 1;
        }
    }
    Ok(format!(
        "{} sheaves, {points} points, all limits isomorphic to the value",
        corpus.len()
    ))
}

fn axiom_suites(corpus: &[CellularSheaf]) -> Verdict {
    let (mut basic, mut extended) = (0, 0);
    for (i, s) in corpus.iter().enumerate() {
        let opts = VerifyOptions {
            seed: i as u64,
            ..VerifyOptions::default()
        };
        ensure(opts.random_covers == 50, || {
            "expected 50 random covers per open".into()
        })?;
        let b = s
            .verify_base_sheaf_axioms(&opts)
            .map_err(|e| e.to_string())?;
        let e = s
            .verify_sheaf_axioms_extended(&opts)
            .map_err(|e| e.to_string())?;
        ensure(b.all_passed(), || {
            format!("sheaf {i}: basic cover failure {:?}", b.failures().next())
        })?;
        ensure(e.all_passed(), || {
            format!("sheaf {i}: cover failure {:?}", e.failures().next())
        })?;
        basic += b.checks.len();
        extended += e.checks.len();
    }
    Ok(format!(
        "{basic} basic-cover and {extended} open-cover sequences exact, 0 failures"
    ))
}

// ---------------------------------------------------------------------------
// 4. Quotient universal property

/// Every function from classes to the target, kept if it reproduces `f`.
fn factorizations(classes: &[Vec<usize>], target_len: usize, f: &MonotoneMap) -> Vec<Vec<usize>> {
    let k = classes.len();
    let mut out = Vec::new();
    let mut g = vec![0usize; k];
    loop {
        if classes
            .iter()
            .zip(&g)
            .all(|(c, &v)| c.iter().all(|&x| f.apply(x) == v))
        {
            out.push(g.clone());
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            g[i] += 1;
            if g[i] < target_len {
                break;
            }
            g[i] = 0;
            i += 1;
        }
    }
}

fn quotient_property() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut total, mut exhaustive, mut collapsed) = (0, 0, 0);
    while total < 150 {
        let n = rng.random_range(1..=6);
        let pre = random_preorder(&mut rng, n, 0.3);
        let m = rng.random_range(1..=5);
        let target = random_poset(&mut rng, m, 0.4);
        let f = random_monotone_map(&mut rng, &pre, target.as_preorder());
        let q = pre.quotient();
        let bar = q.factor(&f).map_err(|e| e.to_string())?;
        ensure(bar.is_monotone(), || "factor is not monotone".into())?;
        for x in 0..n {
            ensure(bar.apply(q.projection.apply(x)) == f.apply(x), || {
                format!("f̄∘π ≠ f at {x}")
            })?;
        }
        if q.classes.len() < n {
            collapsed += 1;
        }
        if q.classes.len() <= 5 {
            let all = factorizations(&q.classes, target.len(), &f);
            ensure(all == vec![bar.assignment().to_vec()], || {
                format!(
                    "{} factorizations, expected exactly the computed one",
                    all.len()
                )
            })?;
            exhaustive += 1;
        }
        total += 1;
    }
    ensure(exhaustive >= 100, || {
        format!("only {exhaustive} quotients small enough to enumerate")
    })?;
    Ok(format!(
        "{total} preorders ({collapsed} with collapsed classes), uniqueness enumerated on {exhaustive}"
    ))
}

// ---------------------------------------------------------------------------
// 5. Isomorphism and injectivity are detected on stalks

fn stalk_detection() -> Verdict {
    let (mut isos, mut injective, mut total) = (0, 0, 0);
    for seed in 0..150u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.random_range(1..=5);
        let base = random_poset(&mut rng, n, 0.45);
        let src = random_sheaf(&mut rng, &base, Field::Rationals, 3);
        let tgt = if seed % 2 == 0 {
            src.clone()
        } else {
            random_sheaf(&mut rng, &base, Field::Rationals, 3)
        };
        let m = random_morphism(&mut rng, &src, &tgt);
        let c = m.classify();
        let mut all_invertible = true;
        let mut all_injective = true;
        for u in base.enumerate_opens(BOUND).map_err(|e| e.to_string())? {
            let map = m.section_map(&u).map_err(|e| e.to_string())?;
            all_invertible &= map.is_invertible();
            all_injective &= map.is_injective();
        }
        ensure(c.isomorphism == all_invertible, || {
            format!(
                "morphism {seed}: stalks say iso={}, sections {all_invertible}",
                c.isomorphism
            )
        })?;
        ensure(c.injective == all_injective, || {
            format!(
                "morphism {seed}: stalks say injective={}, sections {all_injective}",
                c.injective
            )
        })?;
        isos += usize::from(c.isomorphism);
        injective += usize::from(c.injective);
        total += 1;
    }
    ensure(isos > 0 && isos < total && injective > isos, || {
        format!("degenerate corpus: {isos} isomorphisms, {injective} injective")
    })?;
    Ok(format!(
        "{total} morphisms ({isos} isomorphisms, {injective} injective), 100% agreement"
    ))
}

// ---------------------------------------------------------------------------
// 6. Failures carry the right exit code and a witness

fn negative_cases() -> Verdict {
    let path = |f: &str| fixture(f).to_str().unwrap().to_string();

    let (code, json) = cli_json(&["check", &path("path_dependent.sheaf")]);
    let w = &json["data"]["witnesses"][0]["witness"];
    ensure(
        code == 1 && w["kind"] == "path_dependent" && w["from"] == "p" && w["to"] == "r",
        || format!("path-dependent sheaf: exit {code}, witness {w}"),
    )?;
    let products: BTreeSet<&str> = w["paths"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["product"].as_str().unwrap())
        .collect();
    ensure(products == BTreeSet::from(["[2]", "[3]"]), || {
        format!("products {products:?}")
    })?;

    let (code, json) = cli_json(&[
        "morphism",
        &path("unnatural_morphism.sheaf"),
        "--name",
        "swap",
    ]);
    let w = &json["data"]["witnesses"][0]["witness"];
    ensure(
        code == 1 && w["kind"] == "not_natural" && w["from"] == "a" && w["to"] == "b",
        || format!("unnatural morphism: exit {code}, witness {w}"),
    )?;

    let (code, json) = cli_json(&["sections", &path("example1_square.sheaf"), "--open", "p"]);
    let w = &json["data"]["witnesses"][0]["witness"];
    ensure(
        code == 1
            && w["kind"] == "not_open"
            && w["member"] == "p"
            && w["missing_successor"] == "q1",
        || format!("non-open request: exit {code}, witness {w}"),
    )?;

    let (code, json) = cli_json(&[
        "glue",
        &path("glue_conflict.sheaf"),
        "--sections",
        "left,right",
    ]);
    let w = &json["data"]["witnesses"][0]["witness"];
    ensure(
        code == 1
            && w["kind"] == "glue_conflict"
            && w["element"] == "r"
            && w["values"] == serde_json::json!(["[1]", "[2]"]),
        || format!("conflicting glue: exit {code}, witness {w}"),
    )?;

    let (code, out) = cli(&["check", &path("malformed_shape.sheaf")]);
    ensure(code == 2 && out.contains("line 9, column 11"), || {
        format!("malformed shape: exit {code}, {out}")
    })?;
    Ok("path-dependent, unnatural, non-open and conflicting glue exit 1 with witnesses; malformed input exits 2".into())
}

// ---------------------------------------------------------------------------
// 7. Topology laws on every poset with at most five elements

/// All posets on `n` points up to isomorphism: closures of subsets of
/// `{(i, j) : i < j}` (every poset has such a labelling), deduplicated by
/// the lexicographically least relation matrix over all relabellings.
fn posets_up_to_iso(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                r[i][j] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        let canonical = perms
            .iter()
            .map(|p| {
                (0..n)
                    .map(|i| (0..n).map(|j| r[p[i]][p[j]]).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .min()
            .unwrap_or_default();
        if seen.insert(canonical) {
            out.push(r);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn topology_laws() -> Verdict {
    let known = [1, 1, 2, 5, 16, 63];
    let mut counts = Vec::new();
    let mut opens_checked = 0;
    for n in 0..=5 {
        let posets = posets_up_to_iso(n);
        ensure(posets.len() == known[n], || {
            format!(
                "{} posets on {n} points, expected {}",
                posets.len(),
                known[n]
            )
        })?;
        counts.push(posets.len());
        for r in posets {
            let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| r[i][j])
                .collect();
            let p = Poset::try_from(PreOrder::from_indices(names, &pairs).unwrap()).unwrap();
            let opens = p.enumerate_opens(BOUND).map_err(|e| e.to_string())?;
            let up_sets = (0u32..(1 << n))
                .filter(|m| {
                    (0..n).all(|x| m >> x & 1 == 0 || (0..n).all(|y| !r[x][y] || m >> y & 1 == 1))
                })
                .count();
            ensure(opens.len() == up_sets, || {
                format!("{} opens, {up_sets} up-sets", opens.len())
            })?;
            for u in &opens {
                for v in &opens {
                    ensure(p.is_open(u.intersection(v).members()), || {
                        "intersection not open".into()
                    })?;
                }
                let stars: Vec<OpenSet> = u.members().iter().map(|&x| p.open_star(x)).collect();
                ensure(OpenSet::union_all(&stars) == *u, || {
                    "open is not the union of its stars".into()
                })?;
                opens_checked += 1;
            }
            for x in 0..n {
                // the intersection of all opens containing x is the star
                let mut meet: Vec<usize> = (0..n).collect();
                for u in opens.iter().filter(|u| u.contains(x)) {
                    meet.retain(|&y| u.contains(y));
                }
                ensure(p.is_open(&meet) && meet == p.open_star(x).members(), || {
                    "meet of neighbourhoods is not the star".into()
                })?;
                for y in 0..n {
                    let inclusion = p.open_star(x).is_subset(&p.open_star(y));
                    ensure(inclusion == r[y][x], || {
                        format!("U_x ⊆ U_y disagrees with y <= x for {x}, {y}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "posets up to iso on 0..=5 points: {counts:?}, {opens_checked} opens, 0 failures"
    ))
}

fn main() {
    let started = Instant::now();
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        (
            "worked examples vs F_5 enumeration",
            Box::new(worked_examples),
        ),
        (
            "stalk equals value at the point",
            Box::new(|| stalk_theorem(&corpus)),
        ),
        (
            "base and extended sheaf axioms",
            Box::new(|| axiom_suites(&corpus)),
        ),
        ("quotient universal property", Box::new(quotient_property)),
        (
            "isomorphism/injectivity detected on stalks",
            Box::new(stalk_detection),
        ),
        ("failures exit 1 with witnesses", Box::new(negative_cases)),
        ("Alexandrov topology laws", Box::new(topology_laws)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {}: {name} — {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} — {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2}s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
