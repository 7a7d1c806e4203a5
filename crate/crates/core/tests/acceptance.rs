//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero on any failure.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};
use unets::calculus::{apply_commutation, commutation_sites, equivalent, parse_proof, translate};
use unets::cutelim::{girard_normalize, normalize, normalize_with, NormalizeOptions, Strategy};
use unets::families::{cut_chain, girard_chain, par_blowup, quantifier_blowup};
use unets::nets::{
    build_graph, check_correct, check_girard, check_mll, frame, girard_of, sequentialize, sequentialize_cuts,
    unet_of_girard, Linking, Verdict,
};
use unets::sample::{random_net, random_proof, relink, SampleConfig};
use unets::syntax::{cleanse, Sym, Term};
use unets::unify::apply_mgu;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn net(src: &str) -> Linking {
    Linking::parse(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn is_correct(l: &Linking) -> bool {
    check_correct(l).map(|r| r.verdict.is_correct()).unwrap_or(false)
}

/// Best of `runs` timings of `f`, each repeated `reps` times.
fn time_min(runs: usize, reps: usize, mut f: impl FnMut()) -> f64 {
    (0..runs)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..reps {
                f();
            }
            t.elapsed().as_secs_f64() / reps as f64
        })
        .fold(f64::INFINITY, f64::min)
}

fn prenex_pair() -> Outcome {
    let good = net(PRENEX_GOOD);
    let bad = net(PRENEX_BAD);
    ensure!(is_correct(&good), "theta rejected");
    let g = build_graph(&good).map_err(|e| e.to_string())?;
    ensure!(g.mgu.dump() == "y <- x\n", "mgu is {:?}", g.mgu.dump());
    ensure!(g.leaps.len() == 1, "{} leaps", g.leaps.len());
    match check_correct(&bad).map_err(|e| e.to_string())?.verdict {
        Verdict::SwitchingFailure { witness: Some(w), .. } => {
            ensure!(!build_graph(&bad).unwrap().graph.is_tree(&w), "witness switching is a tree")
        }
        v => return Err(format!("theta' verdict {v}")),
    }
    Ok("theta correct with mgu y <- x and 1 leap; theta' has a cyclic switching".into())
}

fn identity_example() -> Outcome {
    let l = net(IDENTITY);
    let g = build_graph(&l).map_err(|e| e.to_string())?;
    let sw = g.graph.switchings(100).map_err(|e| e.to_string())?;
    ensure!(sw.len() == 4, "{} switchings", sw.len());
    ensure!(sw.iter().all(|s| g.graph.is_tree(s)), "a switching is not a tree");
    let fr = frame(&l).map_err(|e| e.to_string())?;
    let shape = "(#0 * ~P) | (~#0 | P)\nlinks: (0 2) (1 3)";
    ensure!(fr.to_string() == shape, "frame is {fr}");
    ensure!(check_mll(&fr), "frame fails the MLL check");
    let n = build_graph(&fr).map_err(|e| e.to_string())?.graph.switching_count();
    ensure!(n == 4, "frame has {n} switchings");
    Ok("4 tree switchings; frame (#0 * ~P) | (~#0 | P) with 4 switchings".into())
}

fn blowup_counts() -> Outcome {
    for n in 1..=8 {
        let g = girard_of(&quantifier_blowup(n), 1_000_000).map_err(|e| e.to_string())?;
        let c = g.axiom_count("c");
        ensure!(c == 2 * ((1 << n) - 1), "Gamma_{n}: {c} copies of c");
    }
    let g4 = girard_of(&quantifier_blowup(4), 1_000_000).unwrap().axiom_count("c");
    ensure!(g4 == 30, "Gamma_4: {g4}");
    let sizes: Vec<usize> = (0..=8).map(|i| par_blowup(i).size()).collect();
    for i in 0..=8 {
        let g = girard_of(&par_blowup(i), 1_000_000).map_err(|e| e.to_string())?;
        let c = g.leaf_atoms()[0].args[0].count_symbol("c");
        ensure!(c == 1 << i, "A_{i}: {c} copies of c");
        ensure!(sizes[i] == sizes[0] + i * (sizes[1] - sizes[0]), "A_{i} size {} not affine", sizes[i]);
    }
    Ok(format!("Gamma_4 = 30, Gamma_n = 2(2^n-1) for n<=8; A_i = 2^i with size {} + {}i", sizes[0], sizes[1] - sizes[0]))
}

fn quadratic_check() -> Outcome {
    let ns = [4usize, 8, 12, 16, 20, 24];
    let mut store = Vec::new();
    for &n in &ns {
        let r = check_correct(&quantifier_blowup(n)).map_err(|e| e.to_string())?;
        ensure!(r.verdict.is_correct(), "Gamma_{n} rejected: {}", r.verdict);
        store.push(r.store_nodes as f64);
    }
    let sq = |n: usize| (n * n) as f64;
    // C from the first half; every point must stay within twice C n^2.
    let c = ns[..3].iter().zip(&store).map(|(&n, &s)| s / sq(n)).fold(0.0, f64::max);
    for (&n, &s) in ns.iter().zip(&store) {
        ensure!(s <= 2.0 * c * sq(n), "n={n}: {s} store nodes > 2 * {c:.2} * n^2");
    }
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = store.iter().map(|s| s.ln()).collect();
    let (_, k, _) = affine_fit(&lx, &ly);
    ensure!(k < 2.5, "log-log slope {k:.2}");
    let g = build_graph(&quantifier_blowup(24)).map_err(|e| e.to_string())?;
    let x = Term::Var(Sym::new("x24"));
    match apply_mgu(&g.mgu, &x, 1_000_000) {
        Err(e) => ensure!(e.size > 1_000_000, "cap error below the cap"),
        Ok(t) => return Err(format!("expanded x24 fits under the cap ({} nodes)", t.size())),
    }
    Ok(format!("store nodes {store:?} <= {c:.2} n^2, log-log slope {k:.2}; apply_mgu(x24) exceeds 10^6"))
}

fn cut_elimination() -> Outcome {
    let mut xs = Vec::new();
    let mut ts = Vec::new();
    for n in 1..=16usize {
        let l = cut_chain(n);
        let (nf, steps) = normalize(&l);
        ensure!(steps == 2 * (n - 1), "cut-chain({n}): {steps} steps");
        ensure!(nf.host.cuts.is_empty(), "cut-chain({n}): cuts left");
        xs.push(l.size() as f64);
        ts.push(time_min(7, 20, || {
            std::hint::black_box(normalize(&l));
        }));
    }
    let (a, b, r2) = affine_fit(&xs, &ts);
    // Super-linear growth would make the top half cost more than twice the size ratio.
    let ratio = ts[15] / ts[7];
    let bound = 2.0 * xs[15] / xs[7];
    ensure!(ratio <= bound, "t(16)/t(8) = {ratio:.2} > {bound:.2}");
    let (_, stats) = girard_normalize(&girard_chain(4), 1_000_000).map_err(|e| e.to_string())?;
    ensure!(stats.peak_term_vars == 16, "Girard peak {} occurrences", stats.peak_term_vars);
    Ok(format!(
        "steps 2(n-1) for n<=16; time ~ {:.2e} + {:.2e}*size (r2 {r2:.3}, t16/t8 {ratio:.2}); Girard peak 16",
        a, b
    ))
}

fn preservation_confluence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut steps = 0;
    let n = 500;
    for k in 0..n {
        let l = random_net(&mut rng, &SampleConfig::with_cuts(1 + k % 3));
        ensure!(!l.host.cuts.is_empty(), "instance {k} has no cut");
        let a = normalize_with(&l, &NormalizeOptions { strategy: Strategy::Random(rng.gen()), verify: true, trace: false })
            .map_err(|e| format!("instance {k}: {e}\n{l}"))?;
        let b = normalize_with(&l, &NormalizeOptions { strategy: Strategy::Random(rng.gen()), verify: true, trace: false })
            .map_err(|e| format!("instance {k}: {e}\n{l}"))?;
        ensure!(a.net == b.net, "instance {k}: normal forms differ\n{l}");
        ensure!(normalize(&l).0 == a.net, "instance {k}: fast normalizer differs");
        steps += a.steps + b.steps;
    }
    Ok(format!("{n} nets, {steps} verified steps, zero disagreements"))
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 500;
    let mut girard = 0;
    for k in 0..n {
        let l = random_net(&mut rng, &SampleConfig::default());
        let p = sequentialize(&l).map_err(|e| format!("instance {k}: {e}\n{l}"))?;
        ensure!(translate(&p).map_err(|e| e.to_string())? == l, "instance {k}: sequentialize round trip\n{l}");
        if let Ok(g) = girard_of(&l, 10_000) {
            ensure!(check_girard(&g), "instance {k}: Girard net ill-formed");
            ensure!(unet_of_girard(&g) == l, "instance {k}: Girard round trip");
            girard += 1;
        }
    }
    for src in [XCUT_TRIVIAL, XCUT_SIGMA] {
        let l = net(src);
        let p = sequentialize_cuts(&l).map_err(|e| e.to_string())?;
        let clean = Linking::new_unchecked(cleanse(&l.host).0, l.links.clone());
        ensure!(translate(&p).map_err(|e| e.to_string())? == clean, "extended cut round trip failed:\n{p}");
    }
    Ok(format!("{n} sequentialize round trips, {girard} Girard round trips, both extended-cut examples"))
}

fn canonicity() -> Outcome {
    let p = |s: &str| parse_proof(s).unwrap_or_else(|e| panic!("{e}"));
    ensure!(equivalent(&p(CANON_LEFT), &p(CANON_RIGHT)).map_err(|e| e.to_string())?, "pair not equivalent");
    ensure!(!equivalent(&p(STRAIGHT), &p(CROSSED)).map_err(|e| e.to_string())?, "crossed pair equivalent");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut applied = 0;
    let mut proofs = 0;
    while applied < 1000 {
        let mut q = random_proof(&mut rng, &SampleConfig::with_cuts(proofs % 2));
        let l = translate(&q).map_err(|e| e.to_string())?;
        proofs += 1;
        for _ in 0..10 {
            let sites = commutation_sites(&q);
            if sites.is_empty() {
                break;
            }
            let (at, slot) = sites[rng.gen_range(0..sites.len())].clone();
            let Ok(r) = apply_commutation(&q, &at, slot) else { continue };
            ensure!(translate(&r).map_err(|e| e.to_string())? == l, "commutation changed the net:\n{q}\n=>\n{r}");
            applied += 1;
            q = r;
        }
    }
    Ok(format!("pair equivalent, crossed pair distinct, {applied} commutations over {proofs} proofs"))
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut checked, mut correct, mut skipped) = (0, 0, 0);
    while checked < 1000 {
        let cfg = SampleConfig { max_cuts: checked % 2, ..Default::default() };
        let l = random_net(&mut rng, &cfg);
        for cand in [l.clone(), relink(&mut rng, &l)] {
            let expect = oracle(&cand, 10_000, 10_000);
            if expect == OracleVerdict::TooBig {
                skipped += 1;
                continue;
            }
            let got = check_correct(&cand).map_err(|e| e.to_string())?.verdict;
            ensure!(got.is_correct() == (expect == OracleVerdict::Correct), "{cand}\noracle {expect:?}, check {got}");
            checked += 1;
            correct += usize::from(got.is_correct());
        }
    }
    Ok(format!("{checked} instances ({correct} correct, {} incorrect), {skipped} over the caps", checked - correct))
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 9] = [
        ("prenex pair", 0.1, prenex_pair),
        ("identity example", 0.1, identity_example),
        ("blow-up counts", 1.0, blowup_counts),
        ("quadratic correctness at scale", 5.0, quadratic_check),
        ("cut elimination", 5.0, cut_elimination),
        ("preservation and confluence", 60.0, preservation_confluence),
        ("round trips", 60.0, round_trips),
        ("canonicity", 60.0, canonicity),
        ("oracle equivalence", 120.0, oracle_agreement),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let out = match out {
            Ok(d) if took > Duration::from_secs_f64(budget) => Err(format!("over budget {budget}s; {d}")),
            o => o,
        };
        let (tag, detail) = match out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {} {name} ({:.3}s): {detail}", i + 1, took.as_secs_f64());
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
