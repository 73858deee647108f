//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits non-zero if any fails.

// `!(x <= tol)` on purpose: a NaN must count as a failure
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic;
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use quemit::algebra::{operator_matrix, LocalOperator, OperatorKind, PhaseRoot};
use quemit::graph::{build_graph_state_on, phase_polynomial_of, WeightedGraph};
use quemit::protocol::{all_outcome_tuples, builtin, pump, run, OutcomeMode, RunRecord, BUILTINS};
use quemit::reference;
use quemit::state::{RegisterState, Site};
use quemit::verify::{
    codeword_transform_check, equiv_global_phase, hadamard_outer, is_ame, kl_check, partial_trace,
    qecc312, qecc312_codewords, qecc312_shift, CodeSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn forced(name: &str, q: u32, n: Option<usize>, outcomes: Vec<u32>) -> RunRecord {
    run(&builtin(name, q, n).unwrap(), &OutcomeMode::Forced(outcomes)).unwrap()
}

fn zeros(name: &str, q: u32, n: Option<usize>) -> RunRecord {
    let m = builtin(name, q, n).unwrap().measurement_count();
    forced(name, q, n, vec![0; m])
}

fn operator_algebra() -> Outcome {
    let tol = 1e-12;
    let mut checks = 0;
    for q in 2..=6u32 {
        let op = |k| operator_matrix(k, q).unwrap();
        let omega = PhaseRoot::new(q).unwrap().omega();
        let (x, z) = (op(OperatorKind::Shift(1)), op(OperatorKind::Clock(1)));
        let (h, hd) = (op(OperatorKind::Fourier), op(OperatorKind::FourierDag));
        let id = LocalOperator::identity(q as usize);

        let d = z.matmul(&x).max_deviation(&x.matmul(&z).scale(omega));
        ensure!(d <= tol, "ZX vs ωXZ at q={q}: {d:e}");
        for alpha in 0..q {
            let lhs = h.matmul(&op(OperatorKind::Shift(alpha))).matmul(&hd);
            let d = lhs.max_deviation(&op(OperatorKind::Clock(alpha)));
            ensure!(d <= tol, "H X^{alpha} H† vs Z^{alpha} at q={q}: {d:e}");
        }
        let (mut xq, mut zq) = (id.clone(), id.clone());
        for _ in 0..q {
            xq = xq.matmul(&x);
            zq = zq.matmul(&z);
        }
        ensure!(xq.max_deviation(&id) <= tol, "X^q ≠ I at q={q}");
        ensure!(zq.max_deviation(&id) <= tol, "Z^q ≠ I at q={q}");
        for u in [&x, &z, &h, &hd] {
            ensure!(u.unitarity_defect() <= tol, "non-unitary generator at q={q}");
        }
        checks += 1;
    }
    Ok(format!("q = 2..6, {checks} dimensions"))
}

fn linear_chains() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for q in 2..=5u32 {
        for n in 2..=8usize {
            for (name, weight) in [("linear-cz", 1), ("linear-cz2", q - 1)] {
                let rec = zeros(name, q, Some(n));
                let path = WeightedGraph::path(q, n, weight).unwrap();
                let target = build_graph_state_on(&path, rec.state.sites().to_vec()).unwrap();
                let gap = 1.0 - rec.state.inner(&target).unwrap().norm();
                worst = worst.max(gap);
                ensure!(gap <= 1e-9, "{name} n={n} q={q}: 1-|<a|b>| = {gap:e}");
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} chains, worst 1-|overlap| = {worst:.1e}"))
}

fn ame43() -> Outcome {
    let a = zeros("ame43-a", 3, None).state;
    let b = zeros("ame43-b", 3, None).state;
    for (name, s) in [("ame43-a", &a), ("ame43-b", &b)] {
        let r = is_ame(s, 1e-9);
        ensure!(r.verdict, "{name} not AME: worst {:?}", r.worst);
        let pairs: Vec<_> = r.of_size(2).collect();
        ensure!(pairs.len() == 6, "expected 6 pair marginals");
        ensure!(
            pairs.iter().all(|p| (p.purity - 1.0 / 9.0).abs() <= 1e-9),
            "{name}: a pair purity differs from 1/9"
        );
    }
    let (pa, pb) = (phase_polynomial_of(&a).unwrap(), phase_polynomial_of(&b).unwrap());
    ensure!(!pa.same_form(&pb), "the two outputs have identical phase patterns");
    // exchanging the second and third photons maps one layout onto the other
    ensure!(pa.permuted(&[0, 2, 1, 3]).same_form(&pb), "p2<->p3 relabeling does not map a onto b");
    Ok("both AME, pair purity 1/9, related by p2<->p3".into())
}

fn ame5() -> Outcome {
    for q in 2..=5u32 {
        let cycle = WeightedGraph::cycle(q, 5).unwrap();
        for name in ["ame5-one-emitter", "ame5-two-emitter"] {
            let s = zeros(name, q, None).state;
            let r = is_ame(&s, 1e-9);
            ensure!(r.verdict, "{name} q={q} not AME: worst {:?}", r.worst);
            let target = build_graph_state_on(&cycle, s.sites().to_vec()).unwrap();
            ensure!(
                equiv_global_phase(&s, &target, 1e-9).unwrap(),
                "{name} q={q} differs from the 5-cycle in order {:?}",
                s.labels()
            );
        }
    }
    Ok("q = 2..5, both protocols equal the 5-cycle".into())
}

fn ame6() -> Outcome {
    for q in 2..=4u32 {
        for name in ["ame6-a", "ame6-b"] {
            let r = is_ame(&zeros(name, q, None).state, 1e-9);
            ensure!(r.verdict, "{name} q={q} not AME: worst {:?}", r.worst);
            let target = f64::from(q).powi(-3);
            ensure!(
                r.of_size(3).count() == 20 && r.of_size(3).all(|s| (s.purity - target).abs() <= 1e-9),
                "{name} q={q}: a 3-site purity differs from q^-3"
            );
        }
    }
    Ok("q = 2..4, all 20 three-site purities = q^-3".into())
}

fn ame7() -> Outcome {
    let r = is_ame(&zeros("ame7-3", 3, None).state, 1e-9);
    let triples: Vec<_> = r.of_size(3).collect();
    ensure!(triples.len() == 35, "expected 35 triples, got {}", triples.len());
    let worst = triples
        .iter()
        .map(|t| (t.purity - 1.0 / 27.0).abs())
        .fold(0.0, f64::max);
    ensure!(worst <= 1e-9, "a triple purity is off 1/27 by {worst:e}");
    ensure!(r.verdict, "not AME: worst {:?}", r.worst);
    Ok(format!("35 triples at 1/27, worst deviation {worst:.1e}"))
}

fn measurement_independence() -> Outcome {
    let mut branches = 0;
    for info in &BUILTINS {
        for q in 2..=5u32 {
            if !info.dims.allows(q) || (info.name == "ame6-b" && q > 4) {
                continue;
            }
            let n = info.photons.is_none().then_some(4);
            let p = builtin(info.name, q, n).unwrap();
            let m = p.measurement_count();
            let expected = f64::from(q).powi(-(m as i32));
            let mut reference: Option<RegisterState> = None;
            for outcomes in all_outcome_tuples(q, m) {
                let rec = run(&p, &OutcomeMode::Forced(outcomes.clone())).unwrap();
                ensure!(
                    (rec.branch_probability - expected).abs() <= 1e-9,
                    "{} q={q} {outcomes:?}: branch probability {}",
                    info.name,
                    rec.branch_probability
                );
                for meas in &rec.measurements {
                    ensure!(
                        (meas.probability - 1.0 / f64::from(q)).abs() <= 1e-9,
                        "{} q={q}: outcome probability {}",
                        info.name,
                        meas.probability
                    );
                }
                match &reference {
                    None => reference = Some(rec.state),
                    Some(r) => ensure!(
                        equiv_global_phase(r, &rec.state, 1e-9).unwrap(),
                        "{} q={q}: branch {outcomes:?} differs from branch 0",
                        info.name
                    ),
                }
                branches += 1;
            }
        }
    }
    Ok(format!("{branches} branches across all builtins"))
}

fn qecc() -> Outcome {
    let code = qecc312();
    let defect = code.orthonormality_defect();
    ensure!(defect <= 1e-9, "codewords not orthonormal: {defect:e}");
    for (m, w) in code.codewords.iter().enumerate() {
        for site in 0..3 {
            let p = partial_trace(w, &[site]).unwrap().purity();
            ensure!((p - 1.0 / 3.0).abs() <= 1e-9, "codeword {m} site {site} purity {p}");
        }
    }
    let kl = kl_check(&code).unwrap();
    ensure!(kl.verdict, "KL fails: worst {:?}", kl.worst);
    let weight_one: Vec<_> = kl.records.iter().filter(|r| r.weight == 1).collect();
    ensure!(weight_one.len() == 24, "expected 24 weight-1 operators");
    for r in &weight_one {
        ensure!(r.f.norm() <= 1e-9, "f({}) = {} ≠ 0", r.operator, r.f);
    }
    let m = qecc312_shift();
    let mut psi = code.codewords[0].clone();
    for (k, name) in ["qecc312-psi0", "qecc312-psi1", "qecc312-psi2"].iter().enumerate() {
        let target = hadamard_outer(&psi).unwrap();
        for o in 0..3 {
            let out = forced(name, 3, None, vec![o]).state;
            ensure!(
                equiv_global_phase(&out, &target, 1e-9).unwrap(),
                "{name} outcome {o} differs from H⊗1⊗H·M^{k}·ψ0"
            );
        }
        psi = m.apply(&psi).unwrap();
    }
    let t = codeword_transform_check(&code).unwrap();
    ensure!(t.verdict, "transform check: {t:?}");
    Ok("orthonormal, AME(3,3), KL (weight <= 1) with f = 0, protocols = H⊗1⊗H·M^m·ψ0".into())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let q = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=4);
        let s = random_state(q, n, &mut rng);
        let size = rng.gen_range(1..=n);
        let mut keep: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            keep.swap(i, rng.gen_range(0..=i));
        }
        keep.truncate(size);
        let rho = partial_trace(&s, &keep).unwrap();
        let oracle = brute_partial_trace(&s, &keep);
        for (r, row) in oracle.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                worst = worst.max((rho.get(r, c) - v).norm());
            }
        }
    }
    ensure!(worst <= 1e-10, "partial trace deviates by {worst:e}");
    let mut pump_worst = 0.0f64;
    for _ in 0..100 {
        let q = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=4);
        let source = rng.gen_range(0..n);
        let mut sites: Vec<Site> = (0..n).map(|k| Site::photon(format!("p{k}"))).collect();
        sites[source] = Site::emitter("e");
        let amps = random_state(q, n, &mut rng).amplitudes().to_vec();
        let s = RegisterState::from_amplitudes(q, sites, amps).unwrap();
        let mut t = s.clone();
        pump(&mut t, "e", "fresh").unwrap();
        let expected = matvec(&pump_isometry(q, n, source), s.amplitudes());
        pump_worst = pump_worst.max(max_diff(t.amplitudes(), &expected));
    }
    ensure!(pump_worst <= 1e-10, "pump deviates by {pump_worst:e}");
    Ok(format!(
        "200 partial traces (worst {worst:.1e}), 100 pumps (worst {pump_worst:.1e})"
    ))
}

fn negative_controls() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (q, n) in [(2, 2), (3, 4), (4, 5)] {
        let zero = RegisterState::zero(q, quemit::state::photon_sites(n)).unwrap();
        ensure!(!is_ame(&zero, 1e-9).verdict, "|0…0⟩ accepted at q={q} n={n}");
    }
    for _ in 0..20 {
        let q = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=5);
        let factors: Vec<Vec<Complex64>> = (0..n)
            .map(|_| (0..q).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let s = reference::product(q, &factors).unwrap();
        ensure!(!is_ame(&s, 1e-9).verdict, "product state accepted at q={q} n={n}");
    }
    let ghz = reference::ghz(2, 4).unwrap();
    let r = is_ame(&ghz, 1e-9);
    ensure!(!r.verdict, "4-qubit GHZ accepted");
    ensure!(
        r.of_size(2).all(|s| (s.purity - 0.5).abs() <= 1e-9),
        "GHZ two-site purity is not 1/2"
    );
    let mut words = qecc312_codewords();
    words[2] = words[0].clone();
    let corrupted = CodeSpec::new(3, 1, 2, 3, words).unwrap();
    ensure!(!kl_check(&corrupted).unwrap().verdict, "corrupted code accepted");
    Ok("|0…0⟩, 20 product states, GHZ4 (pair purity 1/2) and corrupted code rejected".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("operator algebra", operator_algebra),
        ("linear chains", linear_chains),
        ("AME(4,3)", ame43),
        ("AME(5,q)", ame5),
        ("AME(6,q)", ame6),
        ("AME(7,3)", ame7),
        ("measurement independence", measurement_independence),
        ("[[3,1,2]]_3 code", qecc),
        ("oracle equivalence", oracle_equivalence),
        ("negative controls", negative_controls),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {secs:.2}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}; {secs:.2}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
