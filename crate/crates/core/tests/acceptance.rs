//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use mmv::codes::{selfcheck_cauchy, selfcheck_mds};
use mmv::harness::bench::estimate_failure_rate;
use mmv::harness::gen::{gen_planted, PlantedConfig};
use mmv::matrix::{matmul, nnz};
use mmv::reduce::{
    allzeroes_to_inverse, kmmv_to_kaz, mcapo_decide, mcapo_to_mmv, mmv_to_allzeroes, mmv_to_inverse, mmv_to_symmetric,
    KInstance,
};
use mmv::verify::{
    revalidate, verify_det_sparse, verify_exact, verify_korec_wiedermann, verify_rand_sparse, Algorithm, BitSource,
    Instance, Params, KW_DEFAULT_CAP,
};
use mmv::{Matrix, RingSpec};

struct Outcome {
    ok: bool,
    detail: String,
}

fn ring(s: &str) -> RingSpec {
    s.parse().unwrap()
}

fn planted(r: &RingSpec, n: usize, s: u64, seed: u64) -> Instance {
    gen_planted(&PlantedConfig { n, ring: r.clone(), s, seed }).unwrap()
}

fn criterion_1() -> Outcome {
    let rings = [ring("int:1024"), ring("zmod:101")];
    let sizes = [8usize, 16, 32, 64];
    let (mut errors, mut yes, mut no) = (0u64, 0u64, 0u64);
    for j in 0..10_000u64 {
        let n = sizes[(j % 4) as usize];
        let r = &rings[((j / 4) % 2) as usize];
        let s = (j / 8) % (n as u64 + 1);
        let t = s + (j / 8) % (n as u64 - s + 1);
        let inst = planted(r, n, s, j);
        let truth = verify_exact(&inst).unwrap().is_equal();
        let v = verify_det_sparse(&inst, t).unwrap();
        if truth {
            yes += 1;
        } else {
            no += 1;
        }
        let witness_ok = v.witness.as_ref().is_none_or(|w| revalidate(&inst, w).unwrap());
        if v.is_equal() != truth || !witness_ok {
            errors += 1;
        }
    }
    Outcome { ok: errors == 0, detail: format!("{errors} errors on {yes} YES + {no} NO instances") }
}

fn criterion_2() -> Outcome {
    let trials = 10_000u64;
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [16usize, 64, 256] {
        for eps in [0.5, 0.25, 0.125] {
            let cfg = PlantedConfig { n, ring: ring("int:1024"), s: n as u64, seed: 0xC2 ^ n as u64 };
            let params = Params { t: Some(n as u64), eps, ..Params::default() };
            let row = estimate_failure_rate(Algorithm::RandSparse, &cfg, &params, trials, 16).unwrap();
            let rate = row.false_accepts as f64 / trials as f64;
            let limit = eps + 3.0 * (eps * (1.0 - eps) / trials as f64).sqrt();
            let want_bits = (0.5 * (n as f64).log2() + (1.0 / eps).log2()).ceil();
            let good = rate <= limit && row.random_bits_mean == want_bits && row.false_rejects == 0;
            ok &= good;
            parts.push(format!(
                "n={n} eps={eps}: rate {rate:.4} <= {limit:.4}, bits {} = {want_bits}",
                row.random_bits_mean
            ));
        }
    }
    // one direct call per size to confirm the bit count is per run, not an average
    for n in [16usize, 64, 256] {
        let inst = planted(&ring("int:1024"), n, 0, 7);
        let v = verify_rand_sparse(&inst, n as u64, 0.125, &mut BitSource::new(1)).unwrap();
        ok &= v.stats.random_bits as f64 == (0.5 * (n as f64).log2() + 3.0).ceil();
    }
    Outcome { ok, detail: parts.join("; ") }
}

fn criterion_3() -> Outcome {
    let params = Params { rounds: 1, ..Params::default() };
    let yes_cfg = PlantedConfig { n: 32, ring: ring("int:1024"), s: 0, seed: 31 };
    let yes = estimate_failure_rate(Algorithm::Freivalds, &yes_cfg, &params, 1_000, 1_000).unwrap();
    let no_cfg = PlantedConfig { n: 32, ring: ring("int:1024"), s: 1, seed: 32 };
    let no = estimate_failure_rate(Algorithm::Freivalds, &no_cfg, &params, 10_000, 64).unwrap();
    let detection = 1.0 - no.false_accepts as f64 / 10_000.0;
    let ok = yes.false_rejects == 0 && (0.45..=1.0).contains(&detection);
    Outcome {
        ok,
        detail: format!("{} false rejections on 1000 YES; detection {detection:.4} in [0.45, 1.0]", yes.false_rejects),
    }
}

fn criterion_4() -> Outcome {
    let r = ring("int:100");
    let mut errors = 0;
    let mut no = 0;
    for j in 0..500u64 {
        let n = 1 + (j * 37 % 64) as usize;
        let s = if j % 2 == 0 { 0 } else { 1 + j % 4 };
        let inst = planted(&r, n, s.min((n * n) as u64), j);
        let truth = verify_exact(&inst).unwrap().is_equal();
        no += !truth as u32;
        let v = verify_korec_wiedermann(&inst, KW_DEFAULT_CAP).unwrap();
        let witness_ok = v.witness.as_ref().is_none_or(|w| revalidate(&inst, w).unwrap());
        if v.is_equal() != truth || !witness_ok {
            errors += 1;
        }
    }
    Outcome { ok: errors == 0, detail: format!("{errors} errors on 500 instances ({no} NO)") }
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [13, 17] {
        for report in [selfcheck_mds(p, 12, 6).unwrap(), selfcheck_cauchy(p, 6).unwrap()] {
            ok &= report.passed() && report.cases > 0;
            parts.push(format!("{}: {} cases, {} failures", report.name, report.cases, report.failures.len()));
        }
    }
    Outcome { ok, detail: parts.join("; ") }
}

fn criterion_6() -> Outcome {
    let rings = [ring("int:1000"), ring("zmod:7"), ring("zmod:101"), ring("gf:2:4")];
    let mut failures = Vec::new();
    for j in 0..1_000u64 {
        let r = &rings[(j % 4) as usize];
        let n = 1 + (j % 5) as usize;
        let s = if j % 2 == 0 { 0 } else { 1 + j % n as u64 };
        let inst = planted(r, n, s, j);
        let truth = verify_exact(&inst).unwrap().is_equal();
        let diff = nnz(&matmul(&inst.a, &inst.b).unwrap().sub(&inst.c).unwrap()).nnz;

        let az = mmv_to_allzeroes(&inst).unwrap().output;
        if verify_exact(&az).unwrap().is_equal() != truth {
            failures.push(format!("allzeroes answer, seed {j}"));
        }
        if nnz(&matmul(&az.a, &az.b).unwrap()).nnz != diff {
            failures.push(format!("allzeroes sparsity, seed {j}"));
        }

        let iv = allzeroes_to_inverse(&az).unwrap().output;
        let is_identity = matmul(&iv.a, &iv.b).unwrap() == Matrix::identity(&iv.ring, iv.n());
        if is_identity != matmul(&az.a, &az.b).unwrap().is_zero() || verify_exact(&iv).unwrap().is_equal() != truth {
            failures.push(format!("inverse, seed {j}"));
        }
        if verify_exact(&mmv_to_inverse(&inst).unwrap().output).unwrap().is_equal() != truth {
            failures.push(format!("mmv to inverse, seed {j}"));
        }

        let sym = mmv_to_symmetric(&inst).unwrap().output;
        if !sym.a.is_symmetric() || !sym.b.is_symmetric() || verify_exact(&sym).unwrap().is_equal() != truth {
            failures.push(format!("symmetric, seed {j}"));
        }

        let gram = mcapo_to_mmv(&inst.a).unwrap().output;
        if verify_exact(&gram).unwrap().is_equal() != mcapo_decide(&inst.a) {
            failures.push(format!("mcapo, seed {j}"));
        }

        let k = 2 + (j % 3) as usize;
        let mut mats = vec![inst.a.clone(); k - 1];
        mats.push(inst.b.clone());
        let ki = KInstance::new(mats, Some(inst.c.clone())).unwrap();
        if kmmv_to_kaz(&ki).unwrap().output.product().unwrap().is_zero() != ki.holds().unwrap() {
            failures.push(format!("kaz, seed {j}"));
        }
    }
    Outcome {
        ok: failures.is_empty(),
        detail: format!(
            "1000 instances x 6 reductions, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn criterion_7() -> Outcome {
    let n = 512;
    let inst = planted(&ring("int:1024"), n, 0, 512);
    let t = n as u64;
    // one untimed warm-up run of each verifier, then one timed run
    let time = |f: &dyn Fn() -> bool| {
        f();
        let start = Instant::now();
        let answer = f();
        (start.elapsed(), answer)
    };
    let (exact, e_ok) = time(&|| verify_exact(&inst).unwrap().is_equal());
    let (det, d_ok) = time(&|| verify_det_sparse(&inst, t).unwrap().is_equal());
    let (rand, r_ok) = time(&|| verify_rand_sparse(&inst, t, 0.25, &mut BitSource::new(7)).unwrap().is_equal());
    let ratio = |d: Duration| d.as_secs_f64() / exact.as_secs_f64();
    let ok = e_ok && d_ok && r_ok && ratio(det) <= 0.25 && ratio(rand) <= 0.05;
    Outcome {
        ok,
        detail: format!(
            "exact {:.1} ms, det-sparse {:.1} ms ({:.3}x <= 0.25), rand-sparse {:.2} ms ({:.4}x <= 0.05)",
            exact.as_secs_f64() * 1e3,
            det.as_secs_f64() * 1e3,
            ratio(det),
            rand.as_secs_f64() * 1e3,
            ratio(rand)
        ),
    }
}

fn strip_wall(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.toml");
    std::fs::write(
        &config,
        "seed = 20241015\ntrials = 200\nring = \"int:1024\"\n\
         algs = [\"freivalds\", \"rand-sparse\", \"det-sparse\", \"kimbrel-sinha\"]\n\
         n = [16, 32]\ns = [1, \"n\"]\neps = [0.25, 0.5]\npool = 8\n",
    )
    .unwrap();
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_mmv"))
            .args(["bench", "--config"])
            .arg(&config)
            .env("MMV_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let outputs = [run("1"), run("1"), run("4"), run("4")];
    let stripped: Vec<String> = outputs.iter().map(|s| strip_wall(s)).collect();
    let rows = stripped[0].lines().count();
    let ok = rows > 1 && stripped.iter().all(|s| s == &stripped[0]);
    Outcome { ok, detail: format!("{rows} CSV lines identical across 2 runs x MMV_THREADS in {{1, 4}}") }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 8] = [
        ("deterministic sparse verifier exactness", criterion_1, Some(120)),
        ("randomized sparse soundness and bit count", criterion_2, Some(180)),
        ("freivalds one-sided error", criterion_3, Some(60)),
        ("korec-wiedermann exactness", criterion_4, Some(120)),
        ("coding oracles", criterion_5, Some(60)),
        ("reduction web", criterion_6, Some(60)),
        ("relative speed at n = 512", criterion_7, None),
        ("bench determinism", criterion_8, None),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let label = format!("{} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|x| label.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = budget.is_none_or(|b| secs <= b as f64);
        let status = if out.ok && in_time { "PASS" } else { "FAIL" };
        let limit = budget.map_or(String::new(), |b| format!(" <= {b} s"));
        println!("{status} [{label}] {} ({secs:.1} s{limit})", out.detail);
        if status == "FAIL" {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
