use std::path::Path;
use std::process::{Command, Output};

use mmv::harness::format::{parse_document, parse_instance, Document};
use mmv::matrix::matmul;

fn mmv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmv")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_verify_every_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let yes = dir.path().join("yes.mmv");
    let no = dir.path().join("no.mmv");
    assert!(mmv(&["gen", "--n", "6", "--ring", "zmod:101", "--s", "0", "--seed", "3", "-o", path(&yes)])
        .status
        .success());
    assert!(mmv(&["gen", "--n", "6", "--ring", "zmod:101", "--s", "2", "--seed", "3", "-o", path(&no)])
        .status
        .success());
    assert_eq!(parse_instance(&std::fs::read_to_string(&no).unwrap()).unwrap().promise_t, Some(2));

    for alg in ["exact", "freivalds", "geometric", "det-sparse", "rand-sparse", "mps"] {
        let out = mmv(&["verify", "--alg", alg, path(&yes)]);
        assert_eq!(out.status.code(), Some(0), "{alg}: {}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        assert!(text.starts_with("answer: Equal\n"), "{text}");
        for key in ["random_bits: ", "elem_ops: ", "wall_nanos: "] {
            assert!(text.contains(key));
        }
    }
    for alg in ["exact", "geometric", "det-sparse", "mps"] {
        let out = mmv(&["verify", "--alg", alg, path(&no)]);
        assert_eq!(out.status.code(), Some(1), "{alg}");
        assert!(stdout(&out).contains("witness: "));
    }
    let out = mmv(&["verify", "--alg", "det-sparse", "--t", "2", path(&no)]);
    assert!(stdout(&out).contains("witness: parity-row"));
}

#[test]
fn integer_only_verifiers_and_options() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("int.mmv");
    assert!(mmv(&["gen", "--n", "8", "--ring", "int:64", "--s", "1", "--seed", "9", "-o", path(&file)])
        .status
        .success());
    assert_eq!(mmv(&["verify", "--alg", "korec-wiedermann", path(&file)]).status.code(), Some(1));
    assert_eq!(mmv(&["verify", "--alg", "korec-wiedermann", "--kw-cap", "4", path(&file)]).status.code(), Some(70));
    let out = mmv(&["verify", "--alg", "rand-sparse", "--eps", "1/2", "--t", "1", "--seed", "5", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("random_bits: 1\n"));
    let out = mmv(&["verify", "--alg", "freivalds", "--rounds", "3", "--cross-check", path(&file)]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    // a promise smaller than the real sparsity is reported, not trusted
    let out = mmv(&["verify", "--alg", "det-sparse", "--t", "0", "--cross-check", path(&file)]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("promise violated"));
    assert_eq!(mmv(&["verify", "--alg", "rand-sparse", "--eps", "0.9", path(&file)]).status.code(), Some(64));
}

#[test]
fn parse_errors_exit_65_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.mmv");
    std::fs::write(&file, "MMV1\nring zmod:7\nn 2\nA\n1 2\n3 x\n").unwrap();
    let out = mmv(&["verify", "--alg", "exact", path(&file)]);
    assert_eq!(out.status.code(), Some(65));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6"), "{err}");
    assert_eq!(mmv(&["verify", "--alg", "exact", "/nonexistent/file"]).status.code(), Some(65));
    assert_eq!(mmv(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn reduce_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("in.mmv");
    assert!(mmv(&["gen", "--n", "3", "--ring", "int:27", "--s", "0", "--seed", "1", "-o", path(&file)])
        .status
        .success());
    for to in ["allzeroes", "inverse", "symmetric"] {
        let out = mmv(&["reduce", "--from", "mmv", "--to", to, path(&file)]);
        assert!(out.status.success(), "{to}");
        let inst = parse_instance(&stdout(&out)).unwrap();
        assert_eq!(matmul(&inst.a, &inst.b).unwrap(), inst.c, "{to}");
    }
    let out = mmv(&["reduce", "--from", "mmv", "--to", "kaz", path(&file)]);
    assert_eq!(out.status.code(), Some(64));

    let k3 = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/k3.mmv");
    let out = mmv(&["reduce", "--from", "kmmv", "--to", "kaz", k3]);
    assert!(out.status.success());
    match parse_document(&stdout(&out)).unwrap() {
        Document::Product(k) => {
            assert_eq!(k.k(), 3);
            assert!(k.product().unwrap().is_zero());
        }
        other => panic!("{other:?}"),
    }

    let vectors = dir.path().join("v.mmv");
    std::fs::write(&vectors, "MMV1\nring int:3\nn 2\nV\n1 1\n1 -1\n").unwrap();
    let out = mmv(&["reduce", "--from", "mcapo", "--to", "mmv", path(&vectors)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let inst = parse_instance(&stdout(&out)).unwrap();
    assert_eq!(
        mmv(&[
            "verify",
            "--alg",
            "exact",
            path(&{
                let f = dir.path().join("gram.mmv");
                std::fs::write(&f, stdout(&out)).unwrap();
                f
            })
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(inst.c.get(0, 0), 2);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("b.toml");
    std::fs::write(
        &config,
        "seed = 1\ntrials = 20\nring = \"zmod:101\"\nalgs = [\"freivalds\", \"det-sparse\"]\nn = [8]\n",
    )
    .unwrap();
    let csv_path = dir.path().join("out.csv");
    assert!(mmv(&["bench", "--config", path(&config), "-o", path(&csv_path)]).status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alg,ring,n,t,eps,trials,false_accepts,random_bits_mean,elem_ops_mean,wall_nanos_mean"
    );
    assert_eq!(lines.count(), 2);
    std::fs::write(&config, "seed = 1\ntrials = 20\nring = \"zmod:101\"\nbogus = 3\n").unwrap();
    assert_eq!(mmv(&["bench", "--config", path(&config)]).status.code(), Some(65));
}

#[test]
fn selfcheck_passes() {
    let out = mmv(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 4, "{text}");
}
