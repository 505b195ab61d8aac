use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbs-noc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn encode_prints_address_cover_and_overcoverage() {
    let o = bin(&["encode", "--scheme", "hbs", "--k", "4", "--levels", "2", "--dests", "0,5"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "address: 0011/0011\ncover: {0,1,4,5}\novercoverage: 2\nrouting_bits: 8\n"
    );
    let o = bin(&["encode", "--scheme", "symbol", "--dests", "0,1", "--n", "16"]);
    assert!(stdout(&o).starts_with("address: 000*\n"));
    let o = bin(&["encode", "--scheme", "unicast", "--dests", "3..6"]);
    assert!(stdout(&o).contains("cover: {3,4,5}\n"));
}

#[test]
fn decode_reads_encoded_text() {
    let o = bin(&["decode", "--scheme", "hbs", "--k", "4", "--levels", "2", "--address", "0110/1000"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "cover: {7,11}\nsize: 2\n");
}

#[test]
fn invalid_input_exits_with_one() {
    for args in [
        &["encode", "--scheme", "hbs", "--dests", "99"][..],
        &["encode", "--scheme", "symbol", "--n", "27", "--dests", "1"],
        &["encode", "--scheme", "nope", "--dests", "1"],
        &["encode", "--scheme", "fbs", "--dests", ""],
        &["decode", "--scheme", "fbs", "--address", "0101"],
        &["frobnicate"],
    ] {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn scaling_writes_the_default_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scaling.csv");
    let o = bin(&["scaling", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "scheme,N,k,routing_bits,capability,lut_bits_per_source");
    let n16: Vec<&str> = rows.iter().copied().filter(|r| r.split(',').nth(1) == Some("16")).collect();
    assert_eq!(
        n16,
        [
            "fbs,16,,16,65535,16",
            "symbol,16,,8,81,8",
            "hbs,16,2,8,81,8",
            "hbs,16,4,8,225,8",
            "unicast,16,,64,65535,64"
        ]
    );
    let again = dir.path().join("again.csv");
    bin(&["scaling", "--output", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());

    let o = bin(&["scaling", "--n", "64", "--k", "4"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = bin(&["scaling", "--output", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = bin(&["trace-gen", "--steps", "50", "--rate", "0.1", "--seed", "3", "--output", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let z = dir.path().join("z.csv");
    bin(&["trace-gen", "--rate", "0", "--output", z.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&z).unwrap(), "timestep,neuron_id\n");

    let o = bin(&["trace-gen", "--rate", "1.5", "--output", z.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["trace-gen", "--output", "/nonexistent/dir/t.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_reports_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "small.toml",
        "schemes = [\"fbs\", \"hbs\", \"unicast\"]\n[mapping]\nrepetitions = 2\n[trace]\nsteps = 10\n",
    );
    let out = dir.path().join("out");
    let o = bin(&["simulate", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let runs = std::fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 7);
    assert!(runs.starts_with(
        "mapping,scheme,packets_injected,link_traversals,link_bit_traversals,legal_deliveries,\
         illegal_deliveries,routing_energy,filtering_energy,illegal_filtering_energy,total_energy\n"
    ));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["mappings"], 2);
    assert_eq!(summary["schemes"][2]["header_bits"], 14);

    let bad = write(dir.path(), "bad.toml", "schemes = [\"symbol\"]\n[tree]\nfan_out = 3\nlevels = 3\n");
    let o = bin(&["simulate", "--config", &bad, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("schemes[0]") && err.contains("power of 2"), "{err}");

    let o = bin(&["simulate", "--config", &write(dir.path(), "typo.toml", "[tre]\n")]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["simulate", "--config", "/nonexistent.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let missing = write(dir.path(), "missing.toml", "[trace]\nfile = \"nope.csv\"\n");
    let o = bin(&["simulate", "--config", &missing, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
