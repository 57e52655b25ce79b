use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_taboo");

const WORKED_CORPUS: &str = "i love to eat crab and lobster for dinner
i love to eat crab and lobster for dinner
we eat crab and rice at the beach
the crab walks on the beach
this is a craft project for kids
i love to eat pasta for dinner
that show was crap
";

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel)
}

fn taboo(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn worked_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("corpus.txt"), WORKED_CORPUS).unwrap();
    std::fs::write(dir.path().join("lex.tsv"), "crap\tH2\tstandard\n").unwrap();
    std::fs::write(dir.path().join("snip.txt"), "i love to eat crap and lobster for dinner\n").unwrap();
    dir
}

#[test]
fn correct_worked_example() {
    let dir = worked_dir();
    let o = taboo(
        dir.path(),
        &["correct", "--snippet", "snip.txt", "--lexicon", "lex.tsv", "--backend", "ngram", "--corpus", "corpus.txt"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row["c_star"], "crab");
    assert_eq!(row["token_index"], 4);
    let ranked = row["ranking"]["ranked"].as_array().unwrap();
    let words: Vec<&str> = ranked.iter().map(|c| c["word"].as_str().unwrap()).collect();
    assert_eq!(words, ["crab", "crap", "craft"]);
    for (c, want) in ranked.iter().zip([-1.341_919_571_236_230_2, -9.894_534_665_266_468, -11.280_829_026_386_359]) {
        assert!((c["score"].as_f64().unwrap() - want).abs() < 1e-9);
    }
}

#[test]
fn config_round_trip_reproduces_output() {
    let dir = worked_dir();
    let first = taboo(
        dir.path(),
        &[
            "--save-config",
            "run.toml",
            "correct",
            "--in",
            "snip.txt",
            "--lexicon",
            "lex.tsv",
            "--corpus",
            "corpus.txt",
            "--radius",
            "1",
        ],
    );
    assert!(first.status.success());
    let toml = std::fs::read_to_string(dir.path().join("run.toml")).unwrap();
    assert!(toml.contains("radius = 1"), "{toml}");
    let second = taboo(dir.path(), &["--config", "run.toml", "correct", "--in", "snip.txt"]);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    // Radius 1 drops "craft".
    assert!(!stdout(&first).contains("craft"));
}

#[test]
fn eval_preset_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let bench = fixture("eval/eval10.jsonl");
    let preset = fixture("eval/eval10_preset.json");
    let vocab = fixture("eval/eval10_vocab.txt");
    let o = taboo(
        dir.path(),
        &[
            "eval",
            "--backend",
            "preset",
            "--bench",
            bench.to_str().unwrap(),
            "--preset",
            preset.to_str().unwrap(),
            "--vocab",
            vocab.to_str().unwrap(),
            "--csv",
            "items.csv",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["p_at"]["1"], 0.3);
    assert_eq!(r["p_at"]["5"], 0.6);
    assert_eq!(r["p_at"]["10"], 0.8);
    assert_eq!(r["candidate_miss"], 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("P@1=0.300 P@5=0.600 P@10=0.800"));
    let csv = std::fs::read_to_string(dir.path().join("items.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);

    std::fs::write(dir.path().join("res.json"), &o.stdout).unwrap();
    let rep = taboo(dir.path(), &["report", "--eval", "res.json"]);
    assert!(rep.status.success());
    assert!(stdout(&rep).contains("p_at_1,0.3\n"));
}

#[test]
fn exit_codes() {
    let dir = worked_dir();
    let code = |args: &[&str]| taboo(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["correct", "--in", "missing.txt", "--lexicon", "lex.tsv", "--corpus", "corpus.txt"]), 1);
    assert_eq!(
        code(&["correct", "--in", "snip.txt", "--lexicon", "lex.tsv", "--corpus", "corpus.txt", "--radius", "0"]),
        1
    );
    assert_eq!(code(&["correct", "--in", "snip.txt", "--lexicon", "lex.tsv"]), 1);
    std::fs::write(dir.path().join("bad.toml"), "[thresholds]\nradus = 2\n").unwrap();
    assert_eq!(code(&["--config", "bad.toml", "candidates", "crap", "--vocab", "corpus.txt"]), 1);

    // Nothing listens on the discard port: a backend outage.
    let outage = taboo(
        dir.path(),
        &[
            "correct",
            "--in",
            "snip.txt",
            "--lexicon",
            "lex.tsv",
            "--backend",
            "http",
            "--endpoint",
            "http://127.0.0.1:9/score",
            "--vocab",
            "corpus.txt",
        ],
    );
    assert_eq!(outage.status.code(), Some(2), "{}", String::from_utf8_lossy(&outage.stderr));
}

#[test]
fn version_reports_build() {
    let o = taboo(Path::new("."), &["--version"]);
    assert!(o.status.success());
    let v = stdout(&o);
    assert!(v.starts_with(concat!("taboo ", env!("CARGO_PKG_VERSION"))), "{v}");
    assert!(v.contains("parallel") || v.contains("sequential"), "{v}");
}

#[test]
fn candidates_detect_and_agree() {
    let dir = tempfile::tempdir().unwrap();
    let vocab = fixture("eval/eval10_vocab.txt");
    let o = taboo(dir.path(), &["candidates", "crap", "--vocab", vocab.to_str().unwrap(), "--radius", "1"]);
    let words: Vec<String> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(words[0], "crap");
    assert!(words.contains(&"crab".to_string()) && !words.contains(&"craft".to_string()));

    std::fs::write(dir.path().join("lex.tsv"), "crap\tH2\tstandard\n").unwrap();
    let srt = fixture("transcripts/sample.srt");
    let aws = fixture("transcripts/sample_aws.json");
    let o = taboo(dir.path(), &["detect", "--in", aws.to_str().unwrap(), "--format", "aws", "--lexicon", "lex.tsv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let flag: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(flag["word"], "crap");

    std::fs::write(
        dir.path().join("pairs.csv"),
        format!("video_id,path_a,path_b\nv1,{},{}\n", aws.display(), srt.display()),
    )
    .unwrap();
    let o = taboo(dir.path(), &["agree-batch", "--manifest", "pairs.csv", "--format-a", "aws"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("kind,video_id,ma,vocab_union_size,threshold,fraction\nreport,v1,"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("cdf,")).count(), 11);
    assert!(text.contains("cdf,,,,0.0,1.0"));
}

fn http(addr: &str, method: &str, path: &str, body: &str) -> (u16, Value) {
    let mut s = TcpStream::connect(addr).unwrap();
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nhost: {addr}\r\nconnection: close\r\ncontent-type: application/json\r\nx-reviewer: ann\r\ncontent-length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    s.read_to_string(&mut raw).unwrap();
    let status = raw[9..12].parse().unwrap();
    let json = raw.split_once("\r\n\r\n").unwrap().1;
    (status, serde_json::from_str(json).unwrap())
}

#[test]
fn serve_records_decisions_durably() {
    let dir = worked_dir();
    let o = taboo(
        dir.path(),
        &["correct", "--in", "snip.txt", "--lexicon", "lex.tsv", "--corpus", "corpus.txt", "--review-out", "rev.jsonl"],
    );
    assert!(o.status.success());
    let mut child = Command::new(BIN)
        .current_dir(dir.path())
        .args(["serve", "--journal", "j.jsonl", "--ingest", "rev.jsonl", "--port", "0", "--snapshot-every", "0"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let listening: Value = serde_json::from_str(&line).unwrap();
    let addr = listening["listening"].as_str().unwrap().to_string();

    let (status, health) = http(&addr, "GET", "/api/health", "");
    assert_eq!((status, health["items"].as_u64()), (200, Some(1)));
    let id = "snip:1:other:4";
    let (status, item) = http(&addr, "GET", &format!("/api/items/{id}"), "");
    assert_eq!(status, 200);
    assert_eq!(item["candidates"][0]["word"], "crab");
    let body = r#"{"verdict":"accept_fix","chosen_word":"crab"}"#;
    let (status, rec) = http(&addr, "POST", &format!("/api/items/{id}/decision"), body);
    assert_eq!(status, 200, "{rec}");
    assert_eq!(rec["item"]["status"], "decided");

    // No graceful shutdown: the decision must already be on disk.
    child.kill().unwrap();
    child.wait().unwrap();
    let o = taboo(dir.path(), &["report", "--journal", "j.jsonl"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((summary["decided"].as_u64(), summary["accept_fix"].as_u64()), (Some(1), Some(1)));

    // Re-ingesting the same records is rejected as bad input.
    let o = taboo(dir.path(), &["serve", "--journal", "j.jsonl", "--ingest", "rev.jsonl", "--port", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn build_lexicon_from_fixture_lists() {
    let dir = tempfile::tempdir().unwrap();
    let h1 = fixture("lexicon/h1_sample.txt");
    let corpus = fixture("lexicon/corpus");
    let o = taboo(
        dir.path(),
        &["build-lexicon", "--h1", h1.to_str().unwrap(), "--corpus", corpus.to_str().unwrap(), "--out", "lex.tsv"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("lex.tsv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("crap\t")));
    // The produced file is accepted wherever a lexicon is expected.
    std::fs::write(dir.path().join("t.srt"), "1\n00:00:01,000 --> 00:00:02,000\nWhat a Crap day!\n").unwrap();
    let o = taboo(dir.path(), &["detect", "--in", "t.srt", "--lexicon", "lex.tsv", "--report", "freq"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "word,count\ncrap,1\n");
}
