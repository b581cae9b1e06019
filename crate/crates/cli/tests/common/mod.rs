#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

pub fn sample_text(name: &str) -> String {
    std::fs::read_to_string(sample(name)).unwrap()
}

pub fn pipevis(args: &[&str]) -> Run {
    pipevis_stdin(args, None)
}

pub fn pipevis_stdin(args: &[&str], input: Option<&str>) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pipevis"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn pipevis");
    {
        let mut stdin = child.stdin.take().unwrap();
        if let Some(text) = input {
            stdin.write_all(text.as_bytes()).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Writes `text` to a fresh file under the target temp dir.
pub fn temp_doc(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("pipevis-cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Table cells per `| ... |` line.
pub fn cells(body: &str) -> Vec<Vec<String>> {
    body.lines()
        .filter(|l| l.starts_with("| "))
        .map(|l| l.trim_matches('|').split('|').map(|c| c.trim().to_string()).collect())
        .collect()
}

/// Last cell of the row whose first cell is `label`.
pub fn row_value(body: &str, label: &str) -> Option<String> {
    cells(body).into_iter().find(|r| r[0] == label).and_then(|r| r.last().cloned())
}

pub const OVERALL: &str = "Overall VIS for model";

pub const FIRST_PARTY_2023: &str = "first-party-2023.json";
pub const FIRST_PARTY_2019: &str = "first-party-2019.json";
pub const THIRD_PARTY_SPARSE: &str = "third-party-sparse.json";
pub const THIRD_PARTY_DOCUMENTED: &str = "third-party-documented.json";

/// One invalid invocation and the exit code it must produce.
pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub stdin: Option<String>,
    pub code: i32,
}

/// Invalid inputs covering every failing exit code.
pub fn invalid_matrix() -> Vec<Case> {
    let iv = sample_text(FIRST_PARTY_2023);
    let p = |s: &str| sample(s).display().to_string();
    let doc = |name: &str, text: String| temp_doc(name, &text).display().to_string();
    let missing = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("no-such-file.json").display().to_string();

    let score_zero = doc("score-zero.json", iv.replacen("\"quantity\": 3", "\"quantity\": 0", 1));
    let malformed = doc("malformed.json", iv[..iv.len() / 2].to_string());
    let version = doc("version.json", iv.replace("\"schema_version\": \"1.0\"", "\"schema_version\": \"9.9\""));
    let cycle = doc(
        "cycle.json",
        iv.replace("\"from\": \"H2\",\n      \"to\": \"M\"", "\"from\": \"M\",\n      \"to\": \"LD\""),
    );
    let unknown_field = doc("unknown-field.json", iv.replace("\"display_precision\": 2", "\"display_precision\": 2,\n  \"colour\": 1"));
    let other_asset = doc("other.json", iv.replace("first-party-model", "other-model"));

    let case = |name, args: &[&str], code| Case { name, args: args.iter().map(|s| s.to_string()).collect(), stdin: None, code };
    let mut cases = vec![
        case("validate missing file", &["validate", &missing], 2),
        case("score missing file", &["score", &missing], 2),
        case("validate score 0", &["validate", &score_zero], 1),
        case("validate truncated json", &["validate", &malformed], 1),
        case("validate unknown schema version", &["validate", &version], 1),
        case("score cyclic graph", &["score", &cycle], 1),
        case("validate unknown field", &["validate", &unknown_field], 1),
        case("score unknown node", &["score", &p(FIRST_PARTY_2023), "--node", "ZZ"], 2),
        case("score leaf node", &["score", &p(FIRST_PARTY_2023), "--node", "DS"], 2),
        case("score precision out of range", &["score", &p(FIRST_PARTY_2023), "--precision", "99"], 2),
        case("score unknown format", &["score", &p(FIRST_PARTY_2023), "--format", "xml"], 2),
        case("whatif short set", &["whatif", &p(FIRST_PARTY_2023), "--set", "DS:1,2"], 2),
        case("whatif score 5", &["whatif", &p(FIRST_PARTY_2023), "--set", "DS:1,2,5"], 2),
        case("whatif unknown node", &["whatif", &p(FIRST_PARTY_2023), "--set", "ZZ:1,1,1"], 2),
        case("whatif non-leaf node", &["whatif", &p(FIRST_PARTY_2023), "--set", "LD:1,1,1"], 2),
        case("whatif incomplete weights", &["whatif", &p(FIRST_PARTY_2023), "--weights", "DS=1"], 2),
        case("whatif invalid base", &["whatif", &score_zero], 1),
        case("compare without paths", &["compare"], 2),
        case("compare with invalid document", &["compare", &p(FIRST_PARTY_2023), &score_zero], 1),
        case("series of mixed assets", &["series", &p(FIRST_PARTY_2023), &other_asset], 2),
        case("unknown subcommand", &["frobnicate"], 2),
        case("unknown flag", &["rubric", "--colour"], 2),
    ];
    cases.push(Case {
        name: "stdin not json",
        args: vec!["validate".into(), "-".into()],
        stdin: Some("not json".into()),
        code: 1,
    });
    cases
}

pub fn run_case(c: &Case) -> Run {
    let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
    pipevis_stdin(&args, c.stdin.as_deref())
}
