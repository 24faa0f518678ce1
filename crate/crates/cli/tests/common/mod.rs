//! Corpus runner and random instance generator shared by the CLI tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// One corpus line: an optional instance file and the arguments.
#[derive(Clone, Debug)]
pub struct Case {
    pub fixture: Option<String>,
    pub args: Vec<String>,
}

impl Case {
    pub fn label(&self) -> String {
        format!("{} | {}", self.fixture.as_deref().unwrap_or("-"), self.args.join(" "))
    }
}

pub fn corpus() -> Vec<Case> {
    let text = std::fs::read_to_string(fixtures().join("corpus.txt")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (f, a) = l.split_once('|').expect("corpus line needs `|`");
            let f = f.trim();
            Case { fixture: (f != "-").then(|| f.to_string()), args: a.split_whitespace().map(String::from).collect() }
        })
        .collect()
}

pub struct Run {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Runs the binary from `dir` so relative fixture names appear in messages.
pub fn run_in(dir: &Path, fixture: Option<&str>, args: &[String]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_charge-lab"));
    cmd.current_dir(dir).args(args);
    if let Some(f) = fixture {
        cmd.args(["--instance", f]);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().expect("exit code"),
    }
}

pub fn run_case(case: &Case) -> Run {
    run_in(&fixtures(), case.fixture.as_deref(), &case.args)
}

/// Every corpus case with its output and exit code, in corpus order.
pub fn transcript() -> String {
    let mut out = String::new();
    for case in corpus() {
        let r = run_case(&case);
        out.push_str(&format!("== {}\n{}{}exit: {}\n", case.label(), r.stdout, r.stderr, r.code));
    }
    out
}

pub fn bits(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| if rng.gen_bool(0.5) { '1' } else { '0' }).collect()
}

/// A set literal over ℕ with a short prefix and period.
pub fn set_text(rng: &mut ChaCha8Rng, infinite: bool) -> String {
    let len = rng.gen_range(0..5);
    let prefix = bits(rng, len);
    let period = rng.gen_range(1..7);
    let mut residues: Vec<usize> = (0..period).filter(|_| rng.gen_bool(0.5)).collect();
    if infinite && residues.is_empty() {
        residues.push(rng.gen_range(0..period));
    }
    let pattern: Vec<String> = residues.iter().map(usize::to_string).collect();
    format!("prefix={prefix};period={period};pattern={}", pattern.join(","))
}

pub fn weight(rng: &mut ChaCha8Rng) -> String {
    format!("{}/{}", rng.gen_range(1..6), rng.gen_range(1..5))
}

pub fn charge_text(rng: &mut ChaCha8Rng) -> String {
    let atoms: Vec<String> =
        (0..rng.gen_range(0..3)).map(|_| format!("{}:{}", rng.gen_range(0..12), weight(rng))).collect();
    let dens: Vec<String> =
        (0..rng.gen_range(0..3)).map(|_| format!("{}@{{{}}}", weight(rng), set_text(rng, true))).collect();
    format!("atoms={};densities={}", atoms.join(","), dens.join(","))
}

/// A random instance using every section; names are declared before use.
pub fn instance_text(rng: &mut ChaCha8Rng) -> String {
    let ns = rng.gen_range(2..5);
    let nc = rng.gen_range(1..4);
    let mut t = String::from("# generated\n[sets]\n");
    for i in 0..ns {
        t += &format!("s{i} = {}\n", set_text(rng, true));
    }
    t += "[charges]\n";
    for i in 0..nc {
        t += &format!("c{i} = {}\n", charge_text(rng));
    }
    t += "[sequences]\n";
    t += &format!("q0 = tail(s{})\n", rng.gen_range(0..ns));
    t += &format!("q1 = tail(branch={}({}))\n", bits(rng, 2), bits(rng, 3).replace("000", "001"));
    t += &format!("q2 = tail({{{}}})\n", set_text(rng, true));
    t += &format!(
        "q3 = prefix=[{{{}}}];period=[{{{}}};{{{}}}]\n",
        set_text(rng, false),
        set_text(rng, false),
        set_text(rng, false)
    );
    t += "[families]\n";
    let members: Vec<String> = (0..nc).filter(|_| rng.gen_bool(0.7)).map(|i| format!("c{i}")).collect();
    let members = if members.is_empty() { vec!["c0".to_string()] } else { members };
    t += &format!("f0 = finite({})\n", members.join(", "));
    t += &format!("f1 = pointmasses(s{})\n", rng.gen_range(0..ns));
    t += "[generators]\n";
    t += &format!("g0 = blocks({})\n", rng.gen_range(1..4));
    t += "g1 = singletons\n";
    t += "g2 = explicit({prefix=01;period=1;pattern=};{prefix=0010;period=1;pattern=})\n";
    t
}
pub mod oracle;
