use ifc_core::surface::{parse_source, Program};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn ifc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifc")).args(args).env_remove("IFC_SEED").output().expect("run ifc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn temp_file(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn files_in(dir: &str) -> Vec<PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(corpus(dir)).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn typecheck_prints_the_principal_type() {
    let dir = tempfile::tempdir().unwrap();
    let f = temp_file(&dir, "id.ifc", "(fg (lattice 2pt) (ctx (x bool@H)) x)");
    let o = ifc(&["typecheck", &f]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).lines().any(|l| l == "type=bool@H"), "{}", stdout(&o));
}

#[test]
fn typecheck_names_the_rejecting_rule() {
    let o = ifc(&["typecheck", corpus("leaks/fg_latent_call.ifc").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("rule=FG-app"), "{}", stderr(&o));
}

#[test]
fn missing_files_and_parse_errors_exit_2() {
    assert_eq!(code(&ifc(&["typecheck", "/nonexistent/file.ifc"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let f = temp_file(&dir, "bad.ifc", "(fg (lattice 2pt) (app true");
    let o = ifc(&["typecheck", &f]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("error=parse"));
    let good = corpus("programs/fg_apply.ifc");
    assert_eq!(code(&ifc(&["typecheck", "--lang", "cg", good.to_str().unwrap()])), 2);
}

#[test]
fn lattice_flag_overrides_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let f = temp_file(&dir, "p.ifc", "(fg (lattice 2pt) (ctx (x bool@{a})) x)");
    assert_eq!(code(&ifc(&["typecheck", &f])), 2);
    let o = ifc(&["--lattice", "(powerset a b)", "typecheck", &f]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("type=bool@{a}"), "{}", stdout(&o));
}

#[test]
fn eval_prints_values_and_suspensions() {
    let ret = corpus("programs/cg_ret.ifc");
    let o = ifc(&["eval", ret.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("value=<computation>"));
    let o = ifc(&["eval", "--force", ret.to_str().unwrap()]);
    assert!(stdout(&o).contains("value=true"), "{}", stdout(&o));

    let o = ifc(&["eval", corpus("programs/fg_read_after_write.ifc").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("heap_cells=1"), "{}", stdout(&o));
}

#[test]
fn eval_of_landins_knot_times_out() {
    for f in ["programs/fg_knot.ifc", "programs/cg_knot.ifc"] {
        let o = ifc(&["eval", "--force", "--fuel", "5000", corpus(f).to_str().unwrap()]);
        assert_eq!(code(&o), 3, "{f}: {}", stderr(&o));
        assert!(stderr(&o).contains("error=timeout"));
    }
}

#[test]
fn translate_follows_the_rules() {
    let dir = tempfile::tempdir().unwrap();
    let f = temp_file(&dir, "x.ifc", "(fg (lattice 2pt) (ctx (x bool@L)) x)");
    let o = ifc(&["translate", &f]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(ret x)"), "{}", stdout(&o));

    let f = temp_file(&dir, "l.ifc", "(cg (lattice 2pt) (label H true))");
    let o = ifc(&["translate", "--dir", "cg2fg", &f]);
    assert!(stdout(&o).contains("(inl true"), "{}", stdout(&o));
    assert_eq!(code(&ifc(&["translate", "--dir", "fg2cg", &f])), 2);
}

#[test]
fn translate_output_reparses_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for f in files_in("programs") {
        let a = ifc(&["translate", "--check", f.to_str().unwrap()]);
        assert_eq!(code(&a), 0, "{}: {}", f.display(), stderr(&a));
        let b = ifc(&["translate", "--check", f.to_str().unwrap()]);
        assert_eq!(stdout(&a), stdout(&b));
        let out = temp_file(&dir, "out.ifc", &stdout(&a));
        let o = ifc(&["typecheck", &out]);
        assert_eq!(code(&o), 0, "{}: {}", f.display(), stderr(&o));
    }
}

#[test]
fn ni_check_passes_the_corpus_and_rejects_leaks() {
    let mut subjects = 0;
    for f in files_in("programs") {
        let source = parse_source(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let free = match &source.program {
            Program::Fg { ctx, .. } => ctx.len(),
            Program::Cg { ctx, .. } => ctx.len(),
        };
        if free != 1 {
            continue;
        }
        subjects += 1;
        let text = std::fs::read_to_string(&f).unwrap();
        let observer = text.lines().find_map(|l| l.strip_prefix("; observe: ")).unwrap_or("bot").trim();
        let o = ifc(&["ni-check", "--samples", "10", "--observer", observer, f.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}: {}{}", f.display(), stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("verdict=pass"), "{}", stdout(&o));
    }
    assert!(subjects >= 3, "only {subjects} subjects");
    for f in files_in("leaks") {
        let text = std::fs::read_to_string(&f).unwrap();
        let rule = text.lines().find_map(|l| l.strip_prefix("; expect: ")).unwrap().trim();
        let o = ifc(&["ni-check", f.to_str().unwrap()]);
        assert_eq!(code(&o), 1, "{}", f.display());
        assert!(stderr(&o).contains(&format!("rule={rule}")), "{}: {}", f.display(), stderr(&o));
    }
}

#[test]
fn ni_check_constant_program_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = temp_file(&dir, "c.ifc", "(cg (lattice 2pt) (ctx (h (Labeled H bool))) (ret true))");
    let o = ifc(&["ni-check", "--seed", "3", &f]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict=pass pairs=50"), "{}", stdout(&o));
}

#[test]
fn ni_check_requires_one_secret_and_a_hidden_label() {
    let dir = tempfile::tempdir().unwrap();
    let f = temp_file(&dir, "two.ifc", "(fg (lattice 2pt) (ctx (a bool@H) (b bool@H)) true)");
    assert_eq!(code(&ifc(&["ni-check", &f])), 1);
    let f = temp_file(&dir, "one.ifc", "(fg (lattice 2pt) (ctx (a bool@H)) true)");
    let o = ifc(&["ni-check", "--observer", "H", &f]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("error=precondition"));
}

#[test]
fn fuzz_sweeps_pass_and_are_reproducible() {
    for lang in ["fg", "cg"] {
        let args = ["fuzz", "--lang", lang, "--n", "150", "--size", "25", "--seed", "11"];
        let a = ifc(&args);
        assert_eq!(code(&a), 0, "{}{}", stdout(&a), stderr(&a));
        assert!(stdout(&a).contains("failures=0"));
        assert_eq!(stdout(&a), stdout(&ifc(&args)));
    }
    let a = Command::new(env!("CARGO_BIN_EXE_ifc")).args(["fuzz", "--n", "20"]).env("IFC_SEED", "11").output().unwrap();
    assert!(stdout(&a).contains("seed=11"));
    let o = ifc(&["--lattice", "(powerset a b)", "fuzz", "--dir", "cg2fg", "--n", "100"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("lang=cg"));
}

#[test]
fn fuzz_catches_injected_translator_faults() {
    let dir = tempfile::tempdir().unwrap();
    let replays = dir.path().join("replays");
    for (lang, mutation) in [("fg", "swap-case"), ("cg", "swap-case"), ("fg", "drop-coerce")] {
        let o = ifc(&[
            "fuzz",
            "--lang",
            lang,
            "--n",
            "200",
            "--mutation",
            mutation,
            "--replay-dir",
            replays.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 5, "{lang} {mutation}: {}", stdout(&o));
    }
    let written: Vec<_> =
        std::fs::read_dir(&replays).unwrap().flat_map(|d| std::fs::read_dir(d.unwrap().path()).unwrap()).collect();
    assert!(!written.is_empty());
    for entry in written {
        let path = entry.unwrap().path();
        assert_eq!(path.extension().unwrap(), "ifc");
        assert_eq!(code(&ifc(&["typecheck", path.to_str().unwrap()])), 0, "{}", path.display());
    }
}
