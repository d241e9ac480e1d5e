//! `ifc`: typecheck, run, translate and test FG and CG programs.
//!
//! Output is line-delimited `key=value` records on stdout. Errors are
//! records on stderr. The exit code says what happened:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | type error or violated precondition |
//! | 2 | parse error, unreadable file or bad usage |
//! | 3 | evaluation ran out of fuel |
//! | 4 | `translate --check` found an ill-typed translation |
//! | 5 | noninterference counterexample or oracle failure |

mod fuzz;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ifc_core::cg::{cg_eval_pure, cg_run, cg_typecheck, CgEnv, CgType};
use ifc_core::cg2fg::{cg2fg_ctx, cg2fg_expr, check_cg2fg};
use ifc_core::fg::{fg_eval, fg_typecheck, FgEnv};
use ifc_core::fg2cg::{check_fg2cg, fg2cg_ctx, fg2cg_expr};
use ifc_core::heap::Heap;
use ifc_core::surface::{parse_label, parse_lattice, parse_source_with, ParseError, Printer, Program, SourceFile};
use ifc_core::{EvalError, Label, Lattice, TranslateError, TypeError, DEFAULT_FUEL};
use ifc_harness::ni::{ni_check_source, NiConfig, NiError, Verdict};

#[derive(Parser)]
#[command(name = "ifc", version, about = "Fine- and coarse-grained information-flow calculi")]
struct Cli {
    /// Lattice to use instead of the one a file declares, e.g. `2pt` or
    /// `(powerset a b)`. Fuzzing defaults to `2pt`.
    #[arg(long, global = true)]
    lattice: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Lang {
    Fg,
    Cg,
}

impl Lang {
    fn name(self) -> &'static str {
        match self {
            Lang::Fg => "fg",
            Lang::Cg => "cg",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Fg2cg,
    Cg2fg,
}

impl Direction {
    fn source(self) -> Lang {
        match self {
            Direction::Fg2cg => Lang::Fg,
            Direction::Cg2fg => Lang::Cg,
        }
    }

    fn from_source(lang: Lang) -> Self {
        match lang {
            Lang::Fg => Direction::Fg2cg,
            Lang::Cg => Direction::Cg2fg,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Direction::Fg2cg => "fg2cg",
            Direction::Cg2fg => "cg2fg",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the principal type of a program, or the first type error.
    Typecheck {
        file: PathBuf,
        /// Fail unless the file is in this language.
        #[arg(long, value_enum)]
        lang: Option<Lang>,
        /// Program counter for FG programs (default: bottom).
        #[arg(long)]
        pc: Option<String>,
    },
    /// Run a closed program.
    Eval {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Also run the computation a CG program evaluates to.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        pc: Option<String>,
    },
    /// Print the translation of a program into the other language.
    Translate {
        file: PathBuf,
        /// Defaults to the direction out of the file's language.
        #[arg(long, value_enum)]
        dir: Option<Direction>,
        /// Typecheck the output against the translated type.
        #[arg(long)]
        check: bool,
        /// Program counter for FG sources (default: bottom).
        #[arg(long)]
        pc: Option<String>,
    },
    /// Test noninterference for the single secret a file's context declares.
    NiCheck {
        file: PathBuf,
        /// Defaults to the declared label of the secret.
        #[arg(long)]
        secret_label: Option<String>,
        /// Defaults to bottom.
        #[arg(long)]
        observer: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, env = "IFC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Program counter for FG programs (default: bottom).
        #[arg(long)]
        pc: Option<String>,
    },
    /// Generate programs and run the oracles over them.
    Fuzz(fuzz::FuzzArgs),
}

/// A failed command: its exit code and the records explaining why.
pub struct Failure {
    pub code: u8,
    pub records: Vec<String>,
}

impl Failure {
    pub fn new(code: u8, kind: &str, message: impl std::fmt::Display) -> Self {
        Failure { code, records: vec![format!("error={kind}"), format!("message={}", one_line(&message.to_string()))] }
    }

    fn with(mut self, record: String) -> Self {
        self.records.insert(1, record);
        self
    }
}

impl From<TypeError> for Failure {
    fn from(e: TypeError) -> Self {
        Failure::new(1, "type", &e.message).with(format!("rule={}", e.rule))
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Timeout(steps) => Failure::new(3, "timeout", &e).with(format!("steps={steps}")),
            EvalError::Stuck(_) => Failure::new(5, "stuck", &e),
        }
    }
}

impl From<TranslateError> for Failure {
    fn from(e: TranslateError) -> Self {
        match e {
            TranslateError::Source(t) => t.into(),
            TranslateError::Invariant(_) => Failure::new(4, "translation", &e),
        }
    }
}

impl From<NiError> for Failure {
    fn from(e: NiError) -> Self {
        match e {
            NiError::Precondition(t) => t.into(),
            NiError::Config(..) | NiError::Secret(..) | NiError::Subject(..) => Failure::new(1, "precondition", &e),
            NiError::Stuck(_) | NiError::Translate(_) => Failure::new(5, "oracle", &e),
        }
    }
}

pub fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn parse_failure(what: &str, e: ParseError) -> Failure {
    Failure::new(2, "parse", &e.message).with(format!("at={what}:{}", e.pos))
}

pub type Outcome = Result<(), Failure>;

pub fn lattice_override(text: Option<&str>) -> Result<Option<Lattice>, Failure> {
    text.map(|t| parse_lattice(t).map_err(|e| parse_failure("--lattice", e))).transpose()
}

fn load(path: &Path, lattice: Option<&Lattice>) -> Result<SourceFile, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::new(2, "io", e).with(format!("file={}", path.display())))?;
    parse_source_with(&text, lattice).map_err(|e| parse_failure(&path.display().to_string(), e))
}

fn label(lattice: &Lattice, flag: &str, text: Option<&str>) -> Result<Option<Label>, Failure> {
    text.map(|t| parse_label(lattice, t).map_err(|e| parse_failure(flag, e))).transpose()
}

fn check_lang(file: &SourceFile, want: Lang) -> Outcome {
    if file.program.language() == want.name() {
        Ok(())
    } else {
        Err(Failure::new(2, "usage", format!("expected a {} program, found {}", want.name(), file.program.language())))
    }
}

fn typecheck(file: &SourceFile, lang: Option<Lang>, pc: Option<&str>) -> Outcome {
    if let Some(lang) = lang {
        check_lang(file, lang)?;
    }
    let lat = &file.lattice;
    let p = Printer::new(lat);
    println!("lang={}", file.program.language());
    match &file.program {
        Program::Fg { ctx, body } => {
            let pc = label(lat, "--pc", pc)?.unwrap_or(lat.bot());
            let t = fg_typecheck(lat, ctx, pc, body)?;
            println!("pc={}", p.label(pc));
            println!("type={}", p.fg_type(&t));
        }
        Program::Cg { ctx, body } => {
            let t = cg_typecheck(lat, ctx, body)?;
            println!("type={}", p.cg_type(&t));
        }
    }
    Ok(())
}

fn require_closed(empty: bool) -> Outcome {
    if empty {
        Ok(())
    } else {
        Err(Failure::new(1, "precondition", "eval needs a closed program; remove the (ctx ...) declaration"))
    }
}

fn print_heap<V: std::fmt::Display>(heap: &Heap<V>) {
    println!("heap_cells={}", heap.len());
    for (loc, v) in heap.iter() {
        println!("heap.{}={v}", loc.0);
    }
}

fn eval(file: &SourceFile, fuel: u64, force: bool, pc: Option<&str>) -> Outcome {
    let lat = &file.lattice;
    match &file.program {
        Program::Fg { ctx, body } => {
            require_closed(ctx.is_empty())?;
            let pc = label(lat, "--pc", pc)?.unwrap_or(lat.bot());
            fg_typecheck(lat, ctx, pc, body)?;
            let out = fg_eval(Heap::new(), body, &FgEnv::new(), fuel)?;
            println!("value={}", out.value);
            println!("steps={}", out.steps);
            print_heap(&out.heap);
        }
        Program::Cg { ctx, body } => {
            require_closed(ctx.is_empty())?;
            let t = cg_typecheck(lat, ctx, body)?;
            if force && matches!(t, CgType::Slio(..)) {
                let out = cg_run(Heap::new(), body, &CgEnv::new(), fuel)?;
                println!("value={}", out.value);
                println!("steps={}", out.steps);
                print_heap(&out.heap);
            } else {
                let (value, steps) = cg_eval_pure(body, &CgEnv::new(), fuel)?;
                println!("value={value}");
                println!("steps={steps}");
                println!("heap_cells=0");
            }
        }
    }
    Ok(())
}

fn translate(file: &SourceFile, dir: Option<Direction>, check: bool, pc: Option<&str>) -> Outcome {
    let lat = &file.lattice;
    if let Some(dir) = dir {
        check_lang(file, dir.source())?;
    }
    let p = Printer::new(lat);
    match &file.program {
        Program::Fg { ctx, body } => {
            let pc = label(lat, "--pc", pc)?.unwrap_or(lat.bot());
            let r = fg2cg_expr(lat, ctx, pc, body)?;
            let out = SourceFile {
                lattice: lat.clone(),
                program: Program::Cg { ctx: fg2cg_ctx(ctx), body: r.target.clone() },
            };
            println!("{}", p.source_file(&out).trim_end());
            if check {
                let t = check_fg2cg(lat, ctx, &r)?;
                println!("; check=ok type={}", p.cg_type(&t));
            }
        }
        Program::Cg { ctx, body } => {
            let r = cg2fg_expr(lat, ctx, body)?;
            let out = SourceFile {
                lattice: lat.clone(),
                program: Program::Fg { ctx: cg2fg_ctx(lat, ctx), body: r.target.clone() },
            };
            println!("{}", p.source_file(&out).trim_end());
            if check {
                let t = check_cg2fg(lat, ctx, &r)?;
                println!("; check=ok type={}", p.fg_type(&t));
            }
        }
    }
    Ok(())
}

struct NiFlags<'a> {
    secret_label: Option<&'a str>,
    observer: Option<&'a str>,
    pc: Option<&'a str>,
    samples: usize,
    seed: u64,
    fuel: u64,
}

fn ni_check(file: &SourceFile, flags: NiFlags<'_>) -> Outcome {
    let lat = &file.lattice;
    let (x, declared) = ifc_harness::ni::declared_secret(file)?;
    let secret = label(lat, "--secret-label", flags.secret_label)?.unwrap_or(declared);
    let observer = label(lat, "--observer", flags.observer)?.unwrap_or(lat.bot());
    let pc = label(lat, "--pc", flags.pc)?.unwrap_or(lat.bot());
    let cfg =
        NiConfig { samples: flags.samples, seed: flags.seed, fuel: flags.fuel, ..NiConfig::new(secret, observer) };
    let p = Printer::new(lat);
    let verdict = ni_check_source(file, pc, &cfg)?;
    println!("secret={x}");
    println!("secret_label={}", p.label(secret));
    println!("observer={}", p.label(observer));
    println!("{verdict}");
    match &verdict {
        Verdict::Pass { pairs, timeouts } => {
            println!("summary=all {pairs} pairs of terminating runs agreed ({timeouts} pairs timed out)");
            Ok(())
        }
        Verdict::Inconclusive { timeouts } => {
            println!("summary=no pair had two terminating runs ({timeouts} pairs timed out)");
            Ok(())
        }
        Verdict::Counterexample(c) => {
            println!("program={}", one_line(&c.program));
            println!("summary=two secrets produced different observable results");
            Err(Failure { code: 5, records: vec!["error=counterexample".into()] })
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let lattice = lattice_override(cli.lattice.as_deref())?;
    let lattice = lattice.as_ref();
    match cli.command {
        Command::Typecheck { file, lang, pc } => typecheck(&load(&file, lattice)?, lang, pc.as_deref()),
        Command::Eval { file, fuel, force, pc } => eval(&load(&file, lattice)?, fuel, force, pc.as_deref()),
        Command::Translate { file, dir, check, pc } => translate(&load(&file, lattice)?, dir, check, pc.as_deref()),
        Command::NiCheck { file, secret_label, observer, samples, seed, fuel, pc } => {
            let flags = NiFlags {
                secret_label: secret_label.as_deref(),
                observer: observer.as_deref(),
                pc: pc.as_deref(),
                samples,
                seed,
                fuel,
            };
            ni_check(&load(&file, lattice)?, flags)
        }
        Command::Fuzz(args) => fuzz::fuzz(lattice.cloned().unwrap_or_else(Lattice::two_point), &args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            for r in &f.records {
                eprintln!("{r}");
            }
            ExitCode::from(f.code)
        }
    }
}
