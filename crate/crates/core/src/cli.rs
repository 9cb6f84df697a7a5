//! Model files and the commands behind the `bifree` binary.
//!
//! Commands return an [`Outcome`] (exit code plus stdout text) so they can be
//! driven from tests without spawning a process. Exit codes: 0 success,
//! 1 positivity or verification failure, 2 parse/validation error,
//! 3 hypothesis failure in `verify-theorem`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bifree::{BiFreeSystem, Config, LocalElement};
use crate::component::{check_component_rp_capped, local_words, MatrixModel};
use crate::error::{Error, Result};
use crate::fock::FreeProductSpace;
use crate::ncpoly::{Letter, NCPoly, Scalar, Word};
use crate::positivity::{quadratic_form, verify_theorem, GramReport, TheoremStatus};
use crate::random;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

/// Agreement required between the evaluator and the Fock-space oracle.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub dim: usize,
    /// Each matrix as rows of `[re, im]` entries.
    pub generators: Vec<Vec<Vec<[f64; 2]>>>,
    pub state: StateSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Schmidt(Vec<f64>),
    Vector(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub max_word_len: usize,
    pub psd_tol: f64,
    pub moment_tol: f64,
    pub term_cap: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self { max_word_len: 2, psd_tol: 1e-8, moment_tol: 1e-9, term_cap: 200_000, seed: 42 }
    }
}

fn to_pair(z: Scalar) -> [f64; 2] {
    [z.re, z.im]
}

fn from_pair(p: [f64; 2]) -> Scalar {
    Scalar::new(p[0], p[1])
}

impl ComponentSpec {
    pub fn from_model(m: &MatrixModel) -> Self {
        let d = m.dim();
        let generators = m
            .generators()
            .iter()
            .map(|g| (0..d).map(|r| (0..d).map(|c| to_pair(g[(r, c)])).collect()).collect())
            .collect();
        Self { dim: d, generators, state: StateSpec::Vector(m.state().iter().map(|z| to_pair(*z)).collect()) }
    }

    pub fn to_model(&self) -> Result<MatrixModel> {
        let d = self.dim;
        let mut gens = Vec::with_capacity(self.generators.len());
        for (k, rows) in self.generators.iter().enumerate() {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidModel(format!("generator {k} is not {d}×{d}")));
            }
            gens.push(DMatrix::from_fn(d, d, |r, c| from_pair(rows[r][c])));
        }
        match &self.state {
            StateSpec::Schmidt(w) => {
                if w.len() != d {
                    return Err(Error::InvalidModel(format!("{} Schmidt weights for dimension {d}", w.len())));
                }
                MatrixModel::with_schmidt(gens, w)
            }
            StateSpec::Vector(v) => {
                let state = DVector::from_iterator(v.len(), v.iter().map(|p| from_pair(*p)));
                MatrixModel::new(d, gens, state)
            }
        }
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidModel(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    pub fn from_models(models: &[MatrixModel], options: Options) -> Self {
        Self { components: models.iter().map(ComponentSpec::from_model).collect(), options }
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidModel("no components".into()));
        }
        let o = &self.options;
        if !(o.psd_tol.is_finite() && o.psd_tol >= 0.0 && o.moment_tol.is_finite() && o.moment_tol >= 0.0) {
            return Err(Error::InvalidModel("tolerances must be finite and nonnegative".into()));
        }
        self.models().map(|_| ())
    }

    pub fn models(&self) -> Result<Vec<MatrixModel>> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_model().map_err(|e| Error::InvalidModel(format!("component {i}: {e}"))))
            .collect()
    }

    pub fn config(&self) -> Config {
        Config {
            term_cap: self.options.term_cap,
            moment_tol: self.options.moment_tol,
            psd_tol: self.options.psd_tol,
            ..Config::default()
        }
    }

    pub fn system(&self) -> Result<BiFreeSystem> {
        Ok(BiFreeSystem::from_models(&self.models()?, self.config()))
    }
}

/// Parses whitespace-separated letters `i.g` (positive) and `~i.g`
/// (reflected), in operator order. The empty string is the unit word.
pub fn parse_word(spec: &str) -> Result<Word> {
    let mut letters = Vec::new();
    for tok in spec.split_whitespace() {
        let (reflected, body) = match tok.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, tok),
        };
        let (i, g) = body
            .split_once('.')
            .ok_or_else(|| Error::WordSyntax(format!("`{tok}` is not of the form i.g or ~i.g")))?;
        let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::WordSyntax(format!("bad index in `{tok}`")));
        let (i, g) = (parse(i)?, parse(g)?);
        letters.push(if reflected { Letter::refl(i, g) } else { Letter::pos(i, g) });
    }
    Ok(Word::new(letters))
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s }
    };
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').expect("exponent present");
        format!("{}e{}", trim(mantissa.to_string()), e)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    }
}

/// `re±im i` with 12 significant digits.
pub fn format_complex(z: Scalar) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", format_sig(z.re, 12), sign, format_sig(z.im.abs(), 12))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

#[derive(Debug, Parser)]
#[command(name = "bifree", version, about = "Bi-free products and reflection positivity")]
pub struct Cli {
    /// Emit a JSON report on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// JSON model file.
    pub model: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check each component's functional for reflection positivity.
    CheckRp {
        #[command(flatten)]
        model: ModelArg,
        /// Check only this component.
        #[arg(long, conflicts_with = "all")]
        component: Option<usize>,
        /// Check every component (the default).
        #[arg(long)]
        all: bool,
        /// Longest word in the basis (default: the model file's max_word_len).
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Evaluate the product state on one word.
    Moment {
        #[command(flatten)]
        model: ModelArg,
        /// Letters `i.g` or `~i.g`, whitespace-separated, in operator order.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Also evaluate through the free-product Hilbert space.
        #[arg(long)]
        verify: bool,
    },
    /// Gram matrix of the product state over positive words.
    Gram {
        #[command(flatten)]
        model: ModelArg,
        /// Longest word in the basis (default: the model file's max_word_len).
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Check reflection positivity of the bi-free product.
    VerifyTheorem {
        #[command(flatten)]
        model: ModelArg,
        /// Longest word in the basis (default: the model file's max_word_len).
        #[arg(long)]
        max_len: Option<usize>,
        /// Random positive elements to test.
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Compare the evaluator with the Fock-space oracle on random words.
    OracleCompare {
        #[command(flatten)]
        model: ModelArg,
        /// Number of random words.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Longest random word.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
}

impl Command {
    fn model_path(&self) -> &Path {
        match self {
            Command::CheckRp { model, .. }
            | Command::Moment { model, .. }
            | Command::Gram { model, .. }
            | Command::VerifyTheorem { model, .. }
            | Command::OracleCompare { model, .. } => &model.model,
        }
    }
}

/// Caps the rayon pool at `BIFREE_THREADS` workers when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("BIFREE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Loads the model and runs the command. Errors surface as exit code 2 with
/// the message on stdout's sibling, which the binary prints to stderr.
pub fn run(cli: &Cli) -> std::result::Result<Outcome, (i32, String)> {
    let file = ModelFile::load(cli.command.model_path()).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    execute(&file, &cli.command, cli.json).map_err(|e| (EXIT_INVALID, e.to_string()))
}

pub fn execute(file: &ModelFile, command: &Command, json: bool) -> Result<Outcome> {
    match command {
        Command::CheckRp { component, max_len, .. } => check_rp(file, *component, *max_len, json),
        Command::Moment { word, verify, .. } => moment(file, word, *verify, json),
        Command::Gram { max_len, .. } => gram(file, *max_len, json),
        Command::VerifyTheorem { max_len, trials, .. } => theorem(file, *max_len, *trials, json),
        Command::OracleCompare { count, max_len, .. } => oracle_compare(file, *count, *max_len, json),
    }
}

fn envelope(command: &str, options: &Options, args: serde_json::Value, result: serde_json::Value) -> String {
    let v = json!({
        "tool": "bifree",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "options": options,
        "args": args,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

fn resolved(file: &ModelFile, max_len: Option<usize>) -> Options {
    let mut o = file.options.clone();
    if let Some(l) = max_len {
        o.max_word_len = l;
    }
    o
}

fn pairs(v: &DVector<Scalar>) -> Vec<[f64; 2]> {
    v.iter().map(|z| to_pair(*z)).collect()
}

fn gram_json(r: &GramReport) -> serde_json::Value {
    json!({
        "basis_size": r.dim(),
        "min_eig": r.min_eig,
        "hermitian_defect": r.hermitian_defect,
        "psd": r.psd,
        "witness": r.witness.as_ref().map(pairs),
        "witness_basis": r.witness.as_ref().map(|_| r.basis.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
        "witness_quadratic_form": r.witness.as_ref().map(|w| to_pair(quadratic_form(&r.matrix, w))),
    })
}

pub fn check_rp(file: &ModelFile, component: Option<usize>, max_len: Option<usize>, json: bool) -> Result<Outcome> {
    let options = resolved(file, max_len);
    let sys = file.system()?;
    let indices: Vec<usize> = match component {
        Some(i) => {
            sys.component(i)?;
            vec![i]
        }
        None => (0..sys.num_components()).collect(),
    };
    let mut entries = Vec::new();
    let mut text = String::new();
    let mut all_pass = true;
    for &i in &indices {
        let oracle = sys.component(i)?;
        let r = check_component_rp_capped(oracle, i, options.max_word_len, options.psd_tol, sys.config().basis_cap)?;
        // re-evaluate the witness as τ_i(θ(a)a) from raw moments
        let witness_value = match &r.witness {
            Some(w) => {
                let mut a = LocalElement::zero(i);
                for (word, c) in local_words(oracle.num_generators(), options.max_word_len).into_iter().zip(w.iter()) {
                    a.add_term(word, *c);
                }
                Some(sys.local_pairing(&a, &a)?)
            }
            None => None,
        };
        all_pass &= r.psd;
        text.push_str(&format!(
            "component {i}: basis {} min_eig {} hermitian_defect {} {}\n",
            r.dim(),
            format_sig(r.min_eig, 6),
            format_sig(r.hermitian_defect, 6),
            if r.psd { "PASS" } else { "FAIL" }
        ));
        if let Some(v) = witness_value {
            text.push_str(&format!("  witness tau(theta(a)a) = {}\n", format_complex(v)));
        }
        let mut g = gram_json(&r);
        g["component"] = json!(i);
        g["witness_value"] = json!(witness_value.map(to_pair));
        entries.push(g);
    }
    let code = if all_pass { EXIT_OK } else { EXIT_FAIL };
    let stdout = if json {
        envelope(
            "check-rp",
            &options,
            json!({ "component": component }),
            json!({ "passed": all_pass, "components": entries }),
        )
    } else {
        text
    };
    Ok(Outcome { code, stdout })
}

pub fn moment(file: &ModelFile, spec: &str, verify: bool, json: bool) -> Result<Outcome> {
    let options = file.options.clone();
    let sys = file.system()?;
    let word = parse_word(spec)?;
    let value = sys.evaluate_word(&word)?;
    let mut code = EXIT_OK;
    let mut oracle = None;
    if verify {
        let models = file.models()?;
        let p = NCPoly::monomial(word.clone(), Scalar::new(1.0, 0.0));
        let o = FreeProductSpace::for_poly(&models, &p)?.oracle_tau(&p)?;
        if (o - value).norm() > ORACLE_TOL {
            code = EXIT_FAIL;
        }
        oracle = Some(o);
    }
    let stdout = if json {
        envelope(
            "moment",
            &options,
            json!({ "word": word.to_string(), "verify": verify }),
            json!({
                "value": to_pair(value),
                "oracle": oracle.map(to_pair),
                "difference": oracle.map(|o| (o - value).norm()),
            }),
        )
    } else {
        let mut s = format!("{}\n", format_complex(value));
        if let Some(o) = oracle {
            s.push_str(&format!("oracle {}\n", format_complex(o)));
            s.push_str(&format!("difference {}\n", format_sig((o - value).norm(), 3)));
        }
        s
    };
    Ok(Outcome { code, stdout })
}

pub fn gram(file: &ModelFile, max_len: Option<usize>, json: bool) -> Result<Outcome> {
    let options = resolved(file, max_len);
    let sys = file.system()?;
    let basis = crate::positivity::positive_words(&sys, options.max_word_len)?;
    let r = crate::positivity::build_gram(&sys, &basis)?;
    let code = if r.psd { EXIT_OK } else { EXIT_FAIL };
    let stdout = if json {
        let mut g = gram_json(&r);
        g["basis"] = json!(basis.iter().map(|w| w.to_string()).collect::<Vec<_>>());
        g["matrix"] = json!((0..r.dim())
            .map(|k| (0..r.dim()).map(|l| to_pair(r.matrix[(k, l)])).collect::<Vec<_>>())
            .collect::<Vec<_>>());
        envelope("gram", &options, json!({}), g)
    } else {
        format!(
            "basis {} min_eig {} hermitian_defect {} {}\n",
            r.dim(),
            format_sig(r.min_eig, 6),
            format_sig(r.hermitian_defect, 6),
            if r.psd { "PSD" } else { "NOT PSD" }
        )
    };
    Ok(Outcome { code, stdout })
}

pub fn theorem(file: &ModelFile, max_len: Option<usize>, trials: usize, json: bool) -> Result<Outcome> {
    let options = resolved(file, max_len);
    let sys = file.system()?;
    let report = verify_theorem(&sys, options.max_word_len, trials, options.psd_tol, options.seed)?;
    let (code, status) = match report.status {
        TheoremStatus::Pass => (EXIT_OK, "pass"),
        TheoremStatus::TheoremFailure => (EXIT_FAIL, "theorem-failure"),
        TheoremStatus::HypothesisFailure => (EXIT_HYPOTHESIS, "hypothesis-failure"),
    };
    let stdout = if json {
        let components: Vec<_> = report
            .components
            .iter()
            .map(|c| {
                json!({
                    "component": c.component,
                    "min_eig": c.min_eig,
                    "hermitian_defect": c.hermitian_defect,
                    "psd": c.psd,
                })
            })
            .collect();
        let mut g = gram_json(&report.gram);
        g["witness_value"] = json!(report.witness_value.map(to_pair));
        envelope(
            "verify-theorem",
            &options,
            json!({ "trials": trials }),
            json!({
                "status": status,
                "components": components,
                "gram": g,
                "random": {
                    "trials": report.random.trials,
                    "min_real": report.random.min_real,
                    "max_abs_imag": report.random.max_abs_imag,
                    "passed": report.random.passed,
                },
            }),
        )
    } else {
        let mut s = String::new();
        for c in &report.components {
            s.push_str(&format!(
                "component {}: min_eig {} {}\n",
                c.component,
                format_sig(c.min_eig, 6),
                if c.psd { "RP" } else { "NOT RP" }
            ));
        }
        s.push_str(&format!(
            "product gram: basis {} min_eig {} {}\n",
            report.gram.dim(),
            format_sig(report.gram.min_eig, 6),
            if report.gram.psd { "PSD" } else { "NOT PSD" }
        ));
        if let Some(v) = report.witness_value {
            s.push_str(&format!("  witness tau(theta(a)a) = {}\n", format_complex(v)));
        }
        s.push_str(&format!(
            "random elements: {} trials, min Re {} max |Im| {} {}\n",
            report.random.trials,
            format_sig(report.random.min_real, 6),
            format_sig(report.random.max_abs_imag, 6),
            if report.random.passed { "PASS" } else { "FAIL" }
        ));
        s.push_str(&format!("status: {status}\n"));
        s
    };
    Ok(Outcome { code, stdout })
}

pub fn oracle_compare(file: &ModelFile, count: usize, max_len: usize, json: bool) -> Result<Outcome> {
    let options = file.options.clone();
    let models = file.models()?;
    let sys = file.system()?;
    let space = FreeProductSpace::build(&models, max_len.max(1))?;
    let symmetric = models.iter().all(|m| m.is_theta_symmetric(1e-9));
    let gens = sys.generator_counts();
    let mut rng = random::rng(options.seed);
    let mut max_diff: f64 = 0.0;
    let mut failures = 0usize;
    for _ in 0..count {
        let len = rand::Rng::random_range(&mut rng, 0..=max_len);
        let w = random::word(&mut rng, &gens, len, true);
        let v = sys.evaluate_word(&w)?;
        let o = space.oracle_tau(&NCPoly::monomial(w, Scalar::new(1.0, 0.0)))?;
        let d = (v - o).norm();
        max_diff = max_diff.max(d);
        if d > ORACLE_TOL {
            failures += 1;
        }
    }
    let code = if failures == 0 { EXIT_OK } else { EXIT_FAIL };
    let stdout = if json {
        envelope(
            "oracle-compare",
            &options,
            json!({ "count": count, "max_len": max_len }),
            json!({
                "max_difference": max_diff,
                "failures": failures,
                "tolerance": ORACLE_TOL,
                "theta_symmetric_states": symmetric,
            }),
        )
    } else {
        let mut s = format!(
            "{count} words, max |evaluator - oracle| = {}, failures {failures}\n",
            format_sig(max_diff, 3)
        );
        if !symmetric {
            s.push_str("note: some component has tau(theta(x)) != conj(tau(x)); the oracle does not apply\n");
        }
        s
    };
    Ok(Outcome { code, stdout })
}
