use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use iwafit_core::complex::phi;
use iwafit_core::fitting::{fitt, sf, shift_fitt};
use iwafit_core::ring::BaseFromSpec;
use iwafit_core::serial::{
    self, complex_from_doc, ideal_from_doc, ideal_to_doc, module_from_doc, module_to_doc, AnyRing, ComplexDoc,
    IdealDoc, ModeVisitor, ModuleDoc, ScenarioDoc,
};
use iwafit_core::suites::{run_scenario, run_suite, SuiteOptions, SuiteReport};
use iwafit_core::{arith, Error, FracIdeal, Precision, Ring};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "iwafit", version, about = "Fitting ideals and determinants over group rings and truncated Iwasawa algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of cases for `verify` suites.
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Truncation `N,M` overriding the input or suite default.
    #[arg(long, global = true, value_parser = parse_precision)]
    precision: Option<(u32, u32)>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Initial Fitting ideal of a module file.
    Fitt {
        #[arg(long)]
        input: PathBuf,
    },
    /// Shifted Fitting ideal `Fitt^[n]` of a torsion module file.
    ShiftFitt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// `SF^(n)` of a module of finite projective dimension.
    Sf {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        n: i64,
    },
    /// Determinant of a complex file.
    Det {
        #[arg(long)]
        input: PathBuf,
    },
    /// Two-term decomposition of a complex in K_0.
    K0Reduce {
        #[arg(long)]
        input: PathBuf,
    },
    /// Applies the Euler-factor ledger to the places of a scenario file.
    Ledger {
        #[arg(long)]
        input: PathBuf,
    },
    /// Runs a named suite, or the checks of a scenario file.
    Verify {
        /// thm104 | thm81 | prop22 | lemma79 | prop88 | cor41 | lemma46 | ledger | all
        name: Option<String>,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn parse_precision(s: &str) -> Result<(u32, u32), String> {
    let (n, m) = s.split_once(',').ok_or("expected N,M")?;
    let n = n.trim().parse::<u32>().map_err(|e| e.to_string())?;
    let m = m.trim().parse::<u32>().map_err(|e| e.to_string())?;
    if n == 0 || m == 0 {
        return Err("N and M must be positive".into());
    }
    Ok((n, m))
}

/// How a run ended; maps onto the process exit code.
enum Failure {
    /// Unreadable or invalid input (exit 2).
    Input(String),
    /// A computation error (exit 1).
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidRing(_)
            | Error::Dimension(_)
            | Error::MixedRings
            | Error::NotAComplex(_)
            | Error::NotExact(_)
            | Error::NotWellDefined(_)
            | Error::NotSurjective
            | Error::InvalidHom(_) => Failure::Input(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, ok)) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
            let written = match &cli.common.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// The report and whether every verdict in it passed.
fn run(cli: &Cli) -> Result<(Value, bool), Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::Verify { name, suite, input } => verify(common, name.as_deref().or(suite.as_deref()), input.as_deref()),
        Command::Fitt { input } => single(common, "fitt", input, json!({}), Op::Fitt),
        Command::ShiftFitt { input, n } => single(common, "shift-fitt", input, json!({ "n": n }), Op::ShiftFitt(*n)),
        Command::Sf { input, n } => single(common, "sf", input, json!({ "n": n }), Op::Sf(*n)),
        Command::Det { input } => single(common, "det", input, json!({}), Op::Det),
        Command::K0Reduce { input } => single(common, "k0-reduce", input, json!({}), Op::K0Reduce),
        Command::Ledger { input } => single(common, "ledger", input, json!({}), Op::Ledger),
    }
}

fn read_document(path: &Path, precision: Option<(u32, u32)>) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if let Some((n, m)) = precision {
        override_precision(&mut doc, n, m);
    }
    Ok(doc)
}

/// Sets the truncation of every truncated `ring` object, including those of
/// nested documents such as a ledger's base ideal.
fn override_precision(doc: &mut Value, n: u32, m: u32) {
    match doc {
        Value::Object(map) => {
            if let Some(ring) = map.get_mut("ring") {
                if ring.get("mode").and_then(Value::as_str) == Some("truncated") {
                    ring["precision"] = json!([n, m]);
                }
            }
            map.values_mut().for_each(|v| override_precision(v, n, m));
        }
        Value::Array(items) => items.iter_mut().for_each(|v| override_precision(v, n, m)),
        _ => {}
    }
}

fn verify(common: &Common, name: Option<&str>, input: Option<&Path>) -> Result<(Value, bool), Failure> {
    let mut inputs = json!({ "seed": common.seed });
    let reports: Vec<SuiteReport> = match (name, input) {
        (_, Some(path)) => {
            inputs["input"] = json!(path.display().to_string());
            let doc = read_document(path, common.precision)?;
            let ring = AnyRing::from_document(&doc)?;
            let scenario: ScenarioDoc = serial::parse_json(&doc)?;
            vec![ring.dispatch(ScenarioRun(&scenario))?]
        }
        (Some(name), None) => {
            inputs["suite"] = json!(name);
            inputs["cases"] = json!(common.cases);
            inputs["precision"] = json!(common.precision.map(|(n, m)| [n, m]));
            let opts = SuiteOptions { seed: common.seed, cases: common.cases, precision: common.precision };
            run_suite(name, &opts)?
        }
        (None, None) => return Err(Failure::Input("verify needs a suite name or --input".into())),
    };
    let ok = reports.iter().all(SuiteReport::all_passed);
    let report = json!({
        "schema": SCHEMA,
        "op": "verify",
        "inputs": inputs,
        "passed": ok,
        "suites": reports,
    });
    Ok((report, ok))
}

struct ScenarioRun<'a>(&'a ScenarioDoc);

impl ModeVisitor for ScenarioRun<'_> {
    type Output = iwafit_core::Result<SuiteReport>;
    fn visit<B: BaseFromSpec>(self, ring: &Arc<Ring<B>>) -> Self::Output {
        run_scenario(ring, self.0)
    }
}

#[derive(Clone, Copy)]
enum Op {
    Fitt,
    ShiftFitt(usize),
    Sf(i64),
    Det,
    K0Reduce,
    Ledger,
}

struct OpRun<'a> {
    op: Op,
    doc: &'a Value,
}

/// Fields of a single-operation report besides `schema`, `op` and `inputs`.
struct OpResult {
    fields: Value,
    ok: bool,
}

fn ideal_fields<B: iwafit_core::BaseRing>(ideal: &FracIdeal<B>) -> Value {
    json!({
        "ideal_normal_form": ideal.to_canonical_string(),
        "ideal": ideal_to_doc(ideal),
        "effective_precision": precision_json(ideal.precision()),
    })
}

fn precision_json(p: Option<Precision>) -> Value {
    json!(p.map(|p| [p.p_adic, p.degree]))
}

impl ModeVisitor for OpRun<'_> {
    type Output = iwafit_core::Result<OpResult>;

    fn visit<B: BaseFromSpec>(self, ring: &Arc<Ring<B>>) -> Self::Output {
        let doc = self.doc;
        let module = || -> iwafit_core::Result<_> { module_from_doc(ring, &serial::parse_json::<ModuleDoc>(doc)?) };
        let complex = || -> iwafit_core::Result<_> { complex_from_doc(ring, &serial::parse_json::<ComplexDoc>(doc)?) };
        let done = |ideal: FracIdeal<B>| OpResult { fields: ideal_fields(&ideal), ok: true };
        match self.op {
            Op::Fitt => Ok(done(fitt(&module()?))),
            Op::ShiftFitt(n) => Ok(done(shift_fitt(&module()?, n)?)),
            Op::Sf(n) => Ok(done(sf(&module()?, n)?)),
            Op::Det => Ok(done(complex()?.det_ideal()?)),
            Op::K0Reduce => {
                let c = complex()?;
                let det = c.det_ideal()?;
                let terms = c.k0_reduce()?;
                // Det(F) = prod Det(phi(M_j))^{sign_j} = prod Fitt(M_j)^{-sign_j}
                let mut product = FracIdeal::unit(ring);
                for (m, sign) in &terms {
                    product = product.multiply(&phi(m)?.det_ideal()?.pow(*sign)?)?;
                }
                let verdict = product.compare(&det)?;
                let mut fields = ideal_fields(&det);
                fields["terms"] = json!(terms
                    .iter()
                    .map(|(m, sign)| json!({ "sign": sign, "module": module_to_doc(m) }))
                    .collect::<Vec<_>>());
                fields["consistent"] = json!(verdict.holds);
                fields["effective_precision"] = precision_json(verdict.precision);
                Ok(OpResult { fields, ok: verdict.holds })
            }
            Op::Ledger => {
                let scenario: ScenarioDoc = serial::parse_json(doc)?;
                let base = match doc.get("base") {
                    Some(b) => ideal_from_doc(ring, &serial::parse_json::<IdealDoc>(b)?)?,
                    None => FracIdeal::unit(ring),
                };
                let places = scenario
                    .places
                    .iter()
                    .map(|p| serial::place_from_doc(ring, p))
                    .collect::<iwafit_core::Result<Vec<_>>>()?;
                let with_norm: Vec<_> = places.iter().filter(|p| p.norm.is_some() && p.frobenius.is_some()).cloned().collect();
                let with_frob: Vec<_> = places.iter().filter(|p| p.frobenius.is_some()).cloned().collect();
                let factored = arith::ledger_apply_eq100(&base, &with_norm)?;
                let enlarged = arith::ledger_apply_eq101(&base, &with_frob)?;
                Ok(OpResult {
                    fields: json!({
                        "base": ideal_fields(&base),
                        "euler_factors": ideal_fields(&factored),
                        "enlarged": ideal_fields(&enlarged),
                    }),
                    ok: true,
                })
            }
        }
    }
}

fn single(common: &Common, name: &str, input: &Path, extra: Value, op: Op) -> Result<(Value, bool), Failure> {
    let doc = read_document(input, common.precision)?;
    let ring = AnyRing::from_document(&doc)?;
    let result = ring.dispatch(OpRun { op, doc: &doc })?;
    let mut inputs = json!({ "input": input.display().to_string(), "seed": common.seed });
    if let (Value::Object(a), Value::Object(b)) = (&mut inputs, extra) {
        a.extend(b);
    }
    let mut report = json!({ "schema": SCHEMA, "op": name, "inputs": inputs });
    if let (Value::Object(r), Value::Object(f)) = (&mut report, result.fields) {
        r.extend(f);
    }
    Ok((report, result.ok))
}
