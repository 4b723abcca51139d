//! Command-line surface: argument parsing, file IO, deterministic JSON/CSV
//! emission and the exit-code contract (0 success, 2 input error,
//! 3 mathematical inconsistency).

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::charring::{decompose_into_k, weyl_character, FormalCharacter, TermOrder};
use crate::diagram;
use crate::fixedpoint::{fixture_from_json, pair_from_spec, FixedPointSet, GroupSpec};
use crate::multiplicity::{
    gp_comparison, guillemin_prato_variant, kostant_branching, multiplicity_spectrum,
    multiplicity_theorem, Window,
};
use crate::quantize::{
    gkrs_multiplet, lie_algebra_form, main_formula_character, CharacterReport, DenomForm,
};
use crate::rootsys::{GroupSide, SubgroupPair, Weight};
use crate::verify::{run_scope, Scope};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "weylquant",
    version,
    about = "Exact characters and multiplicities of quantised Hamiltonian group actions, \
             computed from torus fixed-point data"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupArgs {
    /// Cartan type label, e.g. A2, B2, G2.
    #[arg(long = "type", value_name = "TYPE")]
    cartan_type: String,
    /// A simple root of the subgroup in doubled coordinates, e.g. 4,-2.
    /// Repeat the flag for higher-rank subgroups; omit for K = T.
    #[arg(long = "k-roots", value_name = "COORDS", allow_hyphen_values = true)]
    k_roots: Vec<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an irreducible ambient character into subgroup characters.
    Branch {
        #[command(flatten)]
        group: GroupArgs,
        /// Highest weight in doubled coordinates, e.g. 0,6.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Full character report for a fixed-point data file.
    Character {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Multiplicity of one subgroup highest weight in a fixture.
    Multiplicity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Also evaluate the regular-points-only formula for comparison.
        #[arg(long)]
        gp: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep multiplicities over a window of dominant weights.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Either a radius R (box [-R, R]^rank) or lo1,lo2:hi1,hi2.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Add comparison columns for the regular-points-only formula.
        #[arg(long)]
        gp: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Alternating multiplet of subgroup characters for an irreducible
    /// ambient character, with the identity verified exactly.
    Gkrs {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the built-in cross-validation suite.
    Verify {
        #[arg(long, value_enum, default_value_t = ScopeArg::Quick)]
        scope: ScopeArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit a rank-2 weight diagram as SVG.
    Diagram {
        /// Fixed-point data file; alternatively give --type/--k-roots/--lambda.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long = "type")]
        cartan_type: Option<String>,
        #[arg(long = "k-roots", allow_hyphen_values = true)]
        k_roots: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    if let Ok(v) = std::env::var("WEYLQUANT_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Branch { group, lambda, out } => cmd_branch(group, &lambda, out),
        Command::Character { input, out } => cmd_character(&input, out),
        Command::Multiplicity { input, lambda, gp, out } => {
            cmd_multiplicity(&input, &lambda, gp, out)
        }
        Command::Spectrum { input, window, gp, out } => cmd_spectrum(&input, &window, gp, out),
        Command::Gkrs { group, lambda, out } => cmd_gkrs(group, &lambda, out),
        Command::Verify { scope, out } => cmd_verify(scope, out),
        Command::Diagram { input, cartan_type, k_roots, lambda, window, output } => {
            cmd_diagram(input, cartan_type, k_roots, lambda, window, output)
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

fn parse_weight(s: &str) -> Result<Weight> {
    let coords: std::result::Result<Vec<i64>, _> =
        s.split(',').map(|c| c.trim().parse::<i64>()).collect();
    coords
        .map(Weight)
        .map_err(|_| Error::Config(format!("cannot parse weight coordinates from {s:?}")))
}

fn parse_window(s: &str, rank: usize) -> Result<Window> {
    if let Some((lo, hi)) = s.split_once(':') {
        let lo = parse_weight(lo)?.0;
        let hi = parse_weight(hi)?.0;
        if lo.len() != rank || hi.len() != rank {
            return Err(Error::Config(format!(
                "window bounds must have {rank} coordinates"
            )));
        }
        Ok(Window { lo, hi })
    } else {
        let radius: i64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse window {s:?}")))?;
        Ok(Window::symmetric(rank, radius))
    }
}

fn pair_from_args(group: &GroupArgs) -> Result<SubgroupPair> {
    let roots: Result<Vec<Vec<i64>>> =
        group.k_roots.iter().map(|s| parse_weight(s).map(|w| w.0)).collect();
    pair_from_spec(&GroupSpec { cartan_type: group.cartan_type.clone(), k_simple_roots: roots? })
}

fn load_fixture(path: &Path) -> Result<FixedPointSet> {
    let text = std::fs::read_to_string(path)?;
    fixture_from_json(&text)
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON builders
// ---------------------------------------------------------------------------

fn canonical_order(pair: &SubgroupPair) -> TermOrder {
    TermOrder::new(pair.g.weight_functional(&pair.rho_g))
}

fn char_json(chi: &FormalCharacter, order: &TermOrder) -> serde_json::Value {
    json!(chi.sorted_pairs(order))
}

fn sorted_rows(map: &BTreeMap<Weight, i64>, order: &TermOrder) -> Vec<(Weight, i64)> {
    let mut rows: Vec<(Weight, i64)> = map.iter().map(|(w, &c)| (w.clone(), c)).collect();
    rows.sort_by(|(a, _), (b, _)| order.cmp(b, a));
    rows
}

fn group_json(pair: &SubgroupPair) -> serde_json::Value {
    json!({
        "type": pair.g.cartan_type.to_string(),
        "k_simple_roots": pair.k_simple_roots.iter().map(|w| w.0.clone()).collect::<Vec<_>>(),
    })
}

fn denom_form_label(form: DenomForm) -> &'static str {
    match form {
        DenomForm::Standard => "one_minus_exp_neg",
        DenomForm::Half => "half_difference",
    }
}

fn report_json(
    report: &CharacterReport,
    pair: &SubgroupPair,
    warnings: &[String],
    checks: serde_json::Value,
) -> serde_json::Value {
    let order = canonical_order(pair);
    json!({
        "format": 1,
        "group": group_json(pair),
        "character": char_json(&report.character, &order),
        "numerator": char_json(&report.numerator, &order),
        "denominator_factors":
            report.denominator_factors.iter().map(|w| w.0.clone()).collect::<Vec<_>>(),
        "denominator_form": denom_form_label(report.denominator_form),
        "k_decomposition": sorted_rows(&report.k_decomposition, &order)
            .into_iter()
            .map(|(w, c)| json!({"lambda": w.0, "multiplicity": c}))
            .collect::<Vec<_>>(),
        "per_orbit": report.per_orbit.iter().map(|t| json!({
            "orbit": t.orbit,
            "representative": t.representative,
            "component": t.component,
            "sign": t.sign,
            "k_label_terms": t.k_label_terms.iter()
                .map(|(c, w)| json!([c, w.0])).collect::<Vec<_>>(),
            "numerator": char_json(&t.numerator, &order),
        })).collect::<Vec<_>>(),
        "checks": checks,
        "warnings": warnings,
    })
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_branch(group: GroupArgs, lambda: &str, out: OutputArgs) -> Result<()> {
    let pair = pair_from_args(&group)?;
    let nu = parse_weight(lambda)?;
    if !pair.is_dominant(&nu, GroupSide::Ambient) {
        return Err(Error::Domain(format!(
            "{nu:?} is not dominant for {}",
            pair.g.cartan_type
        )));
    }
    let chi = weyl_character(&pair, &nu, GroupSide::Ambient)?;
    let dec = decompose_into_k(&pair, &chi)?;

    // For regular highest weights the branching specialisation must agree
    // everywhere on the support window.
    let regular = pair.is_strictly_dominant(&nu, GroupSide::Ambient);
    if regular {
        let window = Window::covering_character(&chi);
        for lam in window.integral_weights() {
            if !pair.is_dominant(&lam, GroupSide::Subgroup) {
                continue;
            }
            let expect = dec.get(&lam).copied().unwrap_or(0);
            let got = kostant_branching(&pair, &nu, &lam)?;
            if got != expect {
                return Err(Error::Inconsistency(format!(
                    "branching formula gives {got} at {lam:?} but the character \
                     decomposition gives {expect}"
                )));
            }
        }
    }

    let order = canonical_order(&pair);
    let rows = sorted_rows(&dec, &order);
    let content = match out.format {
        OutputFormat::Json => serde_json::to_string_pretty(&json!({
            "format": 1,
            "group": group_json(&pair),
            "lambda": nu.0,
            "rows": rows.iter()
                .map(|(w, c)| json!({"lambda": w.0, "multiplicity": c}))
                .collect::<Vec<_>>(),
            "kostant_checked": regular,
        }))?,
        OutputFormat::Csv => {
            let mut s = String::from("lambda,multiplicity\n");
            for (w, c) in &rows {
                s.push_str(&format!("{:?},{c}\n", coords_label(w)));
            }
            s
        }
    };
    write_output(out.output.as_deref(), &content)
}

fn coords_label(w: &Weight) -> String {
    w.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_character(input: &Path, out: OutputArgs) -> Result<()> {
    if out.format == OutputFormat::Csv {
        return Err(Error::Config("character reports are JSON only".into()));
    }
    let fps = load_fixture(input)?;
    let report = main_formula_character(&fps)?;
    let half = lie_algebra_form(&fps)?;
    // Both constructors assert their identities internally; reaching this
    // point means every cross-check passed.
    let checks = json!({
        "localization_equal": true,
        "half_form_equal": half.character == report.character,
        "decomposition_roundtrip": true,
    });
    let content = serde_json::to_string_pretty(&report_json(
        &report,
        &fps.pair,
        &fps.warnings,
        checks,
    ))?;
    write_output(out.output.as_deref(), &content)
}

fn cmd_multiplicity(input: &Path, lambda: &str, gp: bool, out: OutputArgs) -> Result<()> {
    if out.format == OutputFormat::Csv {
        return Err(Error::Config("single multiplicities are JSON only".into()));
    }
    let fps = load_fixture(input)?;
    let lam = parse_weight(lambda)?;
    let value = multiplicity_theorem(&fps, &lam)?;
    let mut body = json!({"lambda": lam.0, "multiplicity": value});
    if gp {
        let gp_value = guillemin_prato_variant(&fps, &lam)?;
        body["gp_value"] = json!(gp_value);
        body["delta"] = json!(value - gp_value);
    }
    write_output(out.output.as_deref(), &serde_json::to_string_pretty(&body)?)
}

fn cmd_spectrum(input: &Path, window: &str, gp: bool, out: OutputArgs) -> Result<()> {
    let fps = load_fixture(input)?;
    let window = parse_window(window, fps.rank())?;
    let spectrum = multiplicity_spectrum(&fps, &window)?;
    let order = canonical_order(&fps.pair);
    let mut rows: Vec<serde_json::Value> = Vec::new();
    let mut csv_rows: Vec<String> = Vec::new();
    if gp {
        let table = gp_comparison(&fps, &window)?;
        let mut sorted = table;
        sorted.sort_by(|a, b| order.cmp(&b.lambda, &a.lambda));
        for row in &sorted {
            rows.push(json!({
                "lambda": row.lambda.0,
                "multiplicity": row.multiplicity,
                "gp_value": row.gp_value,
                "delta": row.delta,
            }));
            csv_rows.push(format!(
                "{:?},{},{},{}",
                coords_label(&row.lambda),
                row.multiplicity,
                row.gp_value,
                row.delta
            ));
        }
    } else {
        for (w, c) in sorted_rows(&spectrum, &order) {
            rows.push(json!({"lambda": w.0, "multiplicity": c}));
            csv_rows.push(format!("{:?},{c}", coords_label(&w)));
        }
    }
    let content = match out.format {
        OutputFormat::Json => serde_json::to_string_pretty(&json!({
            "format": 1,
            "window": {"lo": window.lo, "hi": window.hi},
            "rows": rows,
        }))?,
        OutputFormat::Csv => {
            let header =
                if gp { "lambda,multiplicity,gp_value,delta\n" } else { "lambda,multiplicity\n" };
            format!("{header}{}\n", csv_rows.join("\n"))
        }
    };
    write_output(out.output.as_deref(), &content)
}

fn cmd_gkrs(group: GroupArgs, lambda: &str, out: OutputArgs) -> Result<()> {
    if out.format == OutputFormat::Csv {
        return Err(Error::Config("multiplet output is JSON only".into()));
    }
    let pair = pair_from_args(&group)?;
    let lam = parse_weight(lambda)?;
    let multiplet = gkrs_multiplet(&pair, &lam)?;
    let body = json!({
        "format": 1,
        "group": group_json(&pair),
        "lambda": lam.0,
        "c_size": multiplet.multiplet.len(),
        "multiplet": multiplet.multiplet.iter()
            .map(|(sign, w)| json!({"sign": sign, "weight": w.0}))
            .collect::<Vec<_>>(),
        "identity_verified": true,
    });
    write_output(out.output.as_deref(), &serde_json::to_string_pretty(&body)?)
}

fn cmd_verify(scope: ScopeArg, out: OutputArgs) -> Result<()> {
    if out.format == OutputFormat::Csv {
        return Err(Error::Config("verification output is JSON only".into()));
    }
    let scope = match scope {
        ScopeArg::Quick => Scope::Quick,
        ScopeArg::Full => Scope::Full,
    };
    let results = run_scope(scope);
    for r in &results {
        eprintln!(
            "criterion {} ({}) {} in {} ms",
            r.id,
            r.name,
            if r.passed { "passed" } else { "FAILED" },
            r.millis
        );
    }
    let all_passed = results.iter().all(|r| r.passed);
    // Timings stay on stderr so repeated runs emit identical JSON.
    let body = json!({
        "format": 1,
        "scope": match scope { Scope::Quick => "quick", Scope::Full => "full" },
        "criteria": results.iter().map(|r| json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "details": r.details,
        })).collect::<Vec<_>>(),
        "all_passed": all_passed,
    });
    write_output(out.output.as_deref(), &serde_json::to_string_pretty(&body)?)?;
    if all_passed {
        Ok(())
    } else {
        Err(Error::Inconsistency(format!(
            "{} criteria failed",
            results.iter().filter(|r| !r.passed).count()
        )))
    }
}

fn cmd_diagram(
    input: Option<PathBuf>,
    cartan_type: Option<String>,
    k_roots: Vec<String>,
    lambda: Option<String>,
    window: Option<String>,
    output: Option<PathBuf>,
) -> Result<()> {
    let fps = match (input, cartan_type) {
        (Some(path), None) => load_fixture(&path)?,
        (None, Some(label)) => {
            let lambda = lambda.ok_or_else(|| {
                Error::Config("--lambda is required together with --type".into())
            })?;
            let pair = pair_from_args(&GroupArgs { cartan_type: label, k_roots })?;
            let lam = parse_weight(&lambda)?;
            crate::fixedpoint::coadjoint_fixed_point_set(&pair, &lam, 1)?
        }
        _ => {
            return Err(Error::Config(
                "give either --input or --type (with --lambda)".into(),
            ));
        }
    };
    let window = match window {
        Some(s) => Some(parse_window(&s, fps.rank())?),
        None => None,
    };
    let svg = diagram::render_svg(&fps, window.as_ref())?;
    write_output(output.as_deref(), &svg)
}
