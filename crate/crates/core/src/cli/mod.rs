//! The `dca` command line: series inspection, OPE analysis, fusion,
//! verification runs, classical limits and the field cache.

pub mod cache;
pub mod serial;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use self::cache::{Cache, Key};
use self::serial::*;
use crate::error::{Error, Result};
use crate::fields::{contract_products, exchange_function, pole_lines, residue, wick_expand, Field};
use crate::qseries::{structure_function, StructureName, Truncation};
use crate::relations::{
    classical_limit, fusion_closure, fusion_tower, named_field, preset, verify_exchange, verify_limits, verify_relation,
    verify_skao, verify_triple_residue, verify_ttilde, FieldName, Params, TestMonomial, TowerDirection, TtildeSign,
    VerificationReport,
};
use crate::ring::{Monomial, QTarget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub p_order: i32,
    pub buffer: i32,
    pub degree: u32,
    pub mode_window: i32,
    pub x_order: i32,
    pub format: Format,
    pub cache_dir: PathBuf,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p_order: 6,
            buffer: 4,
            degree: 4,
            mode_window: 4,
            x_order: 16,
            format: Format::Text,
            cache_dir: default_cache_dir(),
            timing: true,
        }
    }
}

fn default_cache_dir() -> PathBuf {
    std::env::temp_dir().join("dca-cache")
}

impl RunConfig {
    /// Check the ranges; the `x`-order bound applies only where modes are
    /// extracted.
    pub fn validate(&self, modes: bool) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.p_order < 1 {
            return bad(format!("p-order must be at least 1, got {}", self.p_order));
        }
        if self.buffer < 0 || self.mode_window < 0 || self.x_order < 0 {
            return bad("buffer, mode window and x-order must be non-negative".into());
        }
        let need = 2 * (self.mode_window + self.degree as i32);
        if modes && self.x_order < need {
            return bad(format!("x-order {} is below 2(M + D) = {need}", self.x_order));
        }
        Ok(())
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(self.p_order, self.buffer)
    }

    pub fn params(&self) -> Params {
        Params {
            p_order: self.p_order,
            buffer: self.buffer,
            degree: self.degree,
            mode_window: self.mode_window,
            x_order: self.x_order,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "dca", version, about = "Exact free-field engine for the deformed Virasoro chiral algebra")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Order K in p to which results are exact
    #[arg(long, global = true, default_value_t = 6)]
    pub p_order: i32,
    /// Extra p-orders carried by generated factors
    #[arg(long, global = true, default_value_t = 4)]
    pub buffer: i32,
    /// Maximal degree D of Fock states
    #[arg(long, global = true, default_value_t = 4)]
    pub degree: u32,
    /// Mode indices |n|, |m| up to M
    #[arg(long, global = true, default_value_t = 4)]
    pub mode_window: i32,
    /// Order X of x-expansions
    #[arg(long, global = true, default_value_t = 16)]
    pub x_order: i32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Field cache directory
    #[arg(long, global = true, env = "DCA_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Report a wall time of zero, for byte-identical output
    #[arg(long, global = true)]
    pub no_timing: bool,
}

impl GlobalArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            p_order: self.p_order,
            buffer: self.buffer,
            degree: self.degree,
            mode_window: self.mode_window,
            x_order: self.x_order,
            format: self.format,
            cache_dir: self.cache_dir.clone().unwrap_or_else(default_cache_dir),
            timing: !self.no_timing,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dir {
    Q,
    Pq,
}

impl From<Dir> for TowerDirection {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Q => TowerDirection::Q,
            Dir::Pq => TowerDirection::POverQ,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// q := p
    #[value(name = "p")]
    P,
    /// q := 1
    #[value(name = "1")]
    One,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Product form and x-expansion of a structure function
    Series {
        /// One of f, g, S_TT, F1, F2, alpha+, alpha-
        name: String,
    },
    /// Contraction functions and exchange function of two fields
    Contract { a: String, b: String },
    /// Pole lines of A(z)B(w) and the residue on each
    Ope { a: String, b: String },
    /// Fusion tower T_1, …, T_n with its coefficient recursion
    Fuse {
        #[arg(long, value_enum, default_value_t = Dir::Q)]
        direction: Dir,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    /// Run a verification; exit code 0 verified, 1 failed, 2 error
    Verify {
        /// One of skao, odin, alt, F1, F2-ttilde, exchange, triple, closure, limits
        relation: String,
        /// First field of `exchange`
        #[arg(long, default_value = "T")]
        a: String,
        /// Second field of `exchange`
        #[arg(long, default_value = "T")]
        b: String,
    },
    /// Specialize q in a named field
    Limit {
        field: String,
        /// Defaults to the classical point of the field's tower
        #[arg(long, value_enum)]
        target: Option<Target>,
    },
    /// Inspect or manage the field cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CacheAction {
    /// List cached (name, K, B) keys
    List,
    /// Compute a named field (if needed) and store it
    Put { name: String },
    /// Print a cached or named field
    Show { name: String },
    /// Remove all cached fields
    Clear,
}

/// What a command produced: a JSON payload, its text rendering and an
/// exit code.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: 0 }
    }

    pub fn report(r: &VerificationReport, timing: bool) -> Self {
        let mut text = r.to_string();
        if timing {
            let _ = writeln!(text, "  wall time: {} ms", r.wall_time_ms);
        }
        Output { json: report_json(r, timing), text, code: if r.verified() { 0 } else { 1 } }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values always serialize");
                s.push('\n');
                s
            }
            Format::Text => self.text.clone(),
        }
    }
}

/// A field by name: the cache first, then the built-in constructions,
/// stored back on a miss.
pub fn resolve_field(name: &str, cfg: &RunConfig) -> Result<Field> {
    let tr = cfg.truncation();
    let cache = Cache::new(&cfg.cache_dir);
    let key = Key::new(name, tr);
    if let Some(f) = cache.get(&key)? {
        return Ok(f);
    }
    let f = named_field(name.parse::<FieldName>()?, tr)?;
    cache.put(&key, &f)?;
    Ok(f)
}

pub fn cmd_series(name: &str, cfg: &RunConfig) -> Result<Output> {
    cfg.validate(false)?;
    let sname: StructureName = name.parse()?;
    let tr = cfg.truncation();
    let d = structure_function(sname, tr)?;
    let var = match d.dir {
        crate::ring::Direction::InX => "x",
        crate::ring::Direction::InInvX => "x^-1",
    };
    let mut text = format!("{sname}(x) = {}\n", d.form);
    let expansion = match d.expand(cfg.x_order, tr.window()) {
        Ok(e) => {
            let coeffs: Vec<_> = e.coeffs.iter().map(|c| c.truncate(tr.window())).collect();
            let e = crate::ring::Expansion { coeffs, ..e };
            let _ = writeln!(text, "expansion in {var}, exact to p^{}:", cfg.p_order);
            for (i, c) in e.coeffs.iter().enumerate() {
                let _ = writeln!(text, "  [{}] {c}", e.start + i as i32);
            }
            expansion_json(&e)
        }
        Err(e @ Error::NotExpandable { .. }) => {
            let _ = writeln!(text, "no one-sided expansion: {e}");
            Value::Null
        }
        Err(e) => return Err(e),
    };
    let json = json!({
        "series": sname.to_string(),
        "pOrder": cfg.p_order,
        "buffer": cfg.buffer,
        "form": product_form_json(&d.form),
        "expansion": expansion,
    });
    Ok(Output::ok(json, text))
}

pub fn cmd_contract(a: &str, b: &str, cfg: &RunConfig) -> Result<Output> {
    cfg.validate(false)?;
    let tr = cfg.truncation();
    let (fa, fb) = (resolve_field(a, cfg)?, resolve_field(b, cfg)?);
    let mut text = String::new();
    let mut rows = Vec::new();
    for (_, na) in fa.terms() {
        for (_, nb) in fb.terms() {
            let c = contract_products(na, nb, tr)?;
            let _ = writeln!(text, "<{na}> <{nb}>: {c}");
            rows.push(json!({
                "a": na.factors().iter().map(exp_factor_json).collect::<Vec<_>>(),
                "b": nb.factors().iter().map(exp_factor_json).collect::<Vec<_>>(),
                "contraction": product_form_json(&c),
            }));
        }
    }
    let exchange = match exchange_function(&fa, &fb, tr) {
        Ok(s) => {
            let _ = writeln!(text, "S_{a},{b}(x) = {s}");
            product_form_json(&s)
        }
        Err(e @ Error::NonScalarExchange { .. }) => {
            let _ = writeln!(text, "S_{a},{b}: {e}");
            Value::Null
        }
        Err(e) => return Err(e),
    };
    Ok(Output::ok(json!({ "a": a, "b": b, "contractions": rows, "exchange": exchange }), text))
}

pub fn cmd_ope(a: &str, b: &str, cfg: &RunConfig) -> Result<Output> {
    cfg.validate(false)?;
    let tr = cfg.truncation();
    let (fa, fb) = (resolve_field(a, cfg)?, resolve_field(b, cfg)?);
    let e = wick_expand(&fa, &fb, tr)?;
    let cache = Cache::new(&cfg.cache_dir);
    let lines = pole_lines(&e, tr);
    let mut text = format!("{a}(z){b}(w): {} pole line(s) z = w*gamma\n", lines.len());
    let mut rows = Vec::new();
    for line in &lines {
        let g = &line.gamma;
        let _ = writeln!(text, "  (2a, b) = ({}, {})  gamma = {g}  order {}", g.a2, g.b, line.order);
        let mut row = json!({ "a2": g.a2, "b": g.b, "c": rat_json(&g.c), "order": line.order });
        match residue(&e, g, None, 0, tr) {
            Ok(r) => {
                let name = format!("Res[{g}]({a},{b})");
                let r = r.named(&name);
                cache.put(&Key::new(&name, tr), &r)?;
                let _ = writeln!(text, "    residue {name} = {r}");
                row["residue"] = field_json(&r);
            }
            Err(err @ Error::HigherOrderPole { .. }) => {
                let _ = writeln!(text, "    {err}");
                row["residue"] = Value::Null;
                row["error"] = json!(err.to_string());
            }
            Err(err) => return Err(err),
        }
        rows.push(row);
    }
    Ok(Output::ok(json!({ "a": a, "b": b, "pOrder": cfg.p_order, "buffer": cfg.buffer, "poles": rows }), text))
}

pub fn cmd_fuse(dir: TowerDirection, n: u32, cfg: &RunConfig) -> Result<Output> {
    cfg.validate(false)?;
    let tr = cfg.truncation();
    let tower = fusion_tower(n, dir, tr)?;
    let cache = Cache::new(&cfg.cache_dir);
    let mut text = format!("fusion tower along {dir}, n ≤ {n}\n");
    let mut fields = Vec::new();
    for (k, f) in tower.fields.iter().enumerate() {
        let name = FieldName::Tower { dir, n: k as u32 + 1 };
        let name = if k == 0 { FieldName::T.to_string() } else { name.to_string() };
        let f = f.clone().named(&name);
        cache.put(&Key::new(&name, tr), &f)?;
        let _ = writeln!(text, "  {name} = {f}");
        fields.push(field_json(&f));
    }
    let mut steps = Vec::new();
    for s in &tower.steps {
        let agree = s.from_residue.iter().zip(&s.from_recursion).all(|(x, y)| x.compare(y).0);
        let _ = writeln!(text, "  step {} at z = w*{}: recursion {}", s.n, s.gamma, if agree { "matches" } else { "differs" });
        for (i, c) in s.from_recursion.iter().enumerate() {
            let _ = writeln!(text, "    c^{i}_{} = {c}", s.n + 1);
        }
        steps.push(json!({
            "n": s.n,
            "gamma": monomial_json(&s.gamma),
            "prefactor": scalar_json(&s.prefactor),
            "fromResidue": s.from_residue.iter().map(scalar_json).collect::<Vec<_>>(),
            "fromRecursion": s.from_recursion.iter().map(scalar_json).collect::<Vec<_>>(),
            "recursionMatches": agree,
        }));
    }
    let json = json!({ "direction": dir.tag(), "pOrder": cfg.p_order, "buffer": cfg.buffer, "fields": fields, "steps": steps });
    Ok(Output::ok(json, text))
}

pub fn run_verify(relation: &str, a: &str, b: &str, cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate(true)?;
    let params = cfg.params();
    let tr = cfg.truncation();
    match relation {
        "skao" => verify_skao(params),
        "odin" | "alt" | "F1" => verify_relation(params, |tr, w| preset(relation, tr, w)),
        "F2-ttilde" => {
            let f2 = verify_relation(params, |tr, w| preset("F2", tr, w))?;
            let tt = verify_ttilde(params, TtildeSign::Contour)?;
            Ok(VerificationReport::combine("F2-ttilde", params, vec![f2, tt]))
        }
        "exchange" => verify_exchange(&resolve_field(a, cfg)?, &resolve_field(b, cfg)?, params),
        "triple" => {
            let q = Monomial::q();
            let parts = vec![
                verify_triple_residue(&q, &q, &TestMonomial::one(), params)?,
                verify_triple_residue(&q.pow(2), &q, &TestMonomial::one(), params)?,
                verify_triple_residue(&Monomial::p(), &q, &TestMonomial::one(), params)?,
            ];
            Ok(VerificationReport::combine("triple", params, parts))
        }
        "closure" => {
            let start = std::time::Instant::now();
            let basis = fusion_closure(&[Field::t()], 1, 2, tr)?;
            let mut tally = crate::relations::Tally::default();
            for (i, j) in basis.exchange.iter().map(|(k, _)| *k) {
                let ok = !basis.unexplained.contains(&(i, j));
                let (x, y) = (&basis.members[i].name, &basis.members[j].name);
                tally.check(ok, || format!("S({x},{y}) is not a product of shifted S_TT"));
            }
            Ok(VerificationReport::from_tally("closure", params, tally, start))
        }
        "limits" => Ok(verify_limits(params, 3)?.0),
        _ => Err(Error::UnknownRelation(relation.to_string())),
    }
}

pub fn cmd_limit(name: &str, target: Option<Target>, cfg: &RunConfig) -> Result<Output> {
    cfg.validate(false)?;
    let tr = cfg.truncation();
    let f = resolve_field(name, cfg)?;
    let target = match target {
        Some(Target::P) => QTarget::P,
        Some(Target::One) => QTarget::One,
        None => match name.parse::<FieldName>() {
            Ok(FieldName::Tower { dir, .. }) => dir.classical_target(),
            _ => return Err(Error::InvalidConfig(format!("no default specialization for {name}; pass --target"))),
        },
    };
    let l = classical_limit(&f, target, tr.cutoff() + 1)?.truncate(tr.window());
    let text = format!("{name}|{target} = {l}\n");
    Ok(Output::ok(json!({ "field": name, "target": target.to_string(), "limit": field_json(&l) }), text))
}

pub fn cmd_cache(action: &CacheAction, cfg: &RunConfig) -> Result<Output> {
    let cache = Cache::new(&cfg.cache_dir);
    let tr = cfg.truncation();
    match action {
        CacheAction::List => {
            let keys = cache.list()?;
            let mut text = format!("{}\n", cache.dir().display());
            for k in &keys {
                let _ = writeln!(text, "  {} K={} B={}", k.name, k.p_order, k.buffer);
            }
            let rows: Vec<Value> =
                keys.iter().map(|k| json!({ "name": k.name, "pOrder": k.p_order, "buffer": k.buffer })).collect();
            Ok(Output::ok(json!({ "entries": rows }), text))
        }
        CacheAction::Put { name } | CacheAction::Show { name } => {
            let f = resolve_field(name, cfg)?;
            let key = Key::new(name, tr);
            Ok(Output::ok(Cache::payload(&key, &f), format!("{name} (K={}, B={}) = {f}\n", tr.p_order, tr.buffer)))
        }
        CacheAction::Clear => {
            let n = cache.clear()?;
            Ok(Output::ok(json!({ "removed": n }), format!("removed {n} cached field(s)\n")))
        }
    }
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> Output {
    let cfg = cli.global.config();
    let (context, r) = match &cli.command {
        Command::Series { name } => ("series", cmd_series(name, &cfg)),
        Command::Contract { a, b } => ("contract", cmd_contract(a, b, &cfg)),
        Command::Ope { a, b } => ("ope", cmd_ope(a, b, &cfg)),
        Command::Fuse { direction, n } => ("fuse", cmd_fuse((*direction).into(), *n, &cfg)),
        Command::Verify { relation, a, b } => {
            ("verify", run_verify(relation, a, b, &cfg).map(|r| Output::report(&r, cfg.timing)))
        }
        Command::Limit { field, target } => ("limit", cmd_limit(field, *target, &cfg)),
        Command::Cache { action } => ("cache", cmd_cache(action, &cfg)),
    };
    r.unwrap_or_else(|e| Output { json: error_json(context, &e), text: format!("{context}: error: {e}\n"), code: 2 })
}

/// Parse `args`, run, write the rendered output to `out` and return the
/// exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let o = execute(&cli);
    if out.write_all(o.render(cli.global.format).as_bytes()).is_err() {
        return 2;
    }
    o.code
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let dir = tempfile::tempdir().unwrap();
        let mut all = vec!["dca", "--cache-dir", dir.path().to_str().unwrap(), "--no-timing"];
        all.extend_from_slice(args);
        let mut out = Vec::new();
        let code = run_with(all, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate(true).is_ok());
        c.x_order = 15;
        assert!(matches!(c.validate(true), Err(Error::InvalidConfig(_))));
        assert!(c.validate(false).is_ok());
        c.p_order = 0;
        assert!(c.validate(false).is_err());
    }

    #[test]
    fn series_f_low_order() {
        let (code, out) = run_args(&["series", "f", "--p-order", "2", "--x-order", "2", "--buffer", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("[0] (1) + O(s^4)\n"), "{out}");
        assert!(out.contains("[1] (1 - q) + (-q^-1 + q)*s^2 + O(s^4)\n"), "{out}");
    }

    #[test]
    fn unknown_names_exit_two() {
        assert_eq!(run_args(&["series", "h"]).0, 2);
        assert_eq!(run_args(&["ope", "W", "T"]).0, 2);
        let (code, out) = run_args(&["--format", "json", "verify", "nope"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["status"], "error");
    }

    #[test]
    fn omega_t_has_no_poles() {
        let (code, out) = run_args(&["--p-order", "2", "--buffer", "1", "--format", "json", "ope", "Omega", "T"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["poles"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn odin_at_zero_window_is_verified() {
        let (code, out) = run_args(&["--p-order", "2", "--degree", "1", "--mode-window", "0", "verify", "odin"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("odin: verified"));
    }

    #[test]
    fn relations_hold_at_the_smallest_truncation() {
        for rel in ["odin", "F2-ttilde", "limits"] {
            let (code, out) =
                run_args(&["--p-order", "1", "--buffer", "0", "--degree", "1", "--mode-window", "1", "verify", rel]);
            assert_eq!(code, 0, "{out}");
        }
    }
}
