//! The `abv` command line. Machine output (JSON, DOT or plain text) goes to
//! stdout or `--out`; one-line summaries and errors go to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use abv_core::cycles::{
    cc, find_table, induction_pushforward, resolve_pushforward, support_check_contention, Coeff, LagrangianCycle,
};
use abv_core::flag_orbits::{census_matches, k_orbits, LeviEmbedding};
use abv_core::geom_params::{
    aj_factor, aj_induce, aj_parameter, arthur_to_langlands, build_levi_space, complete_parameters,
    phi_classes, principal_unipotent, GeometricParameterSpace, GeometricPoint,
};
use abv_core::inner_class::strong_real_forms;
use abv_core::lie_core::Catalog;
use abv_core::packets::{
    aj_embedding, essentially_unipotent_packet, l_packet, micro_packet, stable_character, tempered_verify,
    unipotent_packet, verify_abv_equals_aj,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cases::{build_space, inner_class, parse_levi};
use crate::catalog::{catalog_toml, load_catalog};
use crate::tables::{self, available_tables, tables_for, TableFile};
use crate::{to_json, AppError, AppResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "abv", version, about = "K-orbits, geometric parameters, characteristic cycles and packets for small real groups")]
pub struct Cli {
    /// Catalog file (TOML). Defaults to the builtin catalog.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[arg(long, global = true, default_value = "SL2")]
    pub group: String,
    /// equal-rank (alias compact), split or complex.
    #[arg(long = "inner-class", global = true, default_value = "equal-rank")]
    pub inner_class: String,
    /// E-group invariant: `1`, `-1`, `i`, `-i`, comma separated per coordinate.
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    pub z: String,
    /// Infinitesimal character as comma separated rationals. Defaults to rho.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Oracle table files. Without any, the A1 oracle is evaluated directly.
    #[arg(long, global = true, value_delimiter = ',')]
    pub tables: Vec<PathBuf>,
    /// Write machine output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the catalog (JSON, or TOML with --format text).
    Catalog,
    /// K-orbits on the flag variety, per strong real form.
    Orbits {
        /// Label of one strong real form, or `quasi-split`.
        #[arg(long)]
        form: Option<String>,
    },
    /// The geometric parameter space and its complete parameters.
    Space,
    /// Characteristic cycles of complete parameters.
    Cc {
        /// Parameter id `block:orbit:tau[..]`; all parameters if omitted.
        #[arg(long)]
        param: Option<String>,
    },
    /// Packets with their verification verdicts.
    Packet {
        #[command(subcommand)]
        kind: PacketKind,
    },
    /// Push a Levi cycle forward along geometric induction.
    Induce {
        /// Simple roots of the Levi, e.g. `0`, `0,1`, `all`; empty for the torus.
        #[arg(long, default_value = "")]
        levi: String,
        /// Parameter id on the Levi space.
        #[arg(long)]
        param: Option<String>,
        /// JSON cycle `{"block": .., "coeffs": {orbit: n}}` on the Levi space.
        #[arg(long)]
        cycle: Option<PathBuf>,
        /// Do not consult any table of the ambient space.
        #[arg(long)]
        no_ambient: bool,
    },
    /// Maintain the shipped oracle tables.
    Tables {
        #[command(subcommand)]
        action: TablesAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum PacketKind {
    /// tempered_verify on every tempered parameter at lambda.
    Tempered,
    /// Principal unipotent packet (lambda must be rho).
    Unipotent,
    /// `a psi_u` with `a` central; lambda = lambda_a + rho.
    EssentiallyUnipotent,
    /// Adams-Johnson packet against the ABV packet; lambda is mu.
    Aj {
        #[arg(long, default_value = "")]
        levi: String,
    },
    /// Micro-packet at one orbit.
    Micro {
        #[arg(long)]
        block: String,
        #[arg(long)]
        orbit: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum TablesAction {
    Regen {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    Check {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, err).and_then(|text| deliver(&cli, &text, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn deliver(cli: &Cli, text: &str, out: &mut dyn Write) -> AppResult<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| AppError::Config(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| AppError::Config(e.to_string())),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    catalog: Catalog,
    files: Vec<TableFile>,
}

impl Ctx<'_> {
    fn space(&self) -> AppResult<GeometricParameterSpace> {
        build_space(&self.catalog, &self.cli.group, &self.cli.inner_class, &self.cli.z, self.cli.lambda.as_deref())
    }

    /// Tables for `x`: from `--tables` when given, otherwise the oracle.
    fn tables(&self, x: &GeometricParameterSpace) -> Vec<abv_core::cycles::CCTable> {
        if self.cli.tables.is_empty() {
            available_tables(x)
        } else {
            tables_for(&self.files, x)
        }
    }
}

pub fn execute(cli: &Cli, err: &mut dyn Write) -> AppResult<String> {
    let catalog = match &cli.catalog {
        Some(p) => load_catalog(p)?,
        None => Catalog::builtin(),
    };
    let files = cli.tables.iter().map(|p| tables::load(p)).collect::<AppResult<Vec<_>>>()?;
    let ctx = Ctx { cli, catalog, files };
    match &cli.command {
        Command::Catalog => cmd_catalog(&ctx),
        Command::Orbits { form } => cmd_orbits(&ctx, form.as_deref(), err),
        Command::Space => cmd_space(&ctx, err),
        Command::Cc { param } => cmd_cc(&ctx, param.as_deref(), err),
        Command::Packet { kind } => cmd_packet(&ctx, kind, err),
        Command::Induce { levi, param, cycle, no_ambient } => cmd_induce(&ctx, levi, param.as_deref(), cycle.as_ref(), *no_ambient, err),
        Command::Tables { action } => cmd_tables(action, err),
    }
}

fn note(err: &mut dyn Write, msg: &str) {
    let _ = writeln!(err, "{msg}");
}

fn verdict(name: &str, ok: bool) -> String {
    format!("{name}: {}", if ok { "pass" } else { "fail" })
}

fn cmd_catalog(ctx: &Ctx) -> AppResult<String> {
    match ctx.cli.format {
        Format::Text => catalog_toml(&ctx.catalog),
        _ => to_json(&ctx.catalog),
    }
}

fn cmd_orbits(ctx: &Ctx, form: Option<&str>, err: &mut dyn Write) -> AppResult<String> {
    let cli = ctx.cli;
    let ic = inner_class(&ctx.catalog, &cli.group, &cli.inner_class)?;
    let all = strong_real_forms(&ic)?;
    let forms: Vec<_> = match form {
        None => all.iter().collect(),
        Some("quasi-split") => all.iter().filter(|f| f.quasi_split).take(1).collect(),
        Some(l) => all.iter().filter(|f| f.label == l).collect(),
    };
    if forms.is_empty() {
        let labels: Vec<&str> = all.iter().map(|f| f.label.as_str()).collect();
        return Err(AppError::Config(format!("no strong real form `{}`; available: {}", form.unwrap_or(""), labels.join(", "))));
    }
    let mut rows = Vec::new();
    let mut dot = String::new();
    let mut text = String::new();
    for f in forms {
        let p = k_orbits(&ic, f)?;
        let brute = census_matches(&ic, f)?;
        let edges = p.covers().len();
        note(err, &format!("{}: {} orbits, {} Hasse edges, brute force {}", f.label, p.len(), edges, if brute { "agrees" } else { "DISAGREES" }));
        dot.push_str(&p.to_dot(&f.label));
        text.push_str(&format!("# {} ({} orbits)\n{}", f.label, p.len(), p.to_text()));
        rows.push(json!({
            "form": f.label,
            "kottwitz_sign": f.kottwitz_sign,
            "quasi_split": f.quasi_split,
            "poset": p,
            "hasse_edges": edges,
            "graded": p.is_graded(),
            "brute_force_match": brute,
        }));
    }
    match cli.format {
        Format::Dot => Ok(dot),
        Format::Text => Ok(text),
        Format::Json => to_json(&json!({ "group": cli.group, "inner_class": ic.name, "forms": rows })),
    }
}

fn cmd_space(ctx: &Ctx, err: &mut dyn Write) -> AppResult<String> {
    let x = ctx.space()?;
    let params = complete_parameters(&x)?;
    note(err, &format!("{} blocks, {} orbits, {} complete parameters", x.blocks.len(), x.n_orbits(), params.len()));
    match ctx.cli.format {
        Format::Dot => Ok(x.blocks.iter().map(|b| b.poset.to_dot(&b.id)).collect()),
        Format::Text => {
            let mut s = String::new();
            for b in &x.blocks {
                s.push_str(&format!("# {}\n{}", b.id, b.poset.to_text()));
            }
            for p in &params {
                s.push_str(&format!("{}  {}\n", p.id, p.realform));
            }
            Ok(s)
        }
        Format::Json => to_json(&json!({ "space": x, "parameters": params })),
    }
}

fn cmd_cc(ctx: &Ctx, param: Option<&str>, err: &mut dyn Write) -> AppResult<String> {
    let x = ctx.space()?;
    let tabs = ctx.tables(&x);
    let params = complete_parameters(&x)?;
    let chosen: Vec<_> = match param {
        None => params.iter().collect(),
        Some(id) => {
            let v: Vec<_> = params.iter().filter(|p| p.id == id).collect();
            if v.is_empty() {
                return Err(AppError::Config(format!("no parameter `{id}`")));
            }
            v
        }
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    for p in chosen {
        let t = find_table(&tabs, &p.block)?;
        let c = cc(p, t, &x.block(&p.block)?.poset)?;
        text.push_str(&format!("{}: {c}\n", p.id));
        rows.push(json!({ "param": p.id, "block": p.block, "realform": p.realform, "cycle": c, "text": c.to_string() }));
    }
    note(err, &format!("{} cycles", rows.len()));
    match ctx.cli.format {
        Format::Json => to_json(&json!({ "cycles": rows })),
        _ => Ok(text),
    }
}

fn cmd_packet(ctx: &Ctx, kind: &PacketKind, err: &mut dyn Write) -> AppResult<String> {
    let x = ctx.space()?;
    let tabs = ctx.tables(&x);
    let mut verdicts = Vec::new();
    let body = match kind {
        PacketKind::Tempered => {
            let mut reports = Vec::new();
            for phi in phi_classes(&x)?.into_iter().filter(|p| p.is_tempered()) {
                let r = tempered_verify(&phi, &x, &tabs)?;
                verdicts.push(verdict(&format!("ABV==L at {}:{}", r.orbit.block, r.orbit.orbit), r.passes));
                reports.push(r);
            }
            if reports.is_empty() {
                return Err(abv_core::Error::Precondition("no tempered parameters at this infinitesimal character".into()).into());
            }
            let all = reports.iter().all(|r| r.passes);
            verdicts.push(verdict("ABV==L", all));
            json!({ "kind": "tempered", "reports": reports })
        }
        PacketKind::Unipotent => {
            let psi = principal_unipotent(&x)?;
            let u = unipotent_packet(&psi, &x, Some(&tabs))?;
            let sc = stable_character(&psi, &x, &tabs)?;
            let n_forms = strong_real_forms(&x.ic)?.len();
            verdicts.push(verdict("size==#strong-real-forms", u.packet.len() == n_forms));
            verdicts.push(verdict("ABV==micro", u.matches_micro == Some(true)));
            json!({ "kind": "unipotent", "strong_real_forms": n_forms, "packet": u, "stable_character": sc })
        }
        PacketKind::EssentiallyUnipotent => {
            let levi: Vec<usize> = (0..x.ic.group.simple.len()).collect();
            let psi = aj_parameter(&x, levi, &x.lambda)?;
            let eu = essentially_unipotent_packet(&psi, &x, &tabs)?;
            verdicts.push(verdict("twisted tables", eu.tables_match));
            verdicts.push(verdict("twisted==ABV", eu.matches_abv));
            json!({ "kind": "essentially-unipotent", "packet": eu })
        }
        PacketKind::Aj { levi } => {
            let levi = parse_levi(levi, &x.ic.group)?;
            let full = levi.len() == x.ic.group.simple.len();
            let psi = aj_parameter(&x, levi, &x.lambda)?;
            let cmp = verify_abv_equals_aj(&psi, &x, &tabs)?;
            let r = &cmp.aj.report;
            note(err, &format!("AJ1: {}", r.aj1_witness));
            note(err, &format!("AJ2: {}", r.aj2_witness));
            note(err, "AJ3: mu is regular");
            verdicts.push(verdict("ABV==AJ", cmp.equal));
            verdicts.push(verdict("z product==z matrix", cmp.aj.z_consistent));
            let mut extra = Value::Null;
            if full {
                let eu = essentially_unipotent_packet(&psi, &x, &tabs)?;
                verdicts.push(verdict("AJ==essentially-unipotent", eu.packet.ids() == cmp.aj.packet.ids()));
                extra = json!(eu.packet.ids());
            } else if psi.levi.is_empty() {
                let phi = arthur_to_langlands(&psi, &x)?;
                let l = l_packet(&phi, &x)?;
                verdicts.push(verdict("AJ==L", l.ids() == cmp.aj.packet.ids()));
                extra = json!(l.ids());
            }
            json!({ "kind": "aj", "comparison": cmp, "reference": extra })
        }
        PacketKind::Micro { block, orbit } => {
            let s = GeometricPoint { block: block.clone(), orbit: orbit.clone() };
            x.block(block)?.poset.get(orbit)?;
            let p = micro_packet(&s, &x, &tabs)?;
            p.check_invariants(&x)?;
            json!({ "kind": "micro", "packet": p })
        }
    };
    for v in &verdicts {
        note(err, v);
    }
    let doc = json!({ "report": body, "verdicts": verdicts });
    match ctx.cli.format {
        Format::Json => to_json(&doc),
        _ => Ok(verdicts.iter().map(|v| format!("{v}\n")).collect()),
    }
}

/// Input format of `induce --cycle`.
#[derive(Debug, Deserialize, Serialize)]
pub struct CycleFile {
    pub block: String,
    pub coeffs: BTreeMap<String, i64>,
    /// Replaces the embedding computed from the Adams-Johnson data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingSpec>,
}

/// Target block and orbit saturation map of a hand-written Levi embedding.
#[derive(Debug, Deserialize, Serialize)]
pub struct EmbeddingSpec {
    pub target: String,
    pub saturation: BTreeMap<String, String>,
}

fn cmd_induce(
    ctx: &Ctx,
    levi: &str,
    param: Option<&str>,
    cycle: Option<&PathBuf>,
    no_ambient: bool,
    err: &mut dyn Write,
) -> AppResult<String> {
    let x = ctx.space()?;
    let levi = parse_levi(levi, &x.ic.group)?;
    let psi = aj_parameter(&x, levi.clone(), &x.lambda)?;
    let aj = aj_factor(&psi, &x)?;
    let xl = build_levi_space(&aj, &x)?;
    let mut custom = None;
    let (source, input) = match (param, cycle) {
        (Some(id), None) => {
            let all = complete_parameters(&xl)?;
            let p = all.iter().find(|p| p.id == id).cloned().ok_or_else(|| {
                let ids: Vec<&str> = all.iter().map(|p| p.id.as_str()).collect();
                AppError::Config(format!("no parameter `{id}` on the Levi space; available: {}", ids.join(" ")))
            })?;
            let t = find_table(&available_tables(&xl), &p.block)?.clone();
            let c = cc(&p, &t, &xl.block(&p.block)?.poset)?;
            (Some(p), c)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
            let f: CycleFile = serde_json::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
            let mut c = LagrangianCycle::zero(&f.block, &xl.block(&f.block)?.poset);
            for (o, n) in &f.coeffs {
                c.add_term(o, &Coeff::int(*n))?;
            }
            custom = f.embedding;
            (None, c)
        }
        _ => return Err(AppError::Config("give exactly one of --param and --cycle".into())),
    };
    let (target, emb) = match custom {
        None => aj_embedding(&aj, &xl, &x, &input.block)?,
        Some(e) => {
            let fiber = xl.block(&input.block)?.poset.clone();
            let ambient = x.block(&e.target)?.poset.clone();
            let sat = e.saturation.into_iter().collect();
            (e.target, LeviEmbedding::from_parts(levi.clone(), fiber, ambient, sat)?)
        }
    };
    let pushed = induction_pushforward(&input, &emb, &target)?;
    let mut resolution = None;
    let mut contention = None;
    if let (Some(p), false) = (&source, no_ambient) {
        let tabs = ctx.tables(&x);
        if let Ok(t) = find_table(&tabs, &target) {
            let ind = aj_induce(&aj, &xl, &x, p)?;
            let reference = cc(&ind.target, t, &x.block(&target)?.poset)?;
            let r = resolve_pushforward(&pushed, &reference, &emb)?;
            contention = Some(support_check_contention(&input, &r.cycle, &emb)?);
            resolution = Some((ind.target.id, reference, r));
        }
    }
    let final_cycle = resolution.as_ref().map(|r| &r.2.cycle).unwrap_or(&pushed);
    let status = if final_cycle.is_resolved() { "resolved" } else { "partial" };
    let primary: BTreeMap<String, i64> =
        pushed.coeffs.iter().filter_map(|(o, c)| c.value().map(|v| (o.clone(), v))).collect();
    note(err, &format!("{} -> {}: {status}", input.block, target));
    let text = format!("input:  {input}\npushed: {pushed}\nresult: {final_cycle}\nstatus: {status}\n");
    let doc = json!({
        "levi": levi,
        "source_param": source.map(|p| p.id),
        "source_block": input.block,
        "target_block": target,
        "input": input,
        "input_text": input.to_string(),
        "pushed": pushed,
        "pushed_text": pushed.to_string(),
        "primary": primary,
        "unknowns": pushed.unknowns(),
        "induced_param": resolution.as_ref().map(|r| r.0.clone()),
        "reference": resolution.as_ref().map(|r| r.1.to_string()),
        "resolution": resolution.as_ref().map(|r| &r.2),
        "contention": contention,
        "result_text": final_cycle.to_string(),
        "status": status,
    });
    match ctx.cli.format {
        Format::Json => to_json(&doc),
        _ => Ok(text),
    }
}

fn cmd_tables(action: &TablesAction, err: &mut dyn Write) -> AppResult<String> {
    match action {
        TablesAction::Regen { dir } => {
            let dir = dir.clone().unwrap_or_else(tables::default_dir);
            let written = tables::regen(&dir)?;
            note(err, &format!("wrote {} table files to {}", written.len(), dir.display()));
            let names: Vec<String> = written.iter().map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned()).collect();
            to_json(&json!({ "written": names }))
        }
        TablesAction::Check { dir } => {
            let dir = dir.clone().unwrap_or_else(tables::default_dir);
            let lines = tables::check(&dir)?;
            let bad = lines.iter().filter(|l| !l.ok).count();
            note(err, &format!("{} files checked, {bad} stale", lines.len()));
            let doc = to_json(&json!({ "files": lines }))?;
            if bad > 0 {
                return Err(AppError::Config(format!("{bad} stale table files; run `abv tables regen`")));
            }
            Ok(doc)
        }
    }
}
