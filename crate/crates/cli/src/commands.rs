//! Subcommand dispatch and report rendering.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use oakit_core::categories::{
    boolean_family, equalizer_search, oa_product, ofrm_equalizer, pow_functor_report,
    replay_counterexample, weak_equalizer_check, zero_object_check, EqualizerWitness,
    EQUALIZER_FOUND, NO_EQUALIZER,
};
use oakit_core::lattice::{frame_report, is_boolean, PointSet};
use oakit_core::morphisms::{compose, morphism_report, symmetric_pair_report};
use oakit_core::overlap::{
    atom_report, atoms_and_iso, booleanize, check_overlap_algebra, check_overlap_algebra_with,
    is_overlap_algebra, join_irreducibles, OverlapOptions,
};
use oakit_core::report::Check;
use oakit_core::sublocales::{
    enumerate_nuclei, open_sublocale_report, regular_open_algebra, sublocale_joinmap_bijection,
};
use oakit_core::{Caps, Elem, FinLattice, LatticeMap};
use serde_json::{json, Value};

use crate::document::{builtin_lattice, parse_documents, Document, Payload, Workspace};
use crate::error::CliError;

/// Cone objects for universality checks: Boolean algebras up to this size.
const CONE_BOUND: usize = 8;
/// Test objects for weak-equalizer checks.
const WEAK_BOUND: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "oakit", version, about = "Exhaustive checks on finite overlap algebras, frames and locales")]
struct Cli {
    /// Print canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Cap overrides: a bare number (lattice size) or `key=value,...`.
    #[arg(long, global = true, value_name = "CAPS")]
    cap: Option<String>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Use only the named documents, in this order (comma-separated).
    #[arg(long, global = true, value_name = "NAMES")]
    pick: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frame and Boolean verdicts for each lattice.
    CheckFrame { inputs: Vec<String> },
    /// Overlap-algebra axioms for each lattice.
    CheckOa {
        inputs: Vec<String>,
        /// Density base: `ji` for the join-irreducibles, or `a,b,...`.
        #[arg(long)]
        base: Option<String>,
        /// Check splitting over every subset.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Atoms, atom predicates and the powerset isomorphism.
    Atoms { inputs: Vec<String> },
    /// Fixed points of double negation and of the overlap closure.
    Booleanize { inputs: Vec<String> },
    /// Density relative to the join-irreducible base.
    Base { inputs: Vec<String> },
    /// Dagger of each map.
    Dagger { inputs: Vec<String> },
    /// Full morphism report for each map.
    ReportMap { inputs: Vec<String> },
    /// Composite of the maps, applying the first one first.
    Compose { inputs: Vec<String> },
    /// Product of the lattices with projection daggers.
    Product { inputs: Vec<String> },
    /// Equalizer of the first two maps.
    Equalizer {
        inputs: Vec<String>,
        /// Search monos out of Boolean algebras up to this size instead of
        /// taking the equalizing subset.
        #[arg(long)]
        search_bound: Option<usize>,
    },
    /// Checks the first map is a weak equalizer of the next two.
    WeakEqualizer { inputs: Vec<String> },
    /// Replays a built-in counterexample.
    Replay { target: ReplayTarget },
    /// Relations versus join maps between powersets of N and M points.
    PowFunctor { n: usize, m: usize },
    /// All nuclei of each lattice.
    Nuclei { inputs: Vec<String> },
    /// Sublocales, open sublocales and the bijection with join maps to 2.
    Sublocales { inputs: Vec<String> },
    /// Regular-open algebra of each space.
    RegularOpen { inputs: Vec<String> },
    /// Zero object among the lattices (default: Boolean algebras up to 8).
    ZeroObject { inputs: Vec<String> },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReplayTarget {
    Equalizer,
}

/// Exit status and printed output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

struct Rendered {
    code: i32,
    text: String,
    json: Value,
}

/// Runs one invocation; `argv` excludes the program name.
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = std::iter::once("oakit".to_string())
        .chain(argv.into_iter().map(Into::into))
        .collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                output: e.to_string(),
            };
        }
    };
    let json = cli.json;
    match execute(cli) {
        Ok(r) => Outcome {
            code: r.code,
            output: if json {
                canonical(&json!({ "status": r.code, "result": r.json }))
            } else {
                r.text
            },
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            output: if json {
                canonical(&json!({ "status": e.exit_code(), "error": e.to_json() }))
            } else {
                format!("error: {e}\n")
            },
        },
    }
}

/// Key-sorted, pretty-printed JSON with a trailing newline.
pub fn canonical(v: &Value) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is on.
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn execute(cli: Cli) -> Result<Rendered, CliError> {
    let caps = match &cli.cap {
        Some(spec) => Caps::from_env()?.with_overrides(spec)?,
        None => Caps::from_env()?,
    };
    let seed = cli.seed;
    let pick: Option<Vec<String>> = cli
        .pick
        .as_deref()
        .map(|p| p.split(',').map(|n| n.trim().to_string()).collect());
    let load = |inputs: &[String], caps: &Caps| -> Result<Workspace, CliError> {
        let ws = load(inputs, caps)?;
        match &pick {
            Some(names) => ws.select(names, caps),
            None => Ok(ws),
        }
    };
    match cli.command {
        Command::CheckFrame { inputs } => check_frame(&load(&inputs, &caps)?),
        Command::CheckOa {
            inputs,
            base,
            exhaustive,
        } => check_oa(&load(&inputs, &caps)?, base.as_deref(), exhaustive, &caps),
        Command::Atoms { inputs } => atoms(&load(&inputs, &caps)?, &caps),
        Command::Booleanize { inputs } => booleanize_cmd(&load(&inputs, &caps)?),
        Command::Base { inputs } => base_cmd(&load(&inputs, &caps)?),
        Command::Dagger { inputs } => dagger_cmd(&load(&inputs, &caps)?, &caps),
        Command::ReportMap { inputs } => report_map(&load(&inputs, &caps)?, &caps),
        Command::Compose { inputs } => compose_cmd(&load(&inputs, &caps)?, &caps),
        Command::Product { inputs } => product(&load(&inputs, &caps)?, &caps),
        Command::Equalizer {
            inputs,
            search_bound,
        } => equalizer(&load(&inputs, &caps)?, search_bound, &caps),
        Command::WeakEqualizer { inputs } => weak_equalizer(&load(&inputs, &caps)?, &caps),
        Command::Replay {
            target: ReplayTarget::Equalizer,
        } => replay(),
        Command::PowFunctor { n, m } => pow_functor(n, m, seed, &caps),
        Command::Nuclei { inputs } => nuclei(&load(&inputs, &caps)?, &caps),
        Command::Sublocales { inputs } => sublocales(&load(&inputs, &caps)?, &caps),
        Command::RegularOpen { inputs } => regular_open(&load(&inputs, &caps)?),
        Command::ZeroObject { inputs } => zero_object(&load(&inputs, &caps)?),
    }
}

/// Reads every input: a file path, or a built-in `pow:N` / `chain:N`.
fn load(inputs: &[String], caps: &Caps) -> Result<Workspace, CliError> {
    let mut ws = Workspace::default();
    for input in inputs {
        let docs = if Path::new(input).is_file() {
            let text = std::fs::read_to_string(input).map_err(|e| CliError::Io {
                path: input.clone(),
                message: e.to_string(),
            })?;
            parse_documents(&text, caps).map_err(|e| match e {
                CliError::Parse { line, message } => CliError::Parse {
                    line,
                    message: format!("{input}: {message}"),
                },
                other => other,
            })?
        } else if let Some(l) = builtin_lattice(input, caps) {
            vec![Document {
                name: input.clone(),
                payload: Payload::Lattice(l?),
            }]
        } else {
            return Err(CliError::Io {
                path: input.clone(),
                message: "no such file".into(),
            });
        };
        ws.extend(docs)?;
    }
    Ok(ws)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn lattices(ws: &Workspace) -> Result<Vec<(String, Arc<FinLattice>)>, CliError> {
    let ls = ws.lattices();
    if ls.is_empty() {
        return Err(CliError::Usage("no lattice given".into()));
    }
    Ok(ls)
}

fn maps(ws: &Workspace, caps: &Caps, at_least: usize) -> Result<Vec<(String, LatticeMap)>, CliError> {
    let ms = ws.maps(caps)?;
    if ms.len() < at_least {
        return Err(CliError::Usage(format!(
            "expected at least {at_least} map(s), found {}",
            ms.len()
        )));
    }
    Ok(ms)
}

fn join_maps_only(ms: &[(String, LatticeMap)]) -> Result<(), CliError> {
    for (name, f) in ms {
        if let Some(w) = f.join_failure() {
            return Err(CliError::Resolve(format!("map `{name}` does not preserve joins: {w}")));
        }
    }
    Ok(())
}

fn map_json(f: &LatticeMap) -> Value {
    json!({ "source": f.source().size(), "target": f.target().size(), "images": f.images() })
}

fn write_checks(text: &mut String, checks: &[Check]) {
    for c in checks {
        match &c.witness {
            None => writeln!(text, "  {}: holds", c.name),
            Some(w) => writeln!(text, "  {}: fails at {w:?}", c.name),
        }
        .expect("string write");
    }
}

fn set_string(u: PointSet, points: usize) -> String {
    let members: Vec<String> = (0..points)
        .filter(|p| u >> p & 1 == 1)
        .map(|p| p.to_string())
        .collect();
    format!("{{{}}}", members.join(","))
}

fn check_frame(ws: &Workspace) -> Result<Rendered, CliError> {
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, l) in lattices(ws)? {
        let r = frame_report(&l);
        if !r.is_frame {
            code = 1;
        }
        writeln!(text, "[{name}] size {}", r.size).unwrap();
        writeln!(text, "frame: {}, boolean: {}", yes(r.is_frame), yes(r.is_boolean)).unwrap();
        if let Some(w) = r.residuation_witness {
            writeln!(text, "  residuation fails at (z, x, y) = {w:?}").unwrap();
        }
        if let Some(x) = r.excluded_middle_witness {
            writeln!(text, "  excluded middle fails at {x}").unwrap();
        }
        out.push(json!({ "name": name, "report": r }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn parse_base(l: &FinLattice, spec: &str) -> Result<Vec<Elem>, CliError> {
    if spec == "ji" {
        return Ok(join_irreducibles(l)?);
    }
    spec.split(',')
        .map(|t| {
            let x: Elem = t
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad base element `{t}`")))?;
            if x >= l.size() {
                return Err(CliError::Usage(format!("base element {x} out of range")));
            }
            Ok(x)
        })
        .collect()
}

fn check_oa(ws: &Workspace, base: Option<&str>, exhaustive: bool, caps: &Caps) -> Result<Rendered, CliError> {
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    let opts = OverlapOptions {
        exhaustive_splitting: exhaustive,
    };
    for (name, l) in lattices(ws)? {
        let base = base.map(|b| parse_base(&l, b)).transpose()?;
        let r = check_overlap_algebra_with(&l, base.as_deref(), opts, caps)?;
        if !r.is_overlap_algebra || !r.violations.is_empty() {
            code = 1;
        }
        writeln!(text, "[{name}]").unwrap();
        writeln!(
            text,
            "o-algebra: {} (boolean crosscheck: {})",
            yes(r.is_overlap_algebra),
            yes(r.boolean_crosscheck)
        )
        .unwrap();
        if let Some(b) = &r.base {
            writeln!(text, "  base: {b:?}").unwrap();
        }
        write_checks(&mut text, &r.axioms);
        for v in &r.violations {
            writeln!(text, "  violation: {v}").unwrap();
        }
        out.push(json!({ "name": name, "report": r }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn atoms(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, l) in lattices(ws)? {
        let d = atoms_and_iso(&l, caps)?;
        if !d.is_atomic {
            code = 1;
        }
        let predicates: Vec<Value> = l
            .elements()
            .map(|a| json!({ "element": a, "predicates": atom_report(&l, a) }))
            .collect();
        writeln!(text, "[{name}]").unwrap();
        writeln!(text, "atoms: {:?}", d.atoms).unwrap();
        writeln!(text, "atomic: {}", yes(d.is_atomic)).unwrap();
        if let Some(f) = &d.to_powerset {
            writeln!(text, "  to powerset: {:?}", f.images()).unwrap();
        }
        for a in l.elements() {
            let r = atom_report(&l, a);
            if !r.none() {
                let flags: Vec<&str> = ["1", "2", "3", "4", "P", "M", "O", "D"]
                    .iter()
                    .zip(r.as_array())
                    .map(|(n, b)| if b { *n } else { "-" })
                    .collect();
                writeln!(text, "  {a}: {}", flags.join("")).unwrap();
            }
        }
        out.push(json!({
            "name": name,
            "atoms": d.atoms,
            "is_atomic": d.is_atomic,
            "to_powerset": d.to_powerset.as_ref().map(map_json),
            "from_powerset": d.from_powerset.as_ref().map(map_json),
            "elements": predicates,
        }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn booleanize_cmd(ws: &Workspace) -> Result<Rendered, CliError> {
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, l) in lattices(ws)? {
        let b = booleanize(&l)?;
        let ok = b.agree && b.negneg_is_overlap_algebra && b.overlapized_is_overlap_algebra;
        if !ok {
            code = 1;
        }
        writeln!(text, "[{name}]").unwrap();
        writeln!(text, "double-negation fixed points: {:?}", b.negneg.embedding).unwrap();
        writeln!(text, "overlap-closure fixed points: {:?}", b.overlapized.embedding).unwrap();
        writeln!(
            text,
            "agree: {}, o-algebras: {}/{}",
            yes(b.agree),
            yes(b.negneg_is_overlap_algebra),
            yes(b.overlapized_is_overlap_algebra)
        )
        .unwrap();
        out.push(json!({
            "name": name,
            "negneg": b.negneg.embedding,
            "overlapized": b.overlapized.embedding,
            "agree": b.agree,
            "negneg_is_overlap_algebra": b.negneg_is_overlap_algebra,
            "overlapized_is_overlap_algebra": b.overlapized_is_overlap_algebra,
        }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn base_cmd(ws: &Workspace) -> Result<Rendered, CliError> {
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, l) in lattices(ws)? {
        let ji = join_irreducibles(&l)?;
        let plain = check_overlap_algebra(&l, None)?.is_overlap_algebra;
        let based = check_overlap_algebra(&l, Some(&ji))?.is_overlap_algebra;
        if plain != based {
            code = 1;
        }
        writeln!(text, "[{name}]").unwrap();
        writeln!(text, "join-irreducible base: {ji:?}").unwrap();
        writeln!(text, "verdict: {} (based: {})", yes(plain), yes(based)).unwrap();
        out.push(json!({ "name": name, "base": ji, "verdict": plain, "based_verdict": based }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn dagger_cmd(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let ms = maps(ws, caps, 1)?;
    join_maps_only(&ms)?;
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, f) in &ms {
        writeln!(text, "[{name}]").unwrap();
        match f.dagger() {
            Ok(d) => {
                let pair = symmetric_pair_report(f, &d)?;
                let involutive = d.dagger()? == *f;
                if !(pair.symmetric.holds && involutive) {
                    code = 1;
                }
                writeln!(text, "dagger: {:?}", d.images()).unwrap();
                writeln!(
                    text,
                    "symmetric: {}, involutive: {}",
                    yes(pair.symmetric.holds),
                    yes(involutive)
                )
                .unwrap();
                out.push(json!({
                    "name": name,
                    "dagger": d.images(),
                    "symmetric": pair.symmetric.holds,
                    "involutive": involutive,
                }));
            }
            Err(oakit_core::Error::NotSymmetrizable { x, y }) => {
                code = 1;
                writeln!(text, "no dagger: symmetry fails at x={x}, y={y}").unwrap();
                out.push(json!({ "name": name, "dagger": null, "witness": [x, y] }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn report_map(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let ms = maps(ws, caps, 1)?;
    join_maps_only(&ms)?;
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, f) in &ms {
        let r = morphism_report(f)?;
        if !r.violations.is_empty() {
            code = 1;
        }
        writeln!(text, "[{name}]").unwrap();
        write_checks(&mut text, &r.conditions);
        writeln!(
            text,
            "groups agree: {}/{}, f† ⊣ f: {}, finite meets: {}, open: {}",
            yes(r.meet_group_agrees),
            yes(r.top_group_agrees),
            yes(r.dagger_adjoint),
            yes(r.preserves_finite_meets),
            yes(r.open_map)
        )
        .unwrap();
        writeln!(
            text,
            "mono: {} (injective: {}), epi: {} (surjective: {}), iso: {}",
            yes(r.mono),
            yes(r.injective),
            yes(r.epi),
            yes(r.surjective),
            yes(r.is_iso)
        )
        .unwrap();
        for v in &r.violations {
            writeln!(text, "  violation: {v}").unwrap();
        }
        out.push(json!({ "name": name, "report": r }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn compose_cmd(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let ms = maps(ws, caps, 2)?;
    let mut h = ms[0].1.clone();
    for (_, g) in &ms[1..] {
        h = compose(g, &h)?;
    }
    let names: Vec<&str> = ms.iter().map(|(n, _)| n.as_str()).collect();
    let text = format!(
        "composite ({}): {:?}\njoin-preserving: {}\n",
        names.join(" then "),
        h.images(),
        yes(h.preserves_joins())
    );
    Ok(Rendered {
        code: 0,
        text,
        json: json!({ "maps": names, "composite": map_json(&h), "preserves_joins": h.preserves_joins() }),
    })
}

fn product(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let ls = lattices(ws)?;
    let factors: Vec<Arc<FinLattice>> = ls.iter().map(|(_, l)| l.clone()).collect();
    let w = oa_product(&factors, caps)?;
    let mut text = format!("product of {} factors: {} elements\n", factors.len(), w.product.lattice.size());
    for (k, (p, d)) in w.product.projections.iter().zip(&w.projection_daggers).enumerate() {
        writeln!(text, "  π{k}: {:?}", p.images()).unwrap();
        writeln!(text, "  π{k}†: {:?}", d.images()).unwrap();
    }
    Ok(Rendered {
        code: 0,
        text,
        json: json!({
            "factors": ls.iter().map(|(n, _)| n).collect::<Vec<_>>(),
            "size": w.product.lattice.size(),
            "projections": w.product.projections.iter().map(map_json).collect::<Vec<_>>(),
            "projection_daggers": w.projection_daggers.iter().map(map_json).collect::<Vec<_>>(),
        }),
    })
}

fn witness_json(w: &EqualizerWitness) -> Value {
    json!({
        "object_size": w.object.size(),
        "arrow": map_json(&w.arrow),
        "universal": w.universal,
        "cones_checked": w.cones_checked,
        "family_sizes": w.family_sizes,
    })
}

fn equalizer(ws: &Workspace, bound: Option<usize>, caps: &Caps) -> Result<Rendered, CliError> {
    let ms = maps(ws, caps, 2)?;
    join_maps_only(&ms)?;
    let (f, g) = (&ms[0].1, &ms[1].1);
    let cones = boolean_family(CONE_BOUND);
    match bound {
        None => {
            let w = ofrm_equalizer(f, g, &cones)?;
            let text = format!(
                "equalizer: {} elements, arrow {:?}\nuniversal: {} ({} cones, objects {:?})\n",
                w.object.size(),
                w.arrow.images(),
                yes(w.universal),
                w.cones_checked,
                w.family_sizes
            );
            Ok(Rendered {
                code: if w.universal { 0 } else { 1 },
                text,
                json: witness_json(&w),
            })
        }
        Some(bound) => {
            let s = equalizer_search(f, g, &boolean_family(bound), &cones)?;
            let found = s.witness.as_ref().is_some_and(|w| w.universal);
            let verdict = if found { EQUALIZER_FOUND } else { NO_EQUALIZER };
            let mut text = format!("verdict: {verdict}\n");
            writeln!(
                text,
                "equalizing monos: {} (largest image {}), candidates {:?}, cones {:?}",
                s.equalizing_monos, s.max_mono_image, s.candidate_sizes, s.family_sizes
            )
            .unwrap();
            if let Some(w) = &s.witness {
                writeln!(text, "witness: {} elements, arrow {:?}", w.object.size(), w.arrow.images()).unwrap();
            }
            Ok(Rendered {
                code: if found { 0 } else { 1 },
                text,
                json: json!({
                    "verdict": verdict,
                    "witness": s.witness.as_ref().map(witness_json),
                    "equalizing_monos": s.equalizing_monos,
                    "max_mono_image": s.max_mono_image,
                    "candidate_sizes": s.candidate_sizes,
                    "family_sizes": s.family_sizes,
                }),
            })
        }
    }
}

fn weak_equalizer(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let ms = maps(ws, caps, 3)?;
    join_maps_only(&ms)?;
    let r = weak_equalizer_check(&ms[0].1, &ms[1].1, &ms[2].1, &boolean_family(WEAK_BOUND))?;
    let text = format!(
        "weak equalizer: {}\nequalizes: {}, equalizing arrows: {}, all factor: {}, all fixed: {}, objects {:?}\n",
        if r.confirmed() { "CONFIRMED" } else { "REFUTED" },
        yes(r.equalizes),
        r.equalizing_arrows,
        yes(r.all_factor),
        yes(r.all_fixed),
        r.family_sizes
    );
    Ok(Rendered {
        code: if r.confirmed() { 0 } else { 1 },
        text,
        json: serde_json::to_value(&r).expect("serializable"),
    })
}

fn replay() -> Result<Rendered, CliError> {
    let r = replay_counterexample()?;
    let ok = r.verdict == NO_EQUALIZER
        && r.weak_equalizer == "CONFIRMED"
        && r.join_preserving
        && r.f_t_equals_g_t
        && r.max_mono_image <= 2
        && r.t_image_size == 3;
    let names = &r.element_names;
    let show = |v: &[Elem]| -> String {
        v.iter().map(|&i| names.get(i).cloned().unwrap_or_else(|| i.to_string())).collect::<Vec<_>>().join(" ")
    };
    let mut text = format!("verdict: {}\n", r.verdict);
    writeln!(text, "elements of Pow(2): {}", names.join(" ")).unwrap();
    writeln!(text, "f = {:?}, g = {:?} into 2", r.f, r.g).unwrap();
    writeln!(text, "t = ({})", show(&r.t)).unwrap();
    writeln!(text, "f∘t = g∘t: {} (at -a: {:?})", yes(r.f_t_equals_g_t), r.at_neg_a).unwrap();
    writeln!(
        text,
        "weak equalizer over {:?}: {} ({} equalizing arrows)",
        r.weak_family_sizes, r.weak_equalizer, r.equalizing_arrows
    )
    .unwrap();
    writeln!(
        text,
        "|im t| = {}; equalizing monos: {}, largest image {}",
        r.t_image_size, r.equalizing_monos, r.max_mono_image
    )
    .unwrap();
    writeln!(
        text,
        "candidates {:?}, cones {:?}",
        r.candidate_sizes, r.cone_family_sizes
    )
    .unwrap();
    Ok(Rendered {
        code: if ok { 0 } else { 1 },
        text,
        json: serde_json::to_value(&r).expect("serializable"),
    })
}

fn pow_functor(n: usize, m: usize, seed: u64, caps: &Caps) -> Result<Rendered, CliError> {
    let r = pow_functor_report(n, m, seed, caps)?;
    let ok = r.faithful
        && r.full
        && r.dagger_preserved
        && r.functorial
        && r.coproduct_preserved
        && r.relations == r.join_maps;
    let text = format!(
        "relations: {}, join maps: {}\nfaithful: {}, full: {}, dagger: {}, functorial: {} ({} pairs{}), coproduct: {}\n",
        r.relations,
        r.join_maps,
        yes(r.faithful),
        yes(r.full),
        yes(r.dagger_preserved),
        yes(r.functorial),
        r.pairs_checked,
        if r.sampled { ", sampled" } else { "" },
        yes(r.coproduct_preserved)
    );
    Ok(Rendered {
        code: if ok { 0 } else { 1 },
        text,
        json: serde_json::to_value(&r).expect("serializable"),
    })
}

fn nuclei(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, l) in lattices(ws)? {
        let ns = enumerate_nuclei(&l, caps)?;
        writeln!(text, "[{name}] {} nuclei", ns.len()).unwrap();
        for j in &ns {
            writeln!(text, "  {:?} fixes {:?}", j.images(), j.fixed_points()).unwrap();
        }
        let list: Vec<Value> = ns
            .iter()
            .map(|j| json!({ "images": j.images(), "fixed_points": j.fixed_points() }))
            .collect();
        out.push(json!({ "name": name, "nuclei": list }));
    }
    Ok(Rendered {
        code: 0,
        text,
        json: Value::Array(out),
    })
}

fn sublocales(ws: &Workspace, caps: &Caps) -> Result<Rendered, CliError> {
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, l) in lattices(ws)? {
        let b = sublocale_joinmap_bijection(&l, caps)?;
        let mut opens = Vec::new();
        let mut open_violations = 0;
        for j in enumerate_nuclei(&l, caps)? {
            let r = open_sublocale_report(&j)?;
            open_violations += r.violations.len();
            opens.push(json!({ "nucleus": j.images(), "report": r }));
        }
        if !(b.mutually_inverse && b.counts_agree && b.violations.is_empty() && open_violations == 0) {
            code = 1;
        }
        writeln!(text, "[{name}]").unwrap();
        writeln!(
            text,
            "nuclei: {}, o-algebra sublocales: {}, join maps to 2: {} (ideals) / {} (enumerated)",
            b.nuclei,
            b.overlap_sublocales.len(),
            b.join_maps_from_ideals,
            b.join_maps_enumerated
        )
        .unwrap();
        writeln!(
            text,
            "mutually inverse: {}, counts agree: {}",
            yes(b.mutually_inverse),
            yes(b.counts_agree)
        )
        .unwrap();
        for j in &b.overlap_sublocales {
            writeln!(text, "  {j:?}").unwrap();
        }
        for v in &b.violations {
            writeln!(text, "  violation: {v}").unwrap();
        }
        if open_violations > 0 {
            writeln!(text, "  open-sublocale violations: {open_violations}").unwrap();
        }
        out.push(json!({ "name": name, "bijection": b, "sublocales": opens }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn regular_open(ws: &Workspace) -> Result<Rendered, CliError> {
    let spaces = ws.spaces();
    if spaces.is_empty() {
        return Err(CliError::Usage("no space given".into()));
    }
    let mut code = 0;
    let mut text = String::new();
    let mut out = Vec::new();
    for (name, t) in spaces {
        let r = regular_open_algebra(&t)?;
        let (oa, boolean) = (is_overlap_algebra(&r.lattice), is_boolean(&r.lattice));
        if !(oa && boolean) {
            code = 1;
        }
        let sets: Vec<String> = r.opens.iter().map(|&u| set_string(u, t.points())).collect();
        writeln!(text, "[{name}] regular opens: {}", sets.join(" ")).unwrap();
        writeln!(text, "o-algebra: {}, boolean: {}", yes(oa), yes(boolean)).unwrap();
        out.push(json!({
            "name": name,
            "opens": r.opens,
            "size": r.lattice.size(),
            "is_overlap_algebra": oa,
            "is_boolean": boolean,
        }));
    }
    Ok(Rendered {
        code,
        text,
        json: Value::Array(out),
    })
}

fn zero_object(ws: &Workspace) -> Result<Rendered, CliError> {
    let given: Vec<Arc<FinLattice>> = ws.lattices().into_iter().map(|(_, l)| l).collect();
    let family = if given.is_empty() {
        boolean_family(CONE_BOUND)
    } else {
        given
    };
    if let Some(l) = family.iter().find(|l| !is_overlap_algebra(l)) {
        return Err(CliError::Usage(format!(
            "zero-object check needs o-algebras; a lattice of size {} is not one",
            l.size()
        )));
    }
    let r = zero_object_check(&family)?;
    let mut text = format!("zero object: {}\n", yes(r.holds));
    for e in &r.entries {
        writeln!(
            text,
            "  size {}: {} in, {} out, mutually dagger: {}",
            e.size,
            e.arrows_in,
            e.arrows_out,
            yes(e.mutually_dagger)
        )
        .unwrap();
    }
    Ok(Rendered {
        code: if r.holds { 0 } else { 1 },
        text,
        json: serde_json::to_value(&r).expect("serializable"),
    })
}
