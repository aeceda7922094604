use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use manipsem::config::parse_key_values;
use manipsem::evalkit::{
    action_recovery, compare_labeled, corpus, generate_synthetic_trace, read_manifest, write_manifest, AccuracyReport,
    FrameTruth, ModelScore, Recovery, ScenarioSpec, Synthetic,
};
use manipsem::events::{load_trace, write_trace, SceneTrace, Side};
use manipsem::grammar::{load_mapping_library, tokenize, Grammar, GrammarError, MappingLibrary};
use manipsem::pipeline::{analyze, relation_table};
use manipsem::realizer::{Description, TemplateSet};
use manipsem::{Config, Execution};
use serde_json::json;

use crate::args::{Cli, Command, Format, Global, HandArg};
use crate::error::{self, CliError};

struct Settings {
    cfg: Config,
    library: Option<PathBuf>,
    templates: Option<PathBuf>,
    format: Format,
    seed: u64,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Defaults, then the config file, then flags.
fn settings(g: &Global) -> Result<Settings, CliError> {
    let mut s = Settings { cfg: Config::default(), library: None, templates: None, format: g.format, seed: g.seed };
    if let Some(path) = &g.config {
        let text = read(path)?;
        let pairs = parse_key_values(&text).map_err(|e| CliError::new(error::PARSE, format!("{}: {e}", path.display())))?;
        for (line, key, value) in pairs {
            let bad = |msg: String| CliError::new(error::SCHEMA, format!("{}: line {line}: {msg}", path.display()));
            match key.as_str() {
                "library" => s.library = Some(PathBuf::from(value)),
                "templates" => s.templates = Some(PathBuf::from(value)),
                _ => match s.cfg.set(&key, &value) {
                    Ok(true) => {}
                    Ok(false) => return Err(bad(format!("unknown key `{key}`"))),
                    Err(v) => return Err(bad(format!("invalid value `{v}` for `{key}`"))),
                },
            }
        }
    }
    let c = &mut s.cfg;
    if let Some(v) = g.eps_touch {
        c.eps_touch = v;
    }
    if let Some(v) = g.eps_bnd {
        c.eps_bnd = v;
    }
    if let Some(v) = g.theta_near {
        c.relation.theta_near = v;
    }
    if let Some(v) = g.delta_move {
        c.relation.delta_move = v;
    }
    if let Some(v) = g.delta_rel {
        c.relation.delta_rel = v;
    }
    if let Some(v) = g.window {
        c.relation.window = v;
    }
    if let Some(v) = g.debounce {
        c.debounce = v;
    }
    if g.library.is_some() {
        s.library = g.library.clone();
    }
    if g.templates.is_some() {
        s.templates = g.templates.clone();
    }
    s.cfg.validate().map_err(|e| CliError::new(error::SCHEMA, e.to_string()))?;
    log::debug!("config:\n{}", s.cfg);
    Ok(s)
}

impl Settings {
    fn library(&self) -> Result<MappingLibrary, CliError> {
        match &self.library {
            None => Ok(MappingLibrary::default_library()),
            Some(p) => {
                let f = File::open(p).map_err(|e| CliError::io(p, e))?;
                load_mapping_library(BufReader::new(f)).map_err(|e| CliError::grammar(p, e))
            }
        }
    }

    fn templates(&self, lib: &MappingLibrary) -> Result<TemplateSet, CliError> {
        let ts = match &self.templates {
            None => TemplateSet::default_templates(),
            Some(p) => {
                let f = File::open(p).map_err(|e| CliError::io(p, e))?;
                TemplateSet::load(BufReader::new(f)).map_err(CliError::realizer)?
            }
        };
        let missing = ts.missing(lib);
        if !missing.is_empty() {
            return Err(CliError::new(error::SCHEMA, format!("templates missing: {}", missing.join(", "))));
        }
        Ok(ts)
    }
}

fn load(path: &Path) -> Result<SceneTrace, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut t = load_trace(BufReader::new(f)).map_err(|e| CliError::trace(path, e))?;
    if let Some(stem) = path.file_stem() {
        t.id = stem.to_string_lossy().into_owned();
    }
    Ok(t)
}

fn record(out: &mut dyn Write, v: serde_json::Value) -> std::io::Result<()> {
    writeln!(out, "{v}")
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let s = settings(&cli.global)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Relations { trace } => relations(&s, &trace, &mut out)?,
        Command::Describe { trace, level, all_levels, hand } => describe(&s, &trace, level, all_levels, hand, &mut out)?,
        Command::Bench { corpus, compare, out: dir, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            bench(&s, &corpus, compare, dir.as_deref(), exec, &mut out)?
        }
        Command::Parse { tokens } => parse(&s, &tokens, &mut out)?,
        Command::Generate { scenario, noise, frames, out: file, truth, corpus, count, traces } => {
            if !(noise.is_finite() && noise >= 0.0) {
                return Err(CliError::new(error::SCHEMA, format!("noise must be >= 0, got {noise}")));
            }
            match (corpus, scenario) {
                (Some(dir), _) => generate_corpus(&s, &dir, count, noise, traces, &mut out)?,
                (None, Some(name)) => {
                    let mut spec = ScenarioSpec::new(&name, s.seed).with_noise(noise);
                    spec.frames = frames;
                    generate_one(&s, &spec, file.as_deref(), truth.as_deref(), &mut out)?
                }
                (None, None) => unreachable!("clap requires a scenario or --corpus"),
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn relations(s: &Settings, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let trace = load(path)?;
    let rows = relation_table(&trace, &s.cfg, Execution::Sequential).map_err(|e| CliError::trace(path, e))?;
    if s.format == Format::Text {
        writeln!(out, "frame\ta\tb\tssr\tdsr")?;
    }
    for r in rows {
        let dsr = r.dsr.map_or("-", |d| d.as_str());
        match s.format {
            Format::Text => writeln!(out, "{}\t{}\t{}\t{}\t{}", r.frame, r.a, r.b, r.ssr, dsr)?,
            Format::Records => record(out, json!({"frame": r.frame, "a": r.a, "b": r.b, "ssr": r.ssr.as_str(), "dsr": dsr}))?,
        }
    }
    Ok(())
}

fn caption(level: usize, top: usize) -> &'static str {
    if level == 1 {
        "detailed sentences"
    } else if level >= top {
        "one sentence per action"
    } else {
        "multiple sentences"
    }
}

fn list(levels: &BTreeSet<usize>) -> String {
    levels.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
}

fn describe(
    s: &Settings,
    path: &Path,
    level: Option<usize>,
    all: bool,
    hand: HandArg,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let lib = s.library()?;
    let ts = s.templates(&lib)?;
    let trace = load(path)?;
    let a = analyze(&trace, &s.cfg, &lib, Execution::Sequential).map_err(|e| CliError::trace(path, e))?;
    let sides = match hand {
        HandArg::Left => vec![Side::Left],
        HandArg::Right => vec![Side::Right],
        HandArg::Both => vec![Side::Left, Side::Right],
    };
    let levels_of = |side: Side| {
        let l = a.hand(side).levels();
        if l.is_empty() {
            BTreeSet::from([1])
        } else {
            l
        }
    };
    let union: BTreeSet<usize> = sides.iter().flat_map(|&sd| levels_of(sd)).collect();
    if let Some(k) = level {
        if !all && !union.contains(&k) {
            return Err(CliError::new(error::LEVEL, format!("level {k} unavailable; available levels: {}", list(&union))));
        }
    }
    let mut docs: Vec<(Description, usize)> = Vec::new();
    for &side in &sides {
        let mine = levels_of(side);
        let top = mine.iter().copied().max().unwrap_or(1);
        let chosen: Vec<usize> = match level {
            Some(k) if !all => vec![k],
            _ => mine.iter().copied().collect(),
        };
        for k in chosen {
            docs.push((a.describe(side, k, &ts, &lib).map_err(CliError::realizer)?, top));
        }
    }
    let mut last_side = None;
    for (d, top) in docs {
        match s.format {
            Format::Text => {
                if last_side != Some(d.hand) {
                    if last_side.is_some() {
                        writeln!(out)?;
                    }
                    let w = d.hand.word();
                    writeln!(out, "{}{} hand", w[..1].to_uppercase(), &w[1..])?;
                    last_side = Some(d.hand);
                }
                writeln!(out, "  Level {} ({}):", d.level, caption(d.level, top))?;
                for sn in &d.sentences {
                    writeln!(out, "    [{}-{}] {}", sn.frame_span.0, sn.frame_span.1, sn.text)?;
                }
            }
            Format::Records => {
                for sn in &d.sentences {
                    record(
                        out,
                        json!({
                            "hand": d.hand.word(),
                            "level": d.level,
                            "start": sn.frame_span.0,
                            "end": sn.frame_span.1,
                            "text": sn.text,
                        }),
                    )?;
                }
            }
        }
    }
    Ok(())
}

struct Loaded {
    trace: SceneTrace,
    relations: Vec<FrameTruth>,
    action: Option<(Side, String)>,
}

fn truth_path(trace: &Path) -> PathBuf {
    let stem = trace.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    trace.with_file_name(format!("{stem}.truth.json"))
}

/// Relation labels and the optional named action of a truth sidecar.
type Truth = (Vec<FrameTruth>, Option<(Side, String)>);

fn load_truth(path: &Path) -> Result<Truth, CliError> {
    let bad = |msg: String| CliError::new(error::SCHEMA, format!("{}: {msg}", path.display()));
    let v: serde_json::Value =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::new(error::PARSE, format!("{}: {e}", path.display())))?;
    let relations = serde_json::from_value(v.get("relations").cloned().ok_or_else(|| bad("no `relations`".into()))?)
        .map_err(|e| bad(e.to_string()))?;
    let side = match v.get("hand").and_then(|h| h.as_str()) {
        Some("right") => Side::Right,
        _ => Side::Left,
    };
    let action = v.get("action").and_then(|a| a.as_str()).map(|a| (side, a.to_string()));
    Ok((relations, action))
}

fn score_line(m: &ModelScore) -> String {
    format!("{}\t{}\t{}\t{:.4}", m.model, m.correct, m.total, m.accuracy)
}

fn hull_only_labels(m: &ModelScore) -> String {
    let on: Vec<&str> = m.distinguishes.iter().filter(|(_, &v)| v).map(|(l, _)| l.as_str()).collect();
    if on.is_empty() {
        "none".into()
    } else {
        on.join(" ")
    }
}

fn write_reports(dir: &Path, report: &AccuracyReport, compare: bool, recovery: &Recovery) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tsv = String::from("model\tcorrect\ttotal\taccuracy\n");
    let models: Vec<&ModelScore> = if compare { vec![&report.hull, &report.aabb] } else { vec![&report.hull] };
    for m in &models {
        tsv += &score_line(m);
        tsv.push('\n');
    }
    tsv += "\nmodel\ttruth\tpredicted\tcount\n";
    for m in &models {
        for (t, p, n) in &m.confusion {
            tsv += &format!("{}\t{t}\t{p}\t{n}\n", m.model);
        }
    }
    let tsv_path = dir.join("accuracy.tsv");
    fs::write(&tsv_path, tsv).map_err(|e| CliError::io(&tsv_path, e))?;
    let doc = if compare {
        json!({"report": report, "recovery": recovery})
    } else {
        json!({"report": {"scenes": report.scenes, "hull": report.hull}, "recovery": recovery})
    };
    let json_path = dir.join("accuracy.json");
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::new(error::IO, e.to_string()))?;
    fs::write(&json_path, text + "\n").map_err(|e| CliError::io(&json_path, e))?;
    Ok(())
}

fn bench(
    s: &Settings,
    dir: &Path,
    compare: bool,
    out_dir: Option<&Path>,
    exec: Execution,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let lib = s.library()?;
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    files.sort();
    let manifest = dir.join("manifest.txt");
    let specs = if manifest.is_file() {
        read_manifest(&read(&manifest)?).map_err(|e| CliError::new(error::PARSE, format!("{}: {e}", manifest.display())))?
    } else {
        Vec::new()
    };
    let generated: Vec<Synthetic> = exec
        .map(&specs, |sp| generate_synthetic_trace(sp, &s.cfg))
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::new(error::SCHEMA, e.to_string()))?;
    let mut loaded = Vec::new();
    for f in files.iter().filter(|f| f.extension().is_some_and(|x| x == "jsonl")) {
        let tp = truth_path(f);
        if !tp.is_file() {
            log::warn!("{}: no truth file, skipped", f.display());
            continue;
        }
        let (relations, action) = load_truth(&tp)?;
        loaded.push(Loaded { trace: load(f)?, relations, action });
    }
    if generated.is_empty() && loaded.is_empty() {
        return Err(CliError::new(error::EMPTY_CORPUS, format!("{}: empty corpus", dir.display())));
    }
    let mut items: Vec<(&SceneTrace, &[FrameTruth])> =
        generated.iter().map(|g| (&g.trace, &g.truth.relations[..])).collect();
    items.extend(loaded.iter().map(|l| (&l.trace, &l.relations[..])));
    let report = compare_labeled(&items, &s.cfg, exec).map_err(|e| CliError::new(error::SCHEMA, e.to_string()))?;
    let mut named: Vec<(&SceneTrace, Side, &str)> =
        generated.iter().map(|g| (&g.trace, g.truth.side, g.truth.action.as_str())).collect();
    named.extend(loaded.iter().filter_map(|l| l.action.as_ref().map(|(sd, a)| (&l.trace, *sd, a.as_str()))));
    let recovery = action_recovery(&named, &s.cfg, &lib, exec).map_err(|e| CliError::new(error::SCHEMA, e.to_string()))?;
    if let Some(d) = out_dir {
        write_reports(d, &report, compare, &recovery)?;
    }
    let models: Vec<&ModelScore> = if compare { vec![&report.hull, &report.aabb] } else { vec![&report.hull] };
    match s.format {
        Format::Text => {
            writeln!(out, "scenes\t{}", report.scenes)?;
            writeln!(out, "model\tcorrect\ttotal\taccuracy")?;
            for m in &models {
                writeln!(out, "{}", score_line(m))?;
            }
            for m in &models {
                writeln!(out, "{} separates\t{}", m.model, hull_only_labels(m))?;
            }
            writeln!(out, "actions recovered\t{}/{}\t{:.4}", recovery.recovered, recovery.total, recovery.rate)?;
        }
        Format::Records => {
            for m in &models {
                record(out, serde_json::to_value(m).map_err(|e| CliError::new(error::IO, e.to_string()))?)?;
            }
            record(out, json!({"recovery": recovery}))?;
        }
    }
    eprintln!("bench: {} scenes in {:.2?}", report.scenes, started.elapsed());
    Ok(())
}

fn parse(s: &Settings, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let tokens = tokenize(&read(path)?);
    match Grammar::standard().parse(&tokens) {
        Ok(tree) => match s.format {
            Format::Text => write!(out, "{tree}")?,
            Format::Records => record(out, json!({"tree": tree.bracketed(), "depth": tree.depth()}))?,
        },
        Err(GrammarError::NoParse { position, token }) => {
            let at = token.map_or_else(|| "end of input".to_string(), |t| format!("`{t}`"));
            return Err(CliError::new(error::NO_PARSE, format!("{}: no parse; failure at token {position} ({at})", path.display())));
        }
        Err(e) => return Err(CliError::grammar(path, e)),
    }
    Ok(())
}

fn truth_doc(g: &Synthetic) -> serde_json::Value {
    json!({
        "action": g.truth.action,
        "hand": g.truth.side.word(),
        "bindings": g.truth.bindings,
        "actions": {"left": g.truth.actions.left, "right": g.truth.actions.right},
        "relations": g.truth.relations,
    })
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string(v).map_err(|e| CliError::new(error::IO, e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

fn generate(s: &Settings, spec: &ScenarioSpec) -> Result<Synthetic, CliError> {
    generate_synthetic_trace(spec, &s.cfg).map_err(|e| CliError::new(error::PARSE, e.to_string()))
}

fn generate_one(
    s: &Settings,
    spec: &ScenarioSpec,
    file: Option<&Path>,
    truth: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let g = generate(s, spec)?;
    match file {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(f);
            write_trace(&g.trace, &mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(p, e))?;
        }
        None => write_trace(&g.trace, &mut *out)?,
    }
    if let Some(p) = truth {
        write_json(p, &truth_doc(&g))?;
    }
    Ok(())
}

fn generate_corpus(
    s: &Settings,
    dir: &Path,
    count: usize,
    noise: f64,
    traces: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let specs = corpus(count, noise, s.seed);
    if traces {
        for (i, spec) in specs.iter().enumerate() {
            let stem = format!("{i:04}_{}", spec.scenario.to_lowercase());
            let trace_file = dir.join(format!("{stem}.jsonl"));
            generate_one(s, spec, Some(&trace_file), Some(&dir.join(format!("{stem}.truth.json"))), out)?;
        }
    } else {
        let path = dir.join("manifest.txt");
        fs::write(&path, write_manifest(&specs)).map_err(|e| CliError::io(&path, e))?;
    }
    match s.format {
        Format::Text => writeln!(out, "wrote {} scenes to {}", specs.len(), dir.display())?,
        Format::Records => record(out, json!({"scenes": specs.len(), "dir": dir.display().to_string()}))?,
    }
    Ok(())
}
