//! Command-line front end for the navigation stack.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand};

use agnav::copilot::{
    evaluate_passages, ingest_notification, ChatBackend, EventStore, HttpBackend, RuleBackend,
    ScriptedBackend, ExperienceStats, RobotCapabilities,
};
use agnav::graph::{build_area_graph, load_table, map_content_hash, precompute_distances, save_table};
use agnav::grid::{export_pgm, render_restricted, AreaGrids, DEFAULT_RESOLUTION, EXPORT_RESOLUTION};
use agnav::map::{parse_osmag, project, validate, LocalPoint, MapDocument, ProjectedMap};
use agnav::planner::{interior_anchor, plan_with_approval, PlanRequest, PlannerConfig, RobotPose};
use agnav::sim::{prepare_case, run_configuration, summary_csv, summary_table, write_case_outputs, CaseSpec, Configuration};

#[derive(Parser)]
#[command(name = "agnav", version, about = "Area-graph navigation with an LLM copilot")]
struct Cli {
    /// Seed for stochastic components (reserved; the rule backend is
    /// deterministic and ignores it).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory for generated files.
    #[arg(long, global = true, default_value = "results")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a map and report rule violations.
    Validate { map: PathBuf },

    /// Precompute the intra-area passage distance table.
    Precompute {
        map: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: f64,
        /// Output file (defaults to `<map>.dist`).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Plan a path and run it through the approval loop.
    Plan {
        map: PathBuf,
        /// Start: an area name, or `x,y` local meters.
        #[arg(long)]
        from: String,
        /// Destination area name.
        #[arg(long)]
        to: String,
        /// Event store to check the path against.
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long, default_value = "rule")]
        backend: String,
        /// Instruction text given to the cost evaluator.
        #[arg(long)]
        instruction: Option<String>,
        /// Decision time (RFC 3339); defaults to now.
        #[arg(long)]
        now: Option<String>,
    },

    /// Feed notifications to the event monitor and persist the store.
    Ingest {
        map: PathBuf,
        /// Event store file (created if missing).
        #[arg(long)]
        events: PathBuf,
        /// Notification text file, one notification per line; `-` = stdin.
        #[arg(long)]
        text: String,
        #[arg(long, default_value = "rule")]
        backend: String,
        #[arg(long)]
        now: Option<String>,
    },

    /// Render a restricted global map and export it as PGM + metadata.
    Render {
        map: PathBuf,
        /// Allowed area names or ids, comma separated.
        #[arg(long)]
        areas: String,
        /// Open passage ids, comma separated (all others stay sealed).
        #[arg(long, default_value = "")]
        passages: String,
        /// Output path prefix.
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = EXPORT_RESOLUTION)]
        resolution: f64,
        #[arg(long, default_value_t = 1)]
        level: i32,
    },

    /// Run one benchmark case under one configuration.
    Simulate {
        case: PathBuf,
        #[arg(long, default_value = "full")]
        config: String,
        #[arg(long, default_value = "rule")]
        backend: String,
    },

    /// Run every case in a directory under all configurations.
    Bench {
        case_dir: PathBuf,
        /// Kept for symmetry with `simulate`; bench always runs all
        /// configurations.
        #[arg(long, default_value_t = true)]
        all: bool,
    },
}

fn make_backend(spec: &str) -> Result<Box<dyn ChatBackend>, String> {
    if spec == "rule" {
        return Ok(Box::new(RuleBackend::new()));
    }
    if let Some(path) = spec.strip_prefix("scripted:") {
        return ScriptedBackend::from_file(Path::new(path))
            .map(|b| Box::new(b) as Box<dyn ChatBackend>)
            .map_err(|e| e.to_string());
    }
    if let Some(model) = spec.strip_prefix("live:") {
        return HttpBackend::from_env(model)
            .map(|b| Box::new(b) as Box<dyn ChatBackend>)
            .map_err(|e| e.to_string());
    }
    Err(format!("unknown backend \"{spec}\" (use rule, scripted:<file>, live:<model>)"))
}

fn load_map(path: &Path) -> Result<(MapDocument, ProjectedMap), String> {
    let xml = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = parse_osmag(&xml).map_err(|e| e.to_string())?;
    let map = project(&doc).map_err(|e| e.to_string())?;
    Ok((doc, map))
}

fn parse_now(arg: &Option<String>) -> Result<DateTime<Utc>, String> {
    match arg {
        Some(s) => s.parse().map_err(|e| format!("bad --now timestamp: {e}")),
        None => Ok(Utc::now()),
    }
}

fn resolve_area(doc: &MapDocument, name_or_id: &str) -> Result<i64, String> {
    if let Ok(id) = name_or_id.parse::<i64>() {
        if doc.area(id).is_some() {
            return Ok(id);
        }
    }
    let ids = doc.areas_named(name_or_id.trim());
    match ids.as_slice() {
        [one] => Ok(*one),
        [] => Err(format!("no area named \"{name_or_id}\"")),
        many => Err(format!("area name \"{name_or_id}\" is ambiguous ({} levels)", many.len())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { map } => {
            let (doc, _) = load_map(&map)?;
            let violations = validate(&doc);
            for v in &violations {
                println!("{}", v.report_line());
            }
            if violations.is_empty() {
                println!("OK: {} areas, {} passages, {} nodes", doc.areas.len(), doc.passages.len(), doc.nodes.len());
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }

        Command::Precompute { map, resolution, out } => {
            let (_, projected) = load_map(&map)?;
            let table = precompute_distances(&projected, resolution).map_err(|e| e.to_string())?;
            let out = out.unwrap_or_else(|| {
                let mut p = map.clone();
                p.set_extension("dist");
                p
            });
            save_table(&table, &out).map_err(|e| e.to_string())?;
            println!("wrote {} entries to {}", table.entries.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }

        Command::Plan { map, from, to, events, backend, instruction, now } => {
            let (doc, projected) = load_map(&map)?;
            let backend = make_backend(&backend)?;
            let now = parse_now(&now)?;
            // reuse the precomputed table when its content hash still matches
            let mut cache_path = map.clone();
            cache_path.set_extension("dist");
            let table = match load_table(&cache_path) {
                Ok(t) if t.map_hash == map_content_hash(&projected, t.resolution) => t,
                _ => precompute_distances(&projected, DEFAULT_RESOLUTION).map_err(|e| e.to_string())?,
            };
            let graph = build_area_graph(&projected, &table).map_err(|e| e.to_string())?;
            let mut grids = AreaGrids::new(&projected, DEFAULT_RESOLUTION);

            let destination = resolve_area(&doc, &to)?;
            let pose = parse_pose(&doc, &projected, &from)?;
            let store = match &events {
                Some(p) if p.exists() => EventStore::load(p).map_err(|e| e.to_string())?,
                _ => EventStore::new(),
            };
            let caps = RobotCapabilities::wheeled();
            let instruction = instruction.unwrap_or_else(|| format!("Go to {to}."));
            let costs = evaluate_passages(backend.as_ref(), &instruction, &doc, &ExperienceStats::default(), &caps)
                .map_err(|e| e.to_string())?;
            let mut req = PlanRequest::new(pose, destination);
            req.costs = costs;

            let config = PlannerConfig::default();
            let (plan, trace) = plan_with_approval(
                &graph, &doc, &projected, &mut grids, &req, backend.as_ref(), &store, now, &caps,
                doc.areas.len().max(1), &config,
            )
            .map_err(|e| e.to_string())?;

            let trace_json: Vec<serde_json::Value> = trace
                .iter()
                .map(|r| serde_json::json!({"round": r.round, "verdict": r.verdict}))
                .collect();
            let out = serde_json::json!({
                "passages": plan.passages,
                "areas": plan.areas,
                "est_cost": plan.est_cost,
                "est_length": plan.est_length,
                "trace": trace_json,
            });
            println!("{}", serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?);
            Ok(ExitCode::SUCCESS)
        }

        Command::Ingest { map, events, text, backend, now } => {
            let (doc, _) = load_map(&map)?;
            let backend = make_backend(&backend)?;
            let now = parse_now(&now)?;
            let mut store = if events.exists() {
                EventStore::load(&events).map_err(|e| e.to_string())?
            } else {
                EventStore::new()
            };
            let body = if text == "-" {
                use std::io::Read as _;
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
                s
            } else {
                std::fs::read_to_string(&text).map_err(|e| format!("{text}: {e}"))?
            };
            let mut stored = 0;
            let mut skipped = 0;
            for line in body.lines().filter(|l| !l.trim().is_empty()) {
                match ingest_notification(backend.as_ref(), line, now, &doc, &mut store) {
                    Ok(Some(rec)) => {
                        stored += 1;
                        println!("stored {}: avoid {:?}", rec.id, rec.areas_to_avoid);
                    }
                    Ok(None) => {
                        skipped += 1;
                        println!("irrelevant: {}", truncate(line, 60));
                    }
                    Err(e) => eprintln!("failed: {e}"),
                }
            }
            store.save(&events).map_err(|e| e.to_string())?;
            println!("{stored} stored, {skipped} irrelevant -> {}", events.display());
            Ok(ExitCode::SUCCESS)
        }

        Command::Render { map, areas, passages, out, resolution, level } => {
            let (doc, projected) = load_map(&map)?;
            let area_ids: Vec<i64> = areas
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| resolve_area(&doc, s.trim()))
                .collect::<Result<_, _>>()?;
            let passage_ids: Vec<i64> = passages
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<i64>().map_err(|e| format!("bad passage id: {e}")))
                .collect::<Result<_, _>>()?;
            let grid = render_restricted(&projected, level, &area_ids, &passage_ids, resolution)
                .map_err(|e| e.to_string())?;
            export_pgm(&grid, &out).map_err(|e| e.to_string())?;
            println!("wrote {out}.pgm ({}x{} cells) and {out}.meta", grid.width, grid.height);
            Ok(ExitCode::SUCCESS)
        }

        Command::Simulate { case, config, backend } => {
            let backend = make_backend(&backend)?;
            let config = Configuration::parse(&config)
                .ok_or_else(|| format!("unknown configuration \"{config}\""))?;
            let spec = CaseSpec::load(&case).map_err(|e| e.to_string())?;
            let prepared = prepare_case(spec).map_err(|e| e.to_string())?;
            let results = run_configuration(&prepared, config, backend.as_ref()).map_err(|e| e.to_string())?;

            let mut per_config = BTreeMap::new();
            per_config.insert(config.label().to_string(), results);
            let rows = write_case_outputs(&cli.out_dir, &prepared.spec.name, &prepared.map, prepared.level, &per_config)
                .map_err(|e| e.to_string())?;
            print!("{}", summary_table(&rows));
            Ok(ExitCode::SUCCESS)
        }

        Command::Bench { case_dir, all: _ } => {
            let backend = RuleBackend::new();
            let mut case_files: Vec<PathBuf> = std::fs::read_dir(&case_dir)
                .map_err(|e| format!("{}: {e}", case_dir.display()))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "case"))
                .collect();
            case_files.sort();
            if case_files.is_empty() {
                return Err(format!("no .case files in {}", case_dir.display()));
            }

            let mut all_rows = Vec::new();
            for path in case_files {
                let spec = CaseSpec::load(&path).map_err(|e| e.to_string())?;
                let prepared = prepare_case(spec).map_err(|e| e.to_string())?;
                let mut per_config = BTreeMap::new();
                for config in Configuration::ALL {
                    let results = run_configuration(&prepared, config, &backend).map_err(|e| e.to_string())?;
                    per_config.insert(config.label().to_string(), results);
                }
                let rows = write_case_outputs(&cli.out_dir, &prepared.spec.name, &prepared.map, prepared.level, &per_config)
                    .map_err(|e| e.to_string())?;
                all_rows.extend(rows);
            }
            print!("{}", summary_table(&all_rows));
            std::fs::create_dir_all(&cli.out_dir).map_err(|e| e.to_string())?;
            std::fs::write(cli.out_dir.join("summary.csv"), summary_csv(&all_rows)).map_err(|e| e.to_string())?;
            println!("summary written to {}", cli.out_dir.join("summary.csv").display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_pose(doc: &MapDocument, map: &ProjectedMap, from: &str) -> Result<RobotPose, String> {
    if let Some((x, y)) = from.split_once(',') {
        if let (Ok(x), Ok(y)) = (x.trim().parse::<f64>(), y.trim().parse::<f64>()) {
            let p = LocalPoint::new(x, y);
            let area = map
                .area_containing(p, None)
                .ok_or_else(|| format!("({x}, {y}) is not inside any area"))?;
            return Ok(RobotPose { position: p, area: area.id, level: area.level });
        }
    }
    let id = resolve_area(doc, from)?;
    let level = doc.area(id).map(|a| a.level).unwrap_or(0);
    let anchor = interior_anchor(map, id, DEFAULT_RESOLUTION).map_err(|e| e.to_string())?;
    Ok(RobotPose { position: anchor, area: id, level })
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        let cut: String = s.chars().take(n).collect();
        format!("{cut}...")
    }
}
