use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::bail;
use clap::{Args, Parser, Subcommand};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use kinground::bench::{assemble, balance_with_caps, caps_for, read_items_with_header, Balanced, Benchmark};
use kinground::config::Config;
use kinground::eval::{aggregate, format_table, AnswerExtractor, CommandExtractor, GrammarExtractor, Prediction};
use kinground::ground::ground_manifest;
use kinground::interchange::{read_jsonl, read_manifest, write_manifest, Domain, SceneManifest, Task};
use kinground::pseudolabel::{read_index, run_pipeline, write_scene_dir};
use kinground::qagen::{assign_colors, generate_all, read_ppm, render_overlay, write_dataset, write_ppm, RgbRaster};
use kinground::synth::{preset, random_scene, synth_frames, PRESETS, PRESET_DURATION};
use kinground::Error;

/// Kinematic grounding, QA generation, benchmark assembly and scoring.
#[derive(Debug, Parser)]
#[command(name = "kinground", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct Global {
    /// JSON config file; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice [default: config seed, else 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; outputs do not depend on it [default: all cores].
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Dump per-object distance, speed and clock headings of a manifest.
    Ground {
        #[arg(long)]
        manifest: PathBuf,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn reconstruction scene directories into pseudo-labeled manifests.
    Pseudo {
        /// Scene directories, each holding a scene.json index.
        #[arg(required = true)]
        scene_dirs: Vec<PathBuf>,
        /// One <scene_id>.json manifest is written here per scene.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate QA items from manifests.
    Gen {
        /// Manifest files, or directories whose *.json files are manifests.
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Restrict to these tasks (comma separated) [default: all seven].
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<Task>>,
    },
    /// Cap the number of items per answer-label bin.
    Balance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Per-bin cap [default: smallest bin per task, clamped to [10, quota]].
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Draw a fixed number of items per task into a benchmark file.
    Assemble {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Items per task [default: 200].
        #[arg(long)]
        quota: Option<usize>,
        /// Keep short pools whole instead of failing; the shortfall is
        /// recorded in the header.
        #[arg(long)]
        allow_short: bool,
    },
    /// Score model responses against a benchmark.
    Eval {
        #[arg(long)]
        bench: PathBuf,
        /// JSONL of {"qa_id", "response"}.
        #[arg(long)]
        pred: PathBuf,
        /// Report JSON.
        #[arg(long)]
        out: PathBuf,
        /// Per-item scores as JSONL.
        #[arg(long)]
        items_out: Option<PathBuf>,
        /// Row label in the printed table.
        #[arg(long, default_value = "model")]
        model: String,
        /// External extractor command, run once per response with a JSON
        /// request on stdin.
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        extractor_cmd: Option<Vec<String>>,
    },
    /// Write synthetic fixtures: random manifests and rendered scenes.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        /// Number of random manifests under <out_dir>/manifests.
        #[arg(long, default_value_t = 50)]
        manifests: usize,
        /// Rendered scenes under <out_dir>/scenes (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = PRESETS.map(String::from))]
        scenes: Vec<String>,
    },
    /// Draw manifest boxes over scene frames as binary PPM.
    Overlay {
        #[arg(long)]
        scene_dir: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 3)]
        thickness: u32,
    },
    /// Print the effective configuration.
    Config,
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn json_pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Expands directories to their *.json files, sorted by name.
fn manifest_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn frame_ppm(scene_dir: &Path, index: u32) -> PathBuf {
    scene_dir.join(format!("{}.ppm", kinground::pseudolabel::frame_stem(index)))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.global.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.global.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Cmd::Ground { manifest, out } => {
            let m = read_manifest(&manifest)?;
            let text = json_pretty(&ground_manifest(&m, &cfg.kinematics));
            match out {
                Some(p) => write_text(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Pseudo { scene_dirs, out_dir } => {
            create_dir(&out_dir)?;
            let pipeline = cfg.pipeline();
            let outputs = scene_dirs
                .par_iter()
                .map(|d| run_pipeline(d, &pipeline))
                .collect::<Result<Vec<_>, _>>()?;
            for o in outputs {
                let path = out_dir.join(format!("{}.json", o.manifest.scene_id));
                write_manifest(&o.manifest, &path)?;
                info!("{}: alpha {:.6}, {} objects", o.manifest.scene_id, o.alpha.value(), o.manifest.objects.len());
            }
        }
        Cmd::Gen { manifests, out, tasks } => {
            if let Some(t) = tasks {
                cfg.qagen.tasks = t;
            }
            cfg.check()?;
            let paths = manifest_paths(&manifests)?;
            let ms = paths.par_iter().map(read_manifest).collect::<Result<Vec<_>, _>>()?;
            let items = generate_all(&ms, cfg.seed, &cfg.gen_settings())?;
            write_dataset(&items, &out)?;
            info!("{} items from {} manifests", items.len(), ms.len());
        }
        Cmd::Balance { input, out, cap } => {
            if cap.is_some() {
                cfg.bench.cap = cap;
            }
            cfg.check()?;
            let (_, items) = read_items_with_header(&input)?;
            let caps = caps_for(&items, &cfg.bench);
            let kept = balance_with_caps(&items, &caps, cfg.seed, &cfg.bench)?;
            Benchmark::from_balanced(Balanced { items: kept, caps }, cfg.seed).write(&out)?;
        }
        Cmd::Assemble { input, out, quota, allow_short } => {
            if let Some(q) = quota {
                cfg.bench.quota = q;
            }
            cfg.check()?;
            let (header, items) = read_items_with_header(&input)?;
            let mut b = assemble(&items, cfg.seed, allow_short, &cfg.bench)?;
            if let Some(h) = header {
                b.header.caps = h.caps;
            }
            b.write(&out)?;
        }
        Cmd::Eval { bench, pred, out, items_out, model, extractor_cmd } => {
            let (_, items) = read_items_with_header(&bench)?;
            let preds: Vec<Prediction> = read_jsonl(&pred)?;
            let extractor: Box<dyn AnswerExtractor> = match extractor_cmd {
                Some(mut argv) if !argv.is_empty() => {
                    let program = argv.remove(0);
                    Box::new(CommandExtractor { program, args: argv })
                }
                _ => Box::new(GrammarExtractor),
            };
            let ev = aggregate(&items, &preds, extractor.as_ref())?;
            write_text(&out, &json_pretty(&ev.report))?;
            if let Some(p) = items_out {
                kinground::interchange::write_jsonl(&ev.items, &p)?;
            }
            print!("{}", format_table(&ev.report, &model));
        }
        Cmd::Synth { out_dir, manifests, scenes } => {
            let mdir = out_dir.join("manifests");
            create_dir(&mdir)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let generated: Vec<SceneManifest> = (0..manifests)
                .map(|i| {
                    let domain = Domain::ALL[rng.gen_range(0..Domain::ALL.len())];
                    random_scene(&mut rng, &format!("synth_{i:04}"), domain).manifest
                })
                .collect();
            generated
                .par_iter()
                .map(|m| write_manifest(m, mdir.join(format!("{}.json", m.scene_id))))
                .collect::<Result<(), _>>()?;
            for name in &scenes {
                let Some(scene) = preset(name) else {
                    bail!(Error::InvalidArgument(format!(
                        "unknown scene preset {name}; known: {}",
                        PRESETS.join(", ")
                    )));
                };
                let frames = synth_frames(&scene.scripts, &scene.camera, &scene.render)?;
                let dir = out_dir.join("scenes").join(name);
                let index = write_scene_dir(&dir, name, Domain::Driving, PRESET_DURATION, &frames)?;
                let flat = RgbRaster::from_pixel(scene.render.width, scene.render.height, image::Rgb([96, 96, 96]));
                for e in &index.frames {
                    write_ppm(&flat, frame_ppm(&dir, e.index))?;
                }
            }
        }
        Cmd::Overlay { scene_dir, manifest, out_dir, thickness } => {
            let index = read_index(&scene_dir)?;
            let m = read_manifest(&manifest)?;
            let colors = assign_colors(&m);
            create_dir(&out_dir)?;
            for e in &index.frames {
                let src = frame_ppm(&scene_dir, e.index);
                let frame = if src.exists() {
                    read_ppm(&src)?
                } else {
                    let depth = kinground::interchange::read_depth(
                        scene_dir.join(&e.relative_depth),
                        kinground::interchange::DepthKind::Relative,
                    )?;
                    RgbRaster::new(depth.width, depth.height)
                };
                let boxes: Vec<_> = m
                    .objects
                    .iter()
                    .filter_map(|o| Some((o.box_at(e.t)?, *colors.get(&o.object_id)?)))
                    .collect();
                let drawn = render_overlay(&frame, &boxes, thickness)?;
                write_ppm(&drawn, out_dir.join(format!("overlay_{:04}.ppm", e.index)))?;
            }
        }
        Cmd::Config => {
            cfg.check()?;
            print!("{}", cfg.to_json_string());
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let io = err.chain().any(|e| {
        e.downcast_ref::<Error>().is_some_and(Error::is_io) || e.downcast_ref::<std::io::Error>().is_some()
    });
    if io {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
