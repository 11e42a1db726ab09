use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use preverb::acoustics::{
    decay_curve_csv, mean_absorption, mfp_from_trace, rt60_from_decay, rt60_from_mfp, rt60_sabine, Rt60Estimate,
};
use preverb::dsp::{render_path, wav_read, wav_write};
use preverb::metric::JndMode;
use preverb::pipeline::{
    bake, lookup, read_path_csv, read_schedule_csv, validate_corridor, validate_table1, BakeConfig, BakeFile,
    LookupQuery, ValidationConfig, DEFAULT_LOOKUP_RADIUS,
};
use preverb::scene::Scene;
use preverb::tracer::{trace_energy_decay, trace_segments, TraceConfig};
use preverb::{Error, Result, Vec3};

#[derive(Parser)]
#[command(name = "preverb", version, about = "Perceptual reverberation baking: mean-free path, RT60, clustering, rendering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace every path point, cluster by mean-free path and simulate one decay per cluster.
    Bake {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        materials: PathBuf,
        /// CSV with header `x,y,z`.
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "relative")]
        jnd_mode: JndMode,
    },
    /// Report the cluster and RT60 of a baked sample.
    Lookup {
        #[arg(long)]
        bake: PathBuf,
        #[arg(long, conflicts_with = "pos", required_unless_present = "pos")]
        index: Option<usize>,
        /// Position `x,y,z`; matched to the nearest baked sample.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        pos: Option<Vec3>,
        #[arg(long, default_value_t = DEFAULT_LOOKUP_RADIUS)]
        radius: f64,
    },
    /// Render a dry WAV through the reverberator, switching RT60 along a listener schedule.
    Render {
        #[arg(long)]
        bake: PathBuf,
        #[arg(long)]
        dry: PathBuf,
        /// CSV with header `t_start_s,sample_index`.
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean-free path from an early-reflection trace.
    Mfp {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        materials: PathBuf,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        source: Vec3,
        #[arg(long, default_value_t = 500)]
        rays: usize,
        #[arg(long, default_value_t = 20)]
        bounces: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write every traced segment length to this CSV.
        #[arg(long)]
        segments_csv: Option<PathBuf>,
    },
    /// Per-band RT60 by an analytic formula or by decay regression.
    Rt60 {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        materials: PathBuf,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        source: Vec3,
        #[arg(long, value_enum, default_value_t = Rt60Mode::Decay)]
        mode: Rt60Mode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the energy decay curve (decay mode only).
        #[arg(long)]
        decay_csv: Option<PathBuf>,
    },
    /// Run a built-in validation suite on the procedural fixtures.
    Validate {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the per-row or per-sample report here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rt60Mode {
    Sabine,
    Eyring,
    Decay,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Table1,
    Corridor,
}

fn parse_vec3(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = parts[..] else {
        return Err(format!("expected `x,y,z`, got `{s}`"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok(Vec3::new(num(x)?, num(y)?, num(z)?))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn print_bands(est: &Rt60Estimate) {
    let bands: Vec<String> = est.bands.iter().map(|b| format!("{b:.3}")).collect();
    println!("rt60_s {} (broadband {:.3}, {:?})", bands.join(" "), est.broadband(), est.method);
    if let Some(r2) = &est.fit_quality {
        let r2: Vec<String> = r2.iter().map(|r| format!("{r:.4}")).collect();
        println!("fit_r2 {}", r2.join(" "));
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Bake { scene, materials, path, out, seed, jnd_mode } => {
            let scene = Scene::load_files(&scene, &materials)?;
            let positions = read_path_csv(&read_text(&path)?)?;
            let mut config = BakeConfig::with_seed(seed);
            config.clustering.jnd_mode = jnd_mode;
            let (mut file, stats) = bake(&scene, &positions, &config)?;
            file.created_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
            write_bytes(&out, file.to_json()?.as_bytes())?;
            println!(
                "{} points -> {} clusters ({} decay simulations, {} saved); t_er {:.1} ms/point, t_lr {:.1} ms/cluster",
                stats.n_points, stats.n_clusters, stats.lr_simulations, stats.lr_calls_saved, stats.t_er_ms, stats.t_lr_ms
            );
        }
        Command::Lookup { bake, index, pos, radius } => {
            let file = BakeFile::from_json(&read_text(&bake)?)?;
            let query = match (index, pos) {
                (Some(i), _) => LookupQuery::Index(i),
                (None, Some(position)) => LookupQuery::Position { position, radius },
                (None, None) => return Err(Error::InvalidArgument("give --index or --pos".into())),
            };
            let r = lookup(&file, query)?;
            println!("sample {} cluster {} distance {:.3} m", r.sample_index, r.cluster, r.distance);
            print_bands(&r.rt60);
        }
        Command::Render { bake, dry, schedule, out } => {
            let file = BakeFile::from_json(&read_text(&bake)?)?;
            let dry = wav_read(&fs::read(&dry)?)?;
            let schedule = read_schedule_csv(&read_text(&schedule)?)?;
            let wet = render_path(&dry, &file.clusters, &schedule)?;
            let peak = wet.peak();
            if peak > 1.0 {
                eprintln!("warning: output peak {peak:.3} exceeds full scale and will clip in the 16-bit file");
            }
            write_bytes(&out, &wav_write(&wet)?)?;
            println!("{} samples at {} Hz, peak {peak:.3}", wet.len(), wet.sample_rate);
        }
        Command::Mfp { scene, materials, source, rays, bounces, seed, segments_csv } => {
            let scene = Scene::load_files(&scene, &materials)?;
            let trace = trace_segments(&scene, source, &TraceConfig::new(rays, bounces, seed))?;
            if let Some(p) = segments_csv {
                write_bytes(&p, trace.to_csv().as_bytes())?;
            }
            let est = mfp_from_trace(&trace)?;
            println!(
                "mu {:.4} m from {} segments ({} of {} rays completed)",
                est.mu,
                est.segments_used,
                est.rays_completed,
                trace.rays.len()
            );
            if let Ok((v, s)) = scene.analytic_volume_and_area() {
                println!("mu_analytic {:.4} m (V {v:.3} m^3, S {s:.3} m^2)", 4.0 * v / s);
            }
        }
        Command::Rt60 { scene, materials, source, mode, seed, decay_csv } => {
            let scene = Scene::load_files(&scene, &materials)?;
            let alpha = mean_absorption(&scene);
            let est = match mode {
                Rt60Mode::Sabine => {
                    let (v, s) = scene.analytic_volume_and_area()?;
                    rt60_sabine(v, s, &alpha)?
                }
                Rt60Mode::Eyring => {
                    let trace = trace_segments(&scene, source, &TraceConfig::early_reflections(seed))?;
                    rt60_from_mfp(mfp_from_trace(&trace)?.mu, &alpha)?
                }
                Rt60Mode::Decay => {
                    let curve = trace_energy_decay(&scene, source, &TraceConfig::late_reverberation(seed))?;
                    if let Some(p) = decay_csv {
                        write_bytes(&p, decay_curve_csv(&curve).as_bytes())?;
                    }
                    rt60_from_decay(&curve)?
                }
            };
            print_bands(&est);
        }
        Command::Validate { suite, seed, csv } => {
            let (report, passed) = match suite {
                Suite::Table1 => {
                    let r = validate_table1(&ValidationConfig::with_seed(seed))?;
                    let passed = r.rows.iter().enumerate().all(|(i, row)| row.error_pct <= if i < 3 { 3.5 } else { 5.0 });
                    for row in &r.rows {
                        eprintln!("{:<12} mu_er {:.3} mu_an {:.3} error {:.2}%", row.shape, row.mu_er, row.mu_an, row.error_pct);
                    }
                    (r.to_csv(), passed)
                }
                Suite::Corridor => {
                    let r = validate_corridor(&BakeConfig::with_seed(seed))?;
                    for d in &r.dominant {
                        eprintln!(
                            "cluster {} samples [{}, {}): mu {:.3} m (max dev {:.2}%), rt60 {:.3} s (max pointwise dev {:.2}%)",
                            d.id,
                            d.start,
                            d.end,
                            d.mu_mean,
                            d.mu_diff_max_pct,
                            d.rt60.broadband(),
                            d.rt60_diff_max_pct
                        );
                    }
                    eprintln!(
                        "{} clusters, {} decay simulations, dominant coverage {:.1}%, aperture samples merged: {:?}",
                        r.bake.clusters.len(),
                        r.stats.lr_simulations,
                        100.0 * r.coverage,
                        r.aperture_merged
                    );
                    let passed = r.coverage >= 0.8
                        && r.dominant.iter().all(|d| d.mu_diff_max_pct <= 1.5 && d.rt60_diff_max_pct <= 5.0)
                        && r.aperture_merged.is_empty()
                        && r.bake.clusters.len() <= 12;
                    (r.to_csv(), passed)
                }
            };
            match csv {
                Some(p) => write_bytes(&p, report.as_bytes())?,
                None => print!("{report}"),
            }
            eprintln!("{}", if passed { "PASS" } else { "FAIL" });
            return Ok(passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
