use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hawksmoor::analysis::{
    compare_measurements, decay_envelope, orthogonality_report, protocol_error_study, ratio_curve,
    squareness_report, MeasurementSeries, RowOrientation, StudyOptions,
};
use hawksmoor::camera::{CameraConfig, DepthConvention};
use hawksmoor::export::{lattice_csv, lattice_json, mesh_wireframe, svg_plan, svg_projection, RenderKind, RenderSpec, Underlay};
use hawksmoor::fit::{fit_camera_height, synthesize_annotations, FitOptions, FitResult, ImagePlacement, PhotoAnnotation};
use hawksmoor::mercator::{map_polyline_to_surface, mercator_forward, mercator_inverse, DrapeOptions, GeoPolyline};
use hawksmoor::{generate_lattice, CofferLattice, LatticeConfig, Preset, SurfaceMode};

#[derive(Parser)]
#[command(name = "hawksmoor", version, about = "Conformal coffer lattices on surfaces of revolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a coffer lattice and write it as JSON, CSV, OBJ or a plan SVG.
    Generate(GenerateArgs),
    /// Draw the lattice as seen by a pinhole camera (SVG).
    Project(ProjectArgs),
    /// Fit the camera height to annotated vertices.
    Fit(FitArgs),
    /// Write synthetic vertex annotations as seen from a given camera height.
    Synth(SynthArgs),
    /// Mercator projection and draping of polylines onto a surface.
    Mercator {
        #[command(subcommand)]
        command: MercatorCommand,
    },
    /// Diagnostics and predictions.
    Analyze {
        #[command(subcommand)]
        command: AnalyzeCommand,
    },
    /// Convergence of the row-by-row builder's rule against the exact rows.
    Protocol(ProtocolArgs),
}

#[derive(Args, Clone)]
struct Source {
    /// Built-in configuration.
    #[arg(long, value_enum, conflicts_with = "config")]
    preset: Option<PresetName>,
    /// Preset or lattice configuration file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum PresetName {
    Buttery,
    Pantheon,
}

impl PresetName {
    fn as_str(self) -> &'static str {
        match self {
            PresetName::Buttery => "buttery",
            PresetName::Pantheon => "pantheon",
        }
    }
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum LatticeFormat {
    Json,
    Csv,
    Obj,
    SvgPlan,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "json")]
    format: LatticeFormat,
    /// Interior samples per edge for OBJ and SVG output.
    #[arg(long, default_value_t = 16)]
    density: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Clone, Copy)]
enum Depth {
    ViewingAxis,
    Axial,
}

impl From<Depth> for DepthConvention {
    fn from(d: Depth) -> Self {
        match d {
            Depth::ViewingAxis => DepthConvention::ViewingAxis,
            Depth::Axial => DepthConvention::AxialCoordinate,
        }
    }
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    source: Source,
    /// Camera file (JSON); the preset's camera when absent.
    #[arg(long)]
    camera: Option<PathBuf>,
    /// Override the camera height h/R.
    #[arg(long = "h-over-r")]
    h_over_r: Option<f64>,
    #[arg(long, default_value_t = 16)]
    density: usize,
    /// Raster to draw under the lattice.
    #[arg(long, requires_all = ["underlay_size", "fit"])]
    underlay: Option<String>,
    /// Underlay size in pixels, WIDTHxHEIGHT.
    #[arg(long)]
    underlay_size: Option<String>,
    /// Fit report whose similarity places the lattice on the underlay.
    #[arg(long)]
    fit: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Clone, Copy)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    source: Source,
    /// Annotation CSV with header m,n,u,v.
    #[arg(long)]
    annotations: PathBuf,
    /// Search interval for h/R, LO:HI.
    #[arg(long, default_value = "0.1:10")]
    search: String,
    /// Image-frame rotation in the similarity; on for domes and off for
    /// ceilings by default.
    #[arg(long, value_enum)]
    rotation: Option<Toggle>,
    #[arg(long, value_enum, default_value = "viewing-axis")]
    depth: Depth,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    source: Source,
    /// Camera height h/R; the preset's when absent.
    #[arg(long = "h-over-r")]
    h_over_r: Option<f64>,
    /// Gaussian noise standard deviation in pixels.
    #[arg(long, default_value_t = 0.0)]
    noise_px: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000.0)]
    width: f64,
    #[arg(long, default_value_t = 1000.0)]
    height: f64,
    #[arg(long, default_value_t = 0.0)]
    rotation_deg: f64,
    #[arg(long, value_enum, default_value = "viewing-axis")]
    depth: Depth,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum MercatorCommand {
    /// Latitude and longitude in degrees to (ξ, η).
    Forward {
        #[arg(long, allow_hyphen_values = true)]
        lat: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        lon: f64,
    },
    /// (ξ, η) to latitude and longitude in degrees.
    Inverse {
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        eta: f64,
    },
    /// Drape polylines ([{"closed":bool,"points":[[lat,lon],...]}], degrees)
    /// onto the surface and write them with the lattice as OBJ.
    Drape {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        polylines: PathBuf,
        /// Longitude (degrees) placed at azimuth 0.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        lon_origin: f64,
        /// Chord sag tolerance relative to the base radius.
        #[arg(long, default_value_t = 1e-3)]
        sag: f64,
        #[arg(long, default_value_t = 16)]
        density: usize,
        /// Write only the polylines (JSON) instead of OBJ with the lattice.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Mode {
    Ceiling,
    Dome,
}

impl From<Mode> for SurfaceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ceiling => SurfaceMode::Ceiling,
            Mode::Dome => SurfaceMode::Dome,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum Orientation {
    Base,
    Top,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Predicted coffer size of each row relative to row 1.
    Ratio {
        #[arg(long = "N")]
        n: usize,
        /// Rows, FIRST:LAST.
        #[arg(long, default_value = "1:5")]
        rows: String,
        #[arg(long, value_enum, default_value = "dome")]
        mode: Mode,
        #[arg(long)]
        json: bool,
    },
    /// Residuals of measured row sizes (CSV m,H,W) against the prediction.
    Compare {
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum, default_value = "dome")]
        mode: Mode,
        /// End of the vault the survey counts rows from.
        #[arg(long, value_enum, default_value = "base")]
        orientation: Orientation,
        #[arg(long)]
        json: bool,
    },
    /// Angles between coffer lines at every interior vertex.
    Orthogonality {
        #[command(flatten)]
        source: Source,
        /// Finite-difference step as a fraction of the azimuth step.
        #[arg(long, default_value_t = 1e-4)]
        fd_scale: f64,
        /// Deviation (degrees) above which a vertex is flagged.
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
        #[arg(long)]
        json: bool,
    },
    /// Coffer height against mean width for each band.
    Squareness {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        json: bool,
    },
    /// ρ_m e^(ξ_m) along the rows and its monotonicity.
    Decay {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ProtocolArgs {
    #[command(flatten)]
    source: Source,
    /// Starting height; the lattice anchor when absent.
    #[arg(long, allow_hyphen_values = true)]
    start_z: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    direction: i32,
    /// Number of rows to lay out.
    #[arg(long, default_value_t = 11)]
    rows: usize,
    /// Euler sub-steps per row, comma separated.
    #[arg(long, default_value = "1,2,4,8,16")]
    substeps: String,
    #[arg(long)]
    json: bool,
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<(T, T)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("{what} must look like A:B, got '{s}'"))?;
    let p = |t: &str| t.trim().parse::<T>().map_err(|_| anyhow!("{what}: cannot parse '{t}'"));
    Ok((p(a)?, p(b)?))
}

struct Loaded {
    lattice: LatticeConfig,
    camera: Option<CameraConfig>,
}

fn load_source(src: &Source) -> anyhow::Result<Loaded> {
    if let Some(name) = src.preset {
        let p = Preset::builtin(name.as_str())?;
        return Ok(Loaded {
            lattice: p.lattice,
            camera: Some(p.camera),
        });
    }
    let path = src
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("either --preset or --config is required"))?;
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| hawksmoor::Error::Parse { what: path.display().to_string(), message: e.to_string() })?;
    if value.get("lattice").is_some() {
        let p = Preset::from_json(&text).with_context(|| format!("in {}", path.display()))?;
        Ok(Loaded {
            lattice: p.lattice,
            camera: Some(p.camera),
        })
    } else {
        let cfg: LatticeConfig = serde_json::from_value(value)
            .map_err(|e| hawksmoor::Error::Parse { what: path.display().to_string(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(Loaded {
            lattice: cfg,
            camera: None,
        })
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(output: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn build(src: &Source) -> anyhow::Result<(CofferLattice, Option<CameraConfig>)> {
    let l = load_source(src)?;
    Ok((generate_lattice(&l.lattice)?, l.camera))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let (lattice, _) = build(&a.source)?;
            let text = match a.format {
                LatticeFormat::Json => lattice_json(&lattice)?,
                LatticeFormat::Csv => lattice_csv(&lattice)?,
                LatticeFormat::Obj => {
                    if a.density < 2 {
                        bail!(hawksmoor::Error::InvalidConfig("sampling density must be at least 2".into()));
                    }
                    mesh_wireframe(&lattice, a.density, &[])?
                }
                LatticeFormat::SvgPlan => {
                    let mut spec = RenderSpec::new(RenderKind::SvgPlan);
                    spec.density = a.density;
                    svg_plan(&lattice, &spec)?
                }
            };
            emit(&a.output.out, &text)
        }
        Command::Project(a) => {
            let (lattice, preset_camera) = build(&a.source)?;
            let mut camera = match &a.camera {
                Some(p) => CameraConfig::from_json(&read(p)?)?,
                None => preset_camera.ok_or_else(|| anyhow!("--camera is required without a preset camera"))?,
            };
            if let Some(h) = a.h_over_r {
                camera.h_over_r = h;
            }
            camera.mode = lattice.mode();
            let mut spec = RenderSpec::new(RenderKind::SvgProjection);
            spec.camera = Some(camera);
            spec.density = a.density;
            if let Some(href) = a.underlay {
                let (w, h): (f64, f64) = {
                    let s = a.underlay_size.as_deref().unwrap_or_default().replace('x', ":");
                    parse_pair(&s, "--underlay-size")?
                };
                let fit: FitResult = serde_json::from_str(&read(a.fit.as_ref().expect("required by clap"))?)
                    .map_err(|e| hawksmoor::Error::Parse { what: "fit report".into(), message: e.to_string() })?;
                spec.underlay = Some(Underlay { href, width: w, height: h });
                spec.similarity = Some(fit.similarity);
                spec.camera.as_mut().expect("set above").h_over_r = fit.h_over_r;
            }
            let (svg, failures) = svg_projection(&lattice, &spec)?;
            for (edge, reason) in failures {
                eprintln!("{}", serde_json::json!({"warning": {"kind": "edge_projection", "edge": edge, "message": reason}}));
            }
            emit(&a.output.out, &svg)
        }
        Command::Fit(a) => {
            let (lattice, _) = build(&a.source)?;
            let text = read(&a.annotations)?;
            let ann = PhotoAnnotation::read_csv(text.as_bytes()).with_context(|| format!("in {}", a.annotations.display()))?;
            let opts = FitOptions {
                search: parse_pair(&a.search, "--search")?,
                allow_rotation: a.rotation.map(|t| matches!(t, Toggle::On)),
                depth: a.depth.into(),
                ..Default::default()
            };
            let r = fit_camera_height(&lattice, &ann, &opts)?;
            if r.boundary_warning {
                eprintln!(
                    "{}",
                    serde_json::json!({"warning": {"kind": "boundary_minimum", "message": "the best h/R lies at an end of the search interval"}})
                );
            }
            emit(&a.output.out, &to_json(&r)?)
        }
        Command::Synth(a) => {
            let (lattice, camera) = build(&a.source)?;
            let h = a
                .h_over_r
                .or(camera.map(|c| c.h_over_r))
                .ok_or_else(|| anyhow!("--h-over-r is required without a preset camera"))?;
            let placement = ImagePlacement {
                width: a.width,
                height: a.height,
                rotation: a.rotation_deg.to_radians(),
                ..Default::default()
            };
            let ann = synthesize_annotations(&lattice, h, a.depth.into(), placement, a.noise_px, a.seed)?;
            let mut buf = Vec::new();
            ann.write_csv(&mut buf)?;
            emit(&a.output.out, &String::from_utf8(buf)?)
        }
        Command::Mercator { command } => match command {
            MercatorCommand::Forward { lat, lon } => {
                let (xi, eta) = mercator_forward(lat.to_radians(), lon.to_radians())?;
                println!("{}", serde_json::json!({"xi": xi, "eta": eta}));
                Ok(())
            }
            MercatorCommand::Inverse { xi, eta } => {
                let (lat, lon) = mercator_inverse(xi, eta);
                println!("{}", serde_json::json!({"lat_deg": lat.to_degrees(), "lon_deg": lon.to_degrees()}));
                Ok(())
            }
            MercatorCommand::Drape {
                source,
                polylines,
                lon_origin,
                sag,
                density,
                json,
                output,
            } => {
                let (lattice, _) = build(&source)?;
                let lines = GeoPolyline::from_json_degrees(&read(&polylines)?)
                    .with_context(|| format!("in {}", polylines.display()))?;
                let opts = DrapeOptions {
                    mode: lattice.mode(),
                    lon_origin: lon_origin.to_radians(),
                    sag_tolerance: sag * lattice.map().profile().scale(),
                    ..Default::default()
                };
                let draped = lines
                    .iter()
                    .map(|l| map_polyline_to_surface(l, lattice.map(), &opts))
                    .collect::<hawksmoor::Result<Vec<_>>>()?;
                for (i, d) in draped.iter().enumerate() {
                    if !d.clipped.is_empty() {
                        eprintln!(
                            "{}",
                            serde_json::json!({"warning": {"kind": "clipped", "polyline": i, "vertices": d.clipped}})
                        );
                    }
                }
                let text = if json {
                    to_json(&draped)?
                } else {
                    if density < 2 {
                        bail!(hawksmoor::Error::InvalidConfig("sampling density must be at least 2".into()));
                    }
                    mesh_wireframe(&lattice, density, &draped)?
                };
                emit(&output.out, &text)
            }
        },
        Command::Analyze { command } => analyze(command),
        Command::Protocol(a) => {
            let l = load_source(&a.source)?;
            let substeps = a
                .substeps
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| anyhow!("--substeps: cannot parse '{s}'")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let start_z = a
                .start_z
                .unwrap_or_else(|| l.lattice.anchor.unwrap_or_else(|| l.lattice.profile.default_anchor()));
            let opts = StudyOptions {
                mode: l.lattice.mode,
                start_z,
                direction: a.direction,
                rows: a.rows,
            };
            let t = protocol_error_study(&l.lattice.profile, l.lattice.coffers_per_row, &substeps, opts)?;
            if a.json {
                print!("{}", to_json(&t)?);
            } else {
                println!("substeps  rows  max_error");
                for lv in &t.levels {
                    println!("{:>8}  {:>4}  {:.6e}", lv.substeps, lv.rows_compared, lv.max_error);
                }
                for (i, o) in t.orders.iter().enumerate() {
                    println!("order {}->{}: {:.4}", t.levels[i].substeps, t.levels[i + 1].substeps, o);
                }
            }
            Ok(())
        }
    }
}

fn analyze(command: AnalyzeCommand) -> anyhow::Result<()> {
    match command {
        AnalyzeCommand::Ratio { n, rows, mode, json } => {
            let (first, last): (i32, i32) = parse_pair(&rows, "--rows")?;
            if first > last {
                bail!(hawksmoor::Error::InvalidConfig(format!("--rows {first}:{last} is empty")));
            }
            let ms: Vec<i32> = (first..=last).collect();
            let r = ratio_curve(n, mode.into(), &ms)?;
            if json {
                let rows: Vec<_> = ms.iter().zip(&r).map(|(m, v)| serde_json::json!({"m": m, "ratio": v})).collect();
                print!("{}", to_json(&rows)?);
            } else {
                println!("m ratio");
                for (m, v) in ms.iter().zip(r) {
                    println!("{m} {v}");
                }
            }
        }
        AnalyzeCommand::Compare {
            measurements,
            n,
            mode,
            orientation,
            json,
        } => {
            let series = MeasurementSeries::read_csv(read(&measurements)?.as_bytes())
                .with_context(|| format!("in {}", measurements.display()))?;
            let series = series.oriented(match orientation {
                Orientation::Base => RowOrientation::FromBase,
                Orientation::Top => RowOrientation::FromTop,
            });
            let rep = compare_measurements(&series, n, mode.into())?;
            if json {
                print!("{}", to_json(&rep)?);
            } else {
                println!("m predicted H/H1 W/W1 dH dW");
                for r in &rep.rows {
                    println!(
                        "{} {:.6} {:.6} {:.6} {:+.6} {:+.6}",
                        r.m, r.predicted, r.height_ratio, r.width_ratio, r.height_residual, r.width_residual
                    );
                }
                println!("max |residual| {:.6}, rms {:.6}", rep.max_abs_residual, rep.rms_residual);
            }
        }
        AnalyzeCommand::Orthogonality {
            source,
            fd_scale,
            threshold,
            json,
        } => {
            let (lattice, _) = build(&source)?;
            let rep = orthogonality_report(&lattice, fd_scale)?;
            if json {
                print!("{}", to_json(&rep)?);
            } else {
                println!("interior vertices {}", rep.vertices.len());
                println!("max deviation {:.3e} deg", rep.max_deviation_deg);
                for (m, n) in rep.flagged(threshold) {
                    println!("flagged ({m}, {n})");
                }
            }
        }
        AnalyzeCommand::Squareness { source, json } => {
            let (lattice, _) = build(&source)?;
            let rep = squareness_report(&lattice)?;
            if json {
                print!("{}", to_json(&rep)?);
            } else {
                println!("m height width |H/W-1|");
                for r in &rep.rows {
                    println!("{} {:.6} {:.6} {:.3e}", r.m, r.height, r.mean_width, r.deviation);
                }
                println!("max {:.3e}", rep.max_deviation);
            }
        }
        AnalyzeCommand::Decay { source, json } => {
            let (lattice, _) = build(&source)?;
            let env = decay_envelope(&lattice);
            if json {
                print!("{}", to_json(&env)?);
            } else {
                println!("m rho*exp(xi)");
                for (m, v) in &env.values {
                    println!("{m} {v:.12}");
                }
                println!("non_increasing {} non_decreasing {}", env.non_increasing, env.non_decreasing);
            }
        }
    }
    Ok(())
}

fn error_json(err: &anyhow::Error) -> serde_json::Value {
    let kind = err
        .chain()
        .find_map(|e| e.downcast_ref::<hawksmoor::Error>())
        .map(|e| e.kind())
        .or_else(|| err.chain().find_map(|e| e.downcast_ref::<std::io::Error>()).map(|_| "io"))
        .unwrap_or("invalid_input");
    let message = err.chain().map(|e| e.to_string()).collect::<Vec<_>>().join(": ");
    serde_json::json!({"error": {"kind": kind, "message": message}})
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            eprintln!("{}", serde_json::json!({"error": {"kind": "usage", "message": msg.trim()}}));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hawksmoor::ProfileSpec;

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair::<f64>("0.2:5", "x").unwrap(), (0.2, 5.0));
        assert_eq!(parse_pair::<i32>("-3:4", "x").unwrap(), (-3, 4));
        assert!(parse_pair::<f64>("0.2-5", "x").is_err());
        assert!(parse_pair::<f64>("a:5", "x").is_err());
    }

    #[test]
    fn error_kinds() {
        let e: anyhow::Error = hawksmoor::Error::PoleLatitude { lat: 2.0 }.into();
        assert_eq!(error_json(&e)["error"]["kind"], "pole_latitude");
        let e = anyhow!("plain");
        assert_eq!(error_json(&e)["error"]["kind"], "invalid_input");
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn profile_config_files_load() {
        let dir = std::env::temp_dir().join(format!("hawksmoor-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("cone.json");
        let cfg = LatticeConfig::new(
            ProfileSpec::cone(1.0, 0.5).unwrap(),
            SurfaceMode::Ceiling,
            12,
            hawksmoor::RowRange::new(0, 4),
        );
        fs::write(&p, serde_json::to_string(&cfg).unwrap()).unwrap();
        let l = load_source(&Source { preset: None, config: Some(p) }).unwrap();
        assert_eq!(l.lattice, cfg);
        assert!(l.camera.is_none());
        fs::remove_dir_all(dir).unwrap();
    }
}
