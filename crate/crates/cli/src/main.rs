//! Batch front end: every subcommand reproduces one family of results and
//! writes it as a CSV or JSON artifact. Stochastic subcommands take an
//! explicit seed and are byte-reproducible.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qclone_core::bounds::{
    bound_1ton, bound_1ton_closed_form, optimize_1to2, remote_prepare, RemotePrepProblem,
};
use qclone_core::cloning::{gm_apply, optimal_fidelity};
use qclone_core::ks::{
    joint_device, ks_colorable, prepare_psi1, run_joint_device_noisy, sample_counts,
    separate_device, ColoringOutcome, KsSet, PairKind,
};
use qclone_core::sampling::{random_density, random_pure_decomposition};
use qclone_core::stimulated::{
    clone_statistics, evolve_ladder, large_m_solution, pdc_final_state, pdc_postselect, PdcConfig,
    StimulatedLadder,
};
use qclone_core::vatom::{fidelity_curves, simulate_vatoms};
use qclone_core::Ket;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::error::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "qclone", version, about = "Cloning, stimulated emission, and contextuality sweeps")]
struct Cli {
    /// Optional key=value config file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result table to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Optimal N->M cloning fidelity, with a simulated cross-check.
    CloneFidelity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Emission probabilities and per-sector fidelities of the ladder
    /// dynamics over a time grid.
    StimulatedEvolve {
        /// Seed photons.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        atoms: usize,
        #[arg(long, default_value_t = 2.0)]
        gt_max: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// Use the asymptotic large-photon-number solution instead of the
        /// exact tridiagonal evolution.
        #[arg(long)]
        large_m: bool,
    },
    /// Fidelity curves f_clones / f_opt / f_rand of the mixed atom ensemble.
    VatomCurves {
        #[arg(long, default_value_t = 4)]
        atoms: usize,
        #[arg(long, default_value_t = 120)]
        points: usize,
        #[arg(long, default_value_t = 3.0)]
        gt_max: f64,
        /// Also write mean photon numbers (t, n_all, n_right) to this file.
        #[arg(long)]
        photons: Option<PathBuf>,
    },
    /// Analytic pair-source state, optionally post-selected on M photons in
    /// mode 1.
    Pdc {
        /// Seed photons in mode V1.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Interaction strength Gamma = tanh(gamma t), in [0, 1).
        #[arg(long, default_value_t = 0.3)]
        interaction: f64,
        #[arg(long, default_value_t = 20)]
        cutoff: usize,
        #[arg(long)]
        postselect: Option<usize>,
    },
    /// Scaling-factor bound for 1->N cloning: linear program next to the
    /// closed form.
    Bounds {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Sampled histogram of one measurement device on the prepared state.
    KsRun {
        /// Device: a (Z1,Z2), b (Z1,X2), c (X1,Z2), d (X1,X2), or joint.
        #[arg(long, default_value = "joint")]
        device: String,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Visibility v mixes detector probabilities with white noise.
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
    },
    /// Coloring search over a triad file (one triad per line).
    KsColor {
        #[arg(long)]
        file: PathBuf,
    },
    /// Random remote-preparation instances with reconstruction errors.
    RemotePrep {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        elements: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Clone)]
enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

/// 12 significant digits; below every test tolerance, above float noise.
fn format_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Int(v) => v.to_string(),
                            Cell::Num(v) => format_num(*v),
                            Cell::Text(v) => v.clone(),
                        })
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out = String::from("{\n  \"columns\": [");
                let cols: Vec<String> = self.columns.iter().map(|c| format!("\"{c}\"")).collect();
                out.push_str(&cols.join(", "));
                out.push_str("],\n  \"rows\": [\n");
                for (i, row) in self.rows.iter().enumerate() {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Int(v) => v.to_string(),
                            Cell::Num(v) if v.is_nan() => "null".to_string(),
                            Cell::Num(v) => format_num(*v),
                            Cell::Text(v) => format!("\"{}\"", v.replace('"', "\\\"")),
                        })
                        .collect();
                    let _ = write!(out, "    [{}]", cells.join(", "));
                    out.push_str(if i + 1 < self.rows.len() { ",\n" } else { "\n" });
                }
                out.push_str("  ]\n}\n");
                out
            }
        }
    }
}

fn emit(table: &Table, output: Option<&Path>, format: Format) -> Result<(), Box<dyn Error>> {
    let rendered = table.render(format);
    match output {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

/// Merge key=value lines from the config file into the argument list; flags
/// already present win.
fn merge_config(mut args: Vec<String>) -> Result<Vec<String>, Box<dyn Error>> {
    let config_path = args
        .iter()
        .position(|a| a == "--config")
        .and_then(|i| args.get(i + 1).cloned());
    let Some(path) = config_path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {path}: {e}"))?;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("config line is not key=value: `{raw}`").into());
        };
        let flag = format!("--{}", key.trim());
        if args.iter().any(|a| *a == flag) {
            continue;
        }
        match value.trim() {
            "true" => args.push(flag),
            "false" => {}
            v => {
                args.push(flag);
                args.push(v.to_string());
            }
        }
    }
    Ok(args)
}

fn main() {
    if let Ok(threads) = std::env::var("QCLONE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let args = match merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    let cli = Cli::parse_from(args);
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    let output = cli.output.as_deref();
    match cli.cmd {
        Cmd::CloneFidelity { n, m } => clone_fidelity(n, m, output, cli.format),
        Cmd::StimulatedEvolve { m, atoms, gt_max, points, large_m } => {
            stimulated_evolve(m, atoms, gt_max, points, large_m, output, cli.format)
        }
        Cmd::VatomCurves { atoms, points, gt_max, photons } => {
            vatom_curves(atoms, points, gt_max, photons.as_deref(), output, cli.format)
        }
        Cmd::Pdc { n, interaction, cutoff, postselect } => {
            pdc(n, interaction, cutoff, postselect, output, cli.format)
        }
        Cmd::Bounds { n_max } => bounds_table(n_max, output, cli.format),
        Cmd::KsRun { device, shots, seed, visibility } => {
            ks_run(&device, shots, seed, visibility, output, cli.format)
        }
        Cmd::KsColor { file } => ks_color(&file, output, cli.format),
        Cmd::RemotePrep { dim, elements, trials, seed } => {
            remote_prep(dim, elements, trials, seed, output, cli.format)
        }
    }
}

fn clone_fidelity(
    n: usize,
    m: usize,
    output: Option<&Path>,
    format: Format,
) -> Result<(), Box<dyn Error>> {
    let formula = optimal_fidelity(n, m);
    // deterministic cross-check inputs: the three canonical axes
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let probes = [
        Ket::basis(2, 0),
        Ket::new(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)])?,
        Ket::new(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)])?,
    ];
    let mut max_dev: f64 = 0.0;
    for psi in &probes {
        let f = gm_apply(psi, n, m)?.clone_fidelity(0);
        max_dev = max_dev.max((f - formula).abs());
    }
    println!("{formula:.9}");
    let table = Table {
        columns: vec!["n", "m", "fidelity", "max_simulation_deviation"],
        rows: vec![vec![
            Cell::Int(n as i64),
            Cell::Int(m as i64),
            Cell::Num(formula),
            Cell::Num(max_dev),
        ]],
    };
    emit(&table, output, format)
}

fn stimulated_evolve(
    m: usize,
    atoms: usize,
    gt_max: f64,
    points: usize,
    large_m: bool,
    output: Option<&Path>,
    format: Format,
) -> Result<(), Box<dyn Error>> {
    let init = StimulatedLadder::initial(m, atoms)?;
    let mut rows = Vec::new();
    for i in 0..points.max(2) {
        let gt = gt_max * i as f64 / (points.max(2) - 1) as f64;
        let state = if large_m {
            large_m_solution(m, atoms, gt)?
        } else {
            evolve_ladder(&init, gt)
        };
        for event in clone_statistics(&state) {
            rows.push(vec![
                Cell::Num(gt),
                Cell::Int(event.extra_photons as i64),
                Cell::Num(event.probability),
                Cell::Num(event.fidelity),
            ]);
        }
    }
    let table = Table {
        columns: vec!["gamma_t", "extra_photons", "probability", "fidelity"],
        rows,
    };
    emit(&table, output, format)
}

fn vatom_curves(
    atoms: usize,
    points: usize,
    gt_max: f64,
    photons: Option<&Path>,
    output: Option<&Path>,
    format: Format,
) -> Result<(), Box<dyn Error>> {
    let grid: Vec<f64> = (0..points.max(2))
        .map(|i| gt_max * i as f64 / (points.max(2) - 1) as f64)
        .collect();
    let table = simulate_vatoms(atoms, &grid)?;
    let curves = fidelity_curves(&table);
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let cell = |v: Option<f64>| Cell::Num(v.unwrap_or(f64::NAN));
            vec![
                Cell::Num(t),
                cell(curves.f_clones[i]),
                cell(curves.f_opt[i]),
                cell(curves.f_rand[i]),
            ]
        })
        .collect();
    let out_table = Table {
        columns: vec!["gamma_t", "f_clones", "f_opt", "f_rand"],
        rows,
    };
    emit(&out_table, output, format)?;
    if let Some(path) = photons {
        let rows = grid
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let (all, right) = table.photon_means(i);
                vec![Cell::Num(t), Cell::Num(all), Cell::Num(right)]
            })
            .collect();
        let photon_table = Table { columns: vec!["gamma_t", "n_all", "n_right"], rows };
        emit(&photon_table, Some(path), format)?;
    }
    Ok(())
}

fn pdc(
    n: usize,
    interaction: f64,
    cutoff: usize,
    postselect: Option<usize>,
    output: Option<&Path>,
    format: Format,
) -> Result<(), Box<dyn Error>> {
    let cfg = PdcConfig { n_input: n, interaction, cutoff };
    let state = pdc_final_state(&cfg)?;
    let emit_state = |s: &qclone_core::fock::FockState| -> Vec<Vec<Cell>> {
        s.iter()
            .map(|(occ, amp)| {
                vec![
                    Cell::Int(occ[0] as i64),
                    Cell::Int(occ[1] as i64),
                    Cell::Int(occ[2] as i64),
                    Cell::Int(occ[3] as i64),
                    Cell::Num(amp.re),
                    Cell::Num(amp.im),
                ]
            })
            .collect()
    };
    let columns = vec!["v1", "h1", "v2", "h2", "re", "im"];
    let rows = match postselect {
        Some(m_total) => {
            let post = pdc_postselect(&state, n, m_total)?;
            println!("{:.9}", post.mode1_fidelity());
            emit_state(&post.state)
        }
        None => emit_state(&state),
    };
    emit(&Table { columns, rows }, output, format)
}

fn bounds_table(n_max: usize, output: Option<&Path>, format: Format) -> Result<(), Box<dyn Error>> {
    let opt = optimize_1to2();
    println!(
        "covariant optimum: t_xy={:.9} t={:.9} eta={:.9} F={:.9}",
        opt.params.t_xy, opt.params.t, opt.params.eta1, opt.fidelity
    );
    let mut rows = Vec::new();
    for n in 1..=n_max.max(1) {
        let (s_lp, _) = bound_1ton(n)?;
        let s_formula = bound_1ton_closed_form(n);
        let fidelity = (1.0 + s_formula) / 2.0;
        let g = gcd(n + 2, 3 * n);
        let rational = format!("{}/{}", (n + 2) / g, 3 * n / g);
        println!("N={n} {s_lp:.9} {rational} {fidelity:.9}");
        rows.push(vec![
            Cell::Int(n as i64),
            Cell::Num(s_lp),
            Cell::Text(rational),
            Cell::Num(fidelity),
        ]);
    }
    let table = Table {
        columns: vec!["n", "s_max_lp", "s_max_formula", "fidelity"],
        rows,
    };
    emit(&table, output, format)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn ks_run(
    device: &str,
    shots: u64,
    seed: u64,
    visibility: f64,
    output: Option<&Path>,
    format: Format,
) -> Result<(), Box<dyn Error>> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(format!("visibility must lie in [0, 1], got {visibility}").into());
    }
    let state = prepare_psi1();
    let table = match device {
        "joint" => {
            let outcomes = run_joint_device_noisy(&state, visibility);
            let probs: Vec<f64> = outcomes.iter().map(|o| o.probability).collect();
            let counts = sample_counts(&probs, shots, seed);
            let rows = outcomes
                .iter()
                .zip(counts)
                .enumerate()
                .map(|(i, (o, c))| {
                    vec![
                        Cell::Int(i as i64),
                        Cell::Int(o.z1x2 as i64),
                        Cell::Int(o.x1z2 as i64),
                        Cell::Num(o.probability),
                        Cell::Int(c as i64),
                    ]
                })
                .collect();
            let _ = joint_device();
            Table {
                columns: vec!["detector", "Z1X2", "X1Z2", "probability", "counts"],
                rows,
            }
        }
        letter => {
            let kind = match letter {
                "a" => PairKind::Z1Z2,
                "b" => PairKind::Z1X2,
                "c" => PairKind::X1Z2,
                "d" => PairKind::X1X2,
                other => return Err(format!("unknown device `{other}`").into()),
            };
            let dev = separate_device(kind);
            let n_det = dev.detectors.len() as f64;
            let probs: Vec<f64> = dev
                .run(&state)?
                .into_iter()
                .map(|p| visibility * p + (1.0 - visibility) / n_det)
                .collect();
            let counts = sample_counts(&probs, shots, seed);
            let rows = dev
                .detectors
                .iter()
                .zip(probs)
                .zip(counts)
                .enumerate()
                .map(|(i, ((det, p), c))| {
                    vec![
                        Cell::Int(i as i64),
                        Cell::Int(det.tags[0].1 as i64),
                        Cell::Int(det.tags[1].1 as i64),
                        Cell::Num(p),
                        Cell::Int(c as i64),
                    ]
                })
                .collect();
            Table {
                columns: match kind {
                    PairKind::Z1Z2 => vec!["detector", "Z1", "Z2", "probability", "counts"],
                    PairKind::Z1X2 => vec!["detector", "Z1", "X2", "probability", "counts"],
                    PairKind::X1Z2 => vec!["detector", "X1", "Z2", "probability", "counts"],
                    PairKind::X1X2 => vec!["detector", "X1", "X2", "probability", "counts"],
                },
                rows,
            }
        }
    };
    emit(&table, output, format)
}

fn ks_color(file: &Path, output: Option<&Path>, format: Format) -> Result<(), Box<dyn Error>> {
    let set = KsSet::from_path(file)?;
    let table = match ks_colorable(&set) {
        ColoringOutcome::Colorable(assign) => {
            println!("COLORABLE");
            let rows = assign
                .iter()
                .map(|(label, v)| {
                    println!("{label}={v}");
                    vec![Cell::Text(label.clone()), Cell::Int(*v as i64)]
                })
                .collect();
            Table { columns: vec!["direction", "value"], rows }
        }
        ColoringOutcome::Uncolorable { conflict_core } => {
            println!("UNCOLORABLE");
            let rows = conflict_core
                .iter()
                .map(|t| {
                    println!("conflict: {} {} {}", t[0], t[1], t[2]);
                    vec![
                        Cell::Text(t[0].clone()),
                        Cell::Text(t[1].clone()),
                        Cell::Text(t[2].clone()),
                    ]
                })
                .collect();
            Table { columns: vec!["conflict_a", "conflict_b", "conflict_c"], rows }
        }
    };
    emit(&table, output, format)
}

fn remote_prep(
    dim: usize,
    elements: usize,
    trials: u64,
    seed: u64,
    output: Option<&Path>,
    format: Format,
) -> Result<(), Box<dyn Error>> {
    if !(2..=4).contains(&dim) {
        return Err(format!("dim must lie in 2..=4, got {dim}").into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut worst_recon: f64 = 0.0;
    let mut worst_complete: f64 = 0.0;
    for trial in 0..trials {
        use rand::Rng;
        let d = rng.random_range(2..=dim);
        let rank = rng.random_range(1..=d);
        let rho = random_density(d, rank, &mut rng);
        let actual_rank = rho.eigenvalues().iter().filter(|&&l| l > 1e-12).count();
        let m = rng.random_range(actual_rank.max(1)..=elements.max(actual_rank));
        let target = random_pure_decomposition(&rho, m, &mut rng);
        let problem = RemotePrepProblem::new(rho, target)?;
        let povm = remote_prepare(&problem)?;
        let completeness = povm.completeness_error();
        let mut recon: f64 = 0.0;
        for (i, (x, psi)) in problem.target.iter().enumerate() {
            let heralded = qclone_core::bounds::heralded_state(&problem, &povm.effects[i]);
            let expected = psi.density().matrix() * Complex64::new(*x, 0.0);
            recon = recon.max((heralded - expected).norm());
        }
        worst_recon = worst_recon.max(recon);
        worst_complete = worst_complete.max(completeness);
        rows.push(vec![
            Cell::Int(trial as i64),
            Cell::Int(d as i64),
            Cell::Int(problem.target.len() as i64),
            Cell::Num(recon),
            Cell::Num(completeness),
        ]);
    }
    println!("max_reconstruction_error={worst_recon:.3e}");
    println!("max_completeness_error={worst_complete:.3e}");
    let table = Table {
        columns: vec!["trial", "dim", "elements", "reconstruction_error", "completeness_error"],
        rows,
    };
    emit(&table, output, format)
}
