//! `ilw-lab <command> <config> <out-dir>`: runs one experiment and writes its
//! CSV artifacts. Exit status 0 on success, 1 when a numerical guard or check
//! fails, 2 on usage and config errors.

use crate::config::Config;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::io::{cell, CsvTable};
use crate::linear_dispersion::{self as ld, Band, Frame, KernelOptions, XGrid};
use crate::normal_form::{self as nf, Fault, Lattice, NormalForm, SymbolGrid, SymbolKind};
use crate::solver::{evolve_with, Datum, DatumKind, Model, SimConfig, SimTrace};
use crate::vectorfield::{track_decay, v_equation_residual, DecayReport, VectorFieldContext};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const COMMANDS: [&str; 6] = ["simulate", "kernel", "symbols", "identities", "decay", "vectorfield"];

pub const USAGE: &str = "usage: ilw-lab <simulate|kernel|symbols|identities|decay|vectorfield> <config> <out-dir>";

/// Outcome of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Checks ran but did not hold.
    Fail(String),
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::UnknownKey(_)
        | Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::Format(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (without the program name), runs the command and returns
/// the process exit status. Messages go to stdout/stderr.
pub fn run(args: &[String]) -> i32 {
    let [command, config, out] = args else {
        eprintln!("{USAGE}");
        return 2;
    };
    if !COMMANDS.contains(&command.as_str()) {
        eprintln!("unknown command `{command}`\n{USAGE}");
        return 2;
    }
    match run_command(command, Path::new(config), Path::new(out)) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("{command}: {msg}");
            1
        }
        Err(e) => {
            eprintln!("{command}: {e}");
            exit_code(&e)
        }
    }
}

pub fn run_command(command: &str, config: &Path, out: &Path) -> Result<Outcome> {
    let cfg = Config::load(config)?;
    let ctx = Ctx { hash: cfg.hash(command), out: out.to_path_buf() };
    let job = match command {
        "simulate" => simulate(&cfg)?,
        "kernel" => kernel(&cfg)?,
        "symbols" => symbols(&cfg)?,
        "identities" => identities(&cfg)?,
        "decay" => decay(&cfg)?,
        "vectorfield" => vectorfield(&cfg)?,
        _ => return Err(Error::InvalidParameter(format!("unknown command `{command}`"))),
    };
    // Every key must have been read before any work starts.
    cfg.finish()?;
    fs::create_dir_all(out)?;
    job(&ctx)
}

struct Ctx {
    hash: String,
    out: PathBuf,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&self, name: &str, table: &CsvTable) -> Result<()> {
        table.write(&self.path(name), &self.hash)
    }
}

type Job = Box<dyn FnOnce(&Ctx) -> Result<Outcome>>;

fn read_grid(cfg: &Config, period: f64, n: usize, origin: Option<f64>) -> Result<GridSpec> {
    let g = GridSpec::new(cfg.get("L", period)?, cfg.get("n_points", n)?)?;
    Ok(match cfg.get_opt::<f64>("origin")?.or(origin) {
        Some(x0) => g.with_origin(x0),
        None => g,
    })
}

fn read_datum(cfg: &Config, amplitude: f64, width: f64) -> Result<Datum> {
    let name = cfg.get_str("datum", "odd_gaussian");
    let shell_k = cfg.get("shell_k", -1i32)?;
    let file = cfg.get_opt::<String>("datum_file")?;
    let kind = match name.as_str() {
        "gaussian" => DatumKind::Gaussian,
        "sech2" => DatumKind::Sech2,
        "odd_gaussian" => DatumKind::OddGaussian,
        "two_bump" => DatumKind::TwoBump,
        "shell" => DatumKind::Shell { k: shell_k },
        "file" => DatumKind::File(PathBuf::from(file.ok_or_else(|| Error::Config {
            line: cfg.line_of("datum"),
            msg: "datum = file needs datum_file".into(),
        })?)),
        other => {
            return Err(Error::Config {
                line: cfg.line_of("datum"),
                msg: format!("unknown datum `{other}` (gaussian, sech2, odd_gaussian, two_bump, shell, file)"),
            })
        }
    };
    Ok(Datum {
        kind,
        amplitude: cfg.get("amplitude", amplitude)?,
        width: cfg.get("width", width)?,
        center: cfg.get("center", 0.0)?,
    })
}

fn read_frame(cfg: &Config) -> Result<Frame> {
    match cfg.get_str("frame", "transport").as_str() {
        "transport" => Ok(Frame::Transport),
        "comoving" => Ok(Frame::Comoving),
        other => Err(Error::Config {
            line: cfg.line_of("frame"),
            msg: format!("unknown frame `{other}` (transport, comoving)"),
        }),
    }
}

fn read_model(cfg: &Config) -> Result<Model> {
    let s = cfg.get_str("model", "ilw_transport");
    Model::parse(&s).map_err(|e| Error::Config { line: cfg.line_of("model"), msg: e.to_string() })
}

fn read_normal_form(cfg: &Config) -> Result<NormalForm> {
    let delta = cfg.get("delta", 1.0)?;
    match cfg.get_str("model", "ilw").as_str() {
        "ilw" => Ok(NormalForm::ilw(delta)),
        "bo" => Ok(NormalForm::benjamin_ono()),
        other => Err(Error::Config { line: cfg.line_of("model"), msg: format!("unknown symbol model `{other}` (ilw, bo)") }),
    }
}

struct SimDefaults {
    period: f64,
    n: usize,
    origin: f64,
    dt: f64,
    t_end: f64,
    cadence: usize,
    amplitude: f64,
    width: f64,
}

fn read_sim(cfg: &Config, d: SimDefaults) -> Result<SimConfig> {
    let sim = SimConfig {
        grid: read_grid(cfg, d.period, d.n, Some(d.origin))?,
        delta: cfg.get("delta", 1.0)?,
        model: read_model(cfg)?,
        dt: cfg.get("dt", d.dt)?,
        t_end: cfg.get("t_end", d.t_end)?,
        datum: read_datum(cfg, d.amplitude, d.width)?,
        dealias: cfg.get("dealias", true)?,
        cadence: cfg.get("cadence", d.cadence)?,
    };
    sim.validate()?;
    Ok(sim)
}

fn decay_table(rep: &DecayReport) -> CsvTable {
    let mut t = CsvTable::new(&DecayReport::columns());
    for r in rep.as_rows() {
        t.push(r);
    }
    t
}

fn trace_table(trace: &SimTrace) -> CsvTable {
    let mut t = CsvTable::new(&["t", "e0", "e1", "e2", "linf", "besov", "tilbert_half"]);
    for d in &trace.diagnostics {
        t.push(vec![d.t, d.e0, d.e1, d.e2, d.linf, d.besov, d.tilbert_half]);
    }
    t
}

fn simulate(cfg: &Config) -> Result<Job> {
    let sim = read_sim(
        cfg,
        SimDefaults { period: 512.0, n: 1024, origin: -384.0, dt: 0.02, t_end: 100.0, cadence: 50, amplitude: 0.1, width: 4.0 },
    )?;
    let with_decay = cfg.get("decay", true)?;
    let kappa = cfg.get("kappa", ld::DEFAULT_KAPPA)?;
    let binary = cfg.get("binary_field", false)?;
    Ok(Box::new(move |ctx: &Ctx| {
        let trace = evolve_with(&sim, true)?;
        ctx.write("trace.csv", &trace_table(&trace))?;
        let last = trace.last().expect("trace holds the initial field");
        crate::io::write_field_csv_tagged(last, &ctx.path("final_field.csv"), Some(&ctx.hash))?;
        if binary {
            crate::io::write_field_binary(last, &ctx.path("final_field.ilwf"))?;
        }
        if with_decay && sim.model != Model::Kdv {
            let vf = VectorFieldContext::for_trace(&trace, None)?;
            let rep = track_decay(&trace, &vf, kappa)?;
            ctx.write("decay.csv", &decay_table(&rep))?;
            println!(
                "t_end {}: max sup|u|/w0 {:.4e}, max |T|^1/2 v {:.4e}, drift E0 {:.2e} E1 {:.2e} E2 {:.2e}",
                sim.t_end,
                rep.max_of(|r| r.sup_u_omega0),
                rep.max_of(|r| r.tilbert_half_v),
                trace.energy_drift(0),
                trace.energy_drift(1),
                trace.energy_drift(2)
            );
        }
        Ok(Outcome::Pass)
    }))
}

fn kernel(cfg: &Config) -> Result<Job> {
    let opts = KernelOptions {
        delta: cfg.get("delta", 1.0)?,
        frame: read_frame(cfg)?,
        oversampling: cfg.get("oversampling", 8.0)?,
        xi_max: cfg.get_opt("xi_max")?,
        j_low: cfg.get("j_low", -10)?,
    };
    let times: Vec<f64> = cfg.get_list("times", &[1.0, 10.0, 100.0])?;
    let j_min = cfg.get("j_min", -6i32)?;
    let j_max = cfg.get("j_max", 0i32)?;
    let full = cfg.get("full", false)?;
    let high = cfg.get("high", false)?;
    let x_min = cfg.get("x_min", -500.0)?;
    let x_max = cfg.get("x_max", 100.0)?;
    let dx = cfg.get("dx", 0.25)?;
    if !(x_max > x_min && dx > 0.0) {
        return Err(Error::Config { line: cfg.line_of("x_max"), msg: "need x_min < x_max and dx > 0".into() });
    }
    let xs = XGrid { x0: x_min, dx, n: ((x_max - x_min) / dx).round() as usize + 1 };
    let mut bands: Vec<Band> = (j_min..=j_max).map(Band::Shell).collect();
    if high {
        bands.push(Band::High);
    }
    if full {
        bands.push(Band::Full);
    }
    Ok(Box::new(move |ctx: &Ctx| {
        let mut samples = CsvTable::new(&["t", "x", "re", "im", "tk_re", "tk_im", "band"]);
        let mut summary = CsvTable::new(&["t", "band", "sup", "bound_constant", "peak", "integral_re"]);
        for &t in &times {
            for &band in &bands {
                let k = ld::kernel(t, band, &xs, &opts)?;
                for l in 0..xs.n {
                    samples.push_cells(vec![
                        cell(t),
                        cell(xs.x(l)),
                        cell(k.k[l].re),
                        cell(k.k[l].im),
                        cell(k.tk[l].re),
                        cell(k.tk[l].im),
                        band.label(),
                    ]);
                }
                let bound = match band {
                    Band::Shell(j) => k.sup() * 2f64.powf(j as f64 / 2.0) * (t + 2f64.powi(-3 * j)).sqrt(),
                    _ => f64::NAN,
                };
                summary.push_cells(vec![cell(t), band.label(), cell(k.sup()), cell(bound), cell(k.peak()), cell(k.integral().re)]);
            }
        }
        ctx.write("kernel.csv", &samples)?;
        ctx.write("kernel_summary.csv", &summary)?;
        Ok(Outcome::Pass)
    }))
}

fn symbols(cfg: &Config) -> Result<Job> {
    let form = read_normal_form(cfg)?;
    let lattice = Lattice::new(cfg.get("lattice_n", 101usize)?, cfg.get("lattice_max", 10.0)?)?;
    let names: Vec<String> = cfg.get_list("kinds", &SymbolKind::ALL.map(|k| k.name().to_string()))?;
    let kinds = names
        .iter()
        .map(|n| {
            SymbolKind::ALL.into_iter().find(|k| k.name() == n).ok_or_else(|| Error::Config {
                line: cfg.line_of("kinds"),
                msg: format!("unknown symbol `{n}`"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Box::new(move |ctx: &Ctx| {
        let grid = SymbolGrid::new(form, lattice);
        for kind in kinds {
            let mut w = BufWriter::new(fs::File::create(ctx.path(&format!("symbol_{}.csv", kind.name())))?);
            grid.write_csv(kind, &format!("# config_hash={}\n", ctx.hash), &mut w)?;
            w.flush()?;
        }
        Ok(Outcome::Pass)
    }))
}

fn identities(cfg: &Config) -> Result<Job> {
    let form = read_normal_form(cfg)?;
    let lattice = Lattice::new(cfg.get("lattice_n", 400usize)?, cfg.get("lattice_max", 25.0)?)?;
    let ladder = Lattice::new(cfg.get("ladder_n", 201usize)?, cfg.get("ladder_max", 30.0)?)?;
    let cube = Lattice::new(cfg.get("cube_n", 31usize)?, cfg.get("cube_max", 15.0)?)?;
    Ok(Box::new(move |ctx: &Ctx| {
        let report = nf::verify_quadratic_identity(&form, &lattice);
        print!("{report}");
        let mut t = CsvTable::new(&[
            "check", "status", "max_off_band", "tol_off_band", "max_in_band", "tol_in_band", "worst_xi", "worst_eta",
        ]);
        for c in &report.checks {
            t.push_cells(vec![
                c.name.to_string(),
                if c.passed() { "pass" } else { "fail" }.to_string(),
                cell(c.max_off_band),
                cell(c.tol_off_band),
                cell(c.max_in_band),
                cell(c.tol_in_band),
                cell(c.worst.0),
                cell(c.worst.1),
            ]);
        }
        ctx.write("identities.csv", &t)?;

        let coarse = nf::decay_ladder(&form, &ladder, &cube);
        let fine = nf::decay_ladder(&form, &ladder.refined(), &cube.refined());
        let mut lt = CsvTable::new(&["quantity", "coarse", "fine", "ratio"]);
        let mut stable = true;
        for ((name, a), (_, b)) in coarse.as_array().into_iter().zip(fine.as_array()) {
            let ratio = b / a;
            stable &= a.is_finite() && b.is_finite() && (0.5..=2.0).contains(&ratio);
            println!("ladder {name:<10} {a:.4e} -> {b:.4e} (x{ratio:.3})");
            lt.push_cells(vec![name.to_string(), cell(a), cell(b), cell(ratio)]);
        }
        ctx.write("ladder.csv", &lt)?;
        if !report.passed() {
            return Ok(Outcome::Fail("symbol identities failed".into()));
        }
        if !stable {
            return Ok(Outcome::Fail("decay ladder is not stable under refinement".into()));
        }
        Ok(Outcome::Pass)
    }))
}

fn decay(cfg: &Config) -> Result<Job> {
    let grid = read_grid(cfg, 4096.0, 8192, Some(-3072.0))?;
    let delta = cfg.get("delta", 1.0)?;
    let frame = read_frame(cfg)?;
    let kappa = cfg.get("kappa", ld::DEFAULT_KAPPA)?;
    let datum = read_datum(cfg, 1.0, 2.0)?;
    let times: Vec<f64> = cfg.get_list("times", &[1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0])?;
    Ok(Box::new(move |ctx: &Ctx| {
        let f = datum.sample(&grid)?;
        let rep = ld::ks_ratio(&f, &times, delta, frame, kappa)?;
        let mut t = CsvTable::new(&["t", "r0", "r1"]);
        for r in &rep.rows {
            t.push(vec![r.t, r.r0, r.r1]);
        }
        ctx.write("ks_ratio.csv", &t)?;
        let (s0, s1) = rep.spread();
        println!("max r0 {:.4e}, max r1 {:.4e}, spread {s0:.3} / {s1:.3}", rep.max_r0(), rep.max_r1());
        Ok(Outcome::Pass)
    }))
}

fn vectorfield(cfg: &Config) -> Result<Job> {
    let sim = read_sim(
        cfg,
        SimDefaults { period: 256.0, n: 512, origin: -192.0, dt: 0.01, t_end: 20.0, cadence: 1, amplitude: 0.1, width: 3.0 },
    )?;
    let stride = cfg.get("stride", 100usize)?;
    let decay_every = cfg.get("decay_every", 100usize)?.max(1);
    let tol = cfg.get("residual_tol", 1e-4)?;
    let kappa = cfg.get("kappa", ld::DEFAULT_KAPPA)?;
    let fault = match cfg.get_str("fault", "none").as_str() {
        "none" => None,
        "flip_d" => Some(Fault::FlipDDerivative),
        "flip_b2" => Some(Fault::FlipB2),
        other => {
            return Err(Error::Config { line: cfg.line_of("fault"), msg: format!("unknown fault `{other}` (none, flip_d, flip_b2)") })
        }
    };
    Ok(Box::new(move |ctx: &Ctx| {
        let trace = evolve_with(&sim, false)?;
        let vf = VectorFieldContext::for_trace(&trace, fault)?;
        let rows = v_equation_residual(&trace, &vf, stride)?;
        let mut t = CsvTable::new(&["t", "residual", "v_norm", "pv_norm", "relative"]);
        for r in &rows {
            t.push(vec![r.t, r.residual, r.v_norm, r.pv_norm, r.relative()]);
        }
        ctx.write("v_residual.csv", &t)?;

        let mut thin = SimTrace { config: trace.config.clone(), times: vec![], fields: vec![], diagnostics: vec![] };
        for (i, (ti, f)) in trace.times.iter().zip(&trace.fields).enumerate() {
            if i % decay_every == 0 {
                thin.times.push(*ti);
                thin.fields.push(f.clone());
            }
        }
        ctx.write("decay.csv", &decay_table(&track_decay(&thin, &vf, kappa)?))?;

        let worst = rows.iter().map(|r| r.relative()).fold(0.0, f64::max);
        println!("max residual / |v| = {worst:.3e} (tolerance {tol:.1e})");
        if worst > tol {
            return Ok(Outcome::Fail(format!("v-equation residual {worst:.3e} exceeds {tol:.1e}")));
        }
        Ok(Outcome::Pass)
    }))
}
