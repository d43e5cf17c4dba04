use num_bigint::BigInt;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::output::{csv_string, json_string, sibling, Emitter, RunManifest};
use super::*;
use crate::detector::{self, DetectorConfig};
use crate::ensembles::EnsembleSpec;
use crate::ergodic::{self, DynamicalSystem, Observable};
use crate::graph::{read_edge_list, Graph};
use crate::largedev::{self, Distribution, ScgfMethod, TailEstimator};
use crate::matching;
use crate::walks::{self, WalkDistribution, WalkKind};
use crate::zeta::{self, ZetaPolynomial};

/// What a handler reports back for the manifest.
struct Done {
    status: Status,
    seed: Option<u64>,
    primary: Option<PathBuf>,
}

pub(crate) fn execute(cli: &Cli) -> Result<Status, CliError> {
    if cli.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let started = Instant::now();
    let mut em = Emitter::default();
    let (name, done) = match &cli.command {
        Command::Generate(a) => ("generate", generate(a, &mut em)?),
        Command::Zeta(a) => ("zeta", zeta_cmd(a, &mut em)?),
        Command::Walk(a) => ("walk", walk(a, &mut em)?),
        Command::Detect(d) => match &d.sweep {
            Some(DetectSub::Sweep(a)) => ("detect sweep", sweep(a, cli.workers, &mut em)?),
            None => ("detect", detect_cmd(&d.run, cli.workers, &mut em)?),
        },
        Command::Ldp(LdpCommand::Scgf(a)) => ("ldp scgf", scgf_cmd(a, cli.workers, &mut em)?),
        Command::Ldp(LdpCommand::Rate(a)) => ("ldp rate", rate_cmd(a, cli.workers, &mut em)?),
        Command::Ldp(LdpCommand::Decay(a)) => ("ldp decay", decay_cmd(a, cli.workers, &mut em)?),
        Command::Ldp(LdpCommand::Diffusion(a)) => ("ldp diffusion", diffusion_cmd(a, cli.workers, &mut em)?),
        Command::Ergodic(a) => ("ergodic", ergodic_cmd(a, cli.workers, &mut em)?),
        Command::Match(a) => ("match", match_cmd(a, &mut em)?),
    };
    let manifest = RunManifest {
        subcommand: name.to_string(),
        parameters: serde_json::to_value(&cli.command)?,
        seed: done.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        workers: cli.workers,
        duration_seconds: started.elapsed().as_secs_f64(),
        outputs: Vec::new(),
    };
    em.finish(done.primary.as_deref(), manifest)?;
    Ok(done.status)
}

fn ok(seed: Option<u64>, primary: &Option<PathBuf>) -> Done {
    Done { status: Status::Ok, seed, primary: primary.clone() }
}

fn need<T: Copy>(value: Option<T>, flag: &str, ensemble: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --ensemble {ensemble}")))
}

fn generate(a: &GenerateArgs, em: &mut Emitter) -> Result<Done, CliError> {
    let spec = match a.ensemble {
        EnsembleKind::Er => EnsembleSpec::ErdosRenyi { n: need(a.n, "n", "er")?, p: need(a.p, "p", "er")? },
        EnsembleKind::Bipartite => EnsembleSpec::BipartiteRegular {
            n_bits: need(a.n_bits, "n-bits", "bipartite")?,
            m_checks: need(a.m_checks, "m-checks", "bipartite")?,
            q: need(a.q, "q", "bipartite")?,
            r: need(a.r, "r", "bipartite")?,
        },
        EnsembleKind::Planted => EnsembleSpec::PlantedBridge {
            n1: need(a.n1, "n1", "planted")?,
            n2: need(a.n2, "n2", "planted")?,
            k: need(a.k, "k", "planted")?,
            p_intra: need(a.p_intra, "p-intra", "planted")?,
        },
    };
    let g = spec.sample(a.seed)?;
    em.emit(a.out.as_deref(), &g.to_edge_list())?;
    Ok(ok(Some(a.seed), &a.out))
}

fn load(path: &Path) -> Result<Graph, CliError> {
    read_edge_list(path).map_err(|e| CliError::Usage(format!("cannot read graph {}: {e}", path.display())))
}

fn decimal(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

#[derive(Serialize)]
struct KappaCheck {
    circuit_rank: i64,
    from_zeta: String,
    matrix_tree: String,
    agree: bool,
}

#[derive(Serialize)]
struct OracleRow {
    m: usize,
    primes_census: u64,
    primes_from_traces: String,
    agree: bool,
}

#[derive(Serialize)]
struct ZetaReport {
    n_vertices: usize,
    n_edges: usize,
    /// Weighted input is inflated to unit weights first.
    inflated: bool,
    zeta_reciprocal: Vec<String>,
    loop_counts: Vec<String>,
    summary: zeta::TopologicalSummary,
    kappa: Option<KappaCheck>,
    prime_census: Option<Vec<OracleRow>>,
    euler_product_agrees: Option<bool>,
    asymptotics: Vec<zeta::AsymptoticRow>,
}

fn zeta_cmd(a: &ZetaArgs, em: &mut Emitter) -> Result<Done, CliError> {
    let input = load(&a.input)?;
    let inflated = !input.is_unit_weight();
    let g = if inflated { input.inflate() } else { input.clone() };
    let zp: ZetaPolynomial = zeta::zeta_reciprocal(&g)?;
    let summary = zeta::topological_summary(&g, a.max_m)?;
    let rank = g.circuit_rank();
    let kappa = if rank >= 2 {
        let from_zeta = zeta::kappa_from_zeta(&zp, rank)?;
        let matrix_tree = zeta::spanning_tree_count(&g)?;
        Some(KappaCheck { circuit_rank: rank, agree: from_zeta == matrix_tree, from_zeta: from_zeta.to_string(), matrix_tree: matrix_tree.to_string() })
    } else {
        None
    };
    let (prime_census, euler_product_agrees) = if a.no_oracle || a.max_m > zeta::MAX_ENUMERATION_LENGTH {
        (None, None)
    } else {
        let census = zeta::enumerate_prime_loops(&g, a.max_m)?;
        let rows: Vec<OracleRow> = (1..=a.max_m)
            .map(|m| OracleRow {
                m,
                primes_census: census[m],
                primes_from_traces: summary.prime_counts[m - 1].to_string(),
                agree: BigInt::from(census[m]) == summary.prime_counts[m - 1],
            })
            .collect();
        let euler = zeta::euler_product_truncation(&census, a.max_m);
        let agrees = (0..=a.max_m).all(|j| euler.get(j).cloned().unwrap_or_default() == zp.coeff(j));
        (Some(rows), Some(agrees))
    };
    let asymptotics = zeta::prime_asymptotics_check(&summary, a.max_m).unwrap_or_default();
    let consistent = kappa.as_ref().is_none_or(|k| k.agree)
        && prime_census.as_ref().is_none_or(|rows| rows.iter().all(|r| r.agree))
        && euler_product_agrees.unwrap_or(true);
    let report = ZetaReport {
        n_vertices: input.n_vertices(),
        n_edges: input.n_edges(),
        inflated,
        zeta_reciprocal: decimal(zp.coeffs()),
        loop_counts: decimal(&summary.loop_counts),
        summary,
        kappa,
        prime_census,
        euler_product_agrees,
        asymptotics,
    };
    em.emit(a.out.as_deref(), &json_string(&report)?)?;
    let mut done = ok(None, &a.out);
    if !consistent {
        done.status = Status::Flagged("independent routes disagree".into());
    }
    Ok(done)
}

#[derive(Serialize)]
struct OccupancyRow {
    step: usize,
    vertex: usize,
    empirical_fraction: f64,
    exact_probability: f64,
}

#[derive(Serialize)]
struct ReturnRow {
    step: usize,
    empirical_return_fraction: f64,
    exact_return_probability: f64,
    closed_walks_at_start: String,
}

fn walk(a: &WalkArgs, em: &mut Emitter) -> Result<Done, CliError> {
    let g = load(&a.input)?;
    if a.trajectories == 0 {
        return Err(CliError::Usage("--trajectories must be at least 1".into()));
    }
    let p0 = WalkDistribution::point_mass(g.n_vertices(), a.start)?;
    let exact = walks::evolve_history(&g, &p0, a.steps, WalkKind::Simple)?;
    let freq = walks::empirical_occupancy(&g, a.start, a.steps, a.trajectories, a.seed, 1)?;
    let raw = walks::closed_walk_counts(&g, a.start, a.steps)?;
    let mut occupancy = Vec::new();
    let mut returns = Vec::new();
    for t in 0..=a.steps {
        for v in 0..g.n_vertices() {
            occupancy.push(OccupancyRow { step: t, vertex: v, empirical_fraction: freq[t][v], exact_probability: exact[t].probs()[v] });
        }
        returns.push(ReturnRow {
            step: t,
            empirical_return_fraction: freq[t][a.start],
            exact_return_probability: exact[t].probs()[a.start],
            closed_walks_at_start: raw[t].to_string(),
        });
    }
    em.emit(a.out.as_deref(), &csv_string(&occupancy)?)?;
    let returns_path = a.out.as_deref().map(|p| sibling(p, "returns.csv"));
    em.emit(returns_path.as_deref(), &csv_string(&returns)?)?;
    Ok(ok(Some(a.seed), &a.out))
}

fn detector_config(flags: &DetectorFlags, n: usize) -> Result<DetectorConfig, CliError> {
    let threshold = flags.threshold.ok_or_else(|| CliError::Usage("--threshold is required".into()))?;
    let walk_length = flags.walk_len.unwrap_or_else(|| detector::default_walk_length(n));
    DetectorConfig::new(flags.pairs, walk_length, threshold, flags.reps).map_err(|e| CliError::Usage(e.to_string()))
}

fn detect_cmd(a: &DetectArgs, workers: usize, em: &mut Emitter) -> Result<Done, CliError> {
    let input = a.input.as_deref().ok_or_else(|| CliError::Usage("--in is required".into()))?;
    let seed = a.seed.ok_or_else(|| CliError::Usage("--seed is required".into()))?;
    let g = load(input)?;
    let cfg = detector_config(&a.flags, g.n_vertices())?;
    let verdict = detector::detect(&g, &cfg, seed, workers)?;
    em.emit(a.out.as_deref(), &json_string(&verdict)?)?;
    Ok(ok(Some(seed), &a.out))
}

fn sweep(a: &SweepArgs, workers: usize, em: &mut Emitter) -> Result<Done, CliError> {
    if a.n < 2 || a.runs == 0 {
        return Err(CliError::Usage("--n must be at least 2 and --runs at least 1".into()));
    }
    let p = a.p_intra.unwrap_or(2.0 * (a.n as f64).ln() / a.n as f64);
    let cfg = detector_config(&a.flags, a.n)?;
    let rows = detector::phase_sweep(a.n, &a.k_values, p, &cfg, a.runs, a.seed, workers)?;
    em.emit(a.out.as_deref(), &csv_string(&rows)?)?;
    Ok(ok(Some(a.seed), &a.out))
}

fn distribution(d: &DistFlags) -> Result<Distribution, CliError> {
    let dist = match d.dist {
        DistKind::Bernoulli => Distribution::bernoulli(d.p),
        DistKind::Gaussian => Distribution::gaussian(d.mu, d.sigma),
    };
    dist.map_err(|e| CliError::Usage(e.to_string()))
}

fn grid(lo: f64, hi: f64, step: f64, name: &str) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(CliError::Usage(format!("--{name}-min <= --{name}-max and --{name}-step > 0 required")));
    }
    Ok(largedev::uniform_grid(lo, hi, step))
}

fn estimate_scgf(a: &ScgfFlags, workers: usize) -> Result<largedev::ScgfEstimate, CliError> {
    let dist = distribution(&a.dist)?;
    let method = match a.method {
        MethodFlag::PositionProduct => ScgfMethod::PositionProduct,
        MethodFlag::SumSamples => ScgfMethod::SumSamples,
    };
    let t = grid(a.t_min, a.t_max, a.t_step, "t")?;
    Ok(largedev::empirical_scgf(move |rng| dist.sample(rng), a.n, &t, a.samples, a.seed, method, workers)?)
}

#[derive(Serialize)]
struct ScgfRow {
    t: f64,
    lambda_hat: f64,
    lambda_exact: f64,
    overflow: bool,
}

fn scgf_cmd(a: &ScgfFlags, workers: usize, em: &mut Emitter) -> Result<Done, CliError> {
    let dist = distribution(&a.dist)?;
    let est = estimate_scgf(a, workers)?;
    let rows: Vec<ScgfRow> = (0..est.t_grid.len())
        .map(|k| ScgfRow { t: est.t_grid[k], lambda_hat: est.lambda_hat[k], lambda_exact: dist.cumulant(est.t_grid[k]), overflow: est.overflow[k] })
        .collect();
    em.emit(a.out.as_deref(), &csv_string(&rows)?)?;
    let mut done = ok(Some(a.seed), &a.out);
    if est.overflow.iter().any(|&o| o) {
        done.status = Status::Flagged("some grid points overflowed".into());
    }
    Ok(done)
}

#[derive(Serialize)]
struct RateRowOut {
    x: f64,
    q_hat: f64,
    q_exact: f64,
    boundary: bool,
}

fn rate_cmd(a: &RateArgs, workers: usize, em: &mut Emitter) -> Result<Done, CliError> {
    let dist = distribution(&a.scgf.dist)?;
    let est = estimate_scgf(&a.scgf, workers)?;
    let x = grid(a.x_min, a.x_max, a.x_step, "x")?;
    let rate = largedev::legendre_transform(&est, &x)?;
    let rows: Vec<RateRowOut> = (0..x.len())
        .map(|k| RateRowOut { x: x[k], q_hat: rate.q_hat[k], q_exact: largedev::cramer_rate_analytic(&dist, x[k]).value, boundary: rate.boundary[k] })
        .collect();
    em.emit(a.scgf.out.as_deref(), &csv_string(&rows)?)?;
    let mut done = ok(Some(a.scgf.seed), &a.scgf.out);
    if rate.boundary.iter().any(|&b| b) {
        done.status = Status::Flagged("optimal t on the grid boundary for some x; widen the t grid".into());
    }
    Ok(done)
}

#[derive(Serialize)]
struct DecayRowOut {
    n: usize,
    hits: usize,
    p_hat: f64,
    p_std_error: f64,
    rate: Option<f64>,
    rate_std_error: Option<f64>,
    exact_tail_rate: f64,
    prefactor_corrected_rate: Option<f64>,
    analytic_rate: f64,
    flagged: bool,
}

fn decay_cmd(a: &DecayArgs, workers: usize, em: &mut Emitter) -> Result<Done, CliError> {
    let dist = distribution(&a.dist)?;
    let estimator = match a.estimator {
        EstimatorFlag::Direct => TailEstimator::Direct,
        EstimatorFlag::Tilted => TailEstimator::Tilted,
    };
    let table = largedev::ldp_decay_check(&dist, a.x, &a.n_list, a.samples, a.seed, estimator, workers)?;
    let rows: Vec<DecayRowOut> = table
        .rows
        .iter()
        .map(|r| DecayRowOut {
            n: r.n,
            hits: r.hits,
            p_hat: r.p_hat,
            p_std_error: r.p_std_error,
            rate: r.rate,
            rate_std_error: r.rate_std_error,
            exact_tail_rate: r.exact_tail_rate,
            prefactor_corrected_rate: r.prefactor_corrected_rate,
            analytic_rate: table.analytic_rate,
            flagged: r.flagged,
        })
        .collect();
    em.emit(a.out.as_deref(), &csv_string(&rows)?)?;
    let mut done = ok(Some(a.seed), &a.out);
    if table.rows.iter().any(|r| r.flagged) {
        done.status = Status::Flagged("no events observed at some n".into());
    }
    Ok(done)
}

#[derive(Serialize)]
struct DiffusionReport {
    system: largedev::DiffusionSystem,
    observable: &'static str,
    comparison: largedev::GirsanovComparison,
    /// Closed form, when the system is a single Ornstein-Uhlenbeck particle.
    analytic: Option<f64>,
}

fn diffusion_cmd(a: &DiffusionArgs, workers: usize, em: &mut Emitter) -> Result<Done, CliError> {
    let sys = largedev::DiffusionSystem::new(a.initial.clone(), a.pair_force, a.self_force, a.dt, a.horizon)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let comparison = largedev::girsanov_experiment(&sys, |eta| eta.iter().map(|x| x * x).sum(), a.paths, a.seed, workers)?;
    let is_ou = sys.n_particles() == 1 && sys.self_force == largedev::ForceLaw::Linear { slope: -1.0 };
    let analytic = is_ou.then(|| largedev::ou_second_moment(sys.initial[0], sys.n_steps() as f64 * sys.dt));
    let degenerate = comparison.degenerate;
    let report = DiffusionReport { system: sys, observable: "sum_i eta_i(T)^2", comparison, analytic };
    em.emit(a.out.as_deref(), &json_string(&report)?)?;
    let mut done = ok(Some(a.seed), &a.out);
    if degenerate {
        done.status = Status::Flagged("effective sample size below 5% of paths".into());
    }
    Ok(done)
}

#[derive(Serialize)]
struct CurveRow {
    n: usize,
    l2_error: f64,
}

#[derive(Serialize)]
struct FitReport {
    map: ergodic::MapKind,
    observable: Observable,
    fit: Option<ergodic::PowerLawFit>,
}

fn ergodic_cmd(a: &ErgodicArgs, workers: usize, em: &mut Emitter) -> Result<Done, CliError> {
    let sys = match a.map {
        MapFlag::Rotation => match a.alpha {
            Some(alpha) => DynamicalSystem::rotation(alpha).map_err(|e| CliError::Usage(e.to_string()))?,
            None => DynamicalSystem::golden_rotation(),
        },
        MapFlag::Doubling => DynamicalSystem::doubling(),
    };
    let h = match a.observable {
        ObservableFlag::X => Observable::Identity,
        ObservableFlag::Sin => Observable::Sin,
        ObservableFlag::Const => Observable::Constant { value: a.constant },
    };
    let curve = ergodic::l2_error_curve(&sys, &h, &a.n_grid, a.points, a.seed, workers)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows: Vec<CurveRow> = curve.n_grid.iter().zip(&curve.l2_error).map(|(&n, &e)| CurveRow { n, l2_error: e }).collect();
    em.emit(a.out.as_deref(), &csv_string(&rows)?)?;
    let fit = FitReport { map: sys.map(), observable: h, fit: curve.fit };
    let fit_path = a.out.as_deref().map(|p| sibling(p, "fit.json"));
    em.emit(fit_path.as_deref(), &json_string(&fit)?)?;
    let mut done = ok(Some(a.seed), &a.out);
    if curve.fit.is_none() {
        done.status = Status::Flagged("power-law exponent undefined (zero error or too few grid points)".into());
    }
    Ok(done)
}

#[derive(Serialize)]
struct MatchReport {
    rows: usize,
    cols: usize,
    fkt_count: String,
    brute_force_count: Option<String>,
    agree: Option<bool>,
}

fn match_cmd(a: &MatchArgs, em: &mut Emitter) -> Result<Done, CliError> {
    let og = matching::kasteleyn_orient(a.rows, a.cols).map_err(|e| CliError::Usage(e.to_string()))?;
    let fkt = matching::count_matchings_fkt(&og)?;
    let brute = if a.brute_force { Some(BigInt::from(matching::brute_force_matchings(&og.to_graph())?)) } else { None };
    let agree = brute.as_ref().map(|b| *b == fkt);
    match &a.out {
        Some(path) => {
            let report = MatchReport {
                rows: a.rows,
                cols: a.cols,
                fkt_count: fkt.to_string(),
                brute_force_count: brute.as_ref().map(|b| b.to_string()),
                agree,
            };
            em.emit(Some(path), &json_string(&report)?)?;
        }
        None => {
            let mut text = format!("{fkt}\n");
            if let Some(b) = &brute {
                text.push_str(&format!("brute force: {b} ({})\n", if agree == Some(true) { "agree" } else { "DISAGREE" }));
            }
            em.emit(None, &text)?;
        }
    }
    let mut done = ok(None, &a.out);
    if agree == Some(false) {
        done.status = Status::Flagged("FKT and brute force disagree".into());
    }
    Ok(done)
}
