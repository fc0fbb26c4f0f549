//! The batch experiments: each one runs a verification suite from the
//! core library, writes CSV/JSON artifacts, and reports how many rows
//! violated their bound.

use std::path::PathBuf;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::json;

use gapamp_core::amplify::{self, ancilla_contraction, ancilla_uniform};
use gapamp_core::ffham::{random_ff_instance, RandomInstanceConfig};
use gapamp_core::nalgebra::DVector;
use gapamp_core::searchlab::{
    self, build_search_ff, gap_certificate, lattice_family, measurement_search,
    misra_gries_edge_color,
};
use gapamp_core::spectra::{self, EigOptions};
use gapamp_core::stoqmc::{
    build_perturbed, expander_perturbation, metropolis_mix, mixing_schedule, path_weights,
    random_stoquastic,
};
use gapamp_core::trotter::{self, TrotterOrder};
use gapamp_core::{rng_from_seed, FFHamiltonian, SparseSymOperator};

use crate::config::*;
use crate::csvout::{f, write_json, CsvWriter};

/// What a run produced.
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    /// Rows that violated an invariant; nonzero exit status when > 0.
    pub failures: usize,
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    std::fs::create_dir_all(&config.output_dir).with_context(|| {
        format!("cannot create output dir {}", config.output_dir.display())
    })?;
    match config.experiment {
        ExperimentKind::AmplifyVerify => amplify_verify(config),
        ExperimentKind::GtildeVerify => gtilde_verify(config),
        ExperimentKind::LocalHam => local_ham(config),
        ExperimentKind::TrotterSweep => trotter_sweep(config),
        ExperimentKind::SearchBench => search_bench(config),
        ExperimentKind::LatticeScan => lattice_scan(config),
        ExperimentKind::McMix => mc_mix(config),
    }
}

/// Deterministic per-item stream: decouples parallel scheduling from
/// randomness.
fn item_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(index.wrapping_mul(0xd1342543de82ef95))
}

/// Random instance in the verification envelope: dimension up to
/// `max_dim`, term count up to `max_terms`, mixed coefficients.
fn draw_suite_instance(seed: u64, max_dim: usize, max_terms: usize) -> FFHamiltonian {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    let dim = rng.gen_range(4..=max_dim.max(4));
    let terms = rng.gen_range(1..=max_terms.max(1));
    let cfg = RandomInstanceConfig {
        dim,
        terms,
        null_dim: rng.gen_range(1..=2.min(dim - 2)),
        max_rank: ((dim - 2) / 2).max(1),
        mixed_coefficients: true,
    };
    random_ff_instance(&cfg, &mut rng).expect("envelope keeps parameters valid")
}

struct AmplifyRow {
    index: usize,
    dim: usize,
    terms: usize,
    l_eff: usize,
    null_h: usize,
    null_hp: usize,
    gap_h: f64,
    gap_hp: f64,
    bound: f64,
    prop1_residual: f64,
    x_residual: f64,
    u_residual: f64,
    ground_residual: f64,
    pass: bool,
}

fn amplify_row(index: usize, seed: u64, params: &AmplifyVerifyParams) -> AmplifyRow {
    let ham = draw_suite_instance(seed, params.max_dim, params.max_terms);
    let dim = ham.dim();
    let terms = ham.len();

    let h_report = spectra::eig_full(&ham.assemble(), &EigOptions::default()).unwrap();
    let null_h = h_report.null_dim();
    let gap_h = h_report.gap_about(0.0).unwrap();

    let x = amplify::build_x(&ham).unwrap();
    let x_residual = x.matmul(&x).unwrap().max_abs_diff(&x).unwrap();
    let u = amplify::build_u_padded(&ham, true).unwrap();
    let u_residual = u
        .matmul(&u)
        .unwrap()
        .max_abs_diff(&SparseSymOperator::identity(u.dim()))
        .unwrap();
    let d = 2 * terms;
    let prop1_residual = ancilla_contraction(&u, dim, d, &ancilla_uniform(d))
        .unwrap()
        .max_abs_diff(
            &SparseSymOperator::identity(dim)
                .add_scaled(-2.0 / d as f64, &ham.skeleton())
                .unwrap(),
        )
        .unwrap();

    let hp = amplify::build_hprime(&ham, gap_h, true).unwrap();
    let hp_report = spectra::eig_full(hp.operator(), &EigOptions::values_only()).unwrap();
    let null_hp = hp_report.null_dim();
    let gap_hp = hp_report.gap_about(0.0).unwrap();
    let l_eff = hp.l_eff();
    let bound = (gap_h * l_eff as f64).sqrt() / 6.0;

    let mut ground_residual = 0.0f64;
    for j in 0..null_h {
        let psi = h_report.eigenvector(j).unwrap();
        let v = amplify::embed_with_uniform_ancilla(&psi, d);
        ground_residual = ground_residual.max(hp.operator().matvec(&v).norm());
    }

    let pass = null_hp == null_h
        && gap_hp >= bound
        && prop1_residual <= 1e-12
        && x_residual <= 1e-12
        && u_residual <= 1e-12
        && ground_residual <= 1e-9;
    AmplifyRow {
        index,
        dim,
        terms,
        l_eff,
        null_h,
        null_hp,
        gap_h,
        gap_hp,
        bound,
        prop1_residual,
        x_residual,
        u_residual,
        ground_residual,
        pass,
    }
}

fn amplify_verify(config: &ExperimentConfig) -> Result<Outcome> {
    let params: AmplifyVerifyParams = config.typed_params()?;
    let rows: Vec<AmplifyRow> = (0..params.instances)
        .into_par_iter()
        .map(|i| amplify_row(i, item_seed(config.seed, i as u64), &params))
        .collect();

    let mut w = CsvWriter::new(
        &config.output_dir,
        "amplify_verify.csv",
        config.seed,
        &[
            ("experiment", "amplify-verify".into()),
            ("instances", params.instances.to_string()),
        ],
    );
    w.header(&[
        "instance",
        "dim",
        "terms",
        "l_eff",
        "null_h",
        "null_hprime",
        "gap_h",
        "gap_hprime",
        "bound",
        "prop1_residual",
        "x_residual",
        "u_residual",
        "ground_residual",
        "pass",
    ]);
    let mut failures = 0;
    for r in &rows {
        if !r.pass {
            failures += 1;
        }
        w.row(&[
            r.index.to_string(),
            r.dim.to_string(),
            r.terms.to_string(),
            r.l_eff.to_string(),
            r.null_h.to_string(),
            r.null_hp.to_string(),
            f(r.gap_h),
            f(r.gap_hp),
            f(r.bound),
            f(r.prop1_residual),
            f(r.x_residual),
            f(r.u_residual),
            f(r.ground_residual),
            r.pass.to_string(),
        ]);
    }
    Ok(Outcome {
        artifacts: vec![w.finish()?],
        failures,
    })
}

fn gtilde_verify(config: &ExperimentConfig) -> Result<Outcome> {
    let params: GtildeVerifyParams = config.typed_params()?;
    let rows: Vec<(usize, usize, usize, f64, bool)> = (0..params.instances)
        .into_par_iter()
        .map(|i| {
            let ham = draw_suite_instance(
                item_seed(config.seed, i as u64),
                params.max_dim,
                params.max_terms,
            );
            let weighted =
                spectra::eig_full(&ham.assemble(), &EigOptions::values_only()).unwrap();
            let gt = amplify::build_gtilde(&ham).unwrap();
            let got = spectra::eig_full(gt.operator(), &EigOptions::values_only()).unwrap();
            let mut expected: Vec<f64> = Vec::new();
            for &l in weighted.eigenvalues() {
                if l > weighted.null_tol() {
                    expected.push(-l.sqrt());
                    expected.push(l.sqrt());
                }
            }
            expected.resize(got.dim(), 0.0);
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let dev = got
                .eigenvalues()
                .iter()
                .zip(expected.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            (i, ham.dim(), ham.len(), dev, dev <= 1e-8)
        })
        .collect();

    let mut w = CsvWriter::new(
        &config.output_dir,
        "gtilde_verify.csv",
        config.seed,
        &[("experiment", "gtilde-verify".into())],
    );
    w.header(&["instance", "dim", "terms", "spectrum_dev", "pass"]);
    let mut failures = 0;
    for (i, dim, terms, dev, pass) in &rows {
        if !pass {
            failures += 1;
        }
        w.row(&[
            i.to_string(),
            dim.to_string(),
            terms.to_string(),
            f(*dev),
            pass.to_string(),
        ]);
    }
    Ok(Outcome {
        artifacts: vec![w.finish()?],
        failures,
    })
}

fn local_ham(config: &ExperimentConfig) -> Result<Outcome> {
    let params: LocalHamParams = config.typed_params()?;
    let mut rng = rng_from_seed(config.seed);
    let cfg = RandomInstanceConfig {
        dim: params.dim.max(2),
        terms: params.terms,
        null_dim: 1,
        max_rank: (params.dim - 1).max(1),
        mixed_coefficients: true,
    };
    let ham = random_ff_instance(&cfg, &mut rng)?;
    let gap = spectra::eig_full(&ham.assemble(), &EigOptions::values_only())?
        .gap_about(0.0)
        .context("instance lost its zero eigenvalue")?;
    let l = ham.len() as f64;
    let d_exp = params.d_exponent;
    let prefactor = l.powf(-1.0 / d_exp);

    let hp = amplify::build_local_hprime(&ham, gap, d_exp)?;
    let qubits = ham.len() + 1;
    let nhat = amplify::particle_number_operator(ham.dim(), qubits);
    let comm = hp
        .operator()
        .matmul(&nhat)?
        .max_abs_diff(&nhat.matmul(hp.operator())?)?;

    let gbar = amplify::build_gbar(&ham, gap)?;
    let single = amplify::restrict_to_sector(&hp, 1)?;
    let single_dev = single.max_abs_diff(&gbar.operator().scale(prefactor))?;

    let mut w = CsvWriter::new(
        &config.output_dir,
        "local_ham.csv",
        config.seed,
        &[
            ("experiment", "local-ham".into()),
            ("dim", ham.dim().to_string()),
            ("terms", ham.len().to_string()),
            ("d_exponent", f(d_exp)),
            ("commutator_residual", f(comm)),
            ("single_particle_dev", f(single_dev)),
        ],
    );
    w.header(&["sector", "block_dim", "min_eigenvalue", "lower_bound", "pass"]);
    let mut failures = 0;
    if comm > 1e-12 || single_dev > 1e-12 {
        failures += 1;
    }
    for a in 0..=qubits {
        let block = amplify::build_local_sector(&ham, gap, d_exp, a)?;
        let evs = spectra::eig_full(&block, &EigOptions::values_only())?;
        let bound = if a == 0 {
            gap.sqrt() * prefactor / 2.0 - 4.0
        } else {
            -prefactor * ((l + 1.0 - a as f64) * (1.0 + a as f64)).sqrt()
                + 4.0 * (a as f64 - 1.0)
        };
        let pass = evs.min_eigenvalue() >= bound - 1e-9;
        if !pass {
            failures += 1;
        }
        w.row(&[
            a.to_string(),
            block.dim().to_string(),
            f(evs.min_eigenvalue()),
            f(bound),
            pass.to_string(),
        ]);
    }
    Ok(Outcome {
        artifacts: vec![w.finish()?],
        failures,
    })
}

/// Reference instance for the sweep: the smallest frustration-free
/// Hamiltonian whose split has a nonzero commutator.
fn sweep_instance() -> FFHamiltonian {
    use gapamp_core::ffham::{rank1_projector, ProjectorTerm};
    let t1 = ProjectorTerm::new(
        SparseSymOperator::from_triplets(3, [(1, 1, 1.0)]).unwrap(),
        1.0,
    )
    .unwrap();
    let t2 = rank1_projector(&DVector::from_vec(vec![0.0, 1.0, 1.0])).unwrap();
    FFHamiltonian::new(vec![t1, t2]).unwrap()
}

fn trotter_sweep(config: &ExperimentConfig) -> Result<Outcome> {
    let params: TrotterSweepParams = config.typed_params()?;
    let ham = sweep_instance();
    let gap = spectra::eig_full(&ham.assemble(), &EigOptions::values_only())?
        .gap_about(0.0)?;
    let l_eff = (2 * ham.len()) as f64;

    let mut w = CsvWriter::new(
        &config.output_dir,
        "trotter_sweep.csv",
        config.seed,
        &[
            ("experiment", "trotter-sweep".into()),
            ("l_eff", f(l_eff)),
            ("gap", f(gap)),
        ],
    );
    w.header(&["L", "t", "order", "steps", "calls", "error_norm"]);
    let mut failures = 0;
    for &t in &params.t_values {
        let v = trotter::exact_reference(&ham, gap, t)?;
        for &order_val in &params.orders {
            let order = match order_val {
                1 => TrotterOrder::First,
                2 => TrotterOrder::Second,
                other => anyhow::bail!("unsupported order {other}"),
            };
            for &steps in &params.steps {
                let res = trotter::evolve_blackbox(&ham, gap, t, steps, order)?;
                let err = trotter::spectral_norm_diff(&res.unitary, &v);
                if res.ledger.count() != 2 * steps as u64 {
                    failures += 1;
                }
                w.row(&[
                    f(l_eff),
                    f(t),
                    order_val.to_string(),
                    steps.to_string(),
                    res.ledger.count().to_string(),
                    f(err),
                ]);
            }
        }
    }
    let mut artifacts = vec![w.finish()?];

    if let Some(eps) = params.eps {
        let mut w = CsvWriter::new(
            &config.output_dir,
            "trotter_calls.csv",
            config.seed,
            &[("experiment", "trotter-sweep".into()), ("eps", f(eps))],
        );
        w.header(&["L", "t", "order", "steps", "calls", "error_norm", "model_calls"]);
        for &t in &params.t_values {
            let cost = trotter::measured_calls_for_accuracy(
                &ham,
                gap,
                t,
                TrotterOrder::Second,
                eps,
                1 << 20,
            )?;
            let model = trotter::calls_needed(l_eff, t, 1, eps)?;
            w.row(&[
                f(l_eff),
                f(t),
                "2".into(),
                cost.steps.to_string(),
                cost.calls.to_string(),
                f(cost.error),
                model.to_string(),
            ]);
        }
        artifacts.push(w.finish()?);
    }
    Ok(Outcome {
        artifacts,
        failures,
    })
}

fn search_bench(config: &ExperimentConfig) -> Result<Outcome> {
    let params: SearchBenchParams = config.typed_params()?;
    struct Row {
        m: usize,
        degree: usize,
        lambda: f64,
        chi: usize,
        gap: f64,
        bound: f64,
        cert_pass: bool,
        gap_amplified: f64,
        amplified_bound: f64,
        amplified_pass: bool,
        trials: u64,
        successes: u64,
        p_lower: f64,
        analytic: f64,
        search_pass: bool,
    }
    let rows: Vec<Row> = params
        .m_values
        .par_iter()
        .enumerate()
        .map(|(i, &m)| -> Result<Row> {
            let mut rng = rng_from_seed(item_seed(config.seed, i as u64));
            let degree = params.degree.min(m - 1);
            let graph = if degree == m - 1 {
                searchlab::complete_graph(m)?
            } else {
                searchlab::random_regular_expander(m, degree, params.lambda_max, &mut rng)?
            };
            let coloring = misra_gries_edge_color(m, graph.edges());
            use rand::Rng;
            let marked = rng.gen_range(0..m);
            let inst = build_search_ff(&graph, &coloring, marked)?;
            let cert = gap_certificate(&inst)?;

            let (gap_amplified, amplified_bound, amplified_pass) = if params.amplify {
                let hp = amplify::build_hprime(&inst.ham, cert.gap, true)?;
                let opts = EigOptions::values_only().with_cap(8192);
                let rep = spectra::eig_full(hp.operator(), &opts)?;
                let gap_hp = rep.gap_about(0.0)?;
                let bound = (cert.gap * hp.l_eff() as f64).sqrt() / 6.0;
                (gap_hp, bound, gap_hp >= bound && rep.null_dim() == 1)
            } else {
                (f64::NAN, f64::NAN, true)
            };

            let stats = measurement_search(
                &inst.ham.assemble(),
                marked,
                params.trials,
                &mut rng,
            )?;
            let search_pass = stats.empirical_rate >= stats.analytic_lower - 3.0 * stats.sigma;
            Ok(Row {
                m,
                degree,
                lambda: cert.lambda,
                chi: cert.chi,
                gap: cert.gap,
                bound: cert.bound,
                cert_pass: cert.passed,
                gap_amplified,
                amplified_bound,
                amplified_pass,
                trials: stats.trials,
                successes: stats.successes,
                p_lower: stats.wilson_lower,
                analytic: stats.analytic_lower,
                search_pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cert_w = CsvWriter::new(
        &config.output_dir,
        "search_cert.csv",
        config.seed,
        &[
            ("experiment", "search-bench".into()),
            ("lambda_max", f(params.lambda_max)),
        ],
    );
    cert_w.header(&[
        "M", "d", "lambda", "chi", "gap", "bound", "pass", "gap_amplified",
        "amplified_bound", "amplified_pass",
    ]);
    let mut stats_w = CsvWriter::new(
        &config.output_dir,
        "search_stats.csv",
        config.seed,
        &[("experiment", "search-bench".into())],
    );
    stats_w.header(&["M", "trials", "successes", "p_lower", "analytic_lower", "pass"]);
    let mut failures = 0;
    for r in &rows {
        if !r.cert_pass || !r.amplified_pass || !r.search_pass {
            failures += 1;
        }
        cert_w.row(&[
            r.m.to_string(),
            r.degree.to_string(),
            f(r.lambda),
            r.chi.to_string(),
            f(r.gap),
            f(r.bound),
            r.cert_pass.to_string(),
            f(r.gap_amplified),
            f(r.amplified_bound),
            r.amplified_pass.to_string(),
        ]);
        stats_w.row(&[
            r.m.to_string(),
            r.trials.to_string(),
            r.successes.to_string(),
            f(r.p_lower),
            f(r.analytic),
            r.search_pass.to_string(),
        ]);
    }
    Ok(Outcome {
        artifacts: vec![cert_w.finish()?, stats_w.finish()?],
        failures,
    })
}

fn lattice_scan(config: &ExperimentConfig) -> Result<Outcome> {
    let params: LatticeScanParams = config.typed_params()?;
    let mut w = CsvWriter::new(
        &config.output_dir,
        "lattice_scan.csv",
        config.seed,
        &[
            ("experiment", "lattice-scan".into()),
            ("dims", params.dims.to_string()),
        ],
    );
    w.header(&["M", "c", "gap", "p_x", "p_s"]);
    let mut summary = Vec::new();
    let mut failures = 0;
    for &side in &params.sides {
        let fam = lattice_family(side, params.dims)?;
        let scan = fam.scan(0, 0.0, params.c_max, params.grid, params.tol)?;
        for pt in &scan.curve {
            w.row(&[fam.m.to_string(), f(pt.c), f(pt.gap), f(pt.p_x), f(pt.p_s)]);
        }
        if !scan.interior_minimum || scan.p_x < 0.2 || scan.p_s < 0.2 {
            failures += 1;
        }
        summary.push(json!({
            "side": side,
            "m": fam.m,
            "c_star": scan.c_star,
            "gap_at_c_star": scan.gap_at_c_star,
            "p_x": scan.p_x,
            "p_s": scan.p_s,
            "interior_minimum": scan.interior_minimum,
        }));
    }
    let csv = w.finish()?;
    let json_path = write_json(
        &config.output_dir,
        "lattice_summary.json",
        &json!({ "seed": config.seed, "scans": summary }),
    )?;
    Ok(Outcome {
        artifacts: vec![csv, json_path],
        failures,
    })
}

fn mc_mix(config: &ExperimentConfig) -> Result<Outcome> {
    let params: McMixParams = config.typed_params()?;

    // Hitting-time sweep.
    struct Chain {
        m: usize,
        beta: f64,
        p: usize,
        eta: f64,
        seed: u64,
        hit: Option<u64>,
        oracle_calls: u64,
    }
    let mut jobs = Vec::new();
    for (mi, &m) in params.m_values.iter().enumerate() {
        for chain in 0..params.chains {
            jobs.push((mi, m, chain));
        }
    }
    let chains: Vec<Chain> = jobs
        .par_iter()
        .map(|&(mi, m, chain)| -> Result<Chain> {
            let mut rng = rng_from_seed(item_seed(config.seed, mi as u64));
            let degree = params.degree.min(m - 1);
            let graph = if degree == m - 1 {
                searchlab::complete_graph(m)?
            } else {
                searchlab::random_regular_expander(m, degree, params.lambda_max, &mut rng)?
            };
            let ham = build_perturbed(expander_perturbation(graph.adjacency(), degree), 0)?;
            let sched = mixing_schedule(m);
            let ens = path_weights(&ham, sched.beta, sched.p)?;
            let chain_seed = item_seed(config.seed, (mi * 1000 + chain + 1) as u64);
            let stats = metropolis_mix(&ens, 0, chain_seed, params.max_steps)?;
            Ok(Chain {
                m,
                beta: sched.beta,
                p: sched.p,
                eta: sched.eta,
                seed: chain_seed,
                hit: stats.hitting_time,
                oracle_calls: stats.oracle_calls,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut w = CsvWriter::new(
        &config.output_dir,
        "mix_hitting.csv",
        config.seed,
        &[
            ("experiment", "mc-mix".into()),
            ("start", "uniform random constant path".into()),
            ("max_steps", params.max_steps.to_string()),
        ],
    );
    w.header(&["M", "beta", "p", "eta", "seed", "hitting_time", "oracle_calls"]);
    for c in &chains {
        w.row(&[
            c.m.to_string(),
            f(c.beta),
            c.p.to_string(),
            f(c.eta),
            c.seed.to_string(),
            c.hit.map_or("censored".into(), |h| h.to_string()),
            c.oracle_calls.to_string(),
        ]);
    }
    let hitting_csv = w.finish()?;

    // Stoquastic-bound ensemble.
    let draws: Vec<(usize, usize, f64, f64, bool, bool, bool)> = params
        .stoquastic_sizes
        .iter()
        .flat_map(|&m| (0..params.stoquastic_draws).map(move |i| (m, i)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(m, i)| -> Result<(usize, usize, f64, f64, bool, bool, bool)> {
            let mut rng = rng_from_seed(item_seed(config.seed, (m * 7919 + i) as u64));
            use rand::Rng;
            let x = rng.gen_range(0..m);
            let fpert = random_stoquastic(m, m, &mut rng)?;
            let ham = build_perturbed(fpert, x)?;
            let rep = ham.verification_report()?;
            Ok((
                m,
                i,
                rep.e0,
                rep.gap,
                rep.e0_bound_ok,
                rep.gap_bound_ok,
                rep.strictly_positive,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let total = draws.len();
    let passed = draws
        .iter()
        .filter(|&&(_, _, _, _, e0, gap, pos)| e0 && gap && pos)
        .count();
    let json_path = write_json(
        &config.output_dir,
        "stoquastic_bounds.json",
        &json!({
            "seed": config.seed,
            "draws": total,
            "passed": passed,
            "per_draw": draws
                .iter()
                .map(|&(m, i, e0, gap, ok_e0, ok_gap, pos)| json!({
                    "m": m, "draw": i, "e0": e0, "gap": gap,
                    "e0_ok": ok_e0, "gap_ok": ok_gap, "positive": pos
                }))
                .collect::<Vec<_>>(),
        }),
    )?;

    // A censored median (more than half the chains capped) or a failed
    // bound counts as a failure.
    let mut failures = total - passed;
    for &m in &params.m_values {
        let mut hits: Vec<Option<u64>> = chains
            .iter()
            .filter(|c| c.m == m)
            .map(|c| c.hit)
            .collect();
        hits.sort_by_key(|h| h.unwrap_or(u64::MAX));
        if hits[hits.len() / 2].is_none() {
            failures += 1;
        }
    }
    Ok(Outcome {
        artifacts: vec![hitting_csv, json_path],
        failures,
    })
}

/// Fit the slope of `ln y` against `ln x` by least squares.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
    let sxx: f64 = xs.iter().map(|a| a * a).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}
