//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `-- --nocapture` to see them on success).
//! Every tolerance is pinned in code; nothing is deferred to runtime
//! calibration.

use std::sync::OnceLock;

use gapamp_core::amplify::{
    self, ancilla_contraction, ancilla_uniform, build_g, build_gtilde, build_hprime, build_u_padded,
};
use gapamp_core::ffham::{random_ff_instance, RandomInstanceConfig};
use gapamp_core::nalgebra::DVector;
use gapamp_core::searchlab::{
    self, build_search_ff, gap_certificate, lattice_family, measurement_search,
    misra_gries_edge_color, verify_proper, RegularGraph, SearchInstance,
};
use gapamp_core::spectra::{self, EigOptions, SpectrumReport};
use gapamp_core::stoqmc::{
    build_perturbed, chain_transition_matrix, expander_perturbation, metropolis_mix,
    mixing_schedule, path_weights, random_stoquastic,
};
use gapamp_core::trotter::{self, TrotterOrder};
use gapamp_core::{rng_from_seed, FFHamiltonian, SparseSymOperator};

const SUITE_SEED: u64 = 20_240_817;

/// One prepared verification instance.
struct Fixture {
    label: String,
    ham: FFHamiltonian,
    /// Decomposition of the weighted assembly, with eigenvectors.
    weighted: SpectrumReport,
    /// Decomposition of the projector sum, with eigenvectors.
    skeleton: SpectrumReport,
}

impl Fixture {
    fn new(label: String, ham: FFHamiltonian) -> Self {
        let weighted = spectra::eig_full(&ham.assemble(), &EigOptions::default()).unwrap();
        let skeleton = spectra::eig_full(&ham.skeleton(), &EigOptions::default()).unwrap();
        Self {
            label,
            ham,
            weighted,
            skeleton,
        }
    }

    fn weighted_gap(&self) -> f64 {
        self.weighted.gap_about(0.0).unwrap()
    }
}

fn cube_graph() -> RegularGraph {
    let mut edges = Vec::new();
    for v in 0..8usize {
        for b in 0..3 {
            let u = v ^ (1 << b);
            if v < u {
                edges.push((v, u));
            }
        }
    }
    RegularGraph::from_edge_list(8, 3, edges).unwrap()
}

fn search_instance(graph: &RegularGraph, marked: usize) -> SearchInstance {
    let coloring = misra_gries_edge_color(graph.vertex_count(), graph.edges());
    build_search_ff(graph, &coloring, marked).unwrap()
}

/// 50 random frustration-free instances (mixed coefficients, N up to 256,
/// L up to 8) plus two expander-search instances.
fn suite() -> &'static Vec<Fixture> {
    static SUITE: OnceLock<Vec<Fixture>> = OnceLock::new();
    SUITE.get_or_init(|| {
        let mut out = Vec::with_capacity(52);
        let shapes: [(usize, usize); 5] = [(256, 2), (200, 3), (128, 4), (96, 6), (64, 8)];
        for i in 0..50usize {
            let (dim, terms) = if i < 45 {
                (4 + (i * 7) % 37, 1 + i % 8)
            } else {
                shapes[i - 45]
            };
            let cfg = RandomInstanceConfig {
                dim,
                terms,
                null_dim: 1 + i % 2,
                max_rank: ((dim - 2) / 2).max(1),
                mixed_coefficients: true,
            };
            let mut rng = rng_from_seed(SUITE_SEED.wrapping_add(i as u64));
            let ham = random_ff_instance(&cfg, &mut rng).unwrap();
            out.push(Fixture::new(format!("random{i}(N={dim},L={terms})"), ham));
        }
        let cube = search_instance(&cube_graph(), 0);
        out.push(Fixture::new("search(M=8,d=3)".into(), cube.ham));
        let mut rng = rng_from_seed(SUITE_SEED ^ 0xabcd);
        let g16 = searchlab::random_regular_expander(16, 4, 0.95, &mut rng).unwrap();
        let inst16 = search_instance(&g16, 5);
        out.push(Fixture::new("search(M=16,d=4)".into(), inst16.ham));
        out
    })
}

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{name} failed: {detail}");
}

#[test]
fn criterion_01_amplified_gap_and_null_space() {
    let mut min_margin = f64::INFINITY;
    let mut max_ground_residual: f64 = 0.0;
    for fx in suite() {
        let delta = fx.weighted_gap();
        let hp = build_hprime(&fx.ham, delta, true).unwrap();
        let rep = spectra::eig_full(hp.operator(), &EigOptions::values_only()).unwrap();
        assert_eq!(
            rep.null_dim(),
            fx.weighted.null_dim(),
            "{}: null dim mismatch",
            fx.label
        );
        for j in 0..fx.weighted.null_dim() {
            let psi = fx.weighted.eigenvector(j).unwrap();
            let v = amplify::embed_with_uniform_ancilla(&psi, hp.ancilla_dim());
            let resid = hp.operator().matvec(&v).norm();
            max_ground_residual = max_ground_residual.max(resid);
            assert!(resid <= 1e-9, "{}: ground residual {resid}", fx.label);
        }
        let bound = (delta * hp.l_eff() as f64).sqrt() / 6.0;
        let gap = rep.gap_about(0.0).unwrap();
        min_margin = min_margin.min(gap / bound);
        assert!(gap >= bound, "{}: gap {gap} < bound {bound}", fx.label);
    }
    verdict(
        "criterion 01 (amplified gap and null space over 52 instances)",
        min_margin >= 1.0 && max_ground_residual <= 1e-9,
        &format!(
            "min gap/bound = {min_margin:.3}, max ground residual = {max_ground_residual:.2e}"
        ),
    );
}

#[test]
fn criterion_02_reflection_identities() {
    let mut worst: f64 = 0.0;
    for fx in suite() {
        let x = amplify::build_x(&fx.ham).unwrap();
        let x_dev = x.matmul(&x).unwrap().max_abs_diff(&x).unwrap();
        worst = worst.max(x_dev);
        for padded in [false, true] {
            let u = build_u_padded(&fx.ham, padded).unwrap();
            let u_dev = u
                .matmul(&u)
                .unwrap()
                .max_abs_diff(&SparseSymOperator::identity(u.dim()))
                .unwrap();
            let d = if padded { 2 * fx.ham.len() } else { fx.ham.len() };
            let prop1 = ancilla_contraction(&u, fx.ham.dim(), d, &ancilla_uniform(d))
                .unwrap()
                .max_abs_diff(
                    &SparseSymOperator::identity(fx.ham.dim())
                        .add_scaled(-2.0 / d as f64, &fx.ham.skeleton())
                        .unwrap(),
                )
                .unwrap();
            worst = worst.max(u_dev).max(prop1);
            assert!(
                x_dev <= 1e-12 && u_dev <= 1e-12 && prop1 <= 1e-12,
                "{} padded={padded}: x={x_dev:.2e} u={u_dev:.2e} prop1={prop1:.2e}",
                fx.label
            );
        }
    }
    verdict(
        "criterion 02 (X^2=X, U^2=1, reflection contraction, <=1e-12)",
        worst <= 1e-12,
        &format!("worst residual = {worst:.2e}"),
    );
}

#[test]
fn criterion_03_flag_coupled_spectrum() {
    let mut worst: f64 = 0.0;
    for fx in suite() {
        let gt = build_gtilde(&fx.ham).unwrap();
        let got = spectra::eig_full(gt.operator(), &EigOptions::values_only()).unwrap();
        let mut expected: Vec<f64> = Vec::new();
        for &l in fx.weighted.eigenvalues() {
            if l > fx.weighted.null_tol() {
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
        worst = worst.max(dev);
        assert!(dev <= 1e-8, "{}: spectrum deviation {dev:.2e}", fx.label);
    }
    verdict(
        "criterion 03 (flag-coupled spectrum = ±sqrt(lambda) multisets, <=1e-8)",
        worst <= 1e-8,
        &format!("worst multiset deviation = {worst:.2e}"),
    );
}

#[test]
fn criterion_04_invariant_blocks() {
    let mut worst_dev: f64 = 0.0;
    let mut blocks = 0usize;
    for fx in suite() {
        let g = build_g(&fx.ham, true).unwrap();
        let u = build_u_padded(&fx.ham, true).unwrap();
        let l_eff = g.l_eff() as f64;
        for j in 0..fx.skeleton.dim() {
            let lambda = fx.skeleton.eigenvalues()[j];
            if lambda.abs() <= fx.skeleton.null_tol() {
                continue;
            }
            let rep = spectra::verify_block_with(&fx.skeleton, &u, &g, j).unwrap();
            worst_dev = worst_dev.max(rep.max_dev);
            blocks += 1;
            assert!(
                rep.max_dev <= 1e-9,
                "{} block {j}: deviation {:.2e}",
                fx.label,
                rep.max_dev
            );
            let evs = rep.block.symmetric_eigenvalues();
            let top = evs[0].max(evs[1]);
            let floor = (2.0 * lambda / l_eff).sqrt();
            assert!(
                top + 1e-12 >= floor,
                "{} block {j}: sin(alpha) {top} < sqrt(2 lambda/L_eff) {floor}",
                fx.label
            );
        }
    }
    verdict(
        "criterion 04 (2x2 blocks match analytic form, sin(alpha) floor)",
        worst_dev <= 1e-9,
        &format!("{blocks} blocks, worst deviation = {worst_dev:.2e}"),
    );
}

#[test]
fn criterion_05_search_certificates_end_to_end() {
    let mut lines = Vec::new();
    for (i, &m) in [8usize, 16, 32, 64, 128, 256].iter().enumerate() {
        let degree = 8.min(m - 1);
        let graph = if degree == m - 1 {
            searchlab::complete_graph(m).unwrap()
        } else {
            let mut rng = rng_from_seed(SUITE_SEED.wrapping_add(900 + i as u64));
            searchlab::random_regular_expander(m, degree, 0.75, &mut rng).unwrap()
        };
        let coloring = misra_gries_edge_color(m, graph.edges());
        verify_proper(m, graph.edges(), &coloring).unwrap();
        assert!(
            coloring.chi() <= degree + 1,
            "M={m}: chi {} exceeds degree+1",
            coloring.chi()
        );
        let inst = build_search_ff(&graph, &coloring, m / 3).unwrap();
        let cert = gap_certificate(&inst).unwrap();
        assert!(
            cert.passed,
            "M={m}: gap {} below 1/(4(M-1)) = {}",
            cert.gap, cert.bound
        );

        let hp = build_hprime(&inst.ham, cert.gap, true).unwrap();
        let opts = EigOptions::values_only().with_cap(8192);
        let rep = spectra::eig_full(hp.operator(), &opts).unwrap();
        let amp_gap = rep.gap_about(0.0).unwrap();
        let amp_bound = (cert.gap * hp.l_eff() as f64).sqrt() / 6.0;
        assert_eq!(rep.null_dim(), 1, "M={m}: amplified null space");
        assert!(
            amp_gap >= amp_bound,
            "M={m}: amplified gap {amp_gap} < bound {amp_bound}"
        );
        lines.push(format!(
            "M={m} d={degree} lambda={:.3} chi={} gap={:.4} (bound {:.5}) gap'={:.3} (bound {:.3})",
            cert.lambda, cert.chi, cert.gap, cert.bound, amp_gap, amp_bound
        ));
    }
    verdict(
        "criterion 05 (expander search certificates + end-to-end amplification)",
        true,
        &lines.join("; "),
    );
}

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

#[test]
fn criterion_06_blackbox_simulation_scaling() {
    let ham = sweep_instance();
    let gap = spectra::eig_full(&ham.assemble(), &EigOptions::values_only())
        .unwrap()
        .gap_about(0.0)
        .unwrap();
    let l_eff = (2 * ham.len()) as f64;
    let steps = [8usize, 16, 32, 64];
    let mut details = Vec::new();

    for (order, expect) in [(TrotterOrder::First, -1.0), (TrotterOrder::Second, -2.0)] {
        let v = trotter::exact_reference(&ham, gap, 1.0).unwrap();
        let mut pts = Vec::new();
        for &n in &steps {
            let w = trotter::evolve_blackbox(&ham, gap, 1.0, n, order).unwrap();
            assert_eq!(
                w.ledger.count(),
                2 * n as u64,
                "ledger must charge exactly 2 per step"
            );
            assert!(trotter::unitarity_residual(&w.unitary) <= 1e-8);
            pts.push((n as f64, trotter::spectral_norm_diff(&w.unitary, &v)));
        }
        let slope = loglog_slope(&pts);
        assert!(
            (slope - expect).abs() <= 0.3,
            "order {expect}: slope {slope}"
        );
        details.push(format!("order{} slope={slope:.3}", -expect));
    }

    let mut call_pts = Vec::new();
    for t in [1.0f64, 2.0, 4.0] {
        let cost = trotter::measured_calls_for_accuracy(
            &ham,
            gap,
            t,
            TrotterOrder::Second,
            1e-4,
            1 << 20,
        )
        .unwrap();
        call_pts.push((l_eff * t, cost.calls as f64));
    }
    let call_slope = loglog_slope(&call_pts);
    assert!(
        call_slope <= 1.6,
        "measured calls grow with exponent {call_slope}"
    );
    details.push(format!("calls exponent={call_slope:.3}"));
    verdict(
        "criterion 06 (black-box simulation: error slopes, ledger, call growth)",
        true,
        &details.join(", "),
    );
}

#[test]
fn criterion_07_measurement_search_statistics() {
    let mut details = Vec::new();
    for (i, &m) in [16usize, 64].iter().enumerate() {
        let mut rng = rng_from_seed(SUITE_SEED.wrapping_add(700 + i as u64));
        let graph = searchlab::random_regular_expander(m, 8, 0.75, &mut rng).unwrap();
        let inst = search_instance(&graph, m / 2);
        let stats =
            measurement_search(&inst.ham.assemble(), m / 2, 10_000, &mut rng).unwrap();
        assert!(
            (stats.p_x - 0.5).abs() <= 1e-9,
            "M={m}: p_x = {} not exactly 1/2",
            stats.p_x
        );
        assert!(
            stats.empirical_rate >= stats.analytic_lower - 3.0 * stats.sigma,
            "M={m}: rate {} below analytic {} - 3 sigma",
            stats.empirical_rate,
            stats.analytic_lower
        );
        details.push(format!(
            "M={m}: rate={:.4} analytic>={:.4} p_x={:.6}",
            stats.empirical_rate, stats.analytic_lower, stats.p_x
        ));
    }
    verdict(
        "criterion 07 (two-measurement search statistics, 1e4 trials)",
        true,
        &details.join("; "),
    );
}

#[test]
fn criterion_08_lattice_phase_transition() {
    let mut pts = Vec::new();
    let mut details = Vec::new();
    for side in [2usize, 3] {
        let fam = lattice_family(side, 5).unwrap();
        let scan = fam.scan(0, 0.0, 0.5, 24, 1e-3).unwrap();
        assert!(scan.interior_minimum, "side {side}: minimum not interior");
        assert!(
            scan.p_x >= 0.2 && scan.p_s >= 0.2,
            "side {side}: overlaps p_x={} p_s={}",
            scan.p_x,
            scan.p_s
        );
        details.push(format!(
            "M={}: c*={:.4} gap={:.4} p_x={:.3} p_s={:.3}",
            fam.m, scan.c_star, scan.gap_at_c_star, scan.p_x, scan.p_s
        ));
        pts.push((fam.m as f64, scan.gap_at_c_star));
    }
    let slope = loglog_slope(&pts);
    assert!(
        (-0.65..=-0.35).contains(&slope),
        "gap-at-c* exponent {slope} outside [-0.65, -0.35]"
    );
    details.push(format!("exponent={slope:.3}"));
    verdict(
        "criterion 08 (5D lattice scan: interior c*, overlaps, gap exponent)",
        true,
        &details.join("; "),
    );
}

#[test]
fn criterion_09_stoquastic_bounds_ensemble() {
    let mut draws = 0usize;
    let mut worst_e0 = f64::NEG_INFINITY;
    let mut worst_gap = f64::INFINITY;
    for &m in &[16usize, 64, 256] {
        for i in 0..20usize {
            let mut rng = rng_from_seed(SUITE_SEED.wrapping_add((m * 31 + i) as u64));
            let f = random_stoquastic(m, m, &mut rng).unwrap();
            use rand::Rng;
            let x = rng.gen_range(0..m);
            let ham = build_perturbed(f, x).unwrap();
            let rep = ham.verification_report().unwrap();
            draws += 1;
            worst_e0 = worst_e0.max(rep.e0);
            worst_gap = worst_gap.min(rep.gap);
            assert!(rep.e0 <= -0.75 + 1e-9, "M={m} draw {i}: E0 = {}", rep.e0);
            assert!(rep.gap >= 0.5 - 1e-9, "M={m} draw {i}: gap = {}", rep.gap);
            assert!(
                rep.strictly_positive,
                "M={m} draw {i}: ground state not strictly positive (min {})",
                rep.min_component
            );
        }
    }
    verdict(
        "criterion 09 (stoquastic ensemble: E0 <= -3/4, gap >= 1/2, positivity)",
        draws == 60,
        &format!("{draws} draws, worst E0 = {worst_e0:.4}, worst gap = {worst_gap:.4}"),
    );
}

#[test]
fn criterion_10_metropolis_hitting_scaling() {
    // Exact detailed balance and stationarity on the enumerable chain.
    let two_site = {
        let a = SparseSymOperator::from_triplets(2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        build_perturbed(expander_perturbation(&a, 1), 0).unwrap()
    };
    let ens2 = path_weights(&two_site, 0.5, 2).unwrap();
    let (states, weights, t) = chain_transition_matrix(&ens2);
    for i in 0..states.len() {
        for j in 0..states.len() {
            let (lhs, rhs) = (weights[i] * t[(i, j)], weights[j] * t[(j, i)]);
            assert!(
                (lhs - rhs).abs() <= 1e-14,
                "detailed balance violated at ({i},{j})"
            );
        }
    }
    let tv = empirical_tv(&ens2, &weights, 44);
    assert!(tv <= 0.05, "stationary TV distance {tv}");

    // Hitting-time sweep.
    let sizes = [16usize, 32, 64, 128, 256];
    let mut pts = Vec::new();
    let mut details = vec![format!("TV={tv:.3}")];
    for (i, &m) in sizes.iter().enumerate() {
        let mut rng = rng_from_seed(SUITE_SEED.wrapping_add(40 + i as u64));
        let graph = searchlab::random_regular_expander(m, 8, 0.75, &mut rng).unwrap();
        let ham = build_perturbed(expander_perturbation(graph.adjacency(), 8), 0).unwrap();
        let sched = mixing_schedule(m);
        let ens = path_weights(&ham, sched.beta, sched.p).unwrap();
        let mut hits: Vec<Option<u64>> = (0..15u64)
            .map(|chain| {
                metropolis_mix(&ens, 0, SUITE_SEED ^ (m as u64) << 8 ^ chain, 30_000_000)
                    .unwrap()
                    .hitting_time
            })
            .collect();
        hits.sort_by_key(|h| h.unwrap_or(u64::MAX));
        let median = hits[hits.len() / 2].expect("median chain censored");
        details.push(format!("M={m}: median={median}"));
        pts.push((m as f64, median as f64));
    }
    let slope = loglog_slope(&pts);
    assert!(slope >= 0.8, "hitting-time exponent {slope} < 0.8");
    details.push(format!("exponent={slope:.3}"));
    verdict(
        "criterion 10 (Metropolis: detailed balance, stationarity, hitting growth)",
        true,
        &details.join("; "),
    );
}

fn empirical_tv(
    ens: &gapamp_core::stoqmc::PathEnsemble,
    weights: &[f64],
    seed: u64,
) -> f64 {
    use rand::Rng;
    let m = ens.dim();
    let p = ens.slices();
    let mut rng = rng_from_seed(seed);
    let mut z = vec![0usize; p];
    let index_of = |z: &[usize]| z.iter().fold(0usize, |acc, &d| acc * m + d);
    let mut counts = vec![0u64; weights.len()];
    let (burn, samples) = (2_000u64, 400_000u64);
    for step in 0..(burn + samples) {
        let r = rng.gen_range(0..p);
        let prev = z[(r + p - 1) % p];
        let next = z[(r + 1) % p];
        let row = ens.neighbors(prev);
        let proposal = row[rng.gen_range(0..row.len())].0;
        let num = ens.factor(prev, proposal) * ens.factor(proposal, next);
        let den = ens.factor(prev, z[r]) * ens.factor(z[r], next);
        if num > 0.0 && (num >= den || rng.gen::<f64>() < num / den) {
            z[r] = proposal;
        }
        if step >= burn {
            counts[index_of(&z)] += 1;
        }
    }
    let total: f64 = weights.iter().sum();
    counts
        .iter()
        .zip(weights.iter())
        .map(|(&c, &w)| (c as f64 / samples as f64 - w / total).abs())
        .sum::<f64>()
        / 2.0
}

#[test]
fn criterion_11_local_qubit_hamiltonian() {
    // L = 10 with a unique null vector; full register for the commutator,
    // per-sector assembly for the spectra.
    let cfg = RandomInstanceConfig {
        dim: 3,
        terms: 10,
        null_dim: 1,
        max_rank: 2,
        mixed_coefficients: true,
    };
    let ham = random_ff_instance(&cfg, &mut rng_from_seed(SUITE_SEED + 11)).unwrap();
    let gap = spectra::eig_full(&ham.assemble(), &EigOptions::values_only())
        .unwrap()
        .gap_about(0.0)
        .unwrap();
    let l = ham.len() as f64;
    let d_exp = 2.0;
    let prefactor = l.powf(-1.0 / d_exp);
    let qubits = ham.len() + 1;

    let hp = amplify::build_local_hprime(&ham, gap, d_exp).unwrap();
    let nhat = amplify::particle_number_operator(ham.dim(), qubits);
    let comm = hp
        .operator()
        .matmul(&nhat)
        .unwrap()
        .max_abs_diff(&nhat.matmul(hp.operator()).unwrap())
        .unwrap();
    assert!(comm <= 1e-12, "commutator residual {comm:.2e}");

    let gbar = amplify::build_gbar(&ham, gap).unwrap();
    let single = amplify::restrict_to_sector(&hp, 1).unwrap();
    let single_dev = single
        .max_abs_diff(&gbar.operator().scale(prefactor))
        .unwrap();
    assert!(single_dev <= 1e-12, "single-particle deviation {single_dev:.2e}");

    // 0-particle sector: one exact eigenvalue.
    let zero = amplify::restrict_to_sector(&hp, 0).unwrap();
    let zero_evs = spectra::eig_full(&zero, &EigOptions::values_only()).unwrap();
    let expect = gap.sqrt() * prefactor / 2.0 - 4.0;
    let zero_dev = zero_evs
        .eigenvalues()
        .iter()
        .map(|e| (e - expect).abs())
        .fold(0.0f64, f64::max);
    assert!(zero_dev <= 1e-9, "0-particle eigenvalue deviation {zero_dev:.2e}");
    assert!(expect <= -3.5, "0-particle eigenvalue {expect} above -7/2");

    // a >= 2 sector floors.
    let mut worst_margin = f64::INFINITY;
    for a in 2..=qubits {
        let block = amplify::build_local_sector(&ham, gap, d_exp, a).unwrap();
        let evs = spectra::eig_full(&block, &EigOptions::values_only()).unwrap();
        let bound = -prefactor * ((l + 1.0 - a as f64) * (1.0 + a as f64)).sqrt()
            + 4.0 * (a as f64 - 1.0);
        worst_margin = worst_margin.min(evs.min_eigenvalue() - bound);
        assert!(
            evs.min_eigenvalue() >= bound - 1e-9,
            "sector {a}: min {} below {bound}",
            evs.min_eigenvalue()
        );
    }
    verdict(
        "criterion 11 (local qubit Hamiltonian at L=10)",
        true,
        &format!(
            "commutator={comm:.1e}, single-particle dev={single_dev:.1e}, 0-sector dev={zero_dev:.1e}, sector margin={worst_margin:.3}"
        ),
    );
}

#[test]
fn criterion_12_reproducible_artifacts() {
    let gapamp = env!("CARGO_BIN_EXE_gapamp");
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bench.json");
    let mix_path = dir.path().join("mix.json");
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));

    for (path, experiment, params) in [
        (
            &config_path,
            "search-bench",
            r#"{"m_values": [8, 16], "degree": 4, "lambda_max": 0.95, "trials": 3000, "amplify": false}"#,
        ),
        (
            &mix_path,
            "mc-mix",
            r#"{"m_values": [16], "chains": 4, "max_steps": 400000, "stoquastic_draws": 3, "stoquastic_sizes": [16]}"#,
        ),
    ] {
        for out in [&out_a, &out_b] {
            let config = format!(
                r#"{{ "experiment": "{experiment}", "params": {params}, "seed": 424242, "output_dir": "{}" }}"#,
                out.display()
            );
            std::fs::write(path, config).unwrap();
            let status = std::process::Command::new(gapamp)
                .args(["run", path.to_str().unwrap()])
                .status()
                .unwrap();
            assert!(status.success(), "{experiment} run failed");
        }
    }

    let mut compared = 0;
    for entry in std::fs::read_dir(&out_a).unwrap() {
        let name = entry.unwrap().file_name();
        if name.to_string_lossy().ends_with(".csv") {
            let a = std::fs::read_to_string(out_a.join(&name)).unwrap();
            let b = std::fs::read_to_string(out_b.join(&name)).unwrap();
            let body = |s: &str| {
                s.lines()
                    .filter(|l| !l.starts_with('#'))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            assert_eq!(body(&a), body(&b), "{name:?} bodies differ");
            assert_eq!(a, b, "{name:?} full files differ");
            compared += 1;
        }
    }
    verdict(
        "criterion 12 (identical config+seed => byte-identical CSV bodies)",
        compared >= 3,
        &format!("{compared} artifact files byte-identical across runs"),
    );
}

/// Least-squares slope of `ln y` vs `ln x`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
    let sxx: f64 = xs.iter().map(|a| a * a).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
