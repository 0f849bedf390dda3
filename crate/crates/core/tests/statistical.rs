//! Seeded simulation checks with known population answers.

use ising_ebic::diag::{abs_third_moment, likelihood_ratio_monitor};
use ising_ebic::ising::{exact_sample, generate_lattice, gibbs_sample, Coupling, IsingParams, LatticeNeighbors};
use ising_ebic::select::{
    neighborhood_select_bic, neighborhood_select_cv, neighborhood_select_stability, select_graphs_bic, BicConfig,
    CvConfig, StabilityConfig,
};
use ising_ebic::RngSeed;

fn agreement(s: &ising_ebic::SampleMatrix) -> f64 {
    s.rows().filter(|r| r[0] == r[1]).count() as f64 / s.n() as f64
}

const PAIR_AGREEMENT: f64 = 0.731_058_578_630_004_9; // e^0.5 / (e^0.5 + e^-0.5)

#[test]
fn pair_agreement_matches_exact_probability() {
    let m = IsingParams::from_edges(2, [(0, 1, 0.5)]).unwrap();
    let exact = exact_sample(&m, 100_000, RngSeed::new(1, 0)).unwrap();
    assert!((agreement(&exact) - PAIR_AGREEMENT).abs() < 0.01);
    let gibbs = gibbs_sample(&m, 50_000, 1000, 5, RngSeed::new(1, 1)).unwrap();
    assert!((agreement(&gibbs) - PAIR_AGREEMENT).abs() < 0.01);
}

#[test]
fn gibbs_null_model_passes_chi_square() {
    // chi-square critical value for 15 degrees of freedom at alpha = 0.001
    const CRITICAL: f64 = 37.697;
    let p = 4;
    let n = 100_000;
    let s = gibbs_sample(&IsingParams::zeros(p), n, 200, 5, RngSeed::new(2, 0)).unwrap();
    let mut counts = [0usize; 16];
    for row in s.rows() {
        let idx = row
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &z)| acc | (usize::from(z == 1) << j));
        counts[idx] += 1;
    }
    let expected = n as f64 / 16.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CRITICAL, "chi2 = {chi2}");
}

#[test]
fn bic_null_model_selects_nothing() {
    let (p, n, reps) = (10, 2000, 100);
    let mut per_node_empty = vec![0usize; p];
    let mut all_empty = 0;
    for r in 0..reps {
        let s = exact_sample(&IsingParams::zeros(p), n, RngSeed::new(3, r)).unwrap();
        let mut every = true;
        for (v, count) in per_node_empty.iter_mut().enumerate() {
            let sel = neighborhood_select_bic(&s, v, &BicConfig::new(0.5)).unwrap();
            if sel.chosen.is_empty() {
                *count += 1;
            } else {
                every = false;
            }
        }
        all_empty += usize::from(every);
    }
    for (v, &c) in per_node_empty.iter().enumerate() {
        assert!(c as f64 >= 0.95 * reps as f64, "node {v}: empty in {c}/{reps}");
    }
    eprintln!("replicates with every node empty: {all_empty}/{reps}");
}

#[test]
fn cv_selects_more_than_strict_bic_under_null() {
    let (p, n, reps) = (10, 500, 50);
    let (mut cv_total, mut bic_total) = (0usize, 0usize);
    for r in 0..reps {
        let s = exact_sample(&IsingParams::zeros(p), n, RngSeed::new(4, r)).unwrap();
        for v in 0..p {
            cv_total += neighborhood_select_cv(&s, v, &CvConfig::default())
                .unwrap()
                .chosen
                .len();
            bic_total += neighborhood_select_bic(&s, v, &BicConfig::new(1.0))
                .unwrap()
                .chosen
                .len();
        }
    }
    assert!(cv_total > bic_total, "cv {cv_total} vs bic {bic_total}");
}

#[test]
fn stability_null_model_is_sparse() {
    let (p, n, reps) = (10, 400, 20);
    let cfg = StabilityConfig {
        expected_support: 3,
        ..Default::default()
    };
    let mut total = 0usize;
    for r in 0..reps {
        let s = exact_sample(&IsingParams::zeros(p), n, RngSeed::new(5, r)).unwrap();
        total += neighborhood_select_stability(&s, 0, &cfg, RngSeed::new(5, 1000 + r))
            .unwrap()
            .chosen
            .len();
    }
    assert!(
        (total as f64 / reps as f64) < 0.5,
        "mean size {}",
        total as f64 / reps as f64
    );
}

#[test]
fn chosen_size_non_increasing_in_gamma() {
    let gammas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let params = generate_lattice(3, LatticeNeighbors::Four, Coupling::Attractive, 0.3, RngSeed::new(6, 0)).unwrap();
    let reps = 100;
    let mut sizes = vec![0usize; gammas.len()];
    for r in 0..reps {
        let s = exact_sample(&params, 150, RngSeed::new(6, 1 + r)).unwrap();
        let reports = select_graphs_bic(&s, &gammas, &BicConfig::new(0.0), false).unwrap();
        for (k, rep) in reports.iter().enumerate() {
            sizes[k] += rep.nodes.iter().map(|n| n.chosen.len()).sum::<usize>();
        }
    }
    let violations = sizes.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(violations <= 1, "sizes {sizes:?}");
}

#[test]
fn likelihood_ratio_monitor_null_rarely_exceeds() {
    let (p, n, reps) = (6, 1000, 100);
    let null = IsingParams::zeros(p);
    let mut exceeded = 0;
    for r in 0..reps {
        let s = exact_sample(&null, n, RngSeed::new(7, r)).unwrap();
        let m = likelihood_ratio_monitor(&s, &null, 0, 0.5, 1.0, p - 1).unwrap();
        assert!(m.min_gap >= -1e-8);
        exceeded += usize::from(m.exceeded);
    }
    assert!(exceeded <= 5, "{exceeded} exceedances");
}

#[test]
fn third_moment_of_fair_sign_pair() {
    let s = exact_sample(&IsingParams::zeros(2), 100_000, RngSeed::new(8, 0)).unwrap();
    let u = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let m = abs_third_moment(&s, &[0, 1], &u);
    assert!((m - std::f64::consts::SQRT_2).abs() < 0.05, "{m}");
}
