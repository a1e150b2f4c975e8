use mincf::families::{AlternativeSpec, FamilyId, ParamPair, Sample};
use mincf::simulation::{
    build_nulls, build_nulls_from, null_member, power, replicate_rng, test_sample, NullDistribution, RunOptions,
};
use rand_distr::{Distribution, Exp1, LogNormal};

fn opts() -> RunOptions {
    RunOptions::default()
}

/// Two-sample Kolmogorov–Smirnov distance of sorted inputs.
fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn ks_uniform(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let m = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / m).abs().max(((i + 1) as f64 / m - x).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn ks_helpers_agree_with_hand_computation() {
    assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
    assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
    assert!((ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]) - 0.5).abs() < 1e-15);
    assert!((ks_uniform(vec![0.25, 0.75]) - 0.25).abs() < 1e-15);
}

#[test]
fn null_law_does_not_depend_on_parameters() {
    let p = ParamPair::new(3.0, 0.5).unwrap();
    let a = build_nulls(FamilyId::Weibull, 50, &[1.0], 20_000, 101, &opts()).unwrap();
    let b = build_nulls_from(FamilyId::Weibull, p, 50, &[1.0], 20_000, 202, &opts()).unwrap();
    let d = ks_two_sample(&a[0].sorted_stats, &b[0].sorted_stats);
    assert!(d < 0.02, "KS {d}");
}

#[test]
fn p_values_are_uniform_under_the_null() {
    for family in FamilyId::ALL {
        let nulls = build_nulls(family, 20, &[1.0], 4000, 11, &opts()).unwrap();
        let mut u = Vec::with_capacity(2000);
        for i in 0..2000 {
            let mut rng = replicate_rng(12, i);
            let x = null_member(family).sample(20, &mut rng).unwrap();
            u.push(test_sample(family, &x, &nulls).unwrap()[0].p_value);
        }
        let d = ks_uniform(u);
        assert!(d < 0.04, "{family}: KS {d}");
    }
}

#[test]
fn fresh_null_draws_exceed_critical_value_at_nominal_rate() {
    let nulls = build_nulls(FamilyId::Weibull, 20, &[1.0], 20_000, 31, &opts()).unwrap();
    let size = power(&null_member(FamilyId::Weibull), &nulls, 0.05, 10_000, 32, &opts()).unwrap();
    let pct = 100.0 * size[0].rate;
    assert!((pct - 5.0).abs() <= 0.7, "{pct}");
}

fn exceed_fraction(nulls: &[NullDistribution], samples: impl Iterator<Item = Sample>) -> f64 {
    let (mut k, mut m) = (0, 0);
    for x in samples {
        let r = test_sample(FamilyId::Weibull, &x, nulls).unwrap();
        if r[0].p_value < 0.05 {
            k += 1;
        }
        m += 1;
    }
    k as f64 / m as f64
}

#[test]
fn exponential_data_tested_as_weibull_has_nominal_size() {
    let nulls = build_nulls(FamilyId::Weibull, 50, &[1.0], 10_000, 41, &opts()).unwrap();
    let samples = (0..200).map(|i| {
        let mut rng = replicate_rng(42, i);
        Sample::new((0..50).map(|_| Exp1.sample(&mut rng)).collect()).unwrap()
    });
    let frac = exceed_fraction(&nulls, samples);
    assert!((frac - 0.05).abs() <= 0.03, "{frac}");
}

#[test]
fn lognormal_data_is_mostly_rejected_as_weibull() {
    let nulls = build_nulls(FamilyId::Weibull, 63, &[1.0], 10_000, 51, &opts()).unwrap();
    let ln = LogNormal::new(0.0, 1.0).unwrap();
    let samples = (0..200).map(|i| {
        let mut rng = replicate_rng(52, i);
        Sample::new((0..63).map(|_| ln.sample(&mut rng)).collect()).unwrap()
    });
    let frac = exceed_fraction(&nulls, samples);
    assert!(frac > 0.5, "{frac}");
}

#[test]
fn power_grows_with_sample_size() {
    let alt: AlternativeSpec = "LFR(1)".parse().unwrap();
    let gammas = [0.5, 1.0, 5.0];
    let rate = |n: usize| {
        let nulls = build_nulls(FamilyId::Weibull, n, &gammas, 4000, 61 + n as u64, &opts()).unwrap();
        power(&alt, &nulls, 0.05, 4000, 71 + n as u64, &opts()).unwrap()
    };
    let (small, large) = (rate(20), rate(50));
    for (s, l) in small.iter().zip(&large) {
        assert!(l.rate > s.rate, "γ={}: {} vs {}", s.gamma, s.rate, l.rate);
    }
}

#[test]
fn statistic_is_invariant_replicate_by_replicate() {
    use mincf::estimation::fit_and_standardize;
    use mincf::statistic::statistic;
    for family in FamilyId::ALL {
        for i in 0..50 {
            let mut rng = replicate_rng(81, i);
            let x = null_member(family).sample(30, &mut rng).unwrap();
            let xt = Sample::new(x.values().iter().map(|v| 3.1 * v.powf(1.0 / 2.2)).collect()).unwrap();
            let a = statistic(family, &fit_and_standardize(family, &x).unwrap(), 1.0).unwrap().value;
            let b = statistic(family, &fit_and_standardize(family, &xt).unwrap(), 1.0).unwrap().value;
            assert!((a - b).abs() <= 1e-6 * a, "{family}: {a} vs {b}");
        }
    }
}
