use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sextic::sampler::*;

fn spec(source: Source, observable: Observable, count: usize, seed: u64) -> DisorderSpec {
    DisorderSpec::new(source, observable, count, seed).unwrap()
}

#[test]
fn generator_core_matches_reference_keystream() {
    // zero key, zero nonce ChaCha20 keystream, read as little-endian words
    let mut rng = ChaCha20Rng::from_seed([0; 32]);
    let words: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
    assert_eq!(
        words,
        [
            0x903df1a0ade0b876,
            0x28bd8653e56a5d40,
            0x1aed8da0b819d2bd,
            0xc70d778bccef36a8
        ]
    );
    let mut rng = ChaCha20Rng::from_seed([0; 32]);
    rng.set_stream(1);
    assert_eq!(
        [rng.next_u64(), rng.next_u64()],
        [0xfb7815c6d6df3fef, 0x803bd33dbd35cff5]
    );
}

#[test]
fn generator_streams_are_independent() {
    let mut a = generator(11, 0);
    let mut b = generator(11, 1);
    let mut c = generator(11, 0);
    let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
    assert_eq!(x, z);
    assert_ne!(x, y);
}

#[test]
fn gaussian_cdf_matches_error_function() {
    let (x, _) = sextic::quadrature::simpson_grid(9.0, 4097).unwrap();
    let d: Vec<f64> = x
        .iter()
        .map(|v| (-v * v / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt())
        .collect();
    let cdf = build_cdf(&x, &d).unwrap();
    for t in [-3.0, -1.2, 0.0, 0.4, 2.5] {
        let want = 0.5 * libm::erfc(-t / std::f64::consts::SQRT_2);
        assert!((cdf.eval(t) - want).abs() < 1e-6, "x = {t}");
        assert!((cdf.inverse(want) - t).abs() < 1e-4, "u = {want}");
    }
    assert_eq!(cdf.eval(-20.0), 0.0);
    assert_eq!(cdf.eval(20.0), 1.0);
    assert_eq!((cdf.f[0], *cdf.f.last().unwrap()), (0.0, 1.0));
    assert!(cdf.f.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn negative_density_is_rejected() {
    let err = build_cdf(&[0.0, 1.0, 2.0], &[0.1, -1e-6, 0.1]).unwrap_err();
    assert!(matches!(err, sextic::Error::Integrity(_)));
    assert!(build_cdf(&[0.0, 1.0, 2.0], &[0.1, -1e-12, 0.1]).is_ok());
}

#[test]
fn triple_well_cdf_ramps_sit_in_the_outer_wells() {
    // ln|ψ₀|² is an even quartic in y, so the density has at most two humps
    // even where the potential has three wells; they sit at y = ±√(−c)
    let cdf = quadrature_cdf(&Source::Pure { c: -10.0 }).unwrap();
    // coarse bins of width 0.1, a ramp is a run of bins holding > 1% of the mass
    let (lo, hi) = (cdf.x[0], *cdf.x.last().unwrap());
    let nb = ((hi - lo) / 0.1).ceil() as usize;
    let mass: Vec<f64> = (0..nb)
        .map(|k| cdf.eval(lo + (k + 1) as f64 * 0.1) - cdf.eval(lo + k as f64 * 0.1))
        .collect();
    let mut ramps = Vec::new();
    let mut inside = false;
    for (k, m) in mass.iter().enumerate() {
        let steep = *m > 0.01;
        if steep && !inside {
            ramps.push(lo + k as f64 * 0.1);
        }
        inside = steep;
    }
    assert_eq!(ramps.len(), 2);
    assert!((cdf.inverse(0.25) + 10f64.sqrt()).abs() < 0.2);
    assert!((cdf.inverse(0.75) - 10f64.sqrt()).abs() < 0.2);
    assert!((cdf.eval(0.5) - cdf.eval(-0.5)).abs() < 1e-12);
}

#[test]
fn pure_quartic_second_moment() {
    let s = sample(&spec(
        Source::Pure { c: 0.0 },
        Observable::Quadrature,
        100_000,
        3,
    ))
    .unwrap();
    let m = s.empirical_moments;
    // √2 Γ(3/4)/Γ(1/4)
    assert!((m.mu2.target - 0.477_988_797_486_125).abs() < 1e-12);
    assert!(
        m.mu2.z_score().abs() < 5.0 && m.mu4.z_score().abs() < 5.0,
        "{m:?}"
    );
    assert_eq!(s.values.len(), 100_000);
}

#[test]
fn symmetric_states_never_draw_odd_levels() {
    for source in [
        Source::Pure { c: 1.0 },
        Source::MixedIdenticalPi4 { c: -1.0 },
    ] {
        let s = sample(&spec(source, Observable::Number { omega: None }, 20_000, 5)).unwrap();
        match s.values {
            SampleValues::Number(v) => assert!(v.iter().all(|n| n % 2 == 0)),
            _ => panic!("expected levels"),
        }
        assert!(s.empirical_moments.within(5.0), "{:?}", s.empirical_moments);
    }
}

#[test]
fn reruns_are_bit_identical() {
    for obs in [Observable::Quadrature, Observable::Number { omega: None }] {
        let sp = spec(Source::MixedIdenticalPi4 { c: -5.0 }, obs, 5_000, 42);
        let (a, b) = (sample(&sp).unwrap(), sample(&sp).unwrap());
        let bits =
            |s: &SampleSet| -> Vec<u64> { s.values.as_f64().iter().map(|v| v.to_bits()).collect() };
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a, b);
    }
}

#[test]
fn draws_follow_the_table() {
    let n = 100_000;
    for source in [
        Source::Pure { c: 0.0 },
        Source::MixedIdenticalPi4 { c: -5.0 },
    ] {
        let sp = spec(source, Observable::Quadrature, n, 9);
        let s = sample(&sp).unwrap();
        let cdf = quadrature_cdf(&source).unwrap();
        let d = ks_distance(&s.values.as_f64(), &cdf);
        assert!(d < ks_critical_99(n), "{source:?}: {d}");
        assert!(s.empirical_moments.within(5.0), "{:?}", s.empirical_moments);
    }
    let sp = spec(
        Source::Pure { c: 1.0 },
        Observable::Number { omega: None },
        n,
        9,
    );
    let s = sample(&sp).unwrap();
    let levels = number_distribution(&sp.source, None).unwrap();
    let SampleValues::Number(v) = &s.values else {
        panic!()
    };
    assert!(ks_distance_levels(v, &levels.probabilities) < ks_critical_99(n));
}

#[test]
fn other_sources_hit_their_moments() {
    let sources = [
        Source::Harmonic {
            omega1p: 1.0,
            omega2p: 3.0,
            theta: 0.6,
        },
        Source::MixedGeneral {
            c1: -1.0,
            c2: -5.0,
            theta: 1.0,
        },
    ];
    for source in sources {
        let s = sample(&spec(source, Observable::Quadrature, 50_000, 1)).unwrap();
        assert!(
            s.empirical_moments.within(5.0),
            "{source:?}: {:?}",
            s.empirical_moments
        );
    }
}

#[test]
fn seeds_change_draws_but_not_the_statistics() {
    let a = sample(&spec(
        Source::Pure { c: -2.0 },
        Observable::Quadrature,
        50_000,
        1,
    ))
    .unwrap();
    let b = sample(&spec(
        Source::Pure { c: -2.0 },
        Observable::Quadrature,
        50_000,
        2,
    ))
    .unwrap();
    assert_ne!(a.values, b.values);
    let (x, y) = (a.empirical_moments.mu2, b.empirical_moments.mu2);
    let se = x.std_error.hypot(y.std_error);
    assert!((x.value - y.value).abs() < 5.0 * se);
    let c = sample_stream(&a.spec, 1).unwrap();
    assert_ne!(a.values, c.values);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(DisorderSpec::new(Source::Pure { c: 0.0 }, Observable::Quadrature, 0, 1).is_err());
    assert!(DisorderSpec::new(Source::Pure { c: f64::NAN }, Observable::Quadrature, 5, 1).is_err());
    let obs = Observable::Number { omega: Some(-1.0) };
    assert!(DisorderSpec::new(Source::Pure { c: 0.0 }, obs, 5, 1).is_err());
}
