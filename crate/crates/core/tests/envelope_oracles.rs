use cecp::bounds::{family_sweep, DEFAULT_RESOLUTION, DEFAULT_SWEEP, MIN_RESOLUTION};
use cecp::{cached_envelope, contains, envelope, exact_bounds, normalized_entropy, statistical_complexity};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

mod common;
use common::dirichlet_ones;

fn check_random_containment(m: usize, draws: usize, seed: u64) {
    let env = cached_envelope::<f64>(m, DEFAULT_RESOLUTION).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for i in 0..draws {
        let p = dirichlet_ones(&mut rng, m);
        let (h, c) = (normalized_entropy(&p).unwrap(), statistical_complexity(&p).unwrap());
        assert!(contains(&env, h, c, 1e-9).unwrap(), "M={m} draw {i}: ({h}, {c})");
    }
}

#[test]
fn random_distributions_inside_small_state_space() {
    check_random_containment(6, 10_000, 11);
}

#[test]
fn random_distributions_inside_larger_state_space() {
    check_random_containment(24, 2_000, 12);
}

#[test]
fn sparse_random_distributions_inside() {
    // zero out most states so points spread towards the low-entropy corner
    let m = 24;
    let env = cached_envelope::<f64>(m, DEFAULT_RESOLUTION).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    for support in 1..=m {
        for _ in 0..50 {
            let mut p = dirichlet_ones(&mut rng, support);
            p.resize(m, 0.0);
            let (h, c) = (normalized_entropy(&p).unwrap(), statistical_complexity(&p).unwrap());
            assert!(contains(&env, h, c, 1e-9).unwrap(), "support {support}: ({h}, {c})");
        }
    }
}

#[test]
fn family_grid_points_inside() {
    for m in [6usize, 24] {
        let env = envelope::<f64>(m, DEFAULT_RESOLUTION).unwrap();
        for (at, h, c) in family_sweep::<f64>(m, DEFAULT_SWEEP / 8).unwrap() {
            assert!(contains(&env, h, c, 1e-9).unwrap(), "M={m} {at:?}: ({h}, {c})");
        }
    }
}

#[test]
fn bounds_attained_in_every_bin() {
    for m in [6usize, 24, 120] {
        let env = envelope::<f64>(m, DEFAULT_RESOLUTION).unwrap();
        for bin in 0..50 {
            let target = (bin as f64 + 0.5) / 50.0;
            let s = env.samples.iter().min_by(|a, b| (a.h - target).abs().total_cmp(&(b.h - target).abs())).unwrap();
            for (at, reported) in [(s.max_at, s.c_max), (s.min_at, s.c_min)] {
                let p = at.distribution(m);
                assert!((normalized_entropy(&p).unwrap() - s.h).abs() < 1e-9, "M={m} bin {bin}");
                assert!((statistical_complexity(&p).unwrap() - reported).abs() < 1e-6, "M={m} bin {bin}");
            }
        }
    }
}

#[test]
fn parameter_grid_attains_upper_bound_per_bin() {
    // independent of the bisection: plain p-grid members of the families
    for m in [6usize, 24] {
        let sweep = family_sweep::<f64>(m, DEFAULT_SWEEP).unwrap();
        for bin in 0..50 {
            let (lo, hi) = (bin as f64 / 50.0, (bin + 1) as f64 / 50.0);
            let best = sweep
                .iter()
                .filter(|(_, h, _)| *h >= lo && *h < hi)
                .map(|&(_, h, c)| (exact_bounds::<f64>(m, h).unwrap().c_max - c).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "M={m} bin {bin}: {best}");
        }
    }
}

#[test]
fn refinement_never_tightens() {
    for m in [6usize, 24, 120] {
        let coarse = envelope::<f64>(m, 128).unwrap();
        let fine = envelope::<f64>(m, 256).unwrap();
        assert_eq!(fine.samples.len(), 2 * (coarse.samples.len() - 1) + 1);
        for (j, s) in coarse.samples.iter().enumerate() {
            let f = &fine.samples[2 * j];
            assert_eq!(f.h, s.h);
            assert!(f.c_max >= s.c_max - 1e-6);
            assert!(f.c_min <= s.c_min + 1e-6);
        }
    }
}

#[test]
fn endpoints_vanish_for_every_state_count() {
    for m in [2usize, 3, 6, 24, 120, 720] {
        let env = envelope::<f64>(m, MIN_RESOLUTION).unwrap();
        for s in [env.samples.first().unwrap(), env.samples.last().unwrap()] {
            assert!(s.c_min.abs() < 1e-9 && s.c_max.abs() < 1e-9);
        }
    }
}
