use cellgeom_core::simulate::simulate_typical_users;
use cellgeom_core::stats::ks_test;
use cellgeom_core::{EmpiricalCdf, InversionConfig, PatternSpec, PropagationModel, ShadowingSpec, SirLaw};

#[test]
fn simulation_depends_only_on_seed_and_stream() {
    let prop = PropagationModel::urban_macro();
    let hex = PatternSpec::Hexagonal { cell_radius_km: 0.26, n_side: 8 };
    let shadow = ShadowingSpec::LogNormal { sigma_db: 8.0 };
    let a = simulate_typical_users(&hex, &prop, &shadow, 2000, 5, 1).unwrap();
    let b = simulate_typical_users(&hex, &prop, &shadow, 2000, 5, 1).unwrap();
    let c = simulate_typical_users(&hex, &prop, &shadow, 2000, 5, 2).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn samples_are_consistent() {
    let prop = PropagationModel::urban_macro();
    let spec = PatternSpec::poisson_like_hex(0.26, 10);
    let out = simulate_typical_users(&spec, &prop, &ShadowingSpec::LogNormal { sigma_db: 6.0 }, 500, 3, 0).unwrap();
    for s in out {
        assert!(s.path_loss > 0.0 && s.interference_factor >= 0.0);
        assert!((s.sir - 1.0 / s.interference_factor).abs() <= 1e-12 * s.sir);
        assert!(s.sinr <= s.sir);
        assert_eq!(s.sinr_with(prop.noise_over_power()), s.sinr);
    }
}

#[test]
fn large_poisson_torus_follows_the_sir_law() {
    let prop = PropagationModel::urban_macro();
    let spec = PatternSpec::poisson_like_hex(0.26, 40);
    let out = simulate_typical_users(&spec, &prop, &ShadowingSpec::Unit, 3000, 9, 0).unwrap();
    let ecdf = EmpiricalCdf::new(&out.iter().map(|s| s.sir).collect::<Vec<_>>()).unwrap();
    let law = SirLaw::new(prop.beta, InversionConfig::default()).unwrap();
    let r = ks_test(&ecdf, |t| law.cdf(t));
    assert!(r.p_value > 0.001, "D = {}, p = {}", r.statistic, r.p_value);
}
