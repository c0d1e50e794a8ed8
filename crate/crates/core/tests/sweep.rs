use cohere::sweep::{classify_momentum, sweep_return_time_with, Execution};
use cohere::{
    default_grid, find_critical_momentum, sweep_return_time, Classification, Error, ModelKind,
    PhysicalParams, ScenarioConfig,
};

const GOLDEN_P_CR: f64 = 1.2458945751190187;

#[test]
fn serial_and_parallel_sweeps_agree_exactly() {
    let pp = PhysicalParams::default();
    let sc = ScenarioConfig::default();
    let grid = default_grid(&pp);
    let serial = sweep_return_time_with(&grid, &sc, &pp, Execution::Serial).unwrap();
    let parallel = sweep_return_time_with(&grid, &sc, &pp, Execution::Parallel).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn default_sweep_has_one_regime_transition() {
    let pp = PhysicalParams::default();
    let res = sweep_return_time(&default_grid(&pp), &ScenarioConfig::default(), &pp).unwrap();
    assert_eq!(res.rows.len(), 60);
    assert!(res.rows.iter().all(|r| r.error.is_none()));
    assert!(res
        .rows
        .iter()
        .all(|r| r.t_ret_coherent.is_some() && r.t_ret_classical.is_some()));
    let classes: Vec<Classification> = res.rows.iter().map(|r| r.classification).collect();
    let changes = classes.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(changes, 1);
    assert_eq!(classes[0], Classification::Deflection);
    assert_eq!(classes[59], Classification::Penetration);
    assert!(res
        .rows
        .windows(2)
        .all(|w| w[1].t_ret_free < w[0].t_ret_free));
}

#[test]
fn coherent_matches_classical_at_small_momentum() {
    let pp = PhysicalParams::default();
    let res = sweep_return_time(&[0.05], &ScenarioConfig::default(), &pp).unwrap();
    let row = &res.rows[0];
    let (c, k) = (row.t_ret_coherent.unwrap(), row.t_ret_classical.unwrap());
    assert!(((c - k) / k).abs() < 1e-5, "{c} vs {k}");
}

#[test]
fn critical_momentum_golden_value() {
    let pp = PhysicalParams::default();
    let crit = find_critical_momentum((0.2, 2.0), &ScenarioConfig::default(), &pp, 1e-6).unwrap();
    assert!(crit.bracket.1 - crit.bracket.0 <= 1e-6);
    assert_eq!(crit.p_cr, 0.5 * (crit.bracket.0 + crit.bracket.1));
    assert!((crit.p_cr - GOLDEN_P_CR).abs() < 1e-9, "{}", crit.p_cr);
    let sc = ScenarioConfig::default();
    assert_eq!(
        classify_momentum(crit.bracket.0, &sc, &pp).unwrap(),
        Classification::Deflection
    );
    assert_eq!(
        classify_momentum(crit.bracket.1, &sc, &pp).unwrap(),
        Classification::Penetration
    );
}

#[test]
fn critical_search_is_deterministic() {
    let pp = PhysicalParams::default();
    let sc = ScenarioConfig::default();
    let a = find_critical_momentum((0.2, 2.0), &sc, &pp, 1e-4).unwrap();
    let b = find_critical_momentum((0.2, 2.0), &sc, &pp, 1e-4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn same_regime_bracket_is_rejected() {
    let pp = PhysicalParams::default();
    match find_critical_momentum((1.5, 2.0), &ScenarioConfig::default(), &pp, 1e-6) {
        Err(Error::Bracket { lo, hi, .. }) => {
            assert_eq!(lo, Classification::Penetration);
            assert_eq!(hi, Classification::Penetration);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn spreading_search_surfaces_the_collapse() {
    let pp = PhysicalParams::default();
    let sc = ScenarioConfig::default().with_model(ModelKind::CoherentSpreading);
    let err = find_critical_momentum((0.2, 2.0), &sc, &pp, 1e-6).unwrap_err();
    assert!(err.is_numerical());
}
