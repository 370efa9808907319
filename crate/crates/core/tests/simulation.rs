use afbc_core::abelian::{orthogonal_token_pair, random_orthogonal_pair, symmetric_pair, SectorDim};
use afbc_core::angular::{BetaVector, SpinJ};
use afbc_core::exact::rat;
use afbc_core::protocol::{
    honest_run, simulate, simulation_record, Mode, ProtocolInstance, SimulationRecord, Strategy, CHUNK,
};

fn reference_j2() -> ProtocolInstance {
    let beta =
        BetaVector::new(SpinJ::integer(2).unwrap(), vec![rat(3, 20), rat(9, 25), rat(7, 20), rat(7, 50), rat(0, 1)])
            .unwrap();
    ProtocolInstance::angular(&beta).unwrap()
}

#[test]
fn same_seed_same_counts() {
    let inst = reference_j2();
    for strategy in [Strategy::BobCheat, Strategy::AliceCheat] {
        let a = simulate(&inst, strategy, 2 * CHUNK + 5, 77).unwrap();
        let b = simulate(&inst, strategy, 2 * CHUNK + 5, 77).unwrap();
        assert_eq!(a.successes, b.successes);
        let c = simulate(&inst, strategy, 2 * CHUNK + 5, 78).unwrap();
        assert_ne!(a.successes, c.successes);
    }
}

#[test]
fn honest_parties_always_succeed() {
    let dims =
        vec![SectorDim { proof: 1, token: 2 }, SectorDim { proof: 2, token: 1 }, SectorDim { proof: 1, token: 1 }];
    let number = ProtocolInstance::number(&random_orthogonal_pair(2, &dims, 1).unwrap()).unwrap();
    for inst in [reference_j2(), number] {
        let o = honest_run(&inst, 30_000, 9).unwrap();
        assert_eq!(o.estimate, 1.0);
        assert_eq!(o.std_error, 0.0);
    }
}

#[test]
fn measurement_respects_sectors() {
    let inst = reference_j2();
    let m = inst.bob_measurement().unwrap();
    assert_eq!(m.off_sector, 0.0);
    let pair = random_orthogonal_pair(3, &[SectorDim { proof: 2, token: 2 }; 4], 4).unwrap();
    let inst = ProtocolInstance::number(&pair).unwrap();
    assert_eq!(inst.bob_measurement().unwrap().off_sector, 0.0);
}

#[test]
fn analytic_values_of_trivial_instances() {
    let ortho = ProtocolInstance::number(&orthogonal_token_pair()).unwrap();
    assert!((ortho.analytic_success(Strategy::BobCheat).unwrap() - 1.0).abs() < 1e-12);
    assert!((ortho.analytic_success(Strategy::AliceCheat).unwrap() - 0.5).abs() < 1e-12);
    let same = ProtocolInstance::number(&symmetric_pair()).unwrap();
    assert!((same.analytic_success(Strategy::BobCheat).unwrap() - 0.5).abs() < 1e-12);
    assert!((same.analytic_success(Strategy::AliceCheat).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(ortho.mode, Mode::Number);
}

#[test]
fn record_round_trips_through_json() {
    let r = simulation_record(&reference_j2(), Strategy::AliceCheat, 10_000, 2).unwrap();
    assert!((r.analytic - (0.5 + 0.05)).abs() < 1e-9);
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["mode"], "angular-momentum");
    assert_eq!(json["strategy"], "alice-cheat");
    let back: SimulationRecord = serde_json::from_value(json).unwrap();
    assert_eq!(back, r);
}
