use dtms::sim::{check_channel_discipline, replay, run_session, Scenario, SimConfig};
use proptest::prelude::*;

fn scenario() -> impl Strategy<Value = Scenario> {
    prop::sample::select(Scenario::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sessions_replay_and_respect_channels(seed in any::<u64>(), sc in scenario(), recompute in any::<bool>()) {
        let mut cfg = SimConfig::toy(sc, seed);
        cfg.dc_recompute = recompute;
        let t = run_session(&cfg).unwrap();
        prop_assert!(replay(&t, &cfg));
        prop_assert!(check_channel_discipline(&t).is_ok());
        let last = format!("outcome | {}\n", t.outcome);
        prop_assert!(t.export().ends_with(&last));
    }

    #[test]
    fn honest_sessions_accept_for_any_subset(seed in any::<u64>(), t in 1usize..5, extra in 0usize..3) {
        let n = t + extra;
        let t_out = run_session(&SimConfig::generated(12, 20, t, n, Scenario::Honest, seed)).unwrap();
        prop_assert!(t_out.outcome.is_accept(), "{}", t_out.export());
        prop_assert!(t_out.all_checks_pass());
    }
}
