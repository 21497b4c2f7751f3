//! Round trip of scenario files through their resolved echo.

use std::path::Path;

use proptest::prelude::*;

use pemfc_core::scenario::Scenario;

fn run_table() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.0f64..2e4).prop_map(|i| format!("[run]\nkind = \"steady\"\ni_fc = {i:?}\n")),
        prop::collection::btree_set(1u32..20_000, 1..6).prop_map(|set| {
            let currents: Vec<String> = set.iter().map(|c| format!("{:?}", *c as f64)).collect();
            format!("[run]\nkind = \"sweep\"\ncurrents = [{}]\n", currents.join(", "))
        }),
        (1.0f64..100.0, 0.0f64..1.5e4, any::<bool>()).prop_map(|(t_end, i, steady)| format!(
            "[run]\nkind = \"transient\"\nprofile = [[0.0, 1000.0], [{:?}, {i:?}]]\nt_end = {t_end:?}\nsteady_start = {steady}\n",
            0.5 * t_end
        )),
    ]
}

fn scenario_text() -> impl Strategy<Value = String> {
    (
        330.0f64..360.0,
        0.05f64..=1.0,
        1.0f64..3.0,
        2usize..20,
        3usize..10,
        prop_oneof![Just("kind = \"DryStart\"".to_string()), (0.05f64..=1.0).prop_map(|p| format!("kind = \"Equilibrated\"\nphi = {p:?}"))],
        run_table(),
        1e-7f64..1e-5,
    )
        .prop_map(|(t, phi, stoich, gdl, mem, initial, run, r_e)| {
            format!(
                "[cell.operating]\nT_fc = {t:?}\nPhi_c_des = {phi:?}\nS_a = {stoich:?}\n\
                 [cell.electro]\nR_e = {r_e:?}\n\
                 [mesh]\ngdl = {gdl}\nmem = {mem}\n\
                 [initial]\n{initial}\n{run}"
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn resolved_echo_is_a_fixed_point(text in scenario_text()) {
        let base = Path::new(".");
        let first = Scenario::from_toml_str(&text, base).unwrap();
        let echo = first.to_toml_string().unwrap();
        let second = Scenario::from_toml_str(&echo, base).unwrap();
        prop_assert_eq!(&second, &first);
        prop_assert_eq!(second.to_toml_string().unwrap(), echo);
    }
}
