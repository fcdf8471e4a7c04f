//! Property test: rendering any constructible spec and parsing it back
//! yields the same AST.

use proptest::prelude::*;

use profdyn_cli::parser::{parse_spec, MapAst, SpecAst, TowerAst};

fn path_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z0-9_./-]{0,12}\\.json",
        // paths needing quotes
        "[a-z ]{1,8}/[a-z]{1,8}\\.json",
    ]
}

fn tower_strategy() -> impl Strategy<Value = TowerAst> {
    let leaf = prop_oneof![
        (2u64..10, 1usize..6).prop_map(|(p, depth)| TowerAst::Zp { p, depth }),
        path_strategy().prop_map(TowerAst::TableFile),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop::collection::vec(inner, 1..4).prop_map(TowerAst::Prod)
    })
}

fn map_strategy() -> impl Strategy<Value = MapAst> {
    let leaf = prop_oneof![
        prop::collection::vec(0u64..100, 1..5).prop_map(MapAst::Poly),
        prop::collection::vec(prop::collection::vec(0u64..50, 2..4), 2..4)
            .prop_map(MapAst::Matrix),
        Just(MapAst::Shift),
        Just(MapAst::Binom),
        path_strategy().prop_map(MapAst::TablesFile),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop::collection::vec(inner, 1..4).prop_map(MapAst::Prod)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_render_round_trip(tower in tower_strategy(), map in map_strategy()) {
        let spec = SpecAst { tower, map };
        let rendered = spec.to_string();
        let parsed = parse_spec(&rendered)
            .unwrap_or_else(|e| panic!("rendered spec {rendered:?} fails to parse: {e}"));
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn parser_never_panics(text in ".{0,80}") {
        let _ = parse_spec(&text);
    }

    #[test]
    fn parser_never_panics_on_spec_like_soup(
        text in "(zp|prod|table|poly|shift|binom|tables|depth|[0-9;,\\[\\] \"]){0,60}"
    ) {
        let _ = parse_spec(&text);
    }
}
