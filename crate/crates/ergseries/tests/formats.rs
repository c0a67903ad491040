use ergseries::coeffs::{format_table, parse_table};
use ergseries::parse;
use ergseries_core::{Complex64, TorusFunction};
use proptest::prelude::*;

fn torus_function() -> impl Strategy<Value = TorusFunction> {
    prop::collection::btree_map(-500i64..500, (-1e6f64..1e6, -1e6f64..1e6), 0..20)
        .prop_map(|m| TorusFunction::new(m.into_iter().map(|(n, (re, im))| (n, Complex64::new(re, im)))))
}

proptest! {
    #[test]
    fn coefficient_tables_round_trip(f in torus_function()) {
        prop_assert_eq!(parse_table(&format_table(&f)).unwrap(), f);
    }

    #[test]
    fn table_parser_never_panics(s in "[-0-9 .e#\nx]{0,80}") {
        let _ = parse_table(&s);
    }

    #[test]
    fn rational_points_parse(p in 0u64..1000, d in 1u64..1000) {
        prop_assume!(p < d);
        prop_assert!(parse::point(&[p.to_string(), d.to_string()].join("/")).is_ok());
    }
}
