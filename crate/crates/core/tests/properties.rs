//! Randomized structural invariants: graph duality, operator algebra,
//! norm axioms, scan stability, and serialization round trips.

use latshift::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn nonzero_rat() -> impl Strategy<Value = BigRational> {
    ((-9i64..=9).prop_filter("nonzero", |n| *n != 0), 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

/// A sampling box for each model, comfortably larger than the powers
/// the properties use.
fn sample_extent(model: GraphModel) -> Extent {
    match model {
        GraphModel::Strip { .. } => Extent::Band { lo: 1, hi: 12 },
        GraphModel::BilateralStrip { .. } => Extent::Band { lo: -8, hi: 8 },
        GraphModel::Quadrant => Extent::Diamond { depth: 10 },
        GraphModel::HalfPlane => Extent::Rect {
            i_max: 4,
            lo: -8,
            hi: 8,
        },
        GraphModel::PathCycle | GraphModel::SkipPath => Extent::Band { lo: 1, hi: 15 },
        GraphModel::DiamondChain => Extent::Diamond { depth: 12 },
    }
}

fn any_model() -> impl Strategy<Value = GraphModel> {
    prop_oneof![
        Just(GraphModel::Strip { m: 1 }),
        Just(GraphModel::Strip { m: 3 }),
        Just(GraphModel::BilateralStrip { m: 2 }),
        Just(GraphModel::Quadrant),
        Just(GraphModel::HalfPlane),
        Just(GraphModel::PathCycle),
        Just(GraphModel::SkipPath),
        Just(GraphModel::DiamondChain),
    ]
}

/// Models whose powers have closed forms.
fn closed_model() -> impl Strategy<Value = GraphModel> {
    prop_oneof![
        Just(GraphModel::Strip { m: 2 }),
        Just(GraphModel::Strip { m: 4 }),
        Just(GraphModel::BilateralStrip { m: 3 }),
        Just(GraphModel::Quadrant),
        Just(GraphModel::HalfPlane),
        Just(GraphModel::PathCycle),
    ]
}

fn vertex_of(model: GraphModel) -> impl Strategy<Value = Vertex> {
    let verts = truncate(model, sample_extent(model)).unwrap();
    prop::sample::select(verts)
}

fn vector_of(model: GraphModel) -> impl Strategy<Value = SparseVector<BigRational>> {
    let verts = truncate(model, sample_extent(model)).unwrap();
    prop::collection::vec((prop::sample::select(verts), nonzero_rat()), 0..6)
        .prop_map(move |entries| SparseVector::from_entries(model, entries).unwrap())
}

fn model_and_vector() -> impl Strategy<Value = (GraphModel, SparseVector<BigRational>)> {
    any_model().prop_flat_map(|m| (Just(m), vector_of(m)))
}

proptest! {
    #[test]
    fn children_and_parents_are_dual(
        (model, v) in any_model().prop_flat_map(|m| (Just(m), vertex_of(m)))
    ) {
        for c in children(model, v).unwrap() {
            prop_assert!(parents(model, c).unwrap().contains(&v));
        }
        for p in parents(model, v).unwrap() {
            prop_assert!(children(model, p).unwrap().contains(&v));
        }
    }

    #[test]
    fn apply_is_linear(
        (model, f, g) in any_model().prop_flat_map(|m| (Just(m), vector_of(m), vector_of(m))),
        a in nonzero_rat(),
        b in nonzero_rat(),
    ) {
        let combined = apply(model, &f.scaled(&a).add(&g.scaled(&b)).unwrap()).unwrap();
        let separate = apply(model, &f).unwrap().scaled(&a)
            .add(&apply(model, &g).unwrap().scaled(&b))
            .unwrap();
        prop_assert_eq!(combined, separate);
    }

    #[test]
    fn powers_form_a_semigroup(
        (model, f) in model_and_vector(),
        a in 0u32..=4,
        b in 0u32..=4,
    ) {
        let joint = power_apply(model, &f, a + b).unwrap();
        let split = power_apply(model, &power_apply(model, &f, b).unwrap(), a).unwrap();
        prop_assert_eq!(joint, split);
    }

    #[test]
    fn closed_powers_match_iteration(
        (model, f) in closed_model().prop_flat_map(|m| (Just(m), vector_of(m))),
        n in 0u32..=8,
    ) {
        prop_assert_eq!(
            power_closed(model, &f, n).unwrap(),
            power_apply(model, &f, n).unwrap()
        );
    }

    #[test]
    fn dense_oracle_agrees_with_both_routes(
        (model, f) in model_and_vector(),
        n in 0u32..=5,
    ) {
        let dev = equivalence_check(model, &f, n, sample_extent(model)).unwrap();
        prop_assert_eq!(dev, 0.0);
    }

    #[test]
    fn strip_powers_die_exactly_past_the_corner(
        m in 1u32..=4,
        j in 1i64..=10,
        n in 0u32..=14,
    ) {
        let model = GraphModel::Strip { m };
        for i in 1..=i64::from(m) {
            let e: SparseVector<BigRational> =
                SparseVector::unit(model, Vertex::grid(i, j)).unwrap();
            let out = power_closed(model, &e, n).unwrap();
            // The farthest-back mass sits at distance i + j - 2 from
            // the corner vertex (1, 1).
            prop_assert_eq!(out.is_zero(), i64::from(n) > i + j - 2);
        }
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(
        (_model, f, g) in any_model().prop_flat_map(|m| (Just(m), vector_of(m), vector_of(m))),
        c in nonzero_rat(),
        spec in prop_oneof![
            Just(SpaceSpec::Lp { p: 1.0 }),
            Just(SpaceSpec::Lp { p: 1.5 }),
            Just(SpaceSpec::Lp { p: 2.0 }),
            Just(SpaceSpec::C0),
        ],
    ) {
        let family = WeightFamily::GeometricJ {
            base: Param::Exact(rat(1, 2)),
        };
        let nf = norm(&f, &family, spec).unwrap();
        let ng = norm(&g, &family, spec).unwrap();
        let scaled = norm(&f.scaled(&c), &family, spec).unwrap();
        let expect = Scalar::abs_f64(&c) * nf;
        prop_assert!((scaled - expect).abs() <= 1e-9 * (1.0 + expect));
        let sum = norm(&f.add(&g).unwrap(), &family, spec).unwrap();
        prop_assert!(sum <= nf + ng + 1e-9 * (1.0 + nf + ng));
    }

    #[test]
    fn witnesses_survive_horizon_growth(
        num in 1i64..=9,
        den in 10i64..=20,
        m in 1u32..=2,
        extra in 1i64..=60,
    ) {
        // A decaying geometric family: base num/den < 1/2 keeps the
        // short horizon plausible.
        let family = WeightFamily::GeometricJ { base: Param::Exact(rat(num, den)) };
        let cfg = WitnessConfig::default();
        let short = strip_criterion(&family, m, 60, &cfg).unwrap();
        let long = strip_criterion(&family, m, 60 + extra, &cfg).unwrap();
        if short.verdict == Verdict::WitnessFound {
            prop_assert_eq!(long.verdict, Verdict::WitnessFound);
            prop_assert_eq!(&long.evidence, &short.evidence);
        }
    }

    #[test]
    fn reports_are_deterministic_bytes(
        num in 1i64..=19,
        horizon in 1i64..=80,
    ) {
        let family = WeightFamily::GeometricJ { base: Param::Exact(rat(num, 20)) };
        let cfg = WitnessConfig::default();
        let a = strip_criterion(&family, 2, horizon, &cfg).unwrap();
        let b = strip_criterion(&family, 2, horizon, &cfg).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        prop_assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn single_row_scan_matches_a_naive_reimplementation(
        num in 1i64..=25,
        horizon in 1i64..=70,
    ) {
        let family = WeightFamily::GeometricJ { base: Param::Exact(rat(num, 16)) };
        let cfg = WitnessConfig::default();
        let report = strip_criterion(&family, 1, horizon, &cfg).unwrap();

        // Dumb forward re-scan with fresh evaluations.
        let mut witnesses = Vec::new();
        for n in 1..=horizon {
            if witnesses.len() == cfg.thresholds.len() {
                break;
            }
            let eps = cfg.thresholds[witnesses.len()];
            let quick = family.eval_abs(Vertex::grid(1, n)).unwrap();
            let windowed = (1..=cfg.window)
                .map(|j| family.eval_abs(Vertex::grid(1, j + n)).unwrap())
                .fold(0.0f64, f64::max);
            if quick <= eps && windowed <= eps {
                witnesses.push(ScanPoint { n, value: windowed });
            }
        }
        let expected = if witnesses.len() == cfg.thresholds.len() {
            Verdict::WitnessFound
        } else {
            Verdict::NoWitnessUpToHorizon
        };
        prop_assert_eq!(report.verdict, expected);
        if !witnesses.is_empty() {
            let tail = &report.evidence[report.evidence.len() - witnesses.len()..];
            prop_assert_eq!(tail, &witnesses[..]);
        }
    }

    #[test]
    fn quadrant_verdicts_exclude_each_other(
        num in 1i64..=12,
        den in 1i64..=3,
    ) {
        let family = WeightFamily::GeometricSum { base: Param::Exact(rat(num, den)) };
        let mixing = quadrant_mixing_test(&family, 40, DEFAULT_MARGIN).unwrap();
        let obstruction = quadrant_obstruction_test(&family, 40).unwrap();
        prop_assert!(
            !(mixing.verdict == Verdict::MixingEvidence
                && obstruction.verdict == Verdict::ObstructionCertified)
        );
    }

    #[test]
    fn exact_vector_json_round_trips((model, f) in model_and_vector()) {
        let json = vector_to_json_exact(&f);
        match vector_from_json(model, &json).unwrap() {
            VectorData::Exact(back) => prop_assert_eq!(back, f),
            VectorData::Approx(_) => prop_assert!(false, "exact vector came back approximate"),
        }
    }

    #[test]
    fn weight_table_csv_round_trips(
        entries in prop::collection::btree_map(
            (0i64..=6, -6i64..=6),
            (-100.0f64..100.0, -100.0f64..100.0),
            0..8,
        )
    ) {
        let table = WeightTable::new(
            entries.into_iter().map(|((i, j), (re, im))| {
                (Vertex::grid(i, j), WeightValue::Approx(Complex64::new(re, im)))
            }),
            None,
        );
        let csv = weight_table_to_csv(&table).unwrap();
        prop_assert_eq!(weight_table_from_csv(&csv).unwrap(), table);
    }

    #[test]
    fn restriction_intertwines_with_the_shift(
        (source, target, f) in prop_oneof![
            Just((GraphModel::BilateralStrip { m: 2 }, GraphModel::Strip { m: 2 })),
            Just((GraphModel::HalfPlane, GraphModel::Quadrant)),
        ]
        .prop_flat_map(|(s, t)| (Just(s), Just(t), vector_of(s))),
    ) {
        let through_source = restrict(&apply(source, &f).unwrap(), target).unwrap();
        let through_target = apply(target, &restrict(&f, target).unwrap()).unwrap();
        prop_assert_eq!(through_source, through_target);
    }

    #[test]
    fn diagonal_regrouping_is_lossless_and_intertwines(
        f in vector_of(GraphModel::HalfPlane),
    ) {
        let blocks = diagonal_regroup(&f).unwrap();
        prop_assert_eq!(blocks.to_vector().unwrap(), f.clone());
        let shifted = generalized_shift_apply(&blocks).unwrap();
        prop_assert_eq!(shifted.to_vector().unwrap(), apply(GraphModel::HalfPlane, &f).unwrap());
    }
}
