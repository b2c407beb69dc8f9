use opberg_core::*;
use proptest::prelude::*;

fn seq_strategy(max_len: usize, alphabet: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..alphabet, 0..=max_len)
}

fn seq(ids: &[u32]) -> TokenSeq {
    TokenSeq::from_ids(ids)
}

fn linear_params(p: Score) -> OpbergParams {
    OpbergParams::unconstrained(p)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn three_engines_agree(
        a in seq_strategy(8, 4),
        b in seq_strategy(8, 4),
        mm in -3i32..=0,
        q in -3i32..=0,
        p in -4i32..=0,
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, mm);
        let gaps = GapModel::linear(q);
        let params = linear_params(p);
        let want = brute_force_oracle(&a, &b, &scheme, q, Threshold::Finite(p)).unwrap();
        let naive = naive_optimal(&a, &b, &scheme, q, Threshold::Finite(p), None).unwrap();
        let fast = opberg_align(&a, &b, &scheme, &gaps, &params).unwrap();
        prop_assert_eq!(naive.total_score, want);
        prop_assert_eq!(fast.total_score, want);
        naive.verify(&a, &b, &scheme, &gaps, Some(&params)).map_err(TestCaseError::fail)?;
        fast.verify(&a, &b, &scheme, &gaps, Some(&params)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn opberg_matches_naive_on_longer_inputs(
        a in seq_strategy(12, 4),
        b in seq_strategy(12, 4),
        q in -2i32..=0,
        p in -4i32..=0,
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, -1);
        let gaps = GapModel::linear(q);
        let naive = naive_optimal(&a, &b, &scheme, q, Threshold::Finite(p), None).unwrap();
        let fast = opberg_align(&a, &b, &scheme, &gaps, &linear_params(p)).unwrap();
        prop_assert_eq!(fast.total_score, naive.total_score);
    }

    #[test]
    fn affine_opberg_matches_enumeration(
        a in seq_strategy(7, 3),
        b in seq_strategy(7, 3),
        o in -3i32..=0,
        e in -2i32..=0,
        p in -4i32..=0,
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, -1);
        let gaps = GapModel::affine(o, e);
        let params = linear_params(p);
        let want = brute_force_affine(&a, &b, &scheme, &gaps, Threshold::Finite(p)).unwrap();
        let fast = opberg_align(&a, &b, &scheme, &gaps, &params).unwrap();
        prop_assert_eq!(fast.total_score, want);
        fast.verify(&a, &b, &scheme, &gaps, Some(&params)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn sw_is_the_single_segment_optimum(
        a in seq_strategy(6, 4),
        b in seq_strategy(6, 4),
        o in -3i32..=0,
        e in -2i32..=0,
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, -1);
        let gaps = GapModel::affine(o, e);
        let sw = smith_waterman(&a, &b, &scheme, &gaps).unwrap();
        let want = brute_force_affine(&a, &b, &scheme, &gaps, Threshold::NegInf).unwrap();
        prop_assert_eq!(sw.total_score, want);
        sw.verify(&a, &b, &scheme, &gaps, None).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn sw_symmetric(a in seq_strategy(10, 4), b in seq_strategy(10, 4)) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, -1);
        let gaps = GapModel::default();
        let ab = smith_waterman(&a, &b, &scheme, &gaps).unwrap();
        let ba = smith_waterman(&b, &a, &scheme, &gaps).unwrap();
        prop_assert_eq!(ab.total_score, ba.total_score);
    }

    #[test]
    fn sw_monotone_in_match_score(a in seq_strategy(10, 4), b in seq_strategy(10, 4), m in 1i32..5) {
        let (a, b) = (seq(&a), seq(&b));
        let gaps = GapModel::default();
        let lo = smith_waterman(&a, &b, &ScoringScheme::uniform(m, -1), &gaps).unwrap();
        let hi = smith_waterman(&a, &b, &ScoringScheme::uniform(m + 1, -1), &gaps).unwrap();
        prop_assert!(hi.total_score >= lo.total_score);
    }

    #[test]
    fn relabeling_preserves_scores(
        a in seq_strategy(10, 4),
        b in seq_strategy(10, 4),
        perm in Just(vec![0u32, 1, 2, 3]).prop_shuffle(),
    ) {
        let rows = vec![
            vec![3, -1, 0, -2],
            vec![-1, 2, -1, 0],
            vec![0, -1, 4, -1],
            vec![-2, 0, -1, 1],
        ];
        let scheme = ScoringScheme::matrix(rows).unwrap();
        let moved = scheme.relabeled(&perm);
        let map = |s: &[u32]| seq(&s.iter().map(|&t| perm[t as usize]).collect::<Vec<_>>());
        let gaps = GapModel::default();
        let params = OpbergParams::default();
        let x = opberg_align(&seq(&a), &seq(&b), &scheme, &gaps, &params).unwrap();
        let y = opberg_align(&map(&a), &map(&b), &moved, &gaps, &params).unwrap();
        prop_assert_eq!(x.total_score, y.total_score);
        prop_assert_eq!(x.segments, y.segments);
    }

    #[test]
    fn default_params_yield_consistent_results(
        a in seq_strategy(16, 5),
        b in seq_strategy(16, 5),
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::default();
        let gaps = GapModel::default();
        let params = OpbergParams::default();
        let r = opberg_align(&a, &b, &scheme, &gaps, &params).unwrap();
        r.verify(&a, &b, &scheme, &gaps, Some(&params)).map_err(TestCaseError::fail)?;
        let st = opberg_fill(&a, &b, &scheme, &gaps, &params).unwrap();
        prop_assert_eq!(st.objective(), st.m.get(a.len(), b.len()));
    }

    #[test]
    fn interning_is_a_bijection(tags in prop::collection::vec("[A-Z]{1,3}", 0..20)) {
        let mut abc = Alphabet::new();
        let s = abc.intern(&tags);
        prop_assert_eq!(abc.resolve(&s), tags.clone());
        let again = abc.intern(&tags);
        prop_assert_eq!(s, again);
    }

    #[test]
    fn priced_out_jumps_reduce_to_sw(
        a in seq_strategy(12, 4),
        b in seq_strategy(12, 4),
        o in -3i32..=0,
        e in -2i32..=-1,
        alpha in prop_oneof![Just(Threshold::PosInf), (0i32..6).prop_map(Threshold::Finite)],
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, -1);
        let gaps = GapModel::affine(o, e);
        let params = OpbergParams {
            jump_penalty: priced_out_penalty(&a, &b, &scheme),
            alpha,
            ..OpbergParams::unconstrained(0)
        };
        let sw = smith_waterman(&a, &b, &scheme, &gaps).unwrap();
        let ob = opberg_align(&a, &b, &scheme, &gaps, &params).unwrap();
        prop_assert_eq!(ob.total_score, sw.total_score);
        let span = |r: &AlignmentResult| {
            r.segments.iter().map(|s| (s.a_start, s.a_end, s.b_start, s.b_end, s.segment_score, s.ops.clone())).collect::<Vec<_>>()
        };
        prop_assert_eq!(span(&ob), span(&sw));
    }

    #[test]
    fn raising_beta_never_helps(
        a in seq_strategy(12, 4),
        b in seq_strategy(12, 4),
        beta in -2i32..8,
        p in -4i32..=0,
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, -1);
        let gaps = GapModel::default();
        let at = |beta| OpbergParams {
            beta: Threshold::Finite(beta),
            gamma: GammaSpec::Zero,
            ..OpbergParams::unconstrained(p)
        };
        let lo = opberg_align(&a, &b, &scheme, &gaps, &at(beta)).unwrap();
        let hi = opberg_align(&a, &b, &scheme, &gaps, &at(beta + 1)).unwrap();
        prop_assert!(hi.total_score <= lo.total_score);
    }

    #[test]
    fn lowering_alpha_never_helps(
        a in seq_strategy(12, 4),
        b in seq_strategy(12, 4),
        alpha in 0i32..8,
        p in -4i32..=0,
    ) {
        let (a, b) = (seq(&a), seq(&b));
        let scheme = ScoringScheme::uniform(2, -1);
        let gaps = GapModel::default();
        let at = |alpha| OpbergParams { alpha, ..OpbergParams::unconstrained(p) };
        let lo = opberg_align(&a, &b, &scheme, &gaps, &at(Threshold::Finite(alpha))).unwrap();
        let hi = opberg_align(&a, &b, &scheme, &gaps, &at(Threshold::Finite(alpha + 1))).unwrap();
        let top = opberg_align(&a, &b, &scheme, &gaps, &at(Threshold::PosInf)).unwrap();
        prop_assert!(lo.total_score <= hi.total_score);
        prop_assert!(hi.total_score <= top.total_score);
    }
}
