use benford_core::analyze::histogram;
use benford_core::density::{mod1_project, translate_mod1, Piece, PieceShape, PiecewiseDensity};
use benford_core::digits::{extract_digits, full_digit_distribution, DigitBlock};
use benford_core::sample::sample_x;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = PieceShape> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|level| PieceShape::Constant { level }),
        (0.0f64..3.0, 0.1f64..3.0).prop_map(|(left, right)| PieceShape::Linear { left, right }),
        Just(PieceShape::SineBump),
        prop::collection::vec(0.05f64..2.0, 2..6).prop_map(|ordinates| PieceShape::Tabulated { ordinates }),
    ]
}

/// Adjacent pieces starting anywhere in [-3, 3], widths up to 1.7.
fn density() -> impl Strategy<Value = PiecewiseDensity> {
    (-3.0f64..3.0, prop::collection::vec((0.05f64..1.7, shape(), 0.1f64..1.0), 1..5)).prop_map(|(start, parts)| {
        let mut lo = start;
        let pieces = parts
            .into_iter()
            .map(|(w, shape, weight)| {
                let p = Piece { lo, hi: lo + w, shape, weight };
                lo += w;
                p
            })
            .collect();
        PiecewiseDensity::normalized(pieces).unwrap()
    })
}

fn linear_density() -> impl Strategy<Value = PiecewiseDensity> {
    (-2.0f64..2.0, prop::collection::vec((0.05f64..1.3, 0.0f64..2.0, 0.1f64..2.0, 0.1f64..1.0), 1..5)).prop_map(
        |(start, parts)| {
            let mut lo = start;
            let pieces = parts
                .into_iter()
                .map(|(w, left, right, weight)| {
                    let p = Piece { lo, hi: lo + w, shape: PieceShape::Linear { left, right }, weight };
                    lo += w;
                    p
                })
                .collect();
            PiecewiseDensity::normalized(pieces).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_conserves_mass(g in density()) {
        let g_dag = mod1_project(&g);
        prop_assert!((g_dag.integrate(0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let d = full_digit_distribution(&g_dag, 2).unwrap();
        prop_assert!((d.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projection_of_linear_pieces_is_exact(g in linear_density(), x in 0.0f64..1.0) {
        let direct: f64 = (-3..=4).map(|k| g.evaluate(x + k as f64)).sum();
        prop_assert!((mod1_project(&g).evaluate(x) - direct).abs() < 1e-9);
    }

    #[test]
    fn projection_is_translation_equivariant(g in linear_density(), t in -5.0f64..5.0, x in 0.0f64..1.0) {
        let moved = mod1_project(&g.translate(t));
        let wrapped = translate_mod1(&mod1_project(&g), t);
        prop_assert!((moved.evaluate(x) - wrapped.evaluate(x)).abs() < 1e-8);
    }

    #[test]
    fn translation_composes(g in density(), s in -2.0f64..2.0, t in -2.0f64..2.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let g_dag = mod1_project(&g);
        let twice = translate_mod1(&translate_mod1(&g_dag, s), t);
        let once = translate_mod1(&g_dag, s + t);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!((twice.integrate(a, b).unwrap() - once.integrate(a, b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn inverse_cdf_inverts_cdf(s in shape(), p in 0.0f64..1.0) {
        let u = s.inverse_cdf(p);
        prop_assert!((0.0..=1.0).contains(&u));
        prop_assert!((s.cdf(u) - p).abs() < 1e-9);
    }

    #[test]
    fn digits_equal_exact_decimal_expansion(bits in 1u64..0x7ff0_0000_0000_0000, n in 1usize..=15) {
        let y = f64::from_bits(bits);
        let text = format!("{y:.800e}");
        let oracle: Vec<u8> = text.bytes().filter(u8::is_ascii_digit).take(n).map(|c| c - b'0').collect();
        prop_assert_eq!(extract_digits(y, n).unwrap().digits().to_vec(), oracle);
    }

    #[test]
    fn block_value_roundtrip(v in 1u64..1_000_000_000_000) {
        let n = v.to_string().len();
        let b = DigitBlock::from_value(v, n).unwrap();
        prop_assert_eq!(b.value(), v);
        prop_assert_eq!(b.to_string(), v.to_string());
    }

    #[test]
    fn samples_stay_in_support(g in density(), seed in any::<u64>()) {
        let (lo, hi) = g.support();
        let xs = sample_x(&g, 500, seed).unwrap();
        prop_assert!(xs.values().iter().all(|&x| lo <= x && x < hi));
        prop_assert!(xs.values().iter().all(|&x| g.evaluate(x) > 0.0 || g.evaluate(x.next_up()) > 0.0));
    }

    #[test]
    fn histogram_accounts_for_every_value(values in prop::collection::vec(-5.0f64..20.0, 0..300), bins in 1usize..50) {
        let h = histogram(&values, 1.0, 10.0, bins).unwrap();
        prop_assert_eq!(h.counts.iter().sum::<u64>() + h.below + h.above, values.len() as u64);
        for (w, &c) in h.edges.windows(2).zip(&h.counts) {
            let direct = values.iter().filter(|&&v| w[0] <= v && v < w[1]).count() as u64;
            prop_assert_eq!(c, direct);
        }
    }

    #[test]
    fn rebase_preserves_mass(g in density(), base in 2u32..200) {
        let r = g.rebase_log_density(base).unwrap();
        prop_assert!((r.total_mass() - 1.0).abs() < 1e-12);
        let c = (base as f64).log10();
        let (lo, hi) = g.support();
        let (rlo, rhi) = r.support();
        prop_assert!((rlo - lo / c).abs() < 1e-12 && (rhi - hi / c).abs() < 1e-12);
    }
}
