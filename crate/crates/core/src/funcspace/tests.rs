use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ordinal::{parse_ordinal, random_below};

fn o(s: &str) -> Ordinal {
    parse_ordinal(s).unwrap()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sample(seed: u64, top: &str, field: Field) -> StepFun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_stepfun(&mut rng, &o(top), field, 6, ValueLaw::SmallIntegers)
}

/// Piece ends, their successors and a few random points: enough to pin down
/// any step function whose breakpoints are among the ends.
fn probe_points(fs: &[&StepFun], seed: u64) -> Vec<Ordinal> {
    let top = fs[0].top().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![Ordinal::one(), top.clone()];
    for f in fs {
        for p in f.pieces() {
            pts.push(p.end.clone());
            let s = p.end.successor().unwrap();
            if s <= top {
                pts.push(s);
            }
        }
    }
    for _ in 0..16 {
        let p = random_below(&mut rng, &top, 6);
        if !p.is_zero() {
            pts.push(p);
        }
    }
    pts
}

#[test]
fn evaluation_at_piece_boundaries() {
    let f = StepFun::new(Field::Real, o("w^2"), vec![(o("w"), re(1.0)), (o("w^2"), re(2.0))]).unwrap();
    assert_eq!(f.eval(&o("w")).unwrap(), re(1.0));
    assert_eq!(f.eval(&o("w+1")).unwrap(), re(2.0));
    assert_eq!(f.eval(&o("7")).unwrap(), re(1.0));
    assert_eq!(f.eval(&o("w^2")).unwrap(), re(2.0));
    assert!(matches!(f.eval(&o("0")), Err(FuncError::OutOfDomain { .. })));
    assert!(matches!(f.eval(&o("w^2+1")), Err(FuncError::OutOfDomain { .. })));
    assert_eq!(f.tail_start(), o("w"));
}

#[test]
fn construction_rejects_broken_invariants() {
    let bad_order = StepFun::new(Field::Real, o("w"), vec![(o("5"), re(1.0)), (o("3"), re(0.0)), (o("w"), re(1.0))]);
    assert_eq!(bad_order, Err(FuncError::Unordered(1)));
    let bad_top = StepFun::new(Field::Real, o("w"), vec![(o("5"), re(1.0))]);
    assert!(matches!(bad_top, Err(FuncError::BadTop { .. })));
    let complex_in_real = StepFun::new(Field::Real, o("w"), vec![(o("w"), C64::new(0.0, 1.0))]);
    assert_eq!(complex_in_real, Err(FuncError::ComplexValue));
    let nan = StepFun::new(Field::Complex, o("w"), vec![(o("w"), C64::new(f64::NAN, 0.0))]);
    assert_eq!(nan, Err(FuncError::NonFinite));
    let merged = StepFun::new(Field::Real, o("w"), vec![(o("3"), re(1.0)), (o("w"), re(1.0))]).unwrap();
    assert_eq!(merged.num_pieces(), 1);
}

#[test]
fn self_difference_is_the_zero_function() {
    let f = sample(3, "w^2*2", Field::Complex);
    let z = StepFun::linear_combine(&[re(1.0), re(-1.0)], &[&f, &f]).unwrap();
    assert_eq!(z, StepFun::zero(Field::Complex, o("w^2*2")).unwrap());
    assert_eq!(z.num_pieces(), 1);
}

#[test]
fn restriction_reindexes() {
    let f = StepFun::new(
        Field::Real,
        o("w^2"),
        vec![(o("w"), re(1.0)), (o("w*2+3"), re(2.0)), (o("w^2"), re(3.0))],
    )
    .unwrap();
    let r = f.restrict(&o("w"), &o("w^2")).unwrap();
    assert_eq!(*r.top(), o("w^2"));
    assert_eq!(r.eval(&o("w+3")).unwrap(), re(2.0));
    assert_eq!(r.eval(&o("w+4")).unwrap(), re(3.0));
    assert!(matches!(f.restrict(&o("w"), &o("w")), Err(FuncError::EmptyInterval { .. })));
}

#[test]
fn assembly_errors() {
    let c = |top: &str| StepFun::constant(Field::Real, o(top), re(1.0)).unwrap();
    let blk = |lo: &str, hi: &str, top: &str| Block { lo: o(lo), hi: o(hi), content: c(top) };
    let top = o("w*2");
    let err = StepFun::assemble(Field::Real, top.clone(), vec![blk("w", "w", "1")], None);
    assert!(matches!(err, Err(FuncError::EmptyInterval { .. })));
    let err = StepFun::assemble(
        Field::Real,
        top.clone(),
        vec![blk("0", "w+1", "w+1"), blk("w", "w*2", "w")],
        None,
    );
    assert!(matches!(err, Err(FuncError::Overlap(_))));
    let err = StepFun::assemble(Field::Real, top.clone(), vec![blk("0", "w", "w")], None);
    assert!(matches!(err, Err(FuncError::Gap { .. })));
    let err = StepFun::assemble(Field::Real, top.clone(), vec![blk("0", "w", "5")], None);
    assert!(matches!(err, Err(FuncError::BlockLength { .. })));
    let ok = StepFun::assemble(Field::Real, top, vec![blk("0", "w", "w")], Some(re(0.0))).unwrap();
    assert_eq!(ok.eval(&o("w")).unwrap(), re(1.0));
    assert_eq!(ok.eval(&o("w+1")).unwrap(), re(0.0));
}

#[test]
fn indicators() {
    let top = o("w^2");
    let e = StepFun::indicator_point(Field::Real, &top, &o("w+3")).unwrap();
    assert_eq!(e.eval(&o("w+3")).unwrap(), re(1.0));
    assert_eq!(e.eval(&o("w+2")).unwrap(), re(0.0));
    assert_eq!(e.eval(&o("w+4")).unwrap(), re(0.0));
    assert_eq!(
        StepFun::indicator_point(Field::Real, &top, &o("w")),
        Err(FuncError::NotIsolated(o("w")))
    );
    let i = StepFun::indicator_interval(Field::Real, &top, &o("w"), &o("w*3")).unwrap();
    assert_eq!(i.eval(&o("w")).unwrap(), re(0.0));
    assert_eq!(i.eval(&o("w*3")).unwrap(), re(1.0));
    assert_eq!(i.eval(&o("w*3+1")).unwrap(), re(0.0));
}

#[test]
fn lattice_operations_need_real_inputs() {
    let f = sample(1, "w", Field::Complex);
    assert_eq!(f.meet(&f), Err(FuncError::NotReal));
    let g = sample(2, "w^2", Field::Real);
    assert!(matches!(g.meet(&sample(3, "w", Field::Real)), Err(FuncError::TopMismatch(..))));
}

#[test]
fn json_round_trip_and_validation() {
    let f = sample(11, "w^w", Field::Complex);
    let text = serde_json::to_string(&f).unwrap();
    assert_eq!(serde_json::from_str::<StepFun>(&text).unwrap(), f);
    let unordered = r#"{"field":"real","top":[[1,1]],"pieces":[{"end":[[1,1]],"value":[1,0]},{"end":3,"value":[0,0]}]}"#;
    assert!(serde_json::from_str::<StepFun>(unordered).is_err());
    let imaginary = r#"{"field":"real","top":3,"pieces":[{"end":3,"value":[1,2]}]}"#;
    assert!(serde_json::from_str::<StepFun>(imaginary).is_err());
    let redundant = r#"{"field":"real","top":3,"pieces":[{"end":1,"value":[1,0]},{"end":3,"value":[1,0]}]}"#;
    assert!(serde_json::from_str::<StepFun>(redundant).is_err());
}

fn top_strategy() -> impl Strategy<Value = Ordinal> {
    prop::sample::select(vec!["w", "w^2", "w^2*2+w", "w^3", "w^w", "w^(w+1)", "17"]).prop_map(o)
}

proptest! {
    #[test]
    fn linear_combination_is_pointwise(top in top_strategy(), s1 in any::<u64>(), s2 in any::<u64>(),
                                       a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let f = random_stepfun(&mut rng, &top, Field::Complex, 6, ValueLaw::Uniform);
        let g = random_stepfun(&mut rng, &top, Field::Complex, 6, ValueLaw::Uniform);
        let (ca, cb) = (C64::new(a, b), C64::new(b, -a));
        let h = StepFun::linear_combine(&[ca, cb], &[&f, &g]).unwrap();
        for p in probe_points(&[&f, &g], s2) {
            let want = ca * f.eval(&p).unwrap() + cb * g.eval(&p).unwrap();
            prop_assert!((h.eval(&p).unwrap() - want).norm() <= 1e-12);
        }
        let norm = probe_points(&[&f], s2).iter().map(|p| f.eval(p).unwrap().norm()).fold(0.0, f64::max);
        prop_assert_eq!(f.sup_norm(), norm);
    }

    #[test]
    fn pointwise_operations_agree_with_evaluation(top in top_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_stepfun(&mut rng, &top, Field::Real, 6, ValueLaw::Uniform);
        let g = random_stepfun(&mut rng, &top, Field::Real, 6, ValueLaw::Uniform);
        let (lo, hi, prod, m) = (f.meet(&g).unwrap(), f.join(&g).unwrap(), f.pointwise_mul(&g).unwrap(), f.modulus());
        for p in probe_points(&[&f, &g], seed) {
            let (x, y) = (f.eval(&p).unwrap().re, g.eval(&p).unwrap().re);
            prop_assert_eq!(lo.eval(&p).unwrap().re, x.min(y));
            prop_assert_eq!(hi.eval(&p).unwrap().re, x.max(y));
            prop_assert_eq!(prod.eval(&p).unwrap().re, x * y);
            prop_assert_eq!(m.eval(&p).unwrap().re, x.abs());
        }
        // Lattice absorption.
        prop_assert_eq!(f.meet(&f.join(&g).unwrap()).unwrap(), f.clone());
        prop_assert_eq!(f.join(&f.meet(&g).unwrap()).unwrap(), f);
    }

    #[test]
    fn restrict_then_assemble_is_identity(top in top_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_stepfun(&mut rng, &top, Field::Complex, 6, ValueLaw::SmallIntegers);
        let cut = random_below(&mut rng, &top, 6);
        prop_assume!(!cut.is_zero());
        let left = f.restrict(&Ordinal::zero(), &cut).unwrap();
        let right = f.restrict(&cut, &top).unwrap();
        for p in probe_points(&[&right], seed) {
            prop_assert_eq!(right.eval(&p).unwrap(), f.eval(&cut.add(&p).unwrap()).unwrap());
        }
        let blocks = vec![
            Block { lo: cut.clone(), hi: top.clone(), content: right },
            Block { lo: Ordinal::zero(), hi: cut, content: left },
        ];
        prop_assert_eq!(StepFun::assemble(Field::Complex, top, blocks, None).unwrap(), f);
    }

    #[test]
    fn conjugation_and_real_part(top in top_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_stepfun(&mut rng, &top, Field::Complex, 6, ValueLaw::Uniform);
        let sum = f.add(&f.conjugate()).unwrap();
        let twice_re = f.re_part().to_complex().scale(re(2.0)).unwrap();
        prop_assert!(sum.approx_eq(&twice_re, EQ_TOL));
        prop_assert_eq!(f.conjugate().conjugate(), f);
    }
}
