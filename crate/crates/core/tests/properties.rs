use floatfloat::eft::{add12, add12_fast, add12_textbook, default_split_point, mul12, split};
use floatfloat::ff::{add22, ff_from_parts, mul22, FloatFloat};
use floatfloat::fpmodel::{self, Backend, FpFormat, GuardDigits, Rounding, SimFloat};
use floatfloat::oracle::{error_ulps, round_quotient};
use floatfloat::{native_backend, sim_backend, Dyadic};
use num_rational::BigRational;
use proptest::prelude::*;

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (any::<i64>(), -80i64..80).prop_map(|(m, e)| Dyadic::new(m, e))
}

fn rounding() -> impl Strategy<Value = Rounding> {
    prop_oneof![Just(Rounding::NearestEven), Just(Rounding::TowardZero)]
}

fn guard() -> impl Strategy<Value = GuardDigits> {
    prop_oneof![
        Just(GuardDigits::Zero),
        Just(GuardDigits::One),
        Just(GuardDigits::Unbounded)
    ]
}

fn format() -> impl Strategy<Value = FpFormat> {
    (2u32..=30, rounding(), guard(), any::<bool>())
        .prop_map(|(p, r, g, ftz)| FpFormat::new(p, -200, 200, r, g, ftz).unwrap())
}

/// Normal f32 with exponent in `[-60, 60]`.
fn normal_f32() -> impl Strategy<Value = f32> {
    normal_f32_in(60)
}

/// Normal f32 with exponent in `[-r, r]`.
fn normal_f32_in(r: i32) -> impl Strategy<Value = f32> {
    (any::<bool>(), 0u32..(1 << 23), -r..=r).prop_map(|(neg, frac, e)| {
        let bits = ((e + 127) as u32) << 23 | frac;
        let x = f32::from_bits(bits);
        if neg {
            -x
        } else {
            x
        }
    })
}

fn sim_value(fmt: FpFormat) -> impl Strategy<Value = SimFloat> {
    let p = fmt.precision;
    (any::<bool>(), any::<u64>(), -40i32..=40).prop_map(move |(neg, bits, e)| {
        let m = (1u64 << (p - 1)) | (bits & ((1u64 << (p - 1)) - 1));
        fpmodel::from_parts(neg, m as u128, e - p as i32 + 1, &fmt).unwrap()
    })
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn round_is_idempotent(x in dyadic(), fmt in format()) {
        let r = fpmodel::round(&x, &fmt).unwrap();
        let rr = fpmodel::round(&r.to_dyadic(), &fmt).unwrap();
        prop_assert_eq!(r, rr);
    }

    #[test]
    fn round_error_within_rounding_envelope(x in dyadic(), p in 2u32..=40, r in rounding()) {
        let fmt = FpFormat::new(p, -300, 300, r, GuardDigits::Unbounded, false).unwrap();
        let c = fpmodel::round(&x, &fmt).unwrap().to_dyadic();
        prop_assume!(!x.is_zero());
        let e = error_ulps(&c, &x, &fmt).unwrap();
        match r {
            Rounding::NearestEven => prop_assert!(e <= half() && e >= -half()),
            Rounding::TowardZero => {
                prop_assert!(c.abs() <= x.abs());
                prop_assert_eq!(c.is_negative(), x.is_negative());
                let (one, zero) = (BigRational::from_integer(1.into()), BigRational::from_integer(0.into()));
                prop_assert!(e < one && e > -one.clone());
                let toward_zero = if x.is_negative() { e >= zero } else { e <= zero };
                prop_assert!(toward_zero);
            }
        }
    }

    #[test]
    fn round_agrees_with_oracle_rounding(x in dyadic(), p in 2u32..=40, r in rounding()) {
        let fmt = FpFormat::new(p, -300, 300, r, GuardDigits::Unbounded, false).unwrap();
        let c = fpmodel::round(&x, &fmt).unwrap().to_dyadic();
        prop_assert_eq!(c, x.round_to_bits(p, r));
    }

    #[test]
    fn exact_guard_ops_round_the_exact_result(
        (fmt, a, b) in format().prop_filter("exact sums", |f| f.guard_digits == GuardDigits::Unbounded && !f.flush_subnormals)
            .prop_flat_map(|f| (Just(f), sim_value(f), sim_value(f)))
    ) {
        let (da, db) = (a.to_dyadic(), b.to_dyadic());
        let round = |x: Dyadic| fpmodel::round(&x, &fmt).unwrap();
        prop_assert_eq!(fpmodel::add(a, b, &fmt).unwrap(), round(&da + &db));
        prop_assert_eq!(fpmodel::sub(a, b, &fmt).unwrap(), round(&da - &db));
        prop_assert_eq!(fpmodel::mul(a, b, &fmt).unwrap(), round(&da * &db));
        let recip = round_quotient(&Dyadic::one(), &db, fmt.precision, fmt.rounding).unwrap();
        prop_assert_eq!(fpmodel::reciprocal(b, &fmt).unwrap().to_dyadic(), recip);
    }

    #[test]
    fn sterbenz_holds_with_a_guard_digit(
        (fmt, x, e) in (4u32..=24, rounding()).prop_flat_map(|(p, r)| {
            let f = FpFormat::new(p, -100, 100, r, GuardDigits::One, false).unwrap();
            (Just(f), sim_value(f), -1i32..=1)
        }),
        bits in any::<u64>(),
    ) {
        let p = fmt.precision;
        let m = (1u64 << (p - 1)) | (bits & ((1u64 << (p - 1)) - 1));
        let y = fpmodel::from_parts(x.is_negative(), m as u128, x.exponent() + e - p as i32 + 1, &fmt).unwrap();
        let (dx, dy) = (x.to_dyadic().abs(), y.to_dyadic().abs());
        prop_assume!(dy.mul_pow2(-1) <= dx && dx <= dy.mul_pow2(1));
        let d = fpmodel::sub(x, y, &fmt).unwrap();
        prop_assert_eq!(d.to_dyadic(), x.to_dyadic() - y.to_dyadic());
    }

    #[test]
    fn dyadic_ops_match_scaled_integers(a in any::<i32>(), b in any::<i32>(), ea in -20i64..20, eb in -20i64..20) {
        let (x, y) = (Dyadic::new(a, ea), Dyadic::new(b, eb));
        let lo = ea.min(eb);
        let scaled = |v: i32, e: i64| (v as i128) << (e - lo);
        prop_assert_eq!(&x + &y, Dyadic::new(scaled(a, ea) + scaled(b, eb), lo));
        prop_assert_eq!(&x - &y, Dyadic::new(scaled(a, ea) - scaled(b, eb), lo));
        prop_assert_eq!(&x * &y, Dyadic::new(a as i128 * b as i128, ea + eb));
        prop_assert_eq!((&x + &y).cmp(&x), y.signum().cmp(&0));
    }

    #[test]
    fn dyadic_hex_round_trips(x in dyadic()) {
        prop_assert_eq!(x.to_hex().parse::<Dyadic>().unwrap(), x);
    }

    #[test]
    fn native_values_round_trip(x in normal_f32()) {
        let n = native_backend();
        let s = sim_backend(FpFormat::binary32());
        let d = n.to_dyadic(x);
        prop_assert_eq!(n.from_dyadic(&d).unwrap().to_bits(), x.to_bits());
        let v = s.from_dyadic(&d).unwrap();
        prop_assert_eq!(s.to_dyadic(v), d);
        prop_assert_eq!(v.to_f32().to_bits(), x.to_bits());
    }

    #[test]
    fn two_sum_variants_agree_under_nearest(a in normal_f32(), b in normal_f32()) {
        let n = native_backend();
        let p = add12(&n, a, b).unwrap();
        let f = add12_fast(&n, a, b).unwrap();
        let t = add12_textbook(&n, a, b).unwrap();
        prop_assert_eq!((p.hi, p.lo), (f.hi, f.lo));
        prop_assert_eq!((p.hi, p.lo), (t.hi, t.lo));
        prop_assert_eq!(p.to_dyadic(&n), n.to_dyadic(a) + n.to_dyadic(b));
    }

    #[test]
    fn split_and_mul12_are_exact(a in normal_f32_in(40), b in normal_f32_in(40)) {
        let n = native_backend();
        let s = split(&n, a, default_split_point(24)).unwrap();
        prop_assert_eq!(s.to_dyadic(&n), n.to_dyadic(a));
        prop_assert!(n.to_dyadic(s.hi).significant_bits() <= 12);
        prop_assert!(n.to_dyadic(s.lo).significant_bits() <= 12);
        prop_assert_eq!(mul12(&n, a, b).unwrap().to_dyadic(&n), n.to_dyadic(a) * n.to_dyadic(b));
    }

    #[test]
    fn add22_is_commutative_in_value(ah in normal_f32(), al in normal_f32(), bh in normal_f32(), bl in normal_f32()) {
        let n = native_backend();
        let a = ff_from_parts(&n, ah, al * 2f32.powi(-30)).unwrap();
        let b = ff_from_parts(&n, bh, bl * 2f32.powi(-30)).unwrap();
        let ab = add22(&n, a, b).unwrap();
        let ba = add22(&n, b, a).unwrap();
        prop_assert_eq!(ab.to_dyadic(&n), ba.to_dyadic(&n));
        prop_assert!(ab.is_normalized(&n));
    }

    #[test]
    fn mul22_without_low_parts_is_mul12(a in normal_f32_in(40), b in normal_f32_in(40)) {
        let n = native_backend();
        let r = mul22(&n, FloatFloat::from(a), FloatFloat::from(b)).unwrap();
        let p = mul12(&n, a, b).unwrap();
        let q = add12(&n, p.hi, p.lo).unwrap();
        prop_assert_eq!((r.hi, r.lo), (q.hi, q.lo));
        prop_assert_eq!(r.to_dyadic(&n), n.to_dyadic(a) * n.to_dyadic(b));
    }

    #[test]
    fn format_text_round_trips(fmt in format()) {
        prop_assert_eq!(fmt.to_string().parse::<FpFormat>().unwrap(), fmt);
    }
}
