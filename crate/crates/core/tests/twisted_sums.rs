use heegner_core::arith::{factorize, gcd, kloosterman_row, mod_inverse};
use heegner_core::kuznetsov::{a_sum_closed, a_sum_with_row, abound};
use heegner_core::Complex64;
use rand::{Rng, SeedableRng};

const DISCS: [i64; 12] = [1, -3, -4, -7, 8, -8, -11, -15, -20, -23, 24, -24];

#[test]
fn closed_form_bound_and_vanishing_exhaustive() {
    let mut fallbacks = 0;
    for c in 1..=60u64 {
        let row = kloosterman_row(c);
        for &d in &DISCS {
            let has_free_prime = factorize(c).iter().any(|&(p, _)| d % p as i64 != 0);
            for m in -60..=60i64 {
                let brute = a_sum_with_row(m, c, d, &row);
                let closed = a_sum_closed(m, c, d).unwrap();
                fallbacks += closed.fallback as usize;
                assert!((closed.value - brute).norm() < 1e-8 * (1.0 + brute.norm()), "m={m} c={c} D={d}: {} vs {brute}", closed.value);
                assert!(brute.norm() <= abound(m, c, d) * (1.0 + 1e-12), "bound m={m} c={c} D={d}");
                if m == 0 && has_free_prime {
                    assert!(brute.norm() < 1e-8, "a(0; {c}, {d}) = {brute}");
                }
            }
        }
    }
    assert!(fallbacks > 0);
}

fn prime_disc(rng: &mut impl Rng) -> i64 {
    const P: [i64; 10] = [-3, -4, 5, -7, 8, -8, -11, 13, -19, 17];
    P[rng.gen_range(0..P.len())]
}

#[test]
fn crt_identity_random() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(31);
    let brute = |m: i64, c: u64, d: i64| a_sum_with_row(m, c, d, &kloosterman_row(c));
    let mut checked = 0;
    while checked < 200 {
        let (c1, c2) = (rng.gen_range(1..40u64), rng.gen_range(1..40u64));
        let d1 = if rng.gen_bool(0.5) { 1 } else { prime_disc(&mut rng) };
        let d2 = if rng.gen_bool(0.5) { 1 } else { prime_disc(&mut rng) };
        let (n1, n2) = (c1 as i64 * d1.abs(), c2 as i64 * d2.abs());
        if gcd(n1, n2) != 1 || (c1 * c2) as i64 * (d1 * d2).abs() > 20_000 {
            continue;
        }
        let m = rng.gen_range(-100..100i64);
        let lhs = brute(m, c1 * c2, d1 * d2);
        let i2 = if n1 == 1 { 0 } else { mod_inverse(d2.abs() % n1, n1).unwrap() };
        let i1 = if n2 == 1 { 0 } else { mod_inverse(d1.abs() % n2, n2).unwrap() };
        let rhs: Complex64 = brute(m * c2 as i64 * i2, c1, d1) * brute(m * c1 as i64 * i1, c2, d2);
        assert!((lhs - rhs).norm() < 1e-8 * (1.0 + lhs.norm()), "m={m} c=({c1},{c2}) D=({d1},{d2})");
        checked += 1;
    }
}
