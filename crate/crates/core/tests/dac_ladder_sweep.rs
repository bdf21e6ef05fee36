//! DAC-vs-ladder sweep: every recorded representative of every prime under
//! 600 must multiply exactly like the Montgomery ladder, on random points.

use dacshund::dac::{dac_mul, enumerate_dacs};
use dacshund::field::{Field, FieldParams};
use dacshund::montgomery::{ladder_u64, CurveCoeff, ProjPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn all_representatives_match_ladder_below_600() {
    let map = enumerate_dacs(16, 600).unwrap();
    let field = Field::new(FieldParams::new(2, 1, &[3, 5, 7]).unwrap());
    let curve = CurveCoeff::from_affine(&field, field.fe(6)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let mut checked = 0u64;
    for l in map.primes().collect::<Vec<_>>() {
        assert!(l < 600 || l <= 600);
        for (_, dac) in map.entries_for(l).unwrap() {
            for _ in 0..10 {
                let p = ProjPoint::from_affine(field.fe(rng.gen_range(1..419)), &field);
                let got = dac_mul(&field, &p, &dac, &curve);
                let expect = ladder_u64(&field, l, &p, &curve);
                assert!(
                    got.proj_eq_vartime(&expect),
                    "mismatch at l = {l}, dac = {dac}"
                );
                checked += 1;
            }
        }
    }
    // 108 primes below 600 with several lengths each
    assert!(checked >= 5000, "only {checked} cases swept");
}
