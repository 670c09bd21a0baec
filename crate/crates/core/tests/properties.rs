use chiraforce::constants::SPEED_OF_LIGHT;
use chiraforce::molecule::{random_chiral_model, response_tensors};
use chiraforce::rotavg::sample_rotation;
use chiraforce::{
    discriminatory_shift, energy_shift, mirror_molecule, outer_product, rotational_average, BeamMode, Complex, Frame,
    Handedness, Rotation3, Tensor,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const WAVELENGTH: f64 = 1064e-9;

fn tensor_of(rank: usize) -> impl Strategy<Value = Tensor<f64>> {
    let n = 3usize.pow(rank as u32);
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(move |v| Tensor::from_components(rank, v.into_iter().map(|(re, im)| Complex::new(re, im)).collect()).unwrap())
}

fn any_rank_tensor() -> impl Strategy<Value = Tensor<f64>> {
    (2usize..=5).prop_flat_map(tensor_of)
}

fn rotation(seed: u64) -> Rotation3<f64> {
    sample_rotation(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn coefficient() -> impl Strategy<Value = Complex<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn average(t: &Tensor<f64>) -> Tensor<f64> {
    rotational_average(t).unwrap().averaged_tensor
}

fn omega() -> f64 {
    std::f64::consts::TAU * SPEED_OF_LIGHT / WAVELENGTH
}

fn beam(h: Handedness) -> BeamMode<f64> {
    BeamMode::with_handedness(h, &Frame::standard(), WAVELENGTH, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outer_product_is_bilinear(a in tensor_of(2), b in tensor_of(2), c in tensor_of(2), s in coefficient()) {
        let lhs = outer_product(&(&(s * &a) + &b), &c).unwrap();
        let rhs = &(s * &outer_product(&a, &c).unwrap()) + &outer_product(&b, &c).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn average_is_linear(rank in 2usize..=5, seed in any::<u64>(), s in coefficient()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (chiraforce::verify::random_tensor(&mut rng, rank), chiraforce::verify::random_tensor(&mut rng, rank));
        let lhs = average(&(&(s * &a) + &b));
        let rhs = &(s * &average(&a)) + &average(&b);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn average_is_rotation_invariant(t in any_rank_tensor(), seed in any::<u64>()) {
        let r = rotation(seed);
        let avg = average(&t);
        prop_assert!(avg.rotate(&r).max_abs_diff(&avg) <= 1e-10);
        prop_assert!(average(&t.rotate(&r)).max_abs_diff(&avg) <= 1e-10);
    }

    #[test]
    fn average_is_idempotent(t in any_rank_tensor()) {
        let once = average(&t);
        prop_assert!(average(&once).max_abs_diff(&once) <= 1e-12);
    }

    #[test]
    fn rank_two_average_is_trace_over_three(t in tensor_of(2)) {
        let expected = chiraforce::kronecker_delta::<f64>().scale(&(t.trace() / 3.0));
        prop_assert!(average(&t).max_abs_diff(&expected) <= 1e-14);
    }

    #[test]
    fn parity_flips_odd_tensors(seed in any::<u64>(), states in 1usize..=4) {
        let m = random_chiral_model(&mut ChaCha8Rng::seed_from_u64(seed), states, "p");
        let (t, u) = (response_tensors(&m, omega()).unwrap(), response_tensors(&mirror_molecule(&m), omega()).unwrap());
        prop_assert!(u.alpha.max_abs_diff(&t.alpha) <= 1e-12 * t.alpha.max_abs());
        prop_assert!(u.g_bar.max_abs_diff(&-&t.g_bar) <= 1e-12 * t.g_bar.max_abs());
        prop_assert!(u.a.max_abs_diff(&-&t.a) <= 1e-12 * t.a.max_abs());
    }

    #[test]
    fn handedness_flips_chiral_part(seed in any::<u64>(), states in 1usize..=4, intensity in 1e6..1e12f64) {
        let m = random_chiral_model(&mut ChaCha8Rng::seed_from_u64(seed), states, "h");
        let t = response_tensors(&m, omega()).unwrap();
        let l = energy_shift(&beam(Handedness::Left), &intensity, &t).unwrap();
        let r = energy_shift(&beam(Handedness::Right), &intensity, &t).unwrap();
        prop_assert!((l.part_g + r.part_g).abs() <= 1e-12 * l.part_g.abs());
        prop_assert!((l.part_alpha - r.part_alpha).abs() <= 1e-12 * l.part_alpha.abs());
    }

    #[test]
    fn linear_light_does_not_discriminate(seed in any::<u64>(), angle in 0.0..std::f64::consts::PI) {
        let m = random_chiral_model(&mut ChaCha8Rng::seed_from_u64(seed), 2, "lin");
        let t = response_tensors(&m, omega()).unwrap();
        let s = energy_shift(&beam(Handedness::Linear { angle }), &1e10, &t).unwrap();
        prop_assert!(s.part_g.abs() <= 1e-10 * s.part_alpha.abs());
    }

    #[test]
    fn enantiomers_shift_oppositely(seed in any::<u64>(), states in 1usize..=4) {
        let m = random_chiral_model(&mut ChaCha8Rng::seed_from_u64(seed), states, "e");
        let (l, r) = (beam(Handedness::Left), beam(Handedness::Right));
        let d = discriminatory_shift(&response_tensors(&m, omega()).unwrap(), &l, &r, &1e10).unwrap();
        let dm = discriminatory_shift(&response_tensors(&mirror_molecule(&m), omega()).unwrap(), &l, &r, &1e10).unwrap();
        prop_assert!((d + dm).abs() <= 1e-12 * d.abs());
    }
}
