use celf_core::algebra::{recover_intensities, virtual_event};
use celf_core::metrics::{data_rate, ssim, ImageView};
use celf_core::sensor::{
    gen_events_baseline, gen_events_ra, quantize, Quantizer, RefState, Transition,
};
use celf_core::lightfield::code_image_normalized;
use celf_core::{
    code_image, normalize, AperturePattern, CodedImage, EventImage,
    LightField, SensorConfig, VIEWS,
};
use proptest::prelude::*;

const W: usize = 3;
const H: usize = 2;

fn lightfield() -> impl Strategy<Value = LightField> {
    prop::collection::vec(0.0..=1.0f64, W * H * VIEWS)
        .prop_map(|d| LightField::from_vec(W, H, d).unwrap())
}

fn pattern() -> impl Strategy<Value = AperturePattern> {
    prop::collection::vec(0.0..=1.0f64, VIEWS).prop_map(|d| AperturePattern::from_slice(&d).unwrap())
}

fn image(pixels: usize) -> impl Strategy<Value = CodedImage> {
    prop::collection::vec(0.0..=1.0f64, pixels)
        .prop_map(move |d| CodedImage::from_vec(pixels, 1, d, true).unwrap())
}

fn event_images(count: usize, pixels: usize) -> impl Strategy<Value = Vec<EventImage>> {
    prop::collection::vec(prop::collection::vec(-50i32..=50, pixels), count).prop_map(move |all| {
        all.into_iter()
            .map(|d| EventImage::from_vec(pixels, 1, d, None).unwrap())
            .collect()
    })
}

proptest! {
    #[test]
    fn coding_is_linear(a in lightfield(), b in lightfield(), p in pattern(), alpha in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let beta = (1.0 - alpha) * t;
        let mixed = a.blend(alpha, &b, beta).unwrap();
        let lhs = code_image(&mixed, &p);
        let (ia, ib) = (code_image(&a, &p), code_image(&b, &p));
        for i in 0..W * H {
            let rhs = alpha * ia.as_slice()[i] + beta * ib.as_slice()[i];
            prop_assert!((lhs.as_slice()[i] - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn coding_is_monotone_in_the_pattern(lf in lightfield(), p in pattern(), bump in prop::collection::vec(0.0..=1.0f64, VIEWS)) {
        let larger: Vec<f64> = p.values().iter().zip(&bump).map(|(a, b)| (a + b).min(1.0)).collect();
        let q = AperturePattern::from_slice(&larger).unwrap();
        let (lo, hi) = (code_image(&lf, &p), code_image(&lf, &q));
        for (a, b) in lo.as_slice().iter().zip(hi.as_slice()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn normalized_images_stay_in_unit_range(lf in lightfield(), p in pattern()) {
        let img = normalize(&code_image(&lf, &p)).unwrap();
        prop_assert!(img.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(img, code_image_normalized(&lf, &p));
    }

    #[test]
    fn ste_matches_quantize(x in -1e6..1e6f64, g in -1e3..1e3f64) {
        prop_assert_eq!(Quantizer::StraightThrough.forward(x), quantize(x).unwrap() as f64);
        prop_assert_eq!(Quantizer::StraightThrough.backward(g), g);
    }

    #[test]
    fn baseline_residual_and_antisymmetry(prev in image(8), curr in image(8)) {
        let cfg = SensorConfig::noiseless();
        let t = Transition::consecutive(1);
        let fwd = gen_events_baseline(&prev, &curr, &cfg, t).unwrap();
        let back = gen_events_baseline(&curr, &prev, &cfg, t).unwrap();
        prop_assert_eq!(back.as_slice(), fwd.negated().as_slice().to_vec());
        for p in 0..8 {
            let gap = (curr.as_slice()[p] + cfg.epsilon).ln() - (prev.as_slice()[p] + cfg.epsilon).ln();
            prop_assert!((gap - cfg.tau * fwd.as_slice()[p] as f64).abs() < cfg.tau);
        }
    }

    #[test]
    fn ra_reference_telescopes(frames in prop::collection::vec(image(6), 1..6)) {
        let cfg = SensorConfig::noiseless();
        let mut state = RefState::black(6, 1, &cfg);
        let mut sums = [0i64; 6];
        for (k, img) in frames.iter().enumerate() {
            let (e, next) = gen_events_ra(img, &state, &cfg, Transition::consecutive(k + 1)).unwrap();
            state = next;
            for p in 0..6 {
                sums[p] += e.as_slice()[p] as i64;
                let expected = cfg.epsilon.ln() + cfg.tau * sums[p] as f64;
                prop_assert!((state.log_ref()[p] - expected).abs() < 1e-9);
                let actual = (img.as_slice()[p] + cfg.epsilon).ln();
                prop_assert!((actual - state.log_ref()[p]).abs() < cfg.tau);
            }
        }
    }

    #[test]
    fn brighter_frames_never_emit_fewer_events(base in image(8), bump in prop::collection::vec(0.0..=1.0f64, 8)) {
        let cfg = SensorConfig::noiseless();
        let brighter: Vec<f64> = base.as_slice().iter().zip(&bump).map(|(a, b)| (a + b).min(1.0)).collect();
        let brighter = CodedImage::from_vec(8, 1, brighter, true).unwrap();
        let black = RefState::black(8, 1, &cfg);
        let t = Transition::consecutive(1);
        let (lo, _) = gen_events_ra(&base, &black, &cfg, t).unwrap();
        let (hi, _) = gen_events_ra(&brighter, &black, &cfg, t).unwrap();
        for (a, b) in lo.as_slice().iter().zip(hi.as_slice()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn noisy_generation_is_deterministic(prev in image(8), curr in image(8), seed in any::<u64>()) {
        let cfg = SensorConfig { seed, ..SensorConfig::default() };
        let t = Transition::consecutive(2);
        prop_assert_eq!(
            gen_events_baseline(&prev, &curr, &cfg, t).unwrap(),
            gen_events_baseline(&prev, &curr, &cfg, t).unwrap()
        );
    }

    #[test]
    fn virtual_events_compose(images in event_images(5, 4), a in 1usize..=6, b in 1usize..=6, c in 1usize..=6) {
        let ab = virtual_event(&images, a, b).unwrap();
        let bc = virtual_event(&images, b, c).unwrap();
        let ac = virtual_event(&images, a, c).unwrap();
        let ba = virtual_event(&images, b, a).unwrap();
        for p in 0..4 {
            prop_assert_eq!(ab.as_slice()[p] + bc.as_slice()[p], ac.as_slice()[p]);
            prop_assert_eq!(ab.as_slice()[p], -ba.as_slice()[p]);
        }
        prop_assert!(virtual_event(&images, a, a).unwrap().is_zero());
    }

    #[test]
    fn recovery_is_increasing_in_the_event_sum(s in 0i32..20) {
        let cfg = SensorConfig::noiseless();
        let lo = EventImage::from_vec(1, 1, vec![s], None).unwrap();
        let hi = EventImage::from_vec(1, 1, vec![s + 1], None).unwrap();
        let r_lo = recover_intensities(&[lo], 1, &cfg).unwrap();
        let r_hi = recover_intensities(&[hi], 1, &cfg).unwrap();
        prop_assert_eq!(r_lo.images[0].as_slice()[0], 0.0);
        let (a, b) = (r_lo.images[1].as_slice()[0], r_hi.images[1].as_slice()[0]);
        prop_assert!(a < b || b == 1.0);
    }

    #[test]
    fn ssim_is_symmetric(a in prop::collection::vec(0.0..=1.0f64, 144), b in prop::collection::vec(0.0..=1.0f64, 144)) {
        let (va, vb) = (ImageView::new(12, 12, &a).unwrap(), ImageView::new(12, 12, &b).unwrap());
        let (ab, ba) = (ssim(va, vb).unwrap(), ssim(vb, va).unwrap());
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab <= 1.0 + 1e-12);
    }

    #[test]
    fn data_rate_is_linear(e in 0.01..100.0f64, k in 1.0..10.0f64) {
        let one = data_rate(e, 29).unwrap();
        let many = data_rate(e * k, 29).unwrap();
        prop_assert!((many.bits_per_sensor_pixel - k * one.bits_per_sensor_pixel).abs() < 1e-9 * many.bits_per_sensor_pixel);
        prop_assert!((one.bits_per_lf_pixel * 64.0 - one.bits_per_sensor_pixel).abs() < 1e-9);
    }
}
