use celf::formats::*;
use celf::pngio::{decode_gray, encode_gray, read_lightfield_dir, write_lightfield_dir, BitDepth};
use celf_core::nn::{Conv2d, ReconNet};
use celf_core::sensor::{EventRecord, Transition};
use celf_core::{AperturePattern, EventImage, EventStream, LightField, VIEWS};
use proptest::prelude::*;

fn f32_unit() -> impl Strategy<Value = f64> {
    (0u32..=1 << 24).prop_map(|k| (k as f32 / (1u32 << 24) as f32) as f64)
}

fn lightfield() -> impl Strategy<Value = LightField> {
    (1usize..4, 1usize..4).prop_flat_map(|(w, h)| {
        prop::collection::vec(f32_unit(), w * h * VIEWS).prop_map(move |d| LightField::from_vec(w, h, d).unwrap())
    })
}

fn stream() -> impl Strategy<Value = EventStream> {
    prop::collection::vec((0u16..5, 0u16..4, 0u32..1000, prop::bool::ANY), 0..40).prop_map(|raw| {
        let mut records: Vec<EventRecord> = raw
            .into_iter()
            .map(|(x, y, t, p)| EventRecord {
                x,
                y,
                t,
                polarity: if p { 1 } else { -1 },
            })
            .collect();
        records.sort_by_key(|r| (r.t, r.y, r.x));
        EventStream::new(5, 4, records).unwrap()
    })
}

fn event_image() -> impl Strategy<Value = EventImage> {
    (1usize..6, 1usize..6, 0usize..20).prop_flat_map(|(w, h, t)| {
        prop::collection::vec(i16::MIN as i32..=i16::MAX as i32, w * h).prop_map(move |d| {
            let label = (t > 0).then(|| Transition::consecutive(t));
            EventImage::from_vec(w, h, d, label).unwrap()
        })
    })
}

fn f32_real() -> impl Strategy<Value = f64> {
    (-1000.0f32..1000.0).prop_map(f64::from)
}

fn network() -> impl Strategy<Value = ReconNet> {
    prop::collection::vec(1usize..4, 0..3).prop_flat_map(|hidden| {
        let mut widths = vec![2];
        widths.extend(hidden);
        widths.push(VIEWS);
        let shapes: Vec<(usize, usize)> = widths.windows(2).map(|w| (w[0], w[1])).collect();
        shapes
            .into_iter()
            .map(|(ci, co)| {
                (
                    prop::collection::vec(f32_real(), ci * co * 9),
                    prop::collection::vec(f32_real(), co),
                )
                    .prop_map(move |(w, b)| Conv2d::from_parts(ci, co, w, b).unwrap())
            })
            .collect::<Vec<_>>()
            .prop_map(|convs| ReconNet::from_convs(convs).unwrap())
    })
}

fn patterns() -> impl Strategy<Value = Vec<AperturePattern>> {
    prop::collection::vec(
        prop::collection::vec(f32_unit(), VIEWS).prop_map(|v| AperturePattern::from_slice(&v).unwrap()),
        0..6,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lightfield_round_trip(lf in lightfield()) {
        let bytes = encode_lightfield(&lf).unwrap();
        let back = decode_lightfield(&bytes).unwrap();
        prop_assert_eq!(&back, &lf);
        prop_assert_eq!(encode_lightfield(&back).unwrap(), bytes);
    }

    #[test]
    fn stream_round_trip(s in stream()) {
        let bytes = encode_stream(&s);
        let back = decode_stream(&bytes).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(encode_stream(&back), bytes);
    }

    #[test]
    fn event_image_round_trip(img in event_image()) {
        let bytes = encode_event_image(&img).unwrap();
        let back = decode_event_image(&bytes).unwrap();
        prop_assert_eq!(&back, &img);
        prop_assert_eq!(encode_event_image(&back).unwrap(), bytes);
    }

    #[test]
    fn network_round_trip(net in network()) {
        let bytes = encode_network(&net);
        let back = decode_network(&bytes).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(encode_network(&back), bytes);
    }

    #[test]
    fn pattern_round_trip(p in patterns()) {
        let bytes = encode_patterns(&p);
        let back = decode_patterns(&bytes).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(encode_patterns(&back), bytes);
    }

    #[test]
    fn decoders_reject_garbage(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        // Arbitrary bytes must never panic.
        let _ = decode_lightfield(&bytes);
        let _ = decode_stream(&bytes);
        let _ = decode_event_image(&bytes);
        let _ = decode_network(&bytes);
        let _ = decode_patterns(&bytes);
    }

    #[test]
    fn png_16bit_round_trip(levels in prop::collection::vec(0u16..=u16::MAX, 12)) {
        let values: Vec<f64> = levels.iter().map(|&k| k as f64 / 65535.0).collect();
        let bytes = encode_gray(4, 3, &values, BitDepth::Sixteen).unwrap();
        let (w, h, depth, back) = decode_gray(&bytes).unwrap();
        prop_assert_eq!((w, h, depth), (4, 3, BitDepth::Sixteen));
        prop_assert_eq!(back, values);
    }
}

#[test]
fn truncated_files_are_rejected() {
    let lf = LightField::constant(2, 2, 0.5).unwrap();
    let bytes = encode_lightfield(&lf).unwrap();
    for cut in [0, 7, 8, 15, bytes.len() - 1] {
        assert!(decode_lightfield(&bytes[..cut]).is_err(), "cut at {cut}");
    }
}

#[test]
fn stream_decoder_validates_records() {
    let s = EventStream::new(
        2,
        2,
        vec![EventRecord {
            x: 1,
            y: 1,
            t: 5,
            polarity: 1,
        }],
    )
    .unwrap();
    let mut bytes = encode_stream(&s);
    // x out of bounds
    bytes[20] = 9;
    assert!(decode_stream(&bytes).is_err());
}

#[test]
fn lightfield_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (depth, scale) in [(BitDepth::Eight, 255.0), (BitDepth::Sixteen, 65535.0)] {
        let lf = LightField::from_fn(5, 3, |x, y, u, v| ((x * 7 + y * 3 + u * 5 + v * 11) % 256) as f64 / 255.0)
            .unwrap();
        let quantized = LightField::from_fn(5, 3, |x, y, u, v| (lf.get(x, y, u, v) * scale).round() / scale).unwrap();
        let path = dir.path().join(format!("lf{}", depth.bits()));
        write_lightfield_dir(&path, &quantized, depth).unwrap();
        assert!(path.join("view_7_7.png").is_file());
        assert_eq!(read_lightfield_dir(&path).unwrap(), quantized);
    }
}

#[test]
fn atomic_write_replaces_whole_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.ap1");
    write_patterns(&path, &[AperturePattern::open(), AperturePattern::black()]).unwrap();
    write_patterns(&path, &[AperturePattern::black()]).unwrap();
    assert_eq!(read_patterns(&path).unwrap(), vec![AperturePattern::black()]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
