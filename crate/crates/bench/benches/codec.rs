use std::hint::black_box;

use chebwave::codec::{compress_image, decompress_image, quantize, spiht_decode, spiht_encode};
use chebwave::transform::decompose;
use chebwave::{make_filter_bank, ColorImage, ImagePlane, WaveletKind};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn test_image(side: usize) -> ColorImage {
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    ColorImage::new(std::array::from_fn(|ch| {
        ImagePlane::from_fn(side, side, |r, c| {
            let smooth =
                100.0 + 90.0 * ((r as f64) / (13.0 + ch as f64)).sin() * ((c as f64) / 11.0).cos();
            (smooth + rng.random_range(-10.0..10.0)).clamp(0.0, 255.0)
        })
    }))
    .unwrap()
}

fn bench_spiht(c: &mut Criterion) {
    let bank = make_filter_bank(WaveletKind::SecondChebyshev);
    let image = test_image(128);
    let pyramid = decompose(&image.planes()[0], &bank, 3).unwrap();
    let grid = quantize(&pyramid, 4).unwrap();
    let stream = spiht_encode(&grid, 17).unwrap();

    c.bench_function("spiht_encode_128_l3_17p", |b| {
        b.iter(|| spiht_encode(black_box(&grid), 17).unwrap())
    });
    c.bench_function("spiht_decode_128_l3_17p", |b| {
        b.iter(|| spiht_decode(black_box(&stream), u32::from(stream.passes)).unwrap())
    });
}

fn bench_image_round_trip(c: &mut Criterion) {
    let image = test_image(128);
    let compressed = compress_image(&image, WaveletKind::SecondChebyshev, 3, 4, 17).unwrap();
    c.bench_function("compress_image_128_rgb", |b| {
        b.iter(|| {
            compress_image(black_box(&image), WaveletKind::SecondChebyshev, 3, 4, 17).unwrap()
        })
    });
    c.bench_function("decompress_image_128_rgb", |b| {
        b.iter(|| decompress_image(black_box(&compressed), 17).unwrap())
    });
}

criterion_group!(benches, bench_spiht, bench_image_round_trip);
criterion_main!(benches);
