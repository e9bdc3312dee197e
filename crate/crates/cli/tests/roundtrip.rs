use gensphere_cli::commands::build;
use gensphere_cli::config::DistConfig;
use gensphere_cli::container::ContourFile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn contour_file_round_trip_is_bitwise() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/two_bumps.toml")).unwrap();
    let config = DistConfig::from_toml(&text).unwrap();
    let built = build(&config, true).unwrap();
    let json = built.file.to_json();
    let loaded = ContourFile::from_json(&json).unwrap();
    assert_eq!(loaded, built.file);
    let original = gensphere::GenSphereDist::new(built.contour.clone(), config.radial.clone().unwrap()).unwrap();
    let restored = loaded.distribution().unwrap();
    assert_eq!(restored.contour().k_c().to_bits(), original.contour().k_c().to_bits());
    assert_eq!(restored.contour().weights(), original.contour().weights());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let x = [rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)];
        assert_eq!(restored.density_at(&x).unwrap().to_bits(), original.density_at(&x).unwrap().to_bits());
    }
    let a = original.simulate(200, &mut ChaCha8Rng::seed_from_u64(9));
    let b = restored.simulate(200, &mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(a, b);
    assert_eq!(ContourFile::from_json(&loaded.to_json()).unwrap().to_json(), json);
}
