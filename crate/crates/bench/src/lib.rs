//! Shared fixtures for the criterion benches.

use cmtext::labels::{generate_labels, LabelBundle, LabelConfig};
use cmtext::synth::{generate_scene, Scene, SceneConfig};

/// Seeded `size x size` scene with `n` instances (a quarter rotated, a
/// quarter sectors) and its labels at scale 1.
pub fn labelled_scene(size: usize, n: usize, seed: u64) -> (Scene, LabelBundle) {
    let mut sc = SceneConfig::new(size, size);
    sc.n_sectors = n / 4;
    sc.n_rotated = n / 4;
    sc.n_rects = n - sc.n_sectors - sc.n_rotated;
    let scene = generate_scene(&sc, seed).expect("scene fits");
    let cfg = LabelConfig {
        scale: 1,
        ..Default::default()
    };
    let labels = generate_labels(&scene.instances, size, size, &cfg).expect("labels");
    (scene, labels)
}
