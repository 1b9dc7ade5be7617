//! The core runs in single precision too.

use racebank::bank::{predict_all, sample_bank, select_best};
use racebank::dynamics::{ControlInput, Dbm, VehicleFixedParams};
use racebank::track::{generate_synthetic_track, TrackKind};
use racebank::{Input32, Model, Model32, State, State32, Theta, Theta32, TrackF32, TrackF64, Window32};

fn models() -> (Model, Model32) {
    let m64: Model = Dbm::new(VehicleFixedParams::default(), Theta::default(), 0.02);
    let m32: Model32 = Dbm::new(VehicleFixedParams::default(), Theta32::default(), 0.02);
    (m64, m32)
}

#[test]
fn f32_rollout_tracks_f64() {
    let (m64, m32) = models();
    let mut x64 = State::from_array([0.0, 0.0, 0.3, 1.5, 0.0, 0.0, 0.0]);
    let mut x32: State32 = x64.cast();
    for k in 0..100 {
        let u = ControlInput::new(0.4, if k < 50 { 0.004 } else { -0.004 });
        let u32: Input32 = ControlInput::new(u.d as f32, u.ddelta as f32);
        x64 = m64.advance(&x64, &u, 0.02, 4).unwrap();
        x32 = m32.advance(&x32, &u32, 0.02, 4).unwrap();
    }
    let back: State = x32.cast();
    for (a, b) in back.to_array().iter().zip(x64.to_array()) {
        assert!((a - b).abs() <= 1e-3 * (1.0 + b.abs()), "{back:?} vs {x64:?}");
    }
}

#[test]
fn f32_bank_recovers_planted_member() {
    let (_, m32) = models();
    let bank = sample_bank(&Theta32::default(), 1.5, 500, 11).unwrap();
    let planted = 123;
    let plant = m32.with_theta(bank.thetas[planted]);
    let mut window = Window32::new(10, bank.len(), [1.0; 7]).unwrap();
    let mut x = State32::from_array([0.0, 0.0, 0.0, 1.2, 0.0, 0.0, 0.0]);
    for k in 0..30 {
        let u: Input32 = ControlInput::new(0.3, 0.02 * ((k as f32) * 0.7).sin());
        let preds = predict_all(&bank, &m32, &x, &u, 0.02);
        x = plant.advance(&x, &u, 0.02, 1).unwrap();
        window.update(&x, &preds).unwrap();
        if window.is_warm() {
            assert_eq!(select_best(&window).unwrap(), planted);
        }
    }
}

#[test]
fn f32_track_matches_f64() {
    let a: TrackF64 = generate_synthetic_track(TrackKind::Oval, 1.0, 300).unwrap();
    let b: TrackF32 = generate_synthetic_track(TrackKind::Oval, 1.0, 300).unwrap();
    assert!((a.length() - b.length() as f64).abs() < 1e-4);
    let p = b.project([0.3, -0.45], None);
    let q = a.project([0.3, -0.45], None);
    assert!((p.s as f64 - q.s).abs() < 1e-4 && (p.e_y as f64 - q.e_y).abs() < 1e-5);
}
