use proptest::prelude::*;

use qalu::pauli::{cnot_propagate, depolarizing_noise, hadamard_propagate};
use qalu::purify::{extract_tensor_d, extract_tensor_s, Purifier};
use qalu::threshold::{check_ft, q_values, QTuple, ThresholdConditions};
use qalu::ttg::{ttg_table, TtgType};
use qalu::{ChannelParams, FidelityVector, NoiseConvention, NoiseParams, PauliLabel, PumpSchedule};

fn label() -> impl Strategy<Value = PauliLabel> {
    (0u8..4).prop_map(|i| PauliLabel::new(i).unwrap())
}

fn vector() -> impl Strategy<Value = FidelityVector> {
    prop::array::uniform4(1e-3f64..1.0).prop_map(|raw| FidelityVector::normalize(raw, "strategy").unwrap().0)
}

fn small_vector() -> impl Strategy<Value = FidelityVector> {
    prop::array::uniform3(0.0f64..1e-2).prop_map(|e| FidelityVector::new([1.0 - e[0] - e[1] - e[2], e[0], e[1], e[2]]).unwrap())
}

fn uniform(p_g: f64, p_m: f64) -> NoiseParams {
    depolarizing_noise(p_g, p_m, NoiseConvention::Uniform).unwrap()
}

fn mix(a: &FidelityVector, b: &FidelityVector, t: f64) -> FidelityVector {
    let (a, b) = (a.as_array(), b.as_array());
    FidelityVector::new(std::array::from_fn(|i| t * a[i] + (1.0 - t) * b[i])).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #[test]
    fn label_algebra(a in label(), b in label(), c in label()) {
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(a * a, PauliLabel::I);
        let (x, y) = cnot_propagate(a, b);
        prop_assert_eq!(cnot_propagate(x, y), (a, b));
        prop_assert_eq!(hadamard_propagate(hadamard_propagate(a)), a);
    }

    #[test]
    fn selection_outputs_normalized(f in vector(), g in vector(), h in vector(), p_g in 0.0f64..0.2, p_m in 0.0f64..0.1) {
        let noise = uniform(p_g, p_m);
        let (out, p) = extract_tensor_s(&noise).select(&f, &g).unwrap();
        prop_assert!((out.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p > 0.0 && p <= 1.0);
        let (out, r) = extract_tensor_d(&noise).select(&f, &g, &h).unwrap();
        prop_assert!((out.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(r > 0.0 && r <= 1.0);
    }

    #[test]
    fn selection_is_multilinear(f1 in vector(), f2 in vector(), g in vector(), h in vector(), t in 0.0f64..1.0, p_g in 0.0f64..0.1) {
        let noise = uniform(p_g, p_g);
        let s = extract_tensor_s(&noise);
        let d = extract_tensor_d(&noise);
        let f = mix(&f1, &f2, t);
        let comb = |a: [f64; 4], b: [f64; 4]| -> Vec<f64> { (0..4).map(|i| t * a[i] + (1.0 - t) * b[i]).collect() };
        prop_assert!(close(&s.apply(&f, &g), &comb(s.apply(&f1, &g), s.apply(&f2, &g)), 1e-12));
        prop_assert!(close(&s.apply(&g, &f), &comb(s.apply(&g, &f1), s.apply(&g, &f2)), 1e-12));
        prop_assert!(close(&d.apply(&f, &g, &h), &comb(d.apply(&f1, &g, &h), d.apply(&f2, &g, &h)), 1e-12));
        prop_assert!(close(&d.apply(&g, &h, &f), &comb(d.apply(&g, &h, &f1), d.apply(&g, &h, &f2)), 1e-12));
    }

    #[test]
    fn pumped_pairs_normalized(fid in 0.6f64..1.0, p in 0.0f64..5e-3, n1 in 0u32..4, m1 in 0u32..4, m2 in 0u32..6) {
        let r = Purifier::new(&uniform(p, p)).pump(&ChannelParams::new(fid).unwrap(), PumpSchedule::double(n1, m1, m2)).unwrap();
        prop_assert!((r.f_out.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for x in r.success_probs.to_vec() {
            prop_assert!(x > 0.0 && x <= 1.0);
        }
    }

    #[test]
    fn ttg_tables_affine(f1 in small_vector(), f2 in small_vector(), t in 0.0f64..1.0, pa in 0.0f64..1e-2, pb in 0.0f64..1e-2, ma in 0.0f64..1e-2, mb in 0.0f64..1e-2) {
        let f = mix(&f1, &f2, t);
        let lin = |a: f64, b: f64| t * a + (1.0 - t) * b;
        let noise = uniform(lin(pa, pb), lin(ma, mb));
        for kind in TtgType::ALL {
            let whole = ttg_table(kind, &f, &noise).to_vec();
            let a = ttg_table(kind, &f1, &uniform(pa, ma)).to_vec();
            let b = ttg_table(kind, &f2, &uniform(pb, mb)).to_vec();
            let parts: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lin(*x, *y)).collect();
            prop_assert!(close(&whole, &parts, 1e-15));
        }
    }

    #[test]
    fn check_ft_is_monotone(q in prop::array::uniform6(0.0f64..0.03), k in 0usize..6, s in 0.0f64..1.0, margin in 0.1f64..1.0) {
        let cond = ThresholdConditions::with_margin(margin).unwrap();
        let q0 = QTuple { qa: q[0], qb: q[1], qc: q[2], qab: q[3], qac: q[4], qbb: q[5] };
        let mut v = q0.to_vec();
        v[k] *= s;
        let q1 = QTuple { qa: v[0], qb: v[1], qc: v[2], qab: v[3], qac: v[4], qbb: v[5] };
        prop_assert!(!check_ft(&q0, &cond) || check_ft(&q1, &cond));
    }

    #[test]
    fn q_values_shape(f in small_vector(), p_g in 0.0f64..1e-2, p_m in 0.0f64..1e-2) {
        let q = q_values(&f, p_g, p_m);
        prop_assert!(q.to_vec().iter().all(|&x| x >= 0.0));
        prop_assert!(q.qab == q.qac && q.qac == q.qbb);
    }
}

#[test]
fn noiseless_fixed_points() {
    let noise = NoiseParams::noiseless();
    let perfect = ChannelParams::new(1.0).unwrap();
    let p = FidelityVector::PERFECT;
    assert_eq!(extract_tensor_s(&noise).select(&p, &p).unwrap(), (p, 1.0));
    assert_eq!(extract_tensor_d(&noise).select(&p, &p, &p).unwrap(), (p, 1.0));
    let purifier = Purifier::new(&noise);
    for s in [PumpSchedule::single(3, 4), PumpSchedule::double(1, 2, 2), PumpSchedule::double(3, 4, 14)] {
        let r = purifier.pump(&perfect, s).unwrap();
        assert_eq!(r.f_out, p);
        assert_eq!(r.net_success(), 1.0);
    }
}
