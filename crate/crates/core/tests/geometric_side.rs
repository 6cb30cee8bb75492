use heegner_core::kuznetsov::{geometric_h_range, geometric_side, HTable, SpectralWeight};

#[test]
fn geometric_side_examples() {
    let w = SpectralWeight::new(5.0, 2.0, 4).unwrap();
    let (lo, hi, _) = geometric_h_range(1000.0, w.t);
    let table = HTable::new(&w, lo, hi).unwrap();

    let g = geometric_side(3, -7, 1000.0, &table).unwrap();
    assert!(g.value.is_finite() && g.ratio <= 50.0, "{g:?}");

    let one = geometric_side(1, -7, 100.0, &table).unwrap();
    let three = geometric_side(3, -7, 100.0, &table).unwrap();
    assert!(three.value.abs() < 0.75 * one.value.abs(), "{one:?} {three:?}");

    for (d1, d2) in [(-7i64, -15i64), (-23, -47)] {
        let a = geometric_side(3, d1, 100.0, &table).unwrap().ratio;
        let b = geometric_side(3, d2, 100.0, &table).unwrap().ratio;
        assert!(a / b < 4.0 && b / a < 4.0, "{d1}: {a}, {d2}: {b}");
    }
    assert!(geometric_side(3, -12, 100.0, &table).is_err());
    assert!(geometric_side(3, -7, 2e5, &table).is_err());
}
