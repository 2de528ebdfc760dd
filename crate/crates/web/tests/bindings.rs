use touchscan_web::{scan_wing, solve_arm, sphere_test};

#[test]
fn arm_tip_lands_on_target() {
    let v = solve_arm(320.0, 40.0, 15.0).unwrap();
    assert_eq!(v.len(), 6 + 15);
    let tip = &v[18..21];
    assert!((tip[0] - 320.0).abs() < 1e-9 && (tip[1] - 40.0).abs() < 1e-9 && (tip[2] - 15.0).abs() < 1e-9);
    assert!(solve_arm(900.0, 0.0, 0.0).unwrap_err().contains("workspace"));
}

#[test]
fn default_spacing_preview() {
    let p = scan_wing(6.0, 0.0, 0.0, 1).unwrap();
    assert_eq!((p.rows(), p.cols()), (20, 25));
    assert_eq!(p.triangles(), 912);
    assert_eq!(p.points().len(), 3 * 500);
    let xs = p.cross_section(13);
    let split = xs.iter().position(|v| v.is_nan()).unwrap();
    assert_eq!(split, 3 * 20);
    // zero noise: measured equals truth
    assert!(xs[..split].chunks(3).all(|c| c[1] == c[2]));
    assert!(scan_wing(0.5, 0.0, 0.0, 1).is_err());
}

#[test]
fn sphere_test_reports_nine_rows() {
    let v = sphere_test(25.0, 0.0, 3).unwrap();
    assert_eq!(v.len(), 10);
    assert!(v.iter().all(|d| *d < 1e-9));
    assert!(sphere_test(80.0, 0.0, 3).is_err());
}
