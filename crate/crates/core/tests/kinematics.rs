use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use touchscan::kinematics::{
    forward_kinematics, inverse_kinematics, is_reachable, wrist_center, JointAngles, KinematicsError, Pose, RobotGeometry,
};

// 4x4 link-transform chain in tests/oracles/fk_chain.py, rows of the top 3x4 block
const FK_GOLDEN: [([f64; 6], [f64; 12]); 5] = [
    ([0.0, 0.0, 0.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 65.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 767.0]),
    (
        [30.0, 45.0, 60.0, 10.0, 20.0, 30.0],
        [
            -0.724809236840, -0.105166757773, 0.680875556362, 476.433152508320, 0.313286124467, 0.829880040865, 0.461682707052,
            279.869340342654, -0.613598707958, 0.547940754858, -0.568557433122, 288.410719930582,
        ],
    ),
    (
        [-120.0, 100.0, 150.0, -170.0, -140.0, 175.0],
        [
            -0.615888826212, 0.772434041278, -0.155005179337, -89.227663980690, -0.630055372767, -0.601038218347, -0.491714640145,
            -170.173493042092, -0.472981163466, -0.205179706503, 0.856848940622, 101.088259836852,
        ],
    ),
    (
        [90.0, 10.0, 90.0, 0.0, 90.0, 0.0],
        [
            0.0, -1.0, 0.0, 0.0, -0.984807753012, 0.0, -0.173648177667, 324.434642920439, 0.173648177667, 0.0, -0.984807753012,
            362.879926515810,
        ],
    ),
    (
        [15.5, 62.25, 133.75, -45.0, 30.0, -90.0],
        [
            0.843959817345, -0.270785536000, -0.463041056711, 231.361436007617, -0.499743785100, -0.710580202527, -0.495309928258,
            38.479395271096, -0.194905043447, 0.649423566920, -0.735024526644, 47.160615335756,
        ],
    ),
];

#[test]
fn forward_kinematics_matches_link_chain() {
    let geom = RobotGeometry::default();
    for (q, m) in FK_GOLDEN {
        let pose = forward_kinematics(&JointAngles::from_degrees(q), &geom);
        for r in 0..3 {
            for c in 0..3 {
                assert!((pose.rotation[(r, c)] - m[4 * r + c]).abs() < 1e-11, "{q:?} R[{r}{c}]");
            }
            assert!((pose.position[r] - m[4 * r + 3]).abs() < 1e-9, "{q:?} p[{r}]");
        }
    }
}

#[test]
fn golden_poses_invert() {
    let geom = RobotGeometry::default();
    for (q, _) in FK_GOLDEN.iter().skip(1) {
        let pose = forward_kinematics(&JointAngles::from_degrees(*q), &geom);
        let sol = inverse_kinematics(&pose, &geom).unwrap();
        let back = forward_kinematics(&sol.angles, &geom);
        assert!(back.position_error(&pose) < 1e-9);
        assert!(back.rotation_error(&pose) < 1e-9);
    }
}

#[test]
fn vertical_plane_reachability_sweep() {
    let geom = RobotGeometry::default();
    let (lo, hi) = ((geom.l2 - geom.d4).abs(), geom.l2 + geom.d4);
    let (mut reachable, mut shell_miss, mut limited) = (0, 0, 0);
    for ix in -60..=60 {
        for iz in -20..=80 {
            let p = Vector3::new(10.0 * ix as f64 + 0.5, 0.0, 10.0 * iz as f64 + 0.25);
            // tool down puts the wrist center d6 straight above the tip
            let r1 = (p.x.abs() - geom.l1).hypot(p.z + geom.d6 - geom.d1);
            let in_shell = lo <= r1 && r1 <= hi;
            let verdict = is_reachable(&p, &geom);
            match &verdict.reason {
                None => {
                    reachable += 1;
                    assert!(in_shell);
                    let sol = inverse_kinematics(&Pose::tool_down(p), &geom).unwrap();
                    assert!(geom.check_limits(&sol.angles).is_ok());
                    let back = forward_kinematics(&sol.angles, &geom);
                    assert!((back.position - p).norm() < 1e-9, "{p:?}");
                }
                Some(KinematicsError::Unreachable { .. }) => {
                    shell_miss += 1;
                    assert!(!in_shell, "{p:?}");
                }
                Some(KinematicsError::JointLimit { .. }) => limited += 1,
                Some(e) => panic!("unexpected {e}"),
            }
        }
    }
    assert!(reachable > 500 && shell_miss > 500 && limited > 100, "{reachable} {shell_miss} {limited}");
}

fn in_limit_angles() -> impl Strategy<Value = JointAngles> {
    let l = RobotGeometry::default_limits();
    (l[0].lo..l[0].hi, l[1].lo..l[1].hi, l[2].lo..l[2].hi, l[3].lo..l[3].hi, l[4].lo..l[4].hi, l[5].lo..l[5].hi)
        .prop_map(|(a, b, c, d, e, f)| JointAngles([a, b, c, d, e, f]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn round_trip(q in in_limit_angles()) {
        let geom = RobotGeometry::default();
        let pose = forward_kinematics(&q, &geom);
        let sol = inverse_kinematics(&pose, &geom).unwrap();
        let back = forward_kinematics(&sol.angles, &geom);
        prop_assert!(back.position_error(&pose) < 1e-9);
        prop_assert!(back.rotation_error(&pose) < 1e-9);
        prop_assert!(sol.angles.0[2] >= 0.0);
    }

    #[test]
    fn wrist_center_ignores_wrist_joints(q in in_limit_angles(), w in in_limit_angles()) {
        let geom = RobotGeometry::default();
        let mut q2 = q;
        q2.0[3..].copy_from_slice(&w.0[3..]);
        let a = wrist_center(&forward_kinematics(&q, &geom), &geom).0;
        let b = wrist_center(&forward_kinematics(&q2, &geom), &geom).0;
        prop_assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn base_rotation_shifts_theta1(q in in_limit_angles(), phi in -0.5f64..0.5) {
        let geom = RobotGeometry::default();
        let mut q = q;
        q.0[0] = q.0[0].clamp(-2.4, 2.4);
        let pose = forward_kinematics(&q, &geom);
        let rz = Matrix3::new(phi.cos(), -phi.sin(), 0.0, phi.sin(), phi.cos(), 0.0, 0.0, 0.0, 1.0);
        let turned = Pose::new(rz * pose.rotation, rz * pose.position).unwrap();
        let a = inverse_kinematics(&pose, &geom).unwrap().angles;
        let b = inverse_kinematics(&turned, &geom).unwrap().angles;
        prop_assert!((b.0[0] - a.0[0] - phi).abs() < 1e-9);
        for j in 1..6 {
            let d = (b.0[j] - a.0[j]).rem_euclid(std::f64::consts::TAU);
            prop_assert!(d.min(std::f64::consts::TAU - d) < 1e-8, "joint {} {} vs {}", j + 1, a.0[j], b.0[j]);
        }
    }
}
