mod common;

use diagkill::flow::{Flow, FlowError};
use diagkill::killing::FrameVectorField;
use diagkill::metric::{DiagonalMetric, DomainBox};
use diagkill::{FamilyParams, FamilyTag};

fn euclid() -> DiagonalMetric {
    DiagonalMetric::euclidean(DomainBox::cube(-2.0, 2.0).unwrap())
}

#[test]
fn rotation_flow_matches_closed_form_with_fourth_order_error() {
    let m = euclid();
    let v = FrameVectorField::from_strs("-x2", "x1", "0").unwrap();
    let flow = Flow::new(&m, &v);
    let (p, t): ([f64; 3], f64) = ([0.7, -0.2, 0.4], 0.9);
    let exact = [p[0] * t.cos() - p[1] * t.sin(), p[0] * t.sin() + p[1] * t.cos(), p[2]];
    let err = |steps| {
        let q = flow.endpoint(p, t, steps).unwrap();
        (0..3).map(|i| (q[i] - exact[i]).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(4), err(8));
    let order = (e1 / e2).log2();
    assert!((order - 4.0).abs() < 0.3, "observed order {order}");
    assert!(err(200) < 1e-11);
}

#[test]
fn group_law() {
    let m = common::metric_for(FamilyTag::Te1IV);
    let v = diagkill::families::generate(
        &m,
        FamilyTag::Te1IV,
        &FamilyParams::positional(vec![0.3, -0.2, 0.1, 0.4]),
    )
    .unwrap();
    let flow = Flow::new(&m, &v);
    let p = [0.1, 0.2, -0.3];
    let (s, t) = (0.15, 0.1);
    let composed = flow.endpoint(flow.endpoint(p, s, 150).unwrap(), t, 100).unwrap();
    let direct = flow.endpoint(p, s + t, 250).unwrap();
    for i in 0..3 {
        assert!((composed[i] - direct[i]).abs() < 1e-11);
    }
    // backwards undoes forwards
    let back = flow.endpoint(flow.endpoint(p, 0.2, 100).unwrap(), -0.2, 100).unwrap();
    for i in 0..3 {
        assert!((back[i] - p[i]).abs() < 1e-11);
    }
}

#[test]
fn killing_flows_are_isometries_and_shear_is_not() {
    for tag in [FamilyTag::ConstMetric, FamilyTag::Te1III, FamilyTag::SplitX1X2K3] {
        let m = common::metric_for(tag);
        let g = diagkill::families::FamilyGenerator::new(&m).unwrap();
        for v in g.basis(tag).unwrap() {
            let d = Flow::new(&m, &v).isometry_defect([0.2, -0.1, 0.3], 0.3, 60).unwrap();
            assert!(d <= 1e-6, "{tag}: {d}");
        }
    }
    let shear = FrameVectorField::from_strs("x2^2", "0", "0").unwrap();
    let d = Flow::new(&euclid(), &shear)
        .isometry_defect([0.0, 0.5, 0.0], 0.3, 60)
        .unwrap();
    assert!(d >= 1e-2);
}

#[test]
fn leaving_the_box_is_an_error() {
    let m = DiagonalMetric::euclidean(DomainBox::default());
    let v = FrameVectorField::from_strs("1", "0", "0").unwrap();
    let flow = Flow::new(&m, &v);
    assert!(matches!(
        flow.endpoint([0.5, 0.0, 0.0], 1.0, 10),
        Err(FlowError::TrajectoryLeftDomain { .. })
    ));
    assert!(matches!(
        flow.endpoint([0.5, 0.0, 0.0], 0.1, 0),
        Err(FlowError::ZeroSteps)
    ));
    let q = flow.endpoint([0.5, 0.0, 0.0], 0.25, 10).unwrap();
    assert!((q[0] - 0.75).abs() < 1e-15 && q[1] == 0.0 && q[2] == 0.0);
}
