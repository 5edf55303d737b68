use hawksmoor::camera::DepthConvention;
use hawksmoor::fit::{fit_camera_height, fit_objective, synthesize_annotations, FitOptions, ImagePlacement, PhotoAnnotation};
use hawksmoor::{generate_lattice, CofferLattice, Preset};

fn preset(name: &str) -> CofferLattice {
    generate_lattice(&Preset::builtin(name).unwrap().lattice).unwrap()
}

fn scan(l: &CofferLattice, ann: &PhotoAnnotation, opts: &FitOptions) -> Vec<(f64, f64)> {
    (0..200)
        .map(|i| {
            let h = 0.1 * 100f64.powf(i as f64 / 199.0);
            (h, fit_objective(l, ann, opts, h).unwrap())
        })
        .collect()
}

#[test]
fn unique_interior_minimum_on_noiseless_data() {
    for (name, truth) in [("pantheon", 0.95), ("buttery", 1.2)] {
        let l = preset(name);
        let ann = synthesize_annotations(&l, truth, DepthConvention::ViewingAxis, ImagePlacement::default(), 0.0, 0).unwrap();
        let opts = FitOptions::default();
        let costs = scan(&l, &ann, &opts);
        let best = costs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap()
            .0;
        assert!(best > 0 && best < 199, "{name}: minimum at the edge");
        // strictly decreasing up to the minimum and strictly increasing after
        for w in costs[..=best].windows(2) {
            assert!(w[1].1 < w[0].1, "{name}: second descent before {}", w[1].0);
        }
        for w in costs[best..].windows(2) {
            assert!(w[1].1 > w[0].1, "{name}: second dip after {}", w[0].0);
        }
        assert!((costs[best].0 / truth - 1.0).abs() < 0.03);
    }
}

#[test]
fn residual_grows_with_noise() {
    let l = preset("pantheon");
    let opts = FitOptions::default();
    let mut last = -1.0;
    for sigma in [0.0, 1.0, 2.0, 4.0, 8.0] {
        let ann = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), sigma, 42).unwrap();
        let r = fit_camera_height(&l, &ann, &opts).unwrap();
        assert!(r.rms_residual >= last, "sigma {sigma}: {} < {last}", r.rms_residual);
        assert!(r.rms_residual >= 0.0);
        last = r.rms_residual;
    }
}

#[test]
fn estimate_stays_in_search_interval() {
    let l = preset("buttery");
    let ann = synthesize_annotations(&l, 1.2, DepthConvention::ViewingAxis, ImagePlacement::default(), 2.0, 5).unwrap();
    for search in [(0.2, 5.0), (1.5, 3.0), (0.1, 0.8)] {
        let r = fit_camera_height(&l, &ann, &FitOptions { search, ..Default::default() }).unwrap();
        assert!(r.h_over_r >= search.0 && r.h_over_r <= search.1);
        let should_warn = !(search.0 < 1.2 && 1.2 < search.1);
        assert_eq!(r.boundary_warning, should_warn, "{search:?}");
    }
}

#[test]
fn fit_report_serializes_all_fields() {
    let l = preset("pantheon");
    let ann = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), 1.0, 9).unwrap();
    let r = fit_camera_height(&l, &ann, &FitOptions::default()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["h_over_R", "m0", "similarity", "rms_residual", "residuals", "boundary_warning"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["residuals"].as_array().unwrap().len(), ann.entries.len());
}
