//! Recovering the camera height from annotated photographs.
//!
//! For each candidate h/R the lattice is projected and aligned to the
//! annotated points by the optimal similarity transform (closed form). The
//! remaining one-dimensional misfit is scanned on a logarithmic grid and then
//! refined by golden-section search.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{CameraModel, DepthConvention};
use crate::error::{Error, Result};
use crate::lattice::{CofferLattice, SurfaceMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub m: i32,
    pub n: i32,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhotoAnnotation {
    pub entries: Vec<Annotation>,
    /// Image width and height in pixels, when known.
    pub image_size: Option<[f64; 2]>,
}

impl PhotoAnnotation {
    pub fn new(entries: Vec<Annotation>) -> Self {
        PhotoAnnotation {
            entries,
            image_size: None,
        }
    }

    pub fn distinct_rows(&self) -> usize {
        self.entries.iter().map(|a| a.m).collect::<BTreeSet<_>>().len()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for a in &self.entries {
            if !seen.insert((a.m, a.n)) {
                return Err(Error::InvalidAnnotations(format!(
                    "duplicate label ({}, {})",
                    a.m, a.n
                )));
            }
            if !(a.u.is_finite() && a.v.is_finite()) {
                return Err(Error::InvalidAnnotations(format!(
                    "non-finite coordinates for ({}, {})",
                    a.m, a.n
                )));
            }
        }
        if self.entries.len() < 6 {
            return Err(Error::InvalidAnnotations(format!(
                "need at least 6 annotated vertices, got {}",
                self.entries.len()
            )));
        }
        if self.distinct_rows() < 3 {
            return Err(Error::InvalidAnnotations(format!(
                "annotations must span at least 3 rows, got {}",
                self.distinct_rows()
            )));
        }
        Ok(())
    }

    /// Reads `m,n,u,v` CSV.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::parse("annotation CSV", e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["m", "n", "u", "v"] {
            return Err(Error::parse(
                "annotation CSV",
                format!("expected header m,n,u,v, found {}", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut entries = Vec::new();
        for (i, rec) in rdr.deserialize().enumerate() {
            let a: Annotation = rec.map_err(|e| Error::parse(format!("annotation CSV line {}", i + 2), e))?;
            entries.push(a);
        }
        Ok(PhotoAnnotation::new(entries))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for a in &self.entries {
            w.serialize(a).map_err(|e| Error::parse("annotation CSV", e))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// q ≈ scale · R(rotation) · p + translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: f64,
    pub translation: [f64; 2],
}

impl Similarity {
    pub fn identity() -> Self {
        Similarity {
            scale: 1.0,
            rotation: 0.0,
            translation: [0.0, 0.0],
        }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.rotation.sin_cos();
        [
            self.scale * (c * p[0] - s * p[1]) + self.translation[0],
            self.scale * (s * p[0] + c * p[1]) + self.translation[1],
        ]
    }
}

/// Least-squares similarity taking `model` onto `target`, and the remaining
/// sum of squared distances. Without rotation the scale may come out
/// negative, which is a half turn.
pub fn fit_similarity(model: &[[f64; 2]], target: &[[f64; 2]], allow_rotation: bool) -> (Similarity, f64) {
    assert_eq!(model.len(), target.len());
    let n = model.len() as f64;
    let mean = |pts: &[[f64; 2]]| {
        let s = pts.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
        [s[0] / n, s[1] / n]
    };
    let (pm, qm) = (mean(model), mean(target));
    let (mut a, mut b, mut pp, mut qq) = (0.0, 0.0, 0.0, 0.0);
    for (p, q) in model.iter().zip(target) {
        let (px, py) = (p[0] - pm[0], p[1] - pm[1]);
        let (qx, qy) = (q[0] - qm[0], q[1] - qm[1]);
        a += px * qx + py * qy;
        b += px * qy - py * qx;
        pp += px * px + py * py;
        qq += qx * qx + qy * qy;
    }
    if pp == 0.0 {
        let sim = Similarity {
            scale: 0.0,
            rotation: 0.0,
            translation: qm,
        };
        return (sim, qq);
    }
    let (scale, rotation, sse) = if allow_rotation {
        let r = a.hypot(b);
        (r / pp, b.atan2(a), qq - r * r / pp)
    } else {
        (a / pp, 0.0, qq - a * a / pp)
    };
    let mut sim = Similarity {
        scale,
        rotation,
        translation: [0.0, 0.0],
    };
    let rp = sim.apply(pm);
    sim.translation = [qm[0] - rp[0], qm[1] - rp[1]];
    (sim, sse.max(0.0))
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `rel_tol` times its midpoint.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..500 {
        if hi - lo <= rel_tol * 0.5 * (lo.abs() + hi.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Search interval for h/R.
    pub search: (f64, f64),
    /// Allow the image-frame rotation; defaults to on for domes and off for
    /// ceilings.
    pub allow_rotation: Option<bool>,
    pub scan_points: usize,
    pub rel_tol: f64,
    pub depth: DepthConvention,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            search: (0.1, 10.0),
            allow_rotation: None,
            scan_points: 48,
            rel_tol: 1e-4,
            depth: DepthConvention::ViewingAxis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointResidual {
    pub m: i32,
    pub n: i32,
    pub du: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(rename = "h_over_R")]
    pub h_over_r: f64,
    /// Row offset m₀ of the equivalent dome radial law, when h < R.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    pub mode: SurfaceMode,
    pub similarity: Similarity,
    pub rms_residual: f64,
    pub residuals: Vec<PointResidual>,
    /// The minimum lies at (or within tolerance of) an end of the search interval.
    pub boundary_warning: bool,
    pub search: (f64, f64),
}

struct Problem<'a> {
    lattice: &'a CofferLattice,
    points: Vec<[f64; 3]>,
    targets: Vec<[f64; 2]>,
    labels: Vec<(i32, i32)>,
    rotation: bool,
    depth: DepthConvention,
}

impl Problem<'_> {
    fn project(&self, h: f64) -> Option<Vec<[f64; 2]>> {
        let cam = CameraModel {
            h,
            f: 1.0,
            mode: self.lattice.mode(),
            principal_point: [0.0, 0.0],
            rotation: 0.0,
            depth: self.depth,
        };
        self.points.iter().map(|&p| cam.project_point(p).ok()).collect()
    }

    fn cost(&self, h_over_r: f64) -> f64 {
        let radius = self.lattice.map().profile().scale();
        match self.project(h_over_r * radius) {
            Some(model) => fit_similarity(&model, &self.targets, self.rotation).1,
            None => f64::INFINITY,
        }
    }
}

fn build_problem<'a>(
    lattice: &'a CofferLattice,
    annotations: &PhotoAnnotation,
    opts: &FitOptions,
) -> Result<Problem<'a>> {
    let mode = lattice.mode();
    if mode == SurfaceMode::Dome && annotations.distinct_rows() < 2 {
        return Err(Error::Unidentifiable(
            "dome annotations on a single ring are concyclic about the principal point".into(),
        ));
    }
    annotations.validate()?;
    let (lo, hi) = opts.search;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!("search interval must be positive, got {lo}:{hi}")));
    }
    let mut points = Vec::new();
    let mut targets = Vec::new();
    let mut labels = Vec::new();
    for a in &annotations.entries {
        let v = lattice
            .vertex(a.m, a.n)
            .ok_or(Error::MissingVertex { m: a.m, n: a.n })?;
        points.push(v.position);
        targets.push([a.u, a.v]);
        labels.push((a.m, a.n));
    }
    Ok(Problem {
        lattice,
        points,
        targets,
        labels,
        rotation: opts.allow_rotation.unwrap_or(mode == SurfaceMode::Dome),
        depth: opts.depth,
    })
}

/// Least-squares misfit (sum of squared pixel distances after the optimal
/// similarity) as a function of h/R.
pub fn fit_objective(
    lattice: &CofferLattice,
    annotations: &PhotoAnnotation,
    opts: &FitOptions,
    h_over_r: f64,
) -> Result<f64> {
    Ok(build_problem(lattice, annotations, opts)?.cost(h_over_r))
}

pub fn fit_camera_height(
    lattice: &CofferLattice,
    annotations: &PhotoAnnotation,
    opts: &FitOptions,
) -> Result<FitResult> {
    let problem = build_problem(lattice, annotations, opts)?;
    let (lo, hi) = opts.search;
    let k = opts.scan_points.max(3);
    let grid: Vec<f64> = (0..k)
        .map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64))
        .collect();
    let costs: Vec<f64> = grid.iter().map(|&h| problem.cost(h)).collect();
    let best = costs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    if !costs[best].is_finite() {
        return Err(Error::Unidentifiable(
            "no camera height in the search interval sees every annotated vertex".into(),
        ));
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(k - 1)];
    let (h, _) = golden_section(|h| problem.cost(h), a, b, opts.rel_tol);

    let radius = lattice.map().profile().scale();
    let model = problem.project(h * radius).expect("finite cost implies projectable");
    let (similarity, sse) = fit_similarity(&model, &problem.targets, problem.rotation);
    let residuals = model
        .iter()
        .zip(&problem.targets)
        .zip(&problem.labels)
        .map(|((p, q), &(m, n))| {
            let r = similarity.apply(*p);
            PointResidual {
                m,
                n,
                du: q[0] - r[0],
                dv: q[1] - r[1],
            }
        })
        .collect();
    let boundary_warning =
        best == 0 || best == k - 1 || (h - lo) <= opts.rel_tol * lo * 2.0 || (hi - h) <= opts.rel_tol * hi * 2.0;
    let m0 = match lattice.mode() {
        SurfaceMode::Dome if h < 1.0 => Some(h.atanh() * lattice.config().coffers_per_row as f64 / (2.0 * std::f64::consts::PI)),
        _ => None,
    };
    Ok(FitResult {
        h_over_r: h,
        m0,
        mode: lattice.mode(),
        similarity,
        rms_residual: (sse / model.len() as f64).sqrt(),
        residuals,
        boundary_warning,
        search: opts.search,
    })
}

/// 1 / sinh(2π(m + m₀)/N): the image radius of dome row m up to scale.
pub fn dome_radial_model(m: f64, coffers_per_row: usize, m0: f64) -> Result<f64> {
    if !(m + m0 > 0.0) {
        return Err(Error::ModelDomain(format!("m + m0 must be positive, got {}", m + m0)));
    }
    let n = coffers_per_row as f64;
    Ok(1.0 / (2.0 * std::f64::consts::PI * (m + m0) / n).sinh())
}

/// The row offset in h/R = tanh(2π m₀ / N).
pub fn dome_row_offset(h_over_r: f64, coffers_per_row: usize) -> Result<f64> {
    if !(h_over_r > 0.0 && h_over_r < 1.0) {
        return Err(Error::ModelDomain(format!(
            "h/R = tanh(2π m0/N) needs 0 < h/R < 1, got {h_over_r}"
        )));
    }
    Ok(h_over_r.atanh() * coffers_per_row as f64 / (2.0 * std::f64::consts::PI))
}

/// Dome image radius law for any camera height, up to scale. Below the
/// base radius this is [`dome_radial_model`]; at h = R it is e^(−2πm/N);
/// above, the continuation m₀ → m₀ + iN/4 turns sinh into cosh with
/// h/R = coth(2π m₀/N).
pub fn dome_radial_model_for_height(m: f64, coffers_per_row: usize, h_over_r: f64) -> Result<f64> {
    let n = coffers_per_row as f64;
    let k = 2.0 * std::f64::consts::PI / n;
    if h_over_r <= 0.0 || !h_over_r.is_finite() {
        return Err(Error::ModelDomain(format!("h/R must be positive, got {h_over_r}")));
    }
    if h_over_r < 1.0 {
        dome_radial_model(m, coffers_per_row, dome_row_offset(h_over_r, coffers_per_row)?)
    } else if h_over_r == 1.0 {
        Ok((-k * m).exp())
    } else {
        let m0 = (1.0 / h_over_r).atanh() / k;
        Ok(1.0 / (k * (m + m0)).cosh())
    }
}

/// Where synthetic annotations are placed in the image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagePlacement {
    pub width: f64,
    pub height: f64,
    /// Fraction of the smaller image dimension spanned by the projection.
    pub fill: f64,
    pub rotation: f64,
}

impl Default for ImagePlacement {
    fn default() -> Self {
        ImagePlacement {
            width: 1000.0,
            height: 1000.0,
            fill: 0.9,
            rotation: 0.0,
        }
    }
}

/// Annotations of every lattice vertex as seen by a camera at `h_over_r`,
/// centred in the image, with optional Gaussian pixel noise.
pub fn synthesize_annotations(
    lattice: &CofferLattice,
    h_over_r: f64,
    depth: DepthConvention,
    placement: ImagePlacement,
    noise_sigma_px: f64,
    seed: u64,
) -> Result<PhotoAnnotation> {
    let radius = lattice.map().profile().scale();
    let cam = CameraModel {
        h: h_over_r * radius,
        f: 1.0,
        mode: lattice.mode(),
        principal_point: [0.0, 0.0],
        rotation: placement.rotation,
        depth,
    };
    cam.validate()?;
    let pts = cam.project_lattice(lattice)?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p.uv[k]);
            hi[k] = hi[k].max(p.uv[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let s = placement.fill * placement.width.min(placement.height) / span;
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma_px.max(0.0)).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let entries = pts
        .iter()
        .map(|p| {
            let (du, dv) = if noise_sigma_px > 0.0 {
                (noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                (0.0, 0.0)
            };
            Annotation {
                m: p.m,
                n: p.n,
                u: 0.5 * placement.width + s * (p.uv[0] - center[0]) + du,
                v: 0.5 * placement.height + s * (p.uv[1] - center[1]) + dv,
            }
        })
        .collect();
    Ok(PhotoAnnotation {
        entries,
        image_size: Some([placement.width, placement.height]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseStudy {
    pub truth: f64,
    pub sigma_px: f64,
    pub estimates: Vec<f64>,
    pub median_abs_error: f64,
}

/// Repeats the fit on noisy synthetic annotations. Trial `i` uses seed
/// `base_seed + i`, so results do not depend on scheduling.
pub fn noise_study(
    lattice: &CofferLattice,
    truth: f64,
    placement: ImagePlacement,
    sigma_fraction_of_width: f64,
    trials: usize,
    base_seed: u64,
    opts: &FitOptions,
) -> Result<NoiseStudy> {
    let sigma = sigma_fraction_of_width * placement.width;
    let estimates = (0..trials)
        .into_par_iter()
        .map(|i| {
            let ann = synthesize_annotations(lattice, truth, opts.depth, placement, sigma, base_seed + i as u64)?;
            Ok(fit_camera_height(lattice, &ann, opts)?.h_over_r)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut errs: Vec<f64> = estimates.iter().map(|e| (e - truth).abs()).collect();
    errs.sort_by(f64::total_cmp);
    let median_abs_error = if errs.is_empty() {
        f64::NAN
    } else if errs.len() % 2 == 1 {
        errs[errs.len() / 2]
    } else {
        0.5 * (errs[errs.len() / 2 - 1] + errs[errs.len() / 2])
    };
    Ok(NoiseStudy {
        truth,
        sigma_px: sigma,
        estimates,
        median_abs_error,
    })
}

/// Mean image radius per row about the centroid of all points; the reduced
/// data the one-dimensional dome law describes.
pub fn radial_means(annotations: &PhotoAnnotation) -> BTreeMap<i32, f64> {
    let n = annotations.entries.len() as f64;
    let cu = annotations.entries.iter().map(|a| a.u).sum::<f64>() / n;
    let cv = annotations.entries.iter().map(|a| a.v).sum::<f64>() / n;
    let mut acc: BTreeMap<i32, (f64, usize)> = BTreeMap::new();
    for a in &annotations.entries {
        let e = acc.entry(a.m).or_default();
        e.0 += (a.u - cu).hypot(a.v - cv);
        e.1 += 1;
    }
    acc.into_iter().map(|(m, (s, c))| (m, s / c as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{generate_lattice, LatticeConfig, RowRange};
    use crate::profile::ProfileSpec;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn pantheon() -> CofferLattice {
        let cfg = LatticeConfig::new(ProfileSpec::hemisphere(1.0).unwrap(), SurfaceMode::Dome, 28, RowRange::new(0, 5));
        generate_lattice(&cfg).unwrap()
    }

    fn buttery() -> CofferLattice {
        let cfg = LatticeConfig::new(
            ProfileSpec::capsule(1.0, 2.0 * PI / 11.0).unwrap(),
            SurfaceMode::Ceiling,
            11,
            RowRange::new(-7, 8),
        );
        generate_lattice(&cfg).unwrap()
    }

    #[test]
    fn similarity_recovers_known_transform() {
        let model = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 1.0]];
        let t = Similarity {
            scale: 2.5,
            rotation: 0.4,
            translation: [3.0, -1.0],
        };
        let target: Vec<[f64; 2]> = model.iter().map(|&p| t.apply(p)).collect();
        let (s, sse) = fit_similarity(&model, &target, true);
        close(s.scale, 2.5, 1e-12);
        close(s.rotation, 0.4, 1e-12);
        close(s.translation[0], 3.0, 1e-12);
        assert!(sse < 1e-20);
        let (s, _) = fit_similarity(&model, &target, false);
        assert_eq!(s.rotation, 0.0);
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section(|x| (x - 1.3) * (x - 1.3) + 2.0, 0.1, 10.0, 1e-10);
        close(x, 1.3, 1e-7);
        close(fx, 2.0, 1e-15);
    }

    #[test]
    fn dome_model_values() {
        let m0 = dome_row_offset(0.95, 28).unwrap();
        // mpmath: atanh(0.95)·28/(2π) = 8.1630352342477998549
        close(m0, 8.163_035_234_247_8, 1e-12);
        let ratio = dome_radial_model(2.0, 28, m0).unwrap() / dome_radial_model(1.0, 28, m0).unwrap();
        // mpmath: sinh(2π(1+m0)/28)/sinh(2π(2+m0)/28) = 0.79421656870481892128
        close(ratio, 0.794_216_568_704_818_9, 1e-14);
        assert!(dome_radial_model(-3.0, 28, 2.0).is_err());
        // far camera: consecutive ratio → e^(−2π/N)
        let r = dome_radial_model(4.0, 28, 1e3).unwrap() / dome_radial_model(3.0, 28, 1e3).unwrap();
        close(r, (-2.0 * PI / 28.0).exp(), 1e-12);
    }

    #[test]
    fn noiseless_recovery_dome_and_ceiling() {
        let l = pantheon();
        let ann = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement { rotation: 0.3, ..Default::default() }, 0.0, 1).unwrap();
        let r = fit_camera_height(&l, &ann, &FitOptions::default()).unwrap();
        close(r.h_over_r, 0.95, 1e-3);
        assert!(r.rms_residual < 0.01);
        assert!(!r.boundary_warning);
        close(r.m0.unwrap(), 8.163, 0.05);

        let l = buttery();
        let ann = synthesize_annotations(&l, 1.2, DepthConvention::ViewingAxis, ImagePlacement::default(), 0.0, 1).unwrap();
        let r = fit_camera_height(&l, &ann, &FitOptions::default()).unwrap();
        close(r.h_over_r, 1.2, 1e-3);
        assert!(r.rms_residual < 0.01);
    }

    #[test]
    fn rigid_motion_of_annotations_is_absorbed() {
        let l = pantheon();
        let ann = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), 3.0, 7).unwrap();
        let opts = FitOptions::default();
        let base = fit_camera_height(&l, &ann, &opts).unwrap();
        let t = Similarity {
            scale: 1.0,
            rotation: 1.1,
            translation: [40.0, -25.0],
        };
        let mut moved = ann.clone();
        for a in &mut moved.entries {
            let p = t.apply([a.u, a.v]);
            a.u = p[0];
            a.v = p[1];
        }
        let r = fit_camera_height(&l, &moved, &opts).unwrap();
        close(r.rms_residual, base.rms_residual, 1e-9);
    }

    #[test]
    fn annotation_validation() {
        let l = pantheon();
        let one_ring = PhotoAnnotation::new((0..8).map(|n| Annotation { m: 2, n, u: n as f64, v: 0.0 }).collect());
        assert!(matches!(
            fit_camera_height(&l, &one_ring, &FitOptions::default()),
            Err(Error::Unidentifiable(_))
        ));
        let two_rows = PhotoAnnotation::new(
            (0..8).map(|n| Annotation { m: n % 2, n, u: n as f64, v: 1.0 }).collect(),
        );
        assert!(matches!(two_rows.validate(), Err(Error::InvalidAnnotations(_))));
        let mut dup = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), 0.0, 0).unwrap();
        let first = dup.entries[0];
        dup.entries.push(first);
        assert!(matches!(dup.validate(), Err(Error::InvalidAnnotations(_))));
        let mut missing = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), 0.0, 0).unwrap();
        missing.entries[0].m = 40;
        assert!(matches!(
            fit_camera_height(&l, &missing, &FitOptions::default()),
            Err(Error::MissingVertex { m: 40, .. })
        ));
    }

    #[test]
    fn boundary_minimum_is_flagged() {
        let l = pantheon();
        let ann = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), 0.0, 0).unwrap();
        let opts = FitOptions {
            search: (2.0, 5.0),
            ..Default::default()
        };
        let r = fit_camera_height(&l, &ann, &opts).unwrap();
        assert!(r.boundary_warning);
        assert!(r.h_over_r >= 2.0 && r.h_over_r <= 5.0);
    }

    #[test]
    fn csv_round_trip() {
        let l = pantheon();
        let ann = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), 1.0, 3).unwrap();
        let mut buf = Vec::new();
        ann.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"m,n,u,v\n"));
        let back = PhotoAnnotation::read_csv(&buf[..]).unwrap();
        assert_eq!(back.entries, ann.entries);
        assert!(PhotoAnnotation::read_csv(&b"a,b\n1,2\n"[..]).is_err());
        assert!(PhotoAnnotation::read_csv(&b"m,n,u,v\n1,2,x,4\n"[..]).is_err());
    }

    #[test]
    fn radial_means_follow_dome_law() {
        let l = pantheon();
        let ann = synthesize_annotations(&l, 0.95, DepthConvention::ViewingAxis, ImagePlacement::default(), 0.0, 0).unwrap();
        let means = radial_means(&ann);
        let m0 = dome_row_offset(0.95, 28).unwrap();
        let k = means[&1] / dome_radial_model(1.0, 28, m0).unwrap();
        for (&m, &r) in &means {
            close(r, k * dome_radial_model(m as f64, 28, m0).unwrap(), 1e-9 * r);
        }
    }
}
