//! Diagnostics: row-size predictions against measurements, orthogonality
//! and squareness of generated lattices, and convergence of the builder's
//! row-by-row rule.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isothermal::{IsothermalMap, DEFAULT_TOL};
use crate::lattice::{
    builder_protocol, dot, norm, sub, CofferLattice, EdgeFamily, GridKind, ProtocolOptions, SurfaceMode,
};
use crate::profile::ProfileSpec;

/// Predicted coffer size of row m relative to row 1: sech(step·m)/sech(step).
pub fn ratio_curve(coffers_per_row: usize, mode: SurfaceMode, m_values: &[i32]) -> Result<Vec<f64>> {
    if coffers_per_row < 2 {
        return Err(Error::InvalidConfig("coffers_per_row must be at least 2".into()));
    }
    let step = mode.azimuth_step(coffers_per_row);
    // cosh(step)/cosh(step·m) without overflow for large m
    Ok(m_values
        .iter()
        .map(|&m| {
            let x = step * m.unsigned_abs() as f64;
            (step - x).exp() * (1.0 + (-2.0 * step).exp()) / (1.0 + (-2.0 * x).exp())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub m: i32,
    #[serde(rename = "H")]
    pub height: f64,
    #[serde(rename = "W")]
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasurementSeries {
    pub rows: Vec<Measurement>,
}

/// Which end of the vault a survey counts rows from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOrientation {
    /// m = 1 is the row next to the base.
    #[default]
    FromBase,
    /// m = 1 is the row next to the top (oculus).
    FromTop,
}

impl MeasurementSeries {
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for r in &self.rows {
            if !seen.insert(r.m) {
                return Err(Error::InvalidMeasurements(format!("row {} appears twice", r.m)));
            }
            if !(r.height > 0.0 && r.width > 0.0 && r.height.is_finite() && r.width.is_finite()) {
                return Err(Error::InvalidMeasurements(format!(
                    "row {} needs positive H and W, got {} and {}",
                    r.m, r.height, r.width
                )));
            }
        }
        Ok(())
    }

    /// Reads `m,H,W` CSV.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::parse("measurement CSV", e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["m", "H", "W"] {
            return Err(Error::parse(
                "measurement CSV",
                format!("expected header m,H,W, found {}", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize().enumerate() {
            rows.push(rec.map_err(|e| Error::parse(format!("measurement CSV line {}", i + 2), e))?);
        }
        let s = MeasurementSeries { rows };
        s.validate()?;
        Ok(s)
    }

    /// Renumbers rows so that m = 1 is next to the base. For a survey
    /// counted from the top, m becomes max_m + 1 − m.
    pub fn oriented(&self, orientation: RowOrientation) -> Self {
        match orientation {
            RowOrientation::FromBase => self.clone(),
            RowOrientation::FromTop => {
                let top = self.rows.iter().map(|r| r.m).max().unwrap_or(0);
                let mut rows: Vec<Measurement> = self
                    .rows
                    .iter()
                    .map(|r| Measurement { m: top + 1 - r.m, ..*r })
                    .collect();
                rows.sort_by_key(|r| r.m);
                MeasurementSeries { rows }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub m: i32,
    pub predicted: f64,
    pub height_ratio: f64,
    pub width_ratio: f64,
    pub height_residual: f64,
    pub width_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub max_abs_residual: f64,
    pub rms_residual: f64,
}

/// Measured H_m/H_1 and W_m/W_1 against the prediction. Nothing is fitted.
pub fn compare_measurements(
    series: &MeasurementSeries,
    coffers_per_row: usize,
    mode: SurfaceMode,
) -> Result<ComparisonReport> {
    series.validate()?;
    let base = series
        .rows
        .iter()
        .find(|r| r.m == 1)
        .ok_or_else(|| Error::InvalidMeasurements("normalization row m = 1 is missing".into()))?;
    let ms: Vec<i32> = series.rows.iter().map(|r| r.m).collect();
    let pred = ratio_curve(coffers_per_row, mode, &ms)?;
    let rows: Vec<ComparisonRow> = series
        .rows
        .iter()
        .zip(pred)
        .map(|(r, p)| {
            let hr = r.height / base.height;
            let wr = r.width / base.width;
            ComparisonRow {
                m: r.m,
                predicted: p,
                height_ratio: hr,
                width_ratio: wr,
                height_residual: hr - p,
                width_residual: wr - p,
            }
        })
        .collect();
    let all: Vec<f64> = rows.iter().flat_map(|r| [r.height_residual, r.width_residual]).collect();
    let max_abs_residual = all.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let rms_residual = if all.is_empty() {
        0.0
    } else {
        (all.iter().map(|r| r * r).sum::<f64>() / all.len() as f64).sqrt()
    };
    Ok(ComparisonReport {
        rows,
        max_abs_residual,
        rms_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexAngle {
    pub m: i32,
    pub n: i32,
    /// |angle between the two coffer-line tangents − 90°| of the map at the
    /// vertex's nominal coordinates.
    pub tangent_deviation_deg: f64,
    /// Largest change of a corner angle between the stored positions and
    /// the positions the map gives for the same labels.
    pub corner_deviation_deg: f64,
    pub deviation_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub grid: GridKind,
    pub vertices: Vec<VertexAngle>,
    pub max_deviation_deg: f64,
}

impl OrthogonalityReport {
    pub fn flagged(&self, threshold_deg: f64) -> Vec<(i32, i32)> {
        self.vertices
            .iter()
            .filter(|v| v.deviation_deg > threshold_deg)
            .map(|v| (v.m, v.n))
            .collect()
    }
}

fn angle_deg(a: [f64; 3], b: [f64; 3]) -> f64 {
    (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Angle check at every interior vertex (one with neighbours on both sides
/// along both coffer lines through it). Tangents are central differences
/// with step `fd_scale` times the azimuth step.
pub fn orthogonality_report(lattice: &CofferLattice, fd_scale: f64) -> Result<OrthogonalityReport> {
    let cfg = lattice.config();
    let (first, second) = match cfg.grid {
        GridKind::Axis => (EdgeFamily::Meridian, EdgeFamily::Parallel),
        GridKind::Diagonal45 => (EdgeFamily::Rising, EdgeFamily::Falling),
    };
    let verts = lattice.vertices();
    // neighbours[v] = [first-, first+, second-, second+]
    let mut nb: Vec<[Option<usize>; 4]> = vec![[None; 4]; verts.len()];
    for e in lattice.edges() {
        let k = if e.family == first {
            0
        } else if e.family == second {
            2
        } else {
            continue;
        };
        nb[e.a][k + 1] = Some(e.b);
        nb[e.b][k] = Some(e.a);
    }
    let h = fd_scale * cfg.azimuth_step();
    let map = lattice.map();
    let wrap = |d: f64| {
        if cfg.mode == SurfaceMode::Dome {
            (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI
        } else {
            d
        }
    };
    let mut out = Vec::new();
    for (i, v) in verts.iter().enumerate() {
        let [Some(a0), Some(a1), Some(b0), Some(b1)] = nb[i] else {
            continue;
        };
        let tangent = |j: usize| -> Result<[f64; 3]> {
            let w = &verts[j];
            let (dx, dp) = (w.xi - v.xi, wrap(w.phi - v.phi));
            let l = dx.hypot(dp);
            let (dx, dp) = (dx / l * h, dp / l * h);
            Ok(sub(map.point(v.xi + dx, v.phi + dp)?, map.point(v.xi - dx, v.phi - dp)?))
        };
        let tangent_deviation_deg = (angle_deg(tangent(a1)?, tangent(b1)?) - 90.0).abs();

        let ideal = |j: usize| map.point(verts[j].xi, verts[j].phi);
        let p_ideal = ideal(i)?;
        let mut corner_deviation_deg: f64 = 0.0;
        for (x, y) in [(a1, b1), (b1, a0), (a0, b0), (b0, a1)] {
            let stored = angle_deg(sub(verts[x].position, v.position), sub(verts[y].position, v.position));
            let exact = angle_deg(sub(ideal(x)?, p_ideal), sub(ideal(y)?, p_ideal));
            corner_deviation_deg = corner_deviation_deg.max((stored - exact).abs());
        }
        out.push(VertexAngle {
            m: v.m,
            n: v.n,
            tangent_deviation_deg,
            corner_deviation_deg,
            deviation_deg: tangent_deviation_deg + corner_deviation_deg,
        });
    }
    let max_deviation_deg = out.iter().fold(0.0f64, |a, v| a.max(v.deviation_deg));
    Ok(OrthogonalityReport {
        grid: cfg.grid,
        vertices: out,
        max_deviation_deg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CofferSquareness {
    pub m: i32,
    pub height: f64,
    pub mean_width: f64,
    /// |H/W − 1|
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquarenessReport {
    pub rows: Vec<CofferSquareness>,
    pub max_deviation: f64,
}

/// Height against mean width for each band of coffers of an axis grid.
pub fn squareness_report(lattice: &CofferLattice) -> Result<SquarenessReport> {
    let ms: Vec<i32> = lattice.rows().iter().map(|r| r.m).collect();
    let mut rows = Vec::new();
    for w in ms.windows(2) {
        let d = lattice.coffer_dimensions(w[0])?;
        rows.push(CofferSquareness {
            m: w[0],
            height: d.height,
            mean_width: d.mean_width,
            deviation: (d.height / d.mean_width - 1.0).abs(),
        });
    }
    let max_deviation = rows.iter().fold(0.0f64, |a, r| a.max(r.deviation));
    Ok(SquarenessReport { rows, max_deviation })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub substeps: usize,
    pub max_error: f64,
    pub rows_compared: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub levels: Vec<ConvergenceLevel>,
    /// log(e_k / e_{k+1}) / log(s_{k+1} / s_k) for consecutive levels.
    pub orders: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    pub mode: SurfaceMode,
    pub start_z: f64,
    pub direction: i32,
    pub rows: usize,
}

/// Largest |z| error of the builder's rows against the exact rows, which sit
/// at ξ(start) ± k·step, for each sub-stepping level.
pub fn protocol_error_study(
    profile: &ProfileSpec,
    coffers_per_row: usize,
    substeps: &[usize],
    opts: StudyOptions,
) -> Result<ConvergenceTable> {
    if substeps.is_empty() || substeps[0] == 0 || substeps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("substeps must be positive and increasing".into()));
    }
    let map = IsothermalMap::with_anchor(profile.clone(), opts.start_z, DEFAULT_TOL)?;
    let step = opts.mode.azimuth_step(coffers_per_row);
    let mut levels = Vec::new();
    for &s in substeps {
        let run = builder_protocol(
            profile,
            coffers_per_row,
            opts.start_z,
            opts.direction,
            ProtocolOptions {
                mode: opts.mode,
                substeps: s,
                max_rows: opts.rows + 1,
            },
        )?;
        let mut max_error: f64 = 0.0;
        for (k, row) in run.rows.iter().enumerate().skip(1) {
            let exact = map.z_of_xi(opts.direction as f64 * k as f64 * step)?;
            max_error = max_error.max((row.z - exact).abs());
        }
        levels.push(ConvergenceLevel {
            substeps: s,
            max_error,
            rows_compared: run.rows.len() - 1,
        });
    }
    let orders = levels
        .windows(2)
        .map(|w| (w[0].max_error / w[1].max_error).ln() / (w[1].substeps as f64 / w[0].substeps as f64).ln())
        .collect();
    Ok(ConvergenceTable { levels, orders })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    /// (m, ρ_m e^(ξ_m)) for every row.
    pub values: Vec<(i32, f64)>,
    pub non_increasing: bool,
    pub non_decreasing: bool,
}

/// ρ_m e^(ξ_m) along the rows, where ξ_m is the row's isothermal coordinate
/// (step·m for vertex-centred rows). Monotonicity is judged with a relative
/// slack of 1e-12.
pub fn decay_envelope(lattice: &CofferLattice) -> DecayEnvelope {
    let values: Vec<(i32, f64)> = lattice.rows().iter().map(|r| (r.m, r.rho * r.xi.exp())).collect();
    let slack = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs());
    let non_increasing = values.windows(2).all(|w| w[1].1 <= w[0].1 + slack(w[0].1, w[1].1));
    let non_decreasing = values.windows(2).all(|w| w[1].1 >= w[0].1 - slack(w[0].1, w[1].1));
    DecayEnvelope {
        values,
        non_increasing,
        non_decreasing,
    }
}

/// Successive row radius ratios ρ_{m+1}/ρ_m.
pub fn row_radius_ratios(lattice: &CofferLattice) -> BTreeMap<i32, f64> {
    lattice
        .rows()
        .windows(2)
        .map(|w| (w[0].m, w[1].rho / w[0].rho))
        .collect()
}
