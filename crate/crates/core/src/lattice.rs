//! Coffer-vertex lattices: images of a planar square grid under the
//! isothermal map of a surface of revolution.
//!
//! Vertex (m, n) sits at isothermal coordinates (ξ_m, φ_n) and at the 3D point
//! (ρ cos φ, ρ sin φ, z) with z = z(ξ_m). In ceiling mode the axis of
//! revolution is horizontal and y is the height above the base; in dome mode
//! z is the vertical axis.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isothermal::{IsothermalMap, DEFAULT_TOL};
use crate::profile::ProfileSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceMode {
    /// Half surface: a row of N coffers spans π of azimuth.
    Ceiling,
    /// Full surface: a row of N coffers spans 2π.
    Dome,
}

impl SurfaceMode {
    pub fn azimuth_step(self, coffers_per_row: usize) -> f64 {
        match self {
            SurfaceMode::Ceiling => PI / coffers_per_row as f64,
            SurfaceMode::Dome => 2.0 * PI / coffers_per_row as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    #[default]
    Axis,
    /// Planar grid rotated by 45°: rows half a step apart in ξ, odd rows
    /// shifted by half an azimuth step, edges along the two diagonals.
    Diagonal45,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowIndexing {
    /// Row m sits at ξ = m·Δ, so a vertex row lies on ξ = 0.
    #[default]
    VertexCentered,
    /// Row m sits at ξ = (m + ½)·Δ, so ξ = 0 falls midway between rows.
    RowCentered,
}

/// Inclusive range of vertex-row indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRange {
    pub first: i32,
    pub last: i32,
}

impl RowRange {
    pub fn new(first: i32, last: i32) -> Self {
        RowRange { first, last }
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.first..=self.last
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub profile: ProfileSpec,
    pub mode: SurfaceMode,
    pub coffers_per_row: usize,
    pub rows: RowRange,
    #[serde(default)]
    pub grid: GridKind,
    #[serde(default)]
    pub indexing: RowIndexing,
    /// z at which ξ = 0; the profile's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
}

impl LatticeConfig {
    pub fn new(profile: ProfileSpec, mode: SurfaceMode, coffers_per_row: usize, rows: RowRange) -> Self {
        LatticeConfig {
            profile,
            mode,
            coffers_per_row,
            rows,
            grid: GridKind::Axis,
            indexing: RowIndexing::VertexCentered,
            anchor: None,
        }
    }

    pub fn with_grid(mut self, grid: GridKind) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_indexing(mut self, indexing: RowIndexing) -> Self {
        self.indexing = indexing;
        self
    }

    pub fn azimuth_step(&self) -> f64 {
        self.mode.azimuth_step(self.coffers_per_row)
    }

    /// ξ spacing between consecutive vertex rows.
    pub fn row_spacing(&self) -> f64 {
        match self.grid {
            GridKind::Axis => self.azimuth_step(),
            GridKind::Diagonal45 => 0.5 * self.azimuth_step(),
        }
    }

    fn row_offset(&self) -> f64 {
        match self.indexing {
            RowIndexing::VertexCentered => 0.0,
            RowIndexing::RowCentered => 0.5,
        }
    }

    pub fn row_xi(&self, m: i32) -> f64 {
        (m as f64 + self.row_offset()) * self.row_spacing()
    }

    /// Azimuth indices present in row `m`.
    fn azimuth_indices(&self, m: i32) -> std::ops::Range<i32> {
        let n = self.coffers_per_row as i32;
        match (self.mode, self.grid) {
            (SurfaceMode::Dome, _) => 0..n,
            (SurfaceMode::Ceiling, GridKind::Axis) => 0..n + 1,
            (SurfaceMode::Ceiling, GridKind::Diagonal45) => {
                if m.rem_euclid(2) == 0 {
                    0..n + 1
                } else {
                    0..n
                }
            }
        }
    }

    pub fn azimuth(&self, m: i32, n: i32) -> f64 {
        let shift = match self.grid {
            GridKind::Diagonal45 if m.rem_euclid(2) == 1 => 0.5,
            _ => 0.0,
        };
        (n as f64 + shift) * self.azimuth_step()
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if self.coffers_per_row < 2 {
            return Err(Error::InvalidConfig(format!(
                "coffers_per_row must be at least 2, got {}",
                self.coffers_per_row
            )));
        }
        if self.rows.first > self.rows.last {
            return Err(Error::InvalidConfig(format!(
                "empty row range {}..={}",
                self.rows.first, self.rows.last
            )));
        }
        if let ProfileSpec::Capsule {
            radius,
            half_length,
        } = self.profile
        {
            let ratio = half_length / radius;
            let spacing = self.row_spacing();
            let k = ratio / spacing - self.row_offset();
            let rows = k.round().max(0.0);
            let nearest = (rows + self.row_offset()) * spacing;
            if (ratio - nearest).abs() > 1e-9 {
                return Err(Error::Incommensurable {
                    ratio,
                    row_step: spacing,
                    nearest,
                    rows: rows as i64,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFamily {
    /// Constant φ.
    Meridian,
    /// Constant ξ.
    Parallel,
    /// Diagonal with φ increasing as m increases.
    Rising,
    /// Diagonal with φ decreasing as m increases.
    Falling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub family: EdgeFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub m: i32,
    pub n: i32,
    pub xi: f64,
    pub phi: f64,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub m: i32,
    pub xi: f64,
    pub z: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CofferDimensions {
    /// Meridian arc length between the two bounding rows.
    pub height: f64,
    /// Azimuth step times the mean of the two bounding radii.
    pub mean_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CofferLattice {
    config: LatticeConfig,
    map: IsothermalMap,
    rows: Vec<Row>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: BTreeMap<(i32, i32), usize>,
}

/// Builds the vertex lattice described by `config`.
pub fn generate_lattice(config: &LatticeConfig) -> Result<CofferLattice> {
    config.validate()?;
    let profile = config.profile.clone();
    let anchor = config.anchor.unwrap_or_else(|| profile.default_anchor());
    let map = IsothermalMap::with_anchor(profile, anchor, DEFAULT_TOL)?;

    let mut rows = Vec::new();
    for m in config.rows.iter() {
        let xi = config.row_xi(m);
        let z = map.z_of_xi(xi)?;
        let rho = map.scale_factor(z)?;
        rows.push(Row { m, xi, z, rho });
    }

    let mut vertices = Vec::new();
    let mut index = BTreeMap::new();
    for row in &rows {
        for n in config.azimuth_indices(row.m) {
            let phi = config.azimuth(row.m, n);
            index.insert((row.m, n), vertices.len());
            vertices.push(Vertex {
                m: row.m,
                n,
                xi: row.xi,
                phi,
                position: [row.rho * phi.cos(), row.rho * phi.sin(), row.z],
            });
        }
    }

    let mut lattice = CofferLattice {
        config: config.clone(),
        map,
        rows,
        vertices,
        edges: Vec::new(),
        index,
    };
    lattice.edges = lattice.build_edges();
    Ok(lattice)
}

impl CofferLattice {
    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn map(&self) -> &IsothermalMap {
        &self.map
    }

    pub fn mode(&self) -> SurfaceMode {
        self.config.mode
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, m: i32) -> Option<&Row> {
        self.rows.iter().find(|r| r.m == m)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertices_mut(&mut self) -> &mut [Vertex] {
        &mut self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, m: i32, n: i32) -> Option<usize> {
        let n = self.wrap_n(n);
        self.index.get(&(m, n)).copied()
    }

    pub fn vertex(&self, m: i32, n: i32) -> Option<&Vertex> {
        self.vertex_index(m, n).map(|i| &self.vertices[i])
    }

    fn wrap_n(&self, n: i32) -> i32 {
        match self.config.mode {
            SurfaceMode::Dome => n.rem_euclid(self.config.coffers_per_row as i32),
            SurfaceMode::Ceiling => n,
        }
    }

    fn build_edges(&self) -> Vec<Edge> {
        let mut edges = Vec::new();
        let ceiling = self.config.mode == SurfaceMode::Ceiling;
        let count = self.config.coffers_per_row as i32;
        let mut push = |a: Option<usize>, b: Option<usize>, family| {
            if let (Some(a), Some(b)) = (a, b) {
                edges.push(Edge { a, b, family });
            }
        };
        for v in &self.vertices {
            let here = self.vertex_index(v.m, v.n);
            match self.config.grid {
                GridKind::Axis => {
                    push(here, self.vertex_index(v.m + 1, v.n), EdgeFamily::Meridian);
                    if !ceiling || v.n < count {
                        push(here, self.vertex_index(v.m, v.n + 1), EdgeFamily::Parallel);
                    }
                }
                GridKind::Diagonal45 => {
                    let (rise, fall) = if v.m.rem_euclid(2) == 0 {
                        (v.n, v.n - 1)
                    } else {
                        (v.n + 1, v.n)
                    };
                    push(here, self.vertex_index(v.m + 1, rise), EdgeFamily::Rising);
                    push(here, self.vertex_index(v.m + 1, fall), EdgeFamily::Falling);
                }
            }
        }
        edges
    }

    /// Surface point at isothermal coordinates (ξ, φ).
    pub fn surface_point(&self, xi: f64, phi: f64) -> Result<[f64; 3]> {
        self.map.point(xi, phi)
    }

    /// Points along the surface curve of an edge, excluding both endpoints.
    pub fn sample_edge(&self, edge: &Edge, interior_points: usize) -> Result<Vec<[f64; 3]>> {
        let a = &self.vertices[edge.a];
        let b = &self.vertices[edge.b];
        let dxi = b.xi - a.xi;
        let mut dphi = b.phi - a.phi;
        if self.config.mode == SurfaceMode::Dome {
            dphi = (dphi + PI).rem_euclid(2.0 * PI) - PI;
        }
        (1..=interior_points)
            .map(|k| {
                let t = k as f64 / (interior_points + 1) as f64;
                self.surface_point(a.xi + t * dxi, a.phi + t * dphi)
            })
            .collect()
    }

    /// Height and mean width of the coffers between rows m and m + 1.
    pub fn coffer_dimensions(&self, m: i32) -> Result<CofferDimensions> {
        if self.config.grid != GridKind::Axis {
            return Err(Error::InvalidConfig(
                "coffer dimensions are defined for axis-aligned grids".into(),
            ));
        }
        let (lo, hi) = match (self.row(m), self.row(m + 1)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "rows {m} and {} must both be in the lattice",
                    m + 1
                )))
            }
        };
        let height = self
            .map
            .profile()
            .arc_length(lo.z, hi.z, DEFAULT_TOL)?
            .abs();
        let mean_width = 0.5 * self.config.azimuth_step() * (lo.rho + hi.rho);
        Ok(CofferDimensions { height, mean_width })
    }

    /// Numerical check that the parametrization P(ξ, φ) is isothermal at
    /// every vertex: |∂P/∂ξ| = |∂P/∂φ| = ρ and ∂P/∂ξ · ∂P/∂φ = 0, and that
    /// the images of the planar diagonals are orthogonal with equal norms.
    /// Derivatives use central differences with step `h` in ξ and φ.
    pub fn isothermality_residuals(&self, h: f64) -> Result<Vec<IsothermalityResidual>> {
        self.vertices
            .iter()
            .map(|v| {
                let p = |dx: f64, dp: f64| self.surface_point(v.xi + dx, v.phi + dp);
                let d_xi = self.derivative_xi(v, h)?;
                let d_phi = scale(sub(p(0.0, h)?, p(0.0, -h)?), 0.5 / h);
                let diag_a = self.directional(v, h, 1.0)?;
                let diag_b = self.directional(v, h, -1.0)?;
                let rho = self.map.scale_factor(self.map.z_of_xi(v.xi)?)?;
                let rel = |x: f64| (x - rho).abs() / rho;
                let (na, nb) = (norm(diag_a), norm(diag_b));
                Ok(IsothermalityResidual {
                    m: v.m,
                    n: v.n,
                    rho,
                    xi_norm_error: rel(norm(d_xi)),
                    phi_norm_error: rel(norm(d_phi)),
                    cross_term: dot(d_xi, d_phi).abs() / (rho * rho),
                    diagonal_cross_term: dot(diag_a, diag_b).abs() / (na * nb),
                    diagonal_norm_error: (na - nb).abs() / na.max(nb),
                })
            })
            .collect()
    }

    fn in_range(&self, xi: f64) -> bool {
        let (lo, hi) = self.map.xi_range();
        xi >= lo && xi <= hi
    }

    fn derivative_xi(&self, v: &Vertex, h: f64) -> Result<[f64; 3]> {
        let p = |dx: f64| self.surface_point(v.xi + dx, v.phi);
        if self.in_range(v.xi - h) && self.in_range(v.xi + h) {
            Ok(scale(sub(p(h)?, p(-h)?), 0.5 / h))
        } else if self.in_range(v.xi + 2.0 * h) {
            // second-order one-sided
            let (p0, p1, p2) = (p(0.0)?, p(h)?, p(2.0 * h)?);
            Ok(scale(add(sub(scale(p1, 4.0), scale(p0, 3.0)), scale(p2, -1.0)), 0.5 / h))
        } else {
            let (p0, p1, p2) = (p(0.0)?, p(-h)?, p(-2.0 * h)?);
            Ok(scale(add(sub(scale(p1, 4.0), scale(p0, 3.0)), scale(p2, -1.0)), -0.5 / h))
        }
    }

    /// Pushforward of the planar direction (1, s) / √2.
    fn directional(&self, v: &Vertex, h: f64, s: f64) -> Result<[f64; 3]> {
        let d_xi = self.derivative_xi(v, h)?;
        let p = |dp: f64| self.surface_point(v.xi, v.phi + dp);
        let d_phi = scale(sub(p(h)?, p(-h)?), 0.5 / h);
        Ok(scale(add(d_xi, scale(d_phi, s)), std::f64::consts::FRAC_1_SQRT_2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsothermalityResidual {
    pub m: i32,
    pub n: i32,
    pub rho: f64,
    pub xi_norm_error: f64,
    pub phi_norm_error: f64,
    pub cross_term: f64,
    pub diagonal_cross_term: f64,
    pub diagonal_norm_error: f64,
}

impl IsothermalityResidual {
    pub fn worst(&self) -> f64 {
        [
            self.xi_norm_error,
            self.phi_norm_error,
            self.cross_term,
            self.diagonal_cross_term,
            self.diagonal_norm_error,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub mode: SurfaceMode,
    /// Explicit Euler steps per row; 1 reproduces the row-by-row rule.
    pub substeps: usize,
    pub max_rows: usize,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        ProtocolOptions {
            mode: SurfaceMode::Ceiling,
            substeps: 1,
            max_rows: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRow {
    pub index: i32,
    pub z: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub rows: Vec<ProtocolRow>,
    /// Set when stepping stopped early: the next row would leave the
    /// domain, hit a pole, or advance by a vanishing amount.
    pub truncated: bool,
}

/// Lays out rows one at a time: each row advances along the meridian by an
/// arc equal to the azimuth step times the current radius (the coffer is as
/// tall as it is wide). This is explicit Euler stepping of dz/dξ.
pub fn builder_protocol(
    profile: &ProfileSpec,
    coffers_per_row: usize,
    start_z: f64,
    direction: i32,
    opts: ProtocolOptions,
) -> Result<ProtocolRun> {
    profile.validate()?;
    if coffers_per_row < 2 {
        return Err(Error::InvalidConfig("coffers_per_row must be at least 2".into()));
    }
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidConfig(format!("direction must be ±1, got {direction}")));
    }
    if opts.substeps == 0 {
        return Err(Error::InvalidConfig("substeps must be positive".into()));
    }
    let (zmin, zmax) = profile.domain();
    if profile.rho(start_z)? == 0.0 {
        return Err(Error::DivergentCoordinate { z: start_z });
    }
    let h = opts.mode.azimuth_step(coffers_per_row) / opts.substeps as f64;
    let dir = direction as f64;
    let collapse = 1e-12 * profile.scale();

    let mut z = start_z;
    let mut rows = vec![ProtocolRow {
        index: 0,
        z,
        rho: profile.rho(z)?,
    }];
    let mut truncated = false;
    'rows: while rows.len() < opts.max_rows {
        let row_start = z;
        for _ in 0..opts.substeps {
            let rho = profile.rho(z)?;
            let slope = match profile.rho_prime(z) {
                Ok(d) => d,
                Err(_) => {
                    truncated = true;
                    break 'rows;
                }
            };
            let next = z + dir * h * rho / (1.0 + slope * slope).sqrt();
            if !(next >= zmin && next <= zmax) || profile.rho(next)? == 0.0 {
                truncated = true;
                break 'rows;
            }
            z = next;
        }
        if (z - row_start).abs() < collapse {
            truncated = true;
            break;
        }
        rows.push(ProtocolRow {
            index: direction * rows.len() as i32,
            z,
            rho: profile.rho(z)?,
        });
    }
    Ok(ProtocolRun { rows, truncated })
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
pub(crate) fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
pub(crate) fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
