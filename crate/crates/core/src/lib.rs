pub mod analysis;
pub mod camera;
pub mod error;
pub mod export;
pub mod fit;
pub mod isothermal;
pub mod lattice;
pub mod mercator;
pub mod presets;
pub mod profile;
pub mod quadrature;
pub mod roots;

pub use analysis::{compare_measurements, orthogonality_report, protocol_error_study, ratio_curve, MeasurementSeries};
pub use camera::{CameraConfig, CameraModel, DepthConvention, LabelledPoint};
pub use error::{Error, Result};
pub use export::{RenderKind, RenderSpec};
pub use fit::{fit_camera_height, FitOptions, FitResult, PhotoAnnotation, Similarity};
pub use isothermal::{xi_quadrature, IsothermalMap};
pub use lattice::{
    builder_protocol, generate_lattice, CofferLattice, GridKind, LatticeConfig, RowIndexing, RowRange,
    SurfaceMode,
};
pub use mercator::{map_polyline_to_surface, mercator_forward, mercator_inverse, DrapeOptions, GeoPolyline};
pub use presets::Preset;
pub use profile::{ProfileSpec, TabulatedProfile};
