use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("z = {z} lies outside the profile domain [{zmin}, {zmax}]")]
    OutOfDomain { z: f64, zmin: f64, zmax: f64 },

    #[error("profile slope diverges at z = {z}")]
    SingularDerivative { z: f64 },

    #[error("isothermal coordinate diverges at z = {z} (profile radius vanishes)")]
    DivergentCoordinate { z: f64 },

    #[error("xi = {xi} is outside the attainable range [{min}, {max}]")]
    XiOutOfRange { xi: f64, min: f64, max: f64 },

    #[error("quadrature did not converge: estimated error {estimate:e} after {subdivisions} subdivisions")]
    QuadratureFailure { estimate: f64, subdivisions: usize },

    #[error("root finding did not converge for target {target} (last bracket [{lo}, {hi}])")]
    RootNotConverged { target: f64, lo: f64, hi: f64 },

    #[error(
        "barrel half-length R'/R = {ratio} is not a whole number of rows of width {row_step}; \
         nearest admissible value is {nearest} ({rows} rows)"
    )]
    Incommensurable {
        ratio: f64,
        row_step: f64,
        nearest: f64,
        rows: i64,
    },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("point {point:?} is at or behind the pinhole plane (depth {depth})")]
    BehindCamera { point: [f64; 3], depth: f64 },

    #[error("vertex ({m}, {n}) cannot be projected: {source}")]
    VertexProjection {
        m: i32,
        n: i32,
        #[source]
        source: Box<Error>,
    },

    #[error("no vertex labelled ({m}, {n}) in the lattice")]
    MissingVertex { m: i32, n: i32 },

    #[error("invalid annotations: {0}")]
    InvalidAnnotations(String),

    #[error("camera height is not identifiable: {0}")]
    Unidentifiable(String),

    #[error("invalid measurements: {0}")]
    InvalidMeasurements(String),

    #[error("argument outside model domain: {0}")]
    ModelDomain(String),

    #[error("latitude {lat} rad is at or beyond a pole")]
    PoleLatitude { lat: f64 },

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short identifier, used by the command-line tool in its
    /// machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::SingularDerivative { .. } => "singular_derivative",
            Error::DivergentCoordinate { .. } => "divergent_coordinate",
            Error::XiOutOfRange { .. } => "xi_out_of_range",
            Error::QuadratureFailure { .. } => "quadrature_failure",
            Error::RootNotConverged { .. } => "root_not_converged",
            Error::Incommensurable { .. } => "incommensurable",
            Error::InvalidProfile(_) => "invalid_profile",
            Error::InvalidConfig(_) => "invalid_config",
            Error::BehindCamera { .. } => "behind_camera",
            Error::VertexProjection { .. } => "vertex_projection",
            Error::MissingVertex { .. } => "missing_vertex",
            Error::InvalidAnnotations(_) => "invalid_annotations",
            Error::Unidentifiable(_) => "unidentifiable",
            Error::InvalidMeasurements(_) => "invalid_measurements",
            Error::ModelDomain(_) => "model_domain",
            Error::PoleLatitude { .. } => "pole_latitude",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn parse(what: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            what: what.into(),
            message: message.to_string(),
        }
    }
}
