use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("passivity violated: Im(zeta) = {0} < 0 would be a gain medium, which is unsupported")]
    Gain(f64),
    #[error("non-finite polarisability {0}")]
    NonFinitePolarisability(String),
    #[error("segment length must be finite and non-negative, got {0} m")]
    BadLength(f64),
    #[error("chain is empty")]
    EmptyChain,
    #[error("mobile index {index} out of range for chain of {len} elements")]
    MobileOutOfRange { index: usize, len: usize },
    #[error("mobile element {0} is not a scatterer")]
    MobileNotScatterer(usize),
    #[error("wavenumber must be finite and positive, got {0} rad/m")]
    BadWavenumber(f64),
    #[error("pump power must be finite and non-negative, got {0} W")]
    BadPower(f64),
    #[error("pump wavelength {pump} m does not match chain wavelength {chain} m")]
    WavelengthMismatch { pump: f64, chain: f64 },
    #[error("singular solve: no transmission channel to the mobile scatterer (beta0 = {0})")]
    Singular(f64),
    #[error("absorption defect is not positive semidefinite at element {element} (pivot {pivot})")]
    UnphysicalDefect { element: usize, pivot: f64 },
    #[error("non-cooling region: friction {0} N s/m is not negative")]
    NonCooling(f64),
    #[error("membrane displacement |x| = {x} m exceeds one wavelength ({lambda} m); the model assumes |x| << L_c")]
    DisplacementTooLarge { x: f64, lambda: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("chain file: {0}")]
    Parse(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
