//! Crate-wide error type.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    Domain(&'static str),
    /// A quadrature failed to reach the requested accuracy.
    QuadratureNonconvergence { what: &'static str, achieved: f64 },
    /// Root bracketing or refinement failed.
    Bracketing(&'static str),
    /// A tabulated quantity was queried outside its range.
    OutOfRange { what: &'static str, value: f64 },
    /// Level-set component tracking failed (non-Morse structure).
    UnsupportedTopology(&'static str),
    /// A cross-check between profile columns failed at build time.
    ProfileInconsistency { what: &'static str, defect: f64 },
    /// Step size fell below the lower bound (stiffness or singularity).
    StepUnderflow { t: f64 },
    /// Trajectory norm exceeded the configured escape bound.
    StateEscape { t: f64 },
    /// No event crossing found within the integration span.
    NoCrossing,
    /// A Poincaré orbit left the configured section window.
    WindowEscape { index: usize },
    /// Section sequence does not wind around the equilibrium.
    NonwindingSequence,
    /// Level set of the averaged Hamiltonian escapes the profile range.
    NoncompactLevel { level: f64 },
    /// Requested temperature sits in the excluded set of the thermostat.
    InadmissibleTemperature { t: f64, excluded: f64 },
    /// exp(-beta*U) is not integrable on the requested half-line.
    NonintegrableTail,
    /// Potential is not unimodal, width function undefined.
    Nonunimodal,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::QuadratureNonconvergence { what, achieved } => {
                write!(f, "quadrature for {what} did not converge (reached {achieved:.3e})")
            }
            Error::Bracketing(what) => write!(f, "root bracketing failed: {what}"),
            Error::OutOfRange { what, value } => {
                write!(f, "{what} = {value:.6e} outside tabulated range")
            }
            Error::UnsupportedTopology(what) => write!(f, "unsupported topology: {what}"),
            Error::ProfileInconsistency { what, defect } => {
                write!(f, "profile cross-check {what} failed (defect {defect:.3e})")
            }
            Error::StepUnderflow { t } => write!(f, "step underflow at t = {t:.6e}"),
            Error::StateEscape { t } => write!(f, "state escaped at t = {t:.6e}"),
            Error::NoCrossing => write!(f, "no event crossing within span"),
            Error::WindowEscape { index } => write!(f, "orbit left the window at return {index}"),
            Error::NonwindingSequence => write!(f, "section sequence does not wind"),
            Error::NoncompactLevel { level } => {
                write!(f, "level set at g = {level:.6e} is not compact in the tabulated range")
            }
            Error::InadmissibleTemperature { t, excluded } => {
                write!(f, "temperature {t:.12e} is inadmissible (excluded value {excluded:.12e})")
            }
            Error::NonintegrableTail => write!(f, "exp(-beta*U) has a non-integrable tail"),
            Error::Nonunimodal => write!(f, "potential is not unimodal"),
        }
    }
}

impl core::error::Error for Error {}
