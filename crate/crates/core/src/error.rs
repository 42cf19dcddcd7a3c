use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("externality magnitude a = {0} must lie in (0, 1)")]
    InvalidExternality(f64),
    #[error("intrinsic utility theta = {0} must be finite and at least 1")]
    InvalidTheta(f64),
    #[error("{name} = {value} must lie in [0, 1]")]
    OutOfUnitInterval { name: &'static str, value: f64 },
    #[error("locations must satisfy x1 <= x2 (got x1 = {x1}, x2 = {x2})")]
    UnorderedLocations { x1: f64, x2: f64 },
    #[error("s1 = {s1} is not a market equilibrium at ({x1}, {x2})")]
    NotMarketEquilibrium { x1: f64, x2: f64, s1: f64 },
    #[error("x1 = {0} must not exceed 1/2 for symmetric profiles")]
    NotLeftHalf(f64),
    #[error("grid resolution {name} = {value} must be at least 2")]
    InvalidGrid { name: &'static str, value: usize },
    #[error("no equilibrium exists")]
    NoEquilibrium,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfUnitInterval { name, value })
    }
}
