use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Wrong call shape: mismatched orders, degenerate budgets, bad flags.
    #[error("usage error: {0}")]
    Usage(String),
    /// Mathematical precondition violated (alpha <= 0, constant term != 1, infeasible jet, ...).
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        domain(format!("alpha must be a positive finite number, got {alpha}"))
    }
}
