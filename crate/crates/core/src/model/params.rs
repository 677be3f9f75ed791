use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension and the two drift strengths of the walk.
///
/// `beta` is the drift towards `+e1` at a site that still carries its cookie, `mu`
/// the drift towards `-e1` at a site already visited. Both live in `[0, 1]`, which
/// keeps every step probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct WalkParams {
    d: usize,
    beta: f64,
    mu: f64,
}

#[derive(Deserialize)]
struct RawParams {
    d: usize,
    beta: f64,
    mu: f64,
}

impl TryFrom<RawParams> for WalkParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        WalkParams::new(raw.d, raw.beta, raw.mu)
    }
}

impl WalkParams {
    pub fn new(d: usize, beta: f64, mu: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("dimension d must be at least 1"));
        }
        check_unit("beta", beta)?;
        check_unit("mu", mu)?;
        Ok(WalkParams { d, beta, mu })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Same dimension and `mu`, different `beta`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        WalkParams::new(self.d, beta, self.mu)
    }

    /// Signed first-axis drift factor `e1 . x` multiplies in the kernel numerator.
    #[inline]
    pub fn drift(&self, has_cookie: bool) -> f64 {
        if has_cookie {
            self.beta
        } else {
            -self.mu
        }
    }
}

fn check_unit(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {value} must lie in [0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(WalkParams::new(2, 1.5, 0.0).is_err());
        assert!(WalkParams::new(2, 0.5, -0.1).is_err());
        assert!(WalkParams::new(2, f64::NAN, 0.0).is_err());
        assert!(WalkParams::new(0, 0.5, 0.5).is_err());
        let err = WalkParams::new(2, 1.5, 0.0).unwrap_err().to_string();
        assert!(err.contains("[0, 1]"), "{err}");
    }

    #[test]
    fn deserialization_validates() {
        let ok: WalkParams = serde_json::from_str(r#"{"d":3,"beta":0.2,"mu":0.4}"#).unwrap();
        assert_eq!(ok.d(), 3);
        assert!(serde_json::from_str::<WalkParams>(r#"{"d":3,"beta":2.0,"mu":0.4}"#).is_err());
    }
}
