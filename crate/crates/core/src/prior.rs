use serde::{Deserialize, Serialize};

use crate::error::{domain_check, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    /// Naïve adaptive graphical elastic net.
    Bae,
    /// Adaptive graphical lasso.
    Bagl,
    /// Adaptive graphical ridge-type.
    Bagr,
}

impl PriorKind {
    pub const ALL: [PriorKind; 3] = [PriorKind::Bae, PriorKind::Bagl, PriorKind::Bagr];

    pub fn name(self) -> &'static str {
        match self {
            PriorKind::Bae => "BAE",
            PriorKind::Bagl => "BAGL",
            PriorKind::Bagr => "BAGR",
        }
    }

    pub fn default_spec(self) -> PriorSpec {
        match self {
            PriorKind::Bae => PriorSpec::bae_default(),
            PriorKind::Bagl => PriorSpec::bagl_default(),
            PriorKind::Bagr => PriorSpec::bagr_default(),
        }
    }
}

impl std::fmt::Display for PriorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PriorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bae" => Ok(PriorKind::Bae),
            "bagl" => Ok(PriorKind::Bagl),
            "bagr" => Ok(PriorKind::Bagr),
            other => Err(format!("unknown prior kind '{other}' (expected bae, bagl or bagr)")),
        }
    }
}

/// Prior family plus hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PriorSpec {
    Bae {
        /// Exponential rate on the ridge precisions `tau_ij`.
        r_tau: f64,
        /// Exponential rate on the lasso rates `lambda_ij`.
        s_lambda: f64,
        lambda_diag: f64,
        /// Additive constant on the diagonal rate (the "+1" of the column
        /// conditional at its default of 1).
        tau_diag: f64,
        /// Use `a * Omega_11` rather than `a * Omega_11^{-1}` inside the
        /// column covariance. Off by default; kept for comparison runs.
        #[serde(default)]
        literal_block: bool,
    },
    Bagl {
        r: f64,
        s: f64,
        lambda_diag: f64,
    },
    Bagr {
        a: f64,
        b: f64,
    },
}

impl PriorSpec {
    pub fn bae_default() -> Self {
        PriorSpec::Bae {
            r_tau: 0.5,
            s_lambda: 0.05,
            lambda_diag: 1.0,
            tau_diag: 1.0,
            literal_block: false,
        }
    }

    pub fn bagl_default() -> Self {
        PriorSpec::Bagl {
            r: 1e-2,
            s: 1e-6,
            lambda_diag: 1.0,
        }
    }

    pub fn bagr_default() -> Self {
        PriorSpec::Bagr { a: 1.0, b: 1e-2 }
    }

    pub fn kind(&self) -> PriorKind {
        match self {
            PriorSpec::Bae { .. } => PriorKind::Bae,
            PriorSpec::Bagl { .. } => PriorKind::Bagl,
            PriorSpec::Bagr { .. } => PriorKind::Bagr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values: &[(&str, f64)] = match self {
            PriorSpec::Bae {
                r_tau,
                s_lambda,
                lambda_diag,
                tau_diag,
                ..
            } => &[
                ("r_tau", *r_tau),
                ("s_lambda", *s_lambda),
                ("lambda_diag", *lambda_diag),
                ("tau_diag", *tau_diag),
            ],
            PriorSpec::Bagl { r, s, lambda_diag } => {
                &[("r", *r), ("s", *s), ("lambda_diag", *lambda_diag)]
            }
            PriorSpec::Bagr { a, b } => &[("a", *a), ("b", *b)],
        };
        for (name, v) in values {
            domain_check(*v > 0.0 && v.is_finite(), || {
                format!("{} hyperparameter {name} must be positive, got {v}", self.kind())
            })?;
        }
        Ok(())
    }
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self::bae_default()
    }
}
