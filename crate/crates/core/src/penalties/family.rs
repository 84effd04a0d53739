use std::fmt;

use serde::{Deserialize, Serialize};

/// Distribution families supported on `[0, ∞)` (or a bounded sub-interval)
/// whose CDF can serve as a separable sparsity penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Point mass at zero. The induced penalty is the ℓ₀ count.
    DiracDelta,
    /// Uniform on `[0, gamma]` (Capped-L1).
    Uniform,
    /// Piecewise-linear density whose CDF is the SCAD penalty.
    ScadLinear,
    /// Piecewise-linear density whose CDF is the MCP penalty.
    McpLinear,
    /// U-quadratic density on `[0, b]` (three-order polynomial penalty).
    UQuadratic,
    Exponential,
    Rayleigh,
    Weibull,
    /// The "chi-squared" row of the catalog, with density
    /// `x^(k-1) e^(-x²/2) / (2^(k/2-1) Γ(k/2))`.
    ChiSquared,
    GeneralizedGamma,
    GeneralizedBetaPrime,
    FoldedNormal,
    FoldedStudentT,
    FoldedCauchy,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::DiracDelta,
        Family::Uniform,
        Family::ScadLinear,
        Family::McpLinear,
        Family::UQuadratic,
        Family::Exponential,
        Family::Rayleigh,
        Family::Weibull,
        Family::ChiSquared,
        Family::GeneralizedGamma,
        Family::GeneralizedBetaPrime,
        Family::FoldedNormal,
        Family::FoldedStudentT,
        Family::FoldedCauchy,
    ];

    /// Canonical name used by the text specification format.
    pub fn name(self) -> &'static str {
        match self {
            Family::DiracDelta => "dirac",
            Family::Uniform => "uniform",
            Family::ScadLinear => "scad",
            Family::McpLinear => "mcp",
            Family::UQuadratic => "uquad",
            Family::Exponential => "exp",
            Family::Rayleigh => "rayleigh",
            Family::Weibull => "weibull",
            Family::ChiSquared => "chisq",
            Family::GeneralizedGamma => "gengamma",
            Family::GeneralizedBetaPrime => "gbp",
            Family::FoldedNormal => "foldnormal",
            Family::FoldedStudentT => "foldt",
            Family::FoldedCauchy => "cauchy",
        }
    }

    fn aliases(self) -> &'static [&'static str] {
        match self {
            Family::DiracDelta => &["l0"],
            Family::Uniform => &["cappedl1"],
            Family::UQuadratic => &["top"],
            Family::Exponential => &["exponential", "etp", "laplace"],
            Family::Weibull => &["wbp"],
            Family::ChiSquared => &["chi"],
            Family::GeneralizedGamma => &["gerf"],
            Family::GeneralizedBetaPrime => &["genbetaprime"],
            Family::FoldedNormal => &["halfnormal", "erf"],
            Family::FoldedStudentT => &["halft"],
            Family::FoldedCauchy => &["foldcauchy", "arctan"],
            _ => &[],
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        let lower = name.to_ascii_lowercase();
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == lower || f.aliases().contains(&lower.as_str()))
    }

    /// Parameter names, in the order they are stored in a model.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::DiracDelta | Family::FoldedCauchy => &[],
            Family::Uniform => &["gamma"],
            Family::ScadLinear | Family::McpLinear => &["lam", "gamma"],
            Family::UQuadratic => &["b"],
            Family::Exponential | Family::Rayleigh | Family::FoldedNormal => &["sigma"],
            Family::Weibull => &["k", "sigma"],
            Family::ChiSquared => &["k"],
            Family::GeneralizedGamma => &["a", "d", "p"],
            Family::GeneralizedBetaPrime => &["p", "q", "alpha", "beta"],
            Family::FoldedStudentT => &["nu"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether the induced scalar penalty `t ↦ F(t)` is concave on `[0, ∞)`,
/// which holds exactly when the density is non-increasing on its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Concavity {
    Concave,
    NotConcave,
}
