#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>

#include "ucplab/geometry.hpp"

namespace ucplab {

struct ConstantsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symbolic Carleman-machinery constants. The analysis only asserts their
/// existence; the defaults below are conventions echoed into every report.
struct CarlemanConfig {
    double C2 = 1.0;       // Carleman estimate, >= 1
    double C3 = 1.0;       // Carleman estimate, >= 1
    double K_Delta = 1.0;  // cutoff derivative bound, > 0
    double C_dim = 2.718281828459045;  // dimensional constant C(d) > 1

    void validate() const;
};

struct UcpParams {
    int d = 1;
    double K_V = 0.0;      // sup norm of the effective potential
    double D_0 = 1.0;      // security distance to the boundary
    double R = 1.0;        // distance scale, diam Θ <= R = dist(x, Θ)
    double delta = 0.3;    // ball radius in (0, 1]
    double beta = 1.0;     // bound on ||ψ||_G² / ||ψ||_Θ²
};

/// φ(s) = s · exp(-∫₀ˢ (1-e⁻ᵗ)/t dt), the radial Carleman weight profile.
/// Series evaluation for s <= 8, composite Gauss-Legendre beyond; abs error <= 1e-12.
double phi(double s);

/// w_ρ(x) = φ(|x|/ρ).
double weight(const Eigen::VectorXd& x, double rho);

/// Smallest α admissible for the Carleman argument: the max of the three
/// lower bounds (the logarithmic one clamped at zero).
double choose_alpha(const UcpParams& p, const CarlemanConfig& c);

/// Fully explicit lower bound on the quantitative UC constant:
/// (5/16)(1/41)(C₂³/(C₃K_Δ⁴))(δ⁴/R²)(δ/48R)^{2α} / (1+K_V²).
double c_quc_full(const UcpParams& p, const CarlemanConfig& c);

/// Closed power-law form (δ/(CR))^{C + C R^{4/3} K_V^{2/3} + ln β}.
double c_quc_corollary(int d, double K_V, double R, double delta, double beta, double C_dim);

/// Same with the R-free exponent, valid once R <= 2⌈√d⌉.
double c_quc_corollary_simplified(int d, double K_V, double delta, double beta, double C_dim);

struct SfucValue {
    double composed = 0;    // prefactor × power-law form at the fixed (R, β)
    double simplified = 0;  // (δ/C)^{C + C K_V^{2/3}}
    double dilute = 0;      // (δ/(CM))^{C + C M^{4/3} K_V^{2/3}}, M-lattice variant
};

/// Scale-free UC constant for the given boundary condition; M > 1 selects the
/// dilute-lattice variant for the `dilute` field.
SfucValue c_sfuc(int d, double K_V, double delta, BoundaryCondition bc, double C_dim, int M = 1);

struct LocalFluctuationConstant {
    double c_lf = 0;
    double c1 = 0;     // one-step constant c₁(δ, β); always >= c_lf
    double beta = 0;
    double beta_tilde = 0;
};

/// Two-step constant C_lf = C_qUC(1/20, β) C_qUC(δ, β̃) / (10⌈√d⌉)^d with
/// T = 30⌈√d⌉, β = 2(10⌈√d⌉ T)^d, β̃ = 2T^d / c₁(1/20, β). Requires δ <= 1/20.
LocalFluctuationConstant c_lf(int d, double K_V, double delta, const CarlemanConfig& c);

struct WegnerConstants {
    double kappa = 0;  // C₋ · C_sfUC
    double c_E = 0;    // K₁ e^{E₀+1} + 2^d K₂
    double c_W = 0;    // C_E · ⌈4/κ⌉
};

WegnerConstants kappa_and_cw(double C_minus, double c_sfuc, double E0, int d,
                             double K1 = 1.0, double K2 = 1.0);

struct ConstantsReport {
    double alpha = 0;
    double c_quc = 0;
    SfucValue c_sfuc;
    std::optional<LocalFluctuationConstant> c_lf;
    WegnerConstants wegner;
    CarlemanConfig config;
    UcpParams params;
    BoundaryCondition bc = BoundaryCondition::Periodic;
};

/// Bundle every constant for one (d, K_V, δ, bc) configuration.
ConstantsReport constants_report(int d, double K_V, double delta, BoundaryCondition bc,
                                 const CarlemanConfig& cfg, double C_minus = 1.0,
                                 double E0 = 0.0, int M = 1);

}  // namespace ucplab
