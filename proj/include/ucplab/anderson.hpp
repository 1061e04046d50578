#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ucplab/geometry.hpp"
#include "ucplab/operator.hpp"

namespace ucplab {

struct AndersonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CouplingDistribution {
    enum class Kind { Uniform, Bernoulli, TruncatedGaussian };
    Kind kind = Kind::Uniform;
    double a = 0.0, b = 1.0;        // Uniform/TruncatedGaussian support
    double p = 0.5;                 // Bernoulli weight of v1
    double v0 = 0.0, v1 = 1.0;      // Bernoulli atoms
    double mu = 0.0, sigma = 1.0;   // TruncatedGaussian parameters

    static CouplingDistribution uniform(double a, double b);
    static CouplingDistribution bernoulli(double p, double v0, double v1);
    static CouplingDistribution truncated_gaussian(double mu, double sigma, double a, double b);

    double support_lo() const;
    double support_hi() const;
    /// m with supp μ ⊂ [-m, m].
    double support_bound() const;
    /// One draw, deterministic in (seed, realization, site).
    double sample(std::uint64_t seed, std::uint64_t realization, std::uint64_t site) const;
};

/// Global modulus of continuity s(ε) = sup_E μ([E-ε/2, E+ε/2]).
double modulus_of_continuity(const CouplingDistribution& dist, double epsilon);

enum class SingleSiteProfile { IndicatorBall, BumpBall };

struct DeloneAndersonModel {
    std::function<double(const Eigen::VectorXd&)> V0 = [](const Eigen::VectorXd&) { return 0.0; };
    DeloneArrangement arrangement;
    double C_minus = 1.0, C_plus = 1.0;      // 0 < C₋ <= C₊
    double delta_minus = 0.3, delta_plus = 0.4;  // 0 < δ₋ < δ₊
    CouplingDistribution dist;
    SingleSiteProfile profile = SingleSiteProfile::IndicatorBall;

    void validate() const;
    /// Single-site potential u_j centered at z, evaluated at x.
    double single_site(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const;
};

struct CouplingRecord {
    std::vector<double> gamma1;  // aligned with arrangement.gamma1 iteration order
    std::vector<double> gamma2;
};

/// V_ω = Σ_j ω_j u_j with counter-based couplings; bit-identical for equal
/// (seed, realization_id) regardless of thread count.
std::pair<GridFunction, CouplingRecord> sample_potential(const DeloneAndersonModel& model,
                                                         const Grid& grid, std::uint64_t seed,
                                                         std::uint64_t realization_id);

/// W = Σ_{Γ₁} u_j (disorder frozen at one on Γ₁, zero on Γ₂).
GridFunction frozen_gamma1_potential(const DeloneAndersonModel& model, const Grid& grid);

struct WegnerRow {
    double epsilon = 0;
    double mean_count = 0;
    double ci_lo = 0, ci_hi = 0;  // 95% normal-approximation interval
    double bound_all_E = 0;       // C_W s(ε) |ln ε|^d L^d
    double bound_low_E = 0;       // C_W s(ε) L^d
};

struct WegnerTable {
    std::vector<WegnerRow> rows;
    double loglog_slope = 0;      // fitted slope of ln(mean) vs ln(ε)
    int dropped = 0;
};

/// Monte-Carlo eigenvalue counts in [E-ε, E+ε] with common random numbers
/// across the ε grid. Results are bit-identical for any n_threads: every
/// realization owns a fixed slot and a counter-based stream.
WegnerTable wegner_mc(const DeloneAndersonModel& model, const Grid& grid, double E,
                      const std::vector<double>& epsilon_list, int n_real, std::uint64_t seed,
                      double c_W = 1.0, int n_threads = 1);

struct LiftCurve {
    std::vector<double> t;
    std::vector<double> lambda;
    std::vector<double> hf_lhs;   // central-difference dλ/dt
    std::vector<double> hf_rhs;   // <ψ(t), W ψ(t)>
    std::vector<bool> hf_valid;   // false where the ground state is degenerate
    double kappa_emp = 0;         // C₋ × min ground-state ball-mass ratio
};

/// Ground-state energy λ(t) of H₀ + tW with Hellmann-Feynman residuals and
/// the empirical lifting constant.
LiftCurve eigenvalue_lift(const DeloneAndersonModel& model, const Grid& grid,
                          const std::vector<double>& t_grid);

struct UncertaintyResult {
    bool empty_projector = false;
    int projector_rank = 0;
    double min_compression_eigenvalue = 0;
    double threshold = 0;  // (1-q)·κ
    bool ok = false;
};

/// Smallest eigenvalue of P W P on ran P, P = χ_{(-∞, λ(0)+qκ]}(H₀).
UncertaintyResult uncertainty_check(const DiscreteHamiltonian& H0, const GridFunction& W,
                                    double q, double kappa, double tol = 0.05);

struct SsfRecord {
    std::vector<double> breakpoints;  // merged sorted spectra
    std::vector<int> xi;              // ξ on (breakpoints[i], breakpoints[i+1])
    double trace_identity_residual = 0;
};

/// Spectral shift function from dense spectra; verifies the trace identity
/// Tr[ρ(H₂)-ρ(H₁)] = ∫ ρ' ξ for a family of shifted switch functions.
SsfRecord ssf(const Eigen::MatrixXd& H1, const Eigen::MatrixXd& H2, double epsilon = 0.1);

struct SmeRow {
    double epsilon = 0;
    double lhs = 0;  // ∫ [φ(λ+ε) - φ(λ)] dμ
    double rhs = 0;  // s(ε)[φ(b+ε) - φ(a)]
    bool ok = false;
};

/// Partial-integration inequality check for a monotone C¹ bounded φ and a
/// compactly supported coupling distribution.
std::vector<SmeRow> sme_check(const CouplingDistribution& dist,
                              const std::function<double(double)>& phi_fn,
                              const std::vector<double>& epsilon_grid);

}  // namespace ucplab
