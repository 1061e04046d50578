#pragma once

#include <functional>
#include <map>
#include <vector>

#include "ucplab/constants.hpp"
#include "ucplab/geometry.hpp"
#include "ucplab/operator.hpp"

namespace ucplab {

/// Periodic extension: values looked up modulo the torus. Dirichlet:
/// antisymmetric reflection onto a 2L periodic grid (zero on every
/// reflection hyperplane node, odd across each).
GridFunction extend_function(const GridFunction& psi);

enum class SiteLabel { Dominating, Weak };

struct SiteClassification {
    SiteIndex site;
    SiteLabel label = SiteLabel::Weak;
    double cell_mass = 0;   // ∫_{Λ₁(k)} |ψ|²
    double tbox_mass = 0;   // ∫_{Λ_T(k)} |extension|²
};

struct Classification {
    int T = 0;
    BoundaryCondition bc = BoundaryCondition::Periodic;
    std::vector<SiteClassification> sites;
    double weak_mass_fraction = 0;
    double dominating_mass_fraction = 0;
    double cover_identity_residual = 0;  // relative; periodic bc only
};

/// Dominating/weak labels over all unit cells: m₁(k) >= m_T(k)/(2T^d) for
/// periodic bc, threshold 1/(2(2T)^d) against the antisymmetric extension for
/// Dirichlet. T defaults to 62⌈√d⌉.
Classification classify_sites(const GridFunction& psi, int L, int T = 0);

/// r = Σ_k mass(B(z_k, δ)) / mass(Λ_L). Centers keyed by unit-cell site;
/// missing keys fall back to the cell center. Throws on δ < 2h.
double mass_ratio(const GridFunction& psi, int L, double delta,
                  const std::map<std::vector<int>, Eigen::VectorXd>& centers);

struct UcpReport {
    int L = 0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int eig_index = 0;
    double lambda = 0;
    double K_V = 0;           // ||V₀ - λ||∞ on the grid
    double ratio = 0;         // ball-mass / total-mass
    double weak_fraction = 0;
    double c_sfuc_analytic = 0;
    int T = 0;
    double delta = 0;
};

struct UcpSummary {
    std::vector<UcpReport> rows;
    std::vector<double> min_ratio_per_L;  // aligned with L_list
    std::vector<int> L_list;
    double log_ratio_slope = 0;           // least-squares slope of ln r_min vs L
};

/// Ratio/classification sweep over box sizes and the lowest eigenfunctions.
/// Ball centers default to the unit-cell centers when `centers` is empty.
UcpSummary verify_ucp(const std::function<double(const Eigen::VectorXd&)>& V0,
                      const std::vector<int>& L_list, BoundaryCondition bc, int n_eigs,
                      double delta, int n_per_unit, const CarlemanConfig& cfg,
                      const std::map<std::vector<int>, Eigen::VectorXd>& centers = {});

struct CacciopoliResult {
    double lhs = 0;           // gradient mass on the annulus
    double rhs = 0;           // (1 + 9/b² + ||V||∞²) × mass on the enlarged region
    bool ok = false;
    double diffineq_violation = 0;  // worst relative excess of |Δ_h ψ| over |Vψ|
};

/// Gradient-vs-mass check on the annulus B(center,c) \ B(center,a); case (a) uses
/// the enlarged annulus, case (b) (a == 0 allowed) the full ball B(c+b).
CacciopoliResult cacciopoli_check(const GridFunction& psi, const GridFunction& V,
                                  const Eigen::VectorXd& center, double a, double b, double c,
                                  double slack = 0.05);

struct LocalFluctuationReport {
    SiteIndex site;
    Eigen::VectorXd maximal_box_center;
    double maximal_box_mass = 0;
    double cell_mass = 0;
    bool pigeonhole_ok = false;   // max box mass >= cell mass / (10⌈√d⌉)^d
    double min_ball_ratio = 0;    // min over admissible centers of ball/cell mass
    double c_lf_analytic = 0;
};

/// Local-fluctuation experiment on one dominating cell (T = 30⌈√d⌉ convention):
/// maximal sub-box by mass (lexicographic tie-break), then the worst
/// ball-to-cell mass ratio over a lattice of admissible ball centers.
LocalFluctuationReport local_fluctuation_experiment(const GridFunction& psi,
                                                    const SiteIndex& site, double delta,
                                                    double K_V, const CarlemanConfig& cfg);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ucplab
