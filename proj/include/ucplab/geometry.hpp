#pragma once

#include <Eigen/Core>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucplab {

enum class BoundaryCondition { Dirichlet, Periodic };

std::string to_string(BoundaryCondition bc);
BoundaryCondition bc_from_string(const std::string& s);

/// Closed box [x - L/2, x + L/2]^d.
struct BoxSpec {
    int d = 1;
    Eigen::VectorXd center;          // length d; zero vector if empty
    double side = 1.0;               // L > 0
    BoundaryCondition bc = BoundaryCondition::Dirichlet;

    Eigen::VectorXd center_or_zero() const;
    double lo(int axis) const { return center_or_zero()(axis) - side / 2.0; }
    double hi(int axis) const { return center_or_zero()(axis) + side / 2.0; }
};

/// Lattice site k in the index set Λ̃_L = Λ_L ∩ (MZ)^d, components in [-L/2, L/2).
using SiteIndex = Eigen::VectorXi;

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All sites of (MZ)^d inside [-L/2, L/2)^d. Requires L/M an odd integer.
std::vector<SiteIndex> lattice_sites(const BoxSpec& box, int M);

struct DeloneArrangement {
    int d = 1;
    double M_tilde = 0.5;            // uniform discreteness scale, < M
    int M = 1;                       // relative denseness scale
    double delta = 0.3;              // ball radius attached to Γ₁ points
    // Γ₁: exactly one point per M-cell, keyed by the cell's lattice site.
    std::map<std::vector<int>, Eigen::VectorXd> gamma1;
    // Γ₂: remaining points, unindexed.
    std::vector<Eigen::VectorXd> gamma2;

    std::vector<Eigen::VectorXd> all_points() const;
    int n_tilde() const;             // Ñ = ⌈M/M̃⌉^d, cap on points per cell
};

struct DeloneViolation {
    Eigen::VectorXd box_center;
    double box_side = 0;
    int count = 0;                   // points found in the witness box
    std::string what;                // "too crowded" or "empty cell"
};

/// Exhaustive Delone check on a finite window. Boxes for the lower
/// (denseness) check are only tested when fully inside the window.
std::optional<DeloneViolation> validate_delone(const std::vector<Eigen::VectorXd>& points,
                                               double M_tilde, int M, const BoxSpec& window);

/// Perturbed-lattice generator: one uniform point per M-cell of the window,
/// kept M̃-separated; optionally extra Γ₂ points per cell. Deterministic in seed.
DeloneArrangement generate_delone(int d, double M_tilde, int M, const BoxSpec& window,
                                  std::uint64_t seed, double delta = 0.3,
                                  int gamma2_per_cell = 0);

/// Assign the lexicographically smallest point of each half-open M-cell
/// [k - M/2, k + M/2) to Γ₁, the rest to Γ₂. Throws "NotDelone" on an empty cell.
DeloneArrangement split_delone(const std::vector<Eigen::VectorXd>& points, double M_tilde,
                               int M, const BoxSpec& window, double delta);

/// True iff B(z, delta) ⊂ Λ_M(k) for the Γ₁ point of cell k.
bool ball_in_cell(const Eigen::VectorXd& z, const std::vector<int>& cell, int M, double delta);

struct NearNeighbor {
    SiteIndex k_plus;                // k + (⌈√d⌉+1) e₁, wrapped for periodic bc
    SiteIndex k_plus_minus;          // Dirichlet: mirror image inside Λ̃_L; else = k_plus
    bool mirrored = false;
};

/// Right near-neighbor map of the mass-transfer argument. For Dirichlet bc the
/// out-of-box image is folded back by (possibly iterated) reflection across
/// the box faces {x₁ = ±L/2}.
NearNeighbor right_near_neighbor(const SiteIndex& k, int L, BoundaryCondition bc);

/// Mirror images of a point set under successive reflections in all d
/// coordinate hyperplanes bounding [0, L]^d; result lives on [-L, L)^d.
std::vector<Eigen::VectorXd> reflect_extend_points(const std::vector<Eigen::VectorXd>& points,
                                                   double L);

}  // namespace ucplab
