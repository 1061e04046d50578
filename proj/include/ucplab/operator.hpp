#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <stdexcept>
#include <vector>

#include "ucplab/geometry.hpp"

namespace ucplab {

struct OperatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Uniform grid over a box with spacing h = L / n_per_side. Dirichlet grids
/// store the interior nodes x_min + i·h, i = 1..n-1 (boundary values are
/// identically zero); periodic grids store x_min + i·h, i = 0..n-1.
struct Grid {
    BoxSpec box;
    int n_per_side = 1;

    double h() const { return box.side / n_per_side; }
    int nodes_per_side() const {
        return box.bc == BoundaryCondition::Dirichlet ? n_per_side - 1 : n_per_side;
    }
    Eigen::Index total_nodes() const;
    /// Physical coordinates of the flattened (row-major) node index.
    Eigen::VectorXd node(Eigen::Index flat) const;
    Eigen::Index flatten(const Eigen::VectorXi& multi) const;
    Eigen::VectorXi unflatten(Eigen::Index flat) const;
};

struct GridFunction {
    Grid grid;
    Eigen::VectorXd values;

    static GridFunction zero(const Grid& g);
    static GridFunction sample(const Grid& g,
                               const std::function<double(const Eigen::VectorXd&)>& f);
};

struct DiscreteHamiltonian {
    Grid grid;
    GridFunction potential;
    Eigen::SparseMatrix<double> matrix;  // symmetric (2d+1)-point stencil + diag(V)
};

/// -Δ_h (standard stencil) + diag(V). Throws "BadPotential" on NaN/Inf.
DiscreteHamiltonian build_hamiltonian(const Grid& grid, const GridFunction& V);

struct EigenPair {
    double lambda = 0;
    GridFunction psi;  // L²-normalized with quadrature weight h^d
};

/// k smallest eigenpairs, non-decreasing. Dense solve up to `dense_threshold`
/// unknowns, shift-invert Lanczos with full reorthogonalization above.
std::vector<EigenPair> eigs_lowest(const DiscreteHamiltonian& H, int k, double tol = 1e-9,
                                   Eigen::Index dense_threshold = 4000);

/// Number of eigenvalues in [a, b]; dense spectrum at desk scale, Sylvester
/// inertia (LDLᵀ) counts above the dense threshold.
int count_in_interval(const DiscreteHamiltonian& H, double a, double b,
                      Eigen::Index dense_threshold = 4000);

/// Inertia count: #{eigenvalues <= x} via LDLᵀ of H - xI, with a documented
/// ±1e-12 shift nudge on factorization breakdown.
int count_below(const Eigen::SparseMatrix<double>& A, double x);

/// C¹ non-decreasing switch: -1 on (-∞,-ε], 0 on [ε,∞), cubic smoothstep in
/// between; |ρ'| <= 3/(4ε) <= 1/ε.
class RhoSwitch {
  public:
    explicit RhoSwitch(double epsilon);
    double operator()(double x) const;
    double derivative(double x) const;
    double epsilon() const { return eps_; }
    double max_derivative() const { return 0.75 / eps_; }

  private:
    double eps_;
};

using RegionPredicate = std::function<bool(const Eigen::VectorXd&)>;

RegionPredicate ball_region(const Eigen::VectorXd& center, double radius);
RegionPredicate box_region(const Eigen::VectorXd& center, double side);  // half-open cell
RegionPredicate annulus_region(const Eigen::VectorXd& center, double r_in, double r_out);
RegionPredicate whole_domain();

/// h^d Σ_{x in region} ψ(x)².
double mass(const GridFunction& psi, const RegionPredicate& region);

/// h^d Σ |∇_h ψ|² with forward differences honoring the boundary condition;
/// a difference is charged to the region of its left node.
double gradient_mass(const GridFunction& psi, const RegionPredicate& region);

/// Discrete L² inner product h^d <u, v>.
double inner(const GridFunction& u, const GridFunction& v);

}  // namespace ucplab
