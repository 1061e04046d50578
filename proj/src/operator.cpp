#include "ucplab/operator.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>

namespace ucplab {

Eigen::Index Grid::total_nodes() const {
    Eigen::Index total = 1;
    for (int i = 0; i < box.d; ++i) total *= nodes_per_side();
    return total;
}

Eigen::VectorXd Grid::node(Eigen::Index flat) const {
    const Eigen::VectorXi multi = unflatten(flat);
    Eigen::VectorXd x(box.d);
    const int offset = box.bc == BoundaryCondition::Dirichlet ? 1 : 0;
    for (int i = 0; i < box.d; ++i)
        x(i) = box.lo(i) + (multi(i) + offset) * h();
    return x;
}

Eigen::Index Grid::flatten(const Eigen::VectorXi& multi) const {
    Eigen::Index flat = 0;
    for (int i = 0; i < box.d; ++i) flat = flat * nodes_per_side() + multi(i);
    return flat;
}

Eigen::VectorXi Grid::unflatten(Eigen::Index flat) const {
    Eigen::VectorXi multi(box.d);
    for (int i = box.d - 1; i >= 0; --i) {
        multi(i) = static_cast<int>(flat % nodes_per_side());
        flat /= nodes_per_side();
    }
    return multi;
}

GridFunction GridFunction::zero(const Grid& g) {
    return {g, Eigen::VectorXd::Zero(g.total_nodes())};
}

GridFunction GridFunction::sample(const Grid& g,
                                  const std::function<double(const Eigen::VectorXd&)>& f) {
    GridFunction out = zero(g);
    for (Eigen::Index i = 0; i < out.values.size(); ++i) out.values(i) = f(g.node(i));
    return out;
}

DiscreteHamiltonian build_hamiltonian(const Grid& grid, const GridFunction& V) {
    if (!V.values.allFinite()) throw OperatorError("BadPotential: NaN/Inf in V");
    const Eigen::Index n = grid.total_nodes();
    if (V.values.size() != n) throw OperatorError("BadPotential: size mismatch");
    const double h2 = grid.h() * grid.h();
    const int m = grid.nodes_per_side();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * (2 * grid.box.d + 1));
    for (Eigen::Index flat = 0; flat < n; ++flat) {
        trips.emplace_back(flat, flat, 2.0 * grid.box.d / h2 + V.values(flat));
        const Eigen::VectorXi multi = grid.unflatten(flat);
        for (int axis = 0; axis < grid.box.d; ++axis) {
            for (int dir : {-1, 1}) {
                Eigen::VectorXi nb = multi;
                nb(axis) += dir;
                if (grid.box.bc == BoundaryCondition::Periodic) {
                    nb(axis) = (nb(axis) + m) % m;
                } else if (nb(axis) < 0 || nb(axis) >= m) {
                    continue;  // zero boundary value
                }
                trips.emplace_back(flat, grid.flatten(nb), -1.0 / h2);
            }
        }
    }
    DiscreteHamiltonian H;
    H.grid = grid;
    H.potential = V;
    H.matrix.resize(n, n);
    H.matrix.setFromTriplets(trips.begin(), trips.end());
    return H;
}

namespace {

GridFunction normalized_eigvec(const Grid& grid, const Eigen::VectorXd& v) {
    GridFunction psi{grid, v};
    const double hd = std::pow(grid.h(), grid.box.d);
    psi.values /= std::sqrt(hd) * v.norm();
    return psi;
}

std::vector<EigenPair> eigs_dense(const DiscreteHamiltonian& H, int k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(H.matrix));
    std::vector<EigenPair> out;
    for (int i = 0; i < k; ++i)
        out.push_back({es.eigenvalues()(i), normalized_eigvec(H.grid, es.eigenvectors().col(i))});
    return out;
}

// Shift-invert Lanczos with full reorthogonalization: eigenpairs of
// (H - sigma)^-1 deliver the smallest eigenvalues of H.
std::vector<EigenPair> eigs_lanczos(const DiscreteHamiltonian& H, int k, double tol) {
    const Eigen::Index n = H.matrix.rows();
    const double sigma = H.potential.values.minCoeff() - 1.0;  // H - sigma is SPD
    Eigen::SparseMatrix<double> A = H.matrix;
    for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) -= sigma;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw OperatorError("EigNotConverged: shift-invert factorization failed");

    const int max_iter = std::min<int>(static_cast<int>(n), std::max(6 * k + 60, 300));
    Eigen::MatrixXd Q(n, max_iter + 1);
    Eigen::VectorXd alpha(max_iter), beta(max_iter);
    Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(n, [](Eigen::Index i) {
        return std::sin(0.7 * static_cast<double>(i + 1)) + 0.3;
    });
    q.normalize();
    Q.col(0) = q;
    const double h_norm_est = H.matrix.coeffs().cwiseAbs().maxCoeff() * (2 * H.grid.box.d + 1);

    int iters = 0;
    std::vector<EigenPair> out;
    double worst_resid = 0.0;
    // Largest theta of the inverse operator -> smallest lambda of H.
    const auto ritz = [&]() {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(iters, iters);
        for (int i = 0; i < iters; ++i) {
            T(i, i) = alpha(i);
            if (i + 1 < iters) T(i, i + 1) = T(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        out.clear();
        worst_resid = 0.0;
        bool converged = true;
        for (int i = 0; i < k; ++i) {
            const int col = iters - 1 - i;
            const double theta = es.eigenvalues()(col);
            Eigen::VectorXd y = Q.leftCols(iters) * es.eigenvectors().col(col);
            y.normalize();
            const double lambda = sigma + 1.0 / theta;
            const double resid = (H.matrix * y - lambda * y).norm();
            worst_resid = std::max(worst_resid, resid);
            if (resid > tol * (h_norm_est + std::abs(lambda))) converged = false;
            out.push_back({lambda, normalized_eigvec(H.grid, y)});
        }
        return converged;
    };

    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXd w = solver.solve(Q.col(j));
        alpha(j) = Q.col(j).dot(w);
        w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
        w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);  // second pass
        beta(j) = w.norm();
        iters = j + 1;
        if (beta(j) < 1e-14) break;
        Q.col(j + 1) = w / beta(j);
        if (iters >= std::max(2 * k, 10) && iters % 10 == 0 && ritz()) return out;
    }
    if (iters >= k && ritz()) return out;
    throw OperatorError("EigNotConverged after " + std::to_string(iters) +
                        " iterations, worst residual " + std::to_string(worst_resid));
}

}  // namespace

std::vector<EigenPair> eigs_lowest(const DiscreteHamiltonian& H, int k, double tol,
                                   Eigen::Index dense_threshold) {
    if (k <= 0 || k > H.matrix.rows())
        throw OperatorError("eigs_lowest: invalid eigenpair count");
    if (H.matrix.rows() <= dense_threshold) return eigs_dense(H, k);
    return eigs_lanczos(H, k, tol);
}

int count_below(const Eigen::SparseMatrix<double>& A, double x) {
    const double scale = std::max(1.0, std::abs(x));
    for (int attempt = 0; attempt < 5; ++attempt) {
        const double shift = x + attempt * 1e-12 * scale;  // nudge on breakdown
        Eigen::SparseMatrix<double> B = A;
        for (Eigen::Index i = 0; i < B.rows(); ++i) B.coeffRef(i, i) -= shift;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(B);
        if (ldlt.info() != Eigen::Success) continue;
        const Eigen::VectorXd D = ldlt.vectorD();
        if (!D.allFinite() || (D.array() == 0.0).any()) continue;
        return static_cast<int>((D.array() < 0.0).count());
    }
    throw OperatorError("count_below: LDLT factorization breakdown");
}

int count_in_interval(const DiscreteHamiltonian& H, double a, double b,
                      Eigen::Index dense_threshold) {
    if (a > b) throw OperatorError("count_in_interval: a > b");
    if (H.matrix.rows() <= dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(H.matrix),
                                                          Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        return static_cast<int>(((ev.array() >= a) && (ev.array() <= b)).count());
    }
    // #{<= b} - #{< a}; the open lower end uses a tiny backward nudge.
    return count_below(H.matrix, b) - count_below(H.matrix, a - 1e-12 * std::max(1.0, std::abs(a)));
}

RhoSwitch::RhoSwitch(double epsilon) : eps_(epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0 / 3.0))
        throw OperatorError("rho_switch: epsilon must be in (0, 1/3]");
}

double RhoSwitch::operator()(double x) const {
    if (x <= -eps_) return -1.0;
    if (x >= eps_) return 0.0;
    const double u = (x + eps_) / (2.0 * eps_);
    return -1.0 + u * u * (3.0 - 2.0 * u);
}

double RhoSwitch::derivative(double x) const {
    if (x <= -eps_ || x >= eps_) return 0.0;
    const double u = (x + eps_) / (2.0 * eps_);
    return 6.0 * u * (1.0 - u) / (2.0 * eps_);
}

RegionPredicate ball_region(const Eigen::VectorXd& center, double radius) {
    return [=](const Eigen::VectorXd& x) { return (x - center).norm() < radius; };
}

RegionPredicate box_region(const Eigen::VectorXd& center, double side) {
    return [=](const Eigen::VectorXd& x) {
        for (int i = 0; i < x.size(); ++i)
            if (x(i) < center(i) - side / 2.0 || x(i) >= center(i) + side / 2.0) return false;
        return true;
    };
}

RegionPredicate annulus_region(const Eigen::VectorXd& center, double r_in, double r_out) {
    return [=](const Eigen::VectorXd& x) {
        const double r = (x - center).norm();
        return r >= r_in && r < r_out;
    };
}

RegionPredicate whole_domain() {
    return [](const Eigen::VectorXd&) { return true; };
}

double mass(const GridFunction& psi, const RegionPredicate& region) {
    const double hd = std::pow(psi.grid.h(), psi.grid.box.d);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < psi.values.size(); ++i)
        if (region(psi.grid.node(i))) acc += psi.values(i) * psi.values(i);
    return hd * acc;
}

double gradient_mass(const GridFunction& psi, const RegionPredicate& region) {
    const Grid& g = psi.grid;
    const int m = g.nodes_per_side();
    const double h = g.h();
    const double hd = std::pow(h, g.box.d);
    double acc = 0.0;
    for (Eigen::Index flat = 0; flat < psi.values.size(); ++flat) {
        const Eigen::VectorXi multi = g.unflatten(flat);
        const Eigen::VectorXd x = g.node(flat);
        for (int axis = 0; axis < g.box.d; ++axis) {
            Eigen::VectorXi nb = multi;
            nb(axis) += 1;
            double right;
            if (nb(axis) >= m) {
                if (g.box.bc == BoundaryCondition::Periodic) {
                    nb(axis) = 0;
                    right = psi.values(g.flatten(nb));
                } else {
                    right = 0.0;  // Dirichlet boundary node
                }
            } else {
                right = psi.values(g.flatten(nb));
            }
            if (region(x)) {
                const double diff = (right - psi.values(flat)) / h;
                acc += diff * diff;
            }
            // Dirichlet: the edge from the left boundary (value 0) into the
            // first interior node, charged at the boundary point.
            if (g.box.bc == BoundaryCondition::Dirichlet && multi(axis) == 0) {
                Eigen::VectorXd xb = x;
                xb(axis) -= h;
                if (region(xb)) {
                    const double diff = psi.values(flat) / h;
                    acc += diff * diff;
                }
            }
        }
    }
    return hd * acc;
}

double inner(const GridFunction& u, const GridFunction& v) {
    const double hd = std::pow(u.grid.h(), u.grid.box.d);
    return hd * u.values.dot(v.values);
}

}  // namespace ucplab
