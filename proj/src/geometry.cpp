#include "ucplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "ucplab/rng.hpp"

namespace ucplab {

std::string to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "periodic";
}

BoundaryCondition bc_from_string(const std::string& s) {
    if (s == "dirichlet") return BoundaryCondition::Dirichlet;
    if (s == "periodic") return BoundaryCondition::Periodic;
    throw GeometryError("unknown boundary condition: " + s);
}

Eigen::VectorXd BoxSpec::center_or_zero() const {
    if (center.size() == d) return center;
    return Eigen::VectorXd::Zero(d);
}

std::vector<SiteIndex> lattice_sites(const BoxSpec& box, int M) {
    const double ratio = box.side / M;
    const long n = std::lround(ratio);
    if (M <= 0 || std::abs(ratio - n) > 1e-9 || n % 2 != 1)
        throw GeometryError("IncommensurateBox: L/M must be an odd integer");
    const int half = static_cast<int>((n - 1) / 2);
    std::vector<SiteIndex> sites;
    sites.reserve(static_cast<std::size_t>(std::pow(n, box.d)));
    SiteIndex k = SiteIndex::Constant(box.d, -half * M);
    while (true) {
        sites.push_back(k);
        int axis = box.d - 1;
        for (; axis >= 0; --axis) {
            k(axis) += M;
            if (k(axis) <= half * M) break;
            k(axis) = -half * M;
        }
        if (axis < 0) break;
    }
    return sites;
}

std::vector<Eigen::VectorXd> DeloneArrangement::all_points() const {
    std::vector<Eigen::VectorXd> pts;
    for (const auto& [cell, z] : gamma1) pts.push_back(z);
    for (const auto& z : gamma2) pts.push_back(z);
    return pts;
}

int DeloneArrangement::n_tilde() const {
    return static_cast<int>(std::pow(std::ceil(M / M_tilde), d));
}

namespace {

double sup_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).lpNorm<Eigen::Infinity>();
}

std::vector<int> cell_of(const Eigen::VectorXd& x, int M) {
    std::vector<int> cell(x.size());
    for (int i = 0; i < x.size(); ++i)
        cell[static_cast<std::size_t>(i)] =
            M * static_cast<int>(std::floor(x(i) / M + 0.5));
    return cell;
}

}  // namespace

std::optional<DeloneViolation> validate_delone(const std::vector<Eigen::VectorXd>& points,
                                               double M_tilde, int M, const BoxSpec& window) {
    // Uniform discreteness: two points fit in a closed M̃-box iff their
    // sup-distance is <= M̃.
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (sup_dist(points[i], points[j]) <= M_tilde) {
                DeloneViolation v;
                v.box_center = 0.5 * (points[i] + points[j]);
                v.box_side = M_tilde;
                v.count = 2;
                v.what = "too crowded";
                return v;
            }
        }
    }
    // Relative denseness: every closed M-box centered on a sub-lattice site
    // of the window must contain a point. Boundary cells are inside the
    // window by construction, so every cell is tested.
    const int d = window.d;
    for (const auto& k : lattice_sites(window, M)) {
        int count = 0;
        for (const auto& p : points) {
            bool in = true;
            for (int axis = 0; axis < d; ++axis)
                if (std::abs(p(axis) - k(axis)) > M / 2.0) in = false;
            if (in) ++count;
        }
        if (count == 0) {
            DeloneViolation v;
            v.box_center = k.cast<double>();
            v.box_side = M;
            v.count = 0;
            v.what = "empty cell";
            return v;
        }
    }
    return std::nullopt;
}

DeloneArrangement generate_delone(int d, double M_tilde, int M, const BoxSpec& window,
                                  std::uint64_t seed, double delta, int gamma2_per_cell) {
    if (!(M_tilde > 0 && M_tilde < M))
        throw GeometryError("DeloneInfeasible: require 0 < M_tilde < M");
    // Sampling each point inside its cell shrunk by (M - M̃)/2 per face keeps
    // points of distinct cells at sup-distance >= M̃; ties have measure zero
    // and are rejected below.
    const double margin = (M - M_tilde) / 2.0;
    DeloneArrangement arr;
    arr.d = d;
    arr.M_tilde = M_tilde;
    arr.M = M;
    arr.delta = delta;

    BoxSpec cell_box = window;
    auto sites = lattice_sites(window, M);
    std::vector<Eigen::VectorXd> accepted;
    std::uint64_t site_counter = 0;
    for (const auto& k : sites) {
        ++site_counter;
        Eigen::VectorXd z(d);
        bool ok = false;
        for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
            CounterRng rng(seed, site_counter, static_cast<std::uint64_t>(attempt));
            for (int i = 0; i < d; ++i)
                z(i) = k(i) + (rng.uniform() - 0.5) * 2.0 * margin;
            ok = true;
            for (const auto& p : accepted)
                if (sup_dist(z, p) <= M_tilde) ok = false;
        }
        if (!ok) throw GeometryError("DeloneInfeasible: separation not attainable");
        accepted.push_back(z);
        std::vector<int> cell(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) cell[static_cast<std::size_t>(i)] = k(i);
        arr.gamma1[cell] = z;
        for (int extra = 0; extra < gamma2_per_cell; ++extra) {
            Eigen::VectorXd w(d);
            bool got = false;
            for (int attempt = 0; attempt < 256 && !got; ++attempt) {
                CounterRng rng(seed ^ 0x9e3779b97f4a7c15ull, site_counter,
                               static_cast<std::uint64_t>(1000 + 256 * extra + attempt));
                for (int i = 0; i < d; ++i)
                    w(i) = k(i) + (rng.uniform() - 0.5) * 2.0 * margin;
                got = true;
                for (const auto& p : accepted)
                    if (sup_dist(w, p) <= M_tilde) got = false;
            }
            if (got) {
                accepted.push_back(w);
                arr.gamma2.push_back(w);
            }
        }
    }
    return arr;
}

bool ball_in_cell(const Eigen::VectorXd& z, const std::vector<int>& cell, int M, double delta) {
    for (int i = 0; i < z.size(); ++i) {
        const double c = cell[static_cast<std::size_t>(i)];
        if (z(i) - delta < c - M / 2.0 || z(i) + delta > c + M / 2.0) return false;
    }
    return true;
}

DeloneArrangement split_delone(const std::vector<Eigen::VectorXd>& points, double M_tilde,
                               int M, const BoxSpec& window, double delta) {
    DeloneArrangement arr;
    arr.d = window.d;
    arr.M_tilde = M_tilde;
    arr.M = M;
    arr.delta = delta;
    std::map<std::vector<int>, std::vector<Eigen::VectorXd>> by_cell;
    for (const auto& p : points) by_cell[cell_of(p, M)].push_back(p);
    for (auto& [cell, pts] : by_cell) {
        std::sort(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            for (int i = 0; i < a.size(); ++i) {
                if (a(i) < b(i)) return true;
                if (a(i) > b(i)) return false;
            }
            return false;
        });
        arr.gamma1[cell] = pts.front();
        for (std::size_t i = 1; i < pts.size(); ++i) arr.gamma2.push_back(pts[i]);
    }
    // Every M-cell of the window must be populated.
    for (const auto& k : lattice_sites(window, M)) {
        std::vector<int> cell(static_cast<std::size_t>(window.d));
        for (int i = 0; i < window.d; ++i) cell[static_cast<std::size_t>(i)] = k(i);
        if (arr.gamma1.find(cell) == arr.gamma1.end())
            throw GeometryError("NotDelone: empty M-cell in window");
    }
    return arr;
}

NearNeighbor right_near_neighbor(const SiteIndex& k, int L, BoundaryCondition bc) {
    const int d = static_cast<int>(k.size());
    const int step = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)))) + 1;
    const int half = (L - 1) / 2;
    NearNeighbor nn;
    nn.k_plus = k;
    nn.k_plus(0) += step;
    if (bc == BoundaryCondition::Periodic) {
        int v = nn.k_plus(0);
        while (v >= half + 1) v -= L;
        while (v < -half) v += L;
        nn.k_plus(0) = v;
        nn.k_plus_minus = nn.k_plus;
        return nn;
    }
    nn.k_plus_minus = nn.k_plus;
    // Fold back into [-half, half] by reflections across {x1 = ±L/2};
    // one reflection suffices when L >= step, iterated otherwise.
    int v = nn.k_plus_minus(0);
    while (v > half || v < -half) {
        nn.mirrored = true;
        if (v > half)
            v = L - v;       // mirror across x1 = L/2
        else
            v = -L - v;      // mirror across x1 = -L/2
    }
    nn.k_plus_minus(0) = v;
    return nn;
}

std::vector<Eigen::VectorXd> reflect_extend_points(const std::vector<Eigen::VectorXd>& points,
                                                   double L) {
    if (points.empty()) return {};
    const int d = static_cast<int>(points.front().size());
    std::vector<Eigen::VectorXd> out;
    for (const auto& p : points) {
        for (int mask = 0; mask < (1 << d); ++mask) {
            Eigen::VectorXd q = p;
            for (int i = 0; i < d; ++i)
                if (mask & (1 << i)) q(i) = -q(i);
            // half-open fundamental domain [-L, L)^d
            bool keep = true;
            for (int i = 0; i < d; ++i)
                if (q(i) >= L || q(i) < -L) keep = false;
            if (!keep) continue;
            bool dup = false;
            for (const auto& r : out)
                if ((r - q).lpNorm<Eigen::Infinity>() < 1e-12) dup = true;
            if (!dup) out.push_back(q);
        }
    }
    return out;
}

}  // namespace ucplab
