#include "ucplab/ucp.hpp"

#include <algorithm>
#include <cmath>

namespace ucplab {

namespace {

int ceil_sqrt_d(int d) {
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
}

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// #{multiples of q in the half-open integer interval [s, s + len)}
long multiples_in(long s, long len, long q) {
    return floor_div(s + len - 1, q) - floor_div(s - 1, q);
}

}  // namespace

GridFunction extend_function(const GridFunction& psi) {
    const Grid& g = psi.grid;
    if (g.box.bc == BoundaryCondition::Periodic) return psi;  // torus is its own extension

    const int d = g.box.d;
    const int n = g.n_per_side;
    Grid ext;
    ext.box.d = d;
    ext.box.side = 2.0 * g.box.side;
    ext.box.bc = BoundaryCondition::Periodic;
    ext.box.center = g.box.center_or_zero().array() - g.box.side / 2.0;
    ext.n_per_side = 2 * n;
    if (ext.nodes_per_side() != 2 * n) throw OperatorError("GridAlignment");

    GridFunction out = GridFunction::zero(ext);
    for (Eigen::Index flat = 0; flat < out.values.size(); ++flat) {
        const Eigen::VectorXi multi = ext.unflatten(flat);
        double sign = 1.0;
        Eigen::VectorXi orig(d);
        bool zero = false;
        for (int axis = 0; axis < d; ++axis) {
            const int i = multi(axis) - n;  // position i·h relative to the box corner
            if (i == 0 || i == -n) {
                zero = true;  // reflection hyperplane node
                break;
            }
            if (i > 0) {
                orig(axis) = i - 1;
            } else {
                orig(axis) = -i - 1;
                sign = -sign;
            }
        }
        out.values(flat) = zero ? 0.0 : sign * psi.values(g.flatten(orig));
    }
    return out;
}

namespace {

// Per-node unit-cell masses: each node belongs to the half-open cell
// [k - 1/2, k + 1/2) it falls in.
std::map<std::vector<int>, double> cell_masses(const GridFunction& psi, int L) {
    const Grid& g = psi.grid;
    const double hd = std::pow(g.h(), g.box.d);
    std::map<std::vector<int>, double> cm;
    for (Eigen::Index flat = 0; flat < psi.values.size(); ++flat) {
        const Eigen::VectorXd x = g.node(flat);
        std::vector<int> cell(static_cast<std::size_t>(g.box.d));
        bool in_box = true;
        for (int i = 0; i < g.box.d; ++i) {
            const int k = static_cast<int>(std::floor(x(i) + 0.5 + 1e-12));
            if (k > (L - 1) / 2 || k < -(L - 1) / 2) in_box = false;
            cell[static_cast<std::size_t>(i)] = k;
        }
        if (in_box) cm[cell] += hd * psi.values(flat) * psi.values(flat);
    }
    return cm;
}

}  // namespace

Classification classify_sites(const GridFunction& psi, int L, int T) {
    const Grid& g = psi.grid;
    const int d = g.box.d;
    if (T == 0) T = 62 * ceil_sqrt_d(d);
    const bool periodic = g.box.bc == BoundaryCondition::Periodic;

    const GridFunction ext = extend_function(psi);
    const Grid& eg = ext.grid;
    const int period_units = periodic ? L : 2 * L;        // torus period in unit cells
    const int mult = g.n_per_side / L;                    // nodes per unit length
    if (mult * L != g.n_per_side || mult % 2 != 0)
        throw OperatorError("GridAlignment: n_per_side must be an even multiple of L");

    // Integer lattice of spacing h: node j has coordinate ext_lo + j·h, the
    // T-box of site k covers [k - T/2, k + T/2) per axis. Lift counts modulo
    // the torus period are exact in integer arithmetic.
    const long torus_steps = static_cast<long>(period_units) * mult;
    const long box_len = static_cast<long>(T) * mult;
    const auto lift_count = [&](int k_val, long j, int axis) {
        const double a_real = (k_val - T / 2.0 - eg.box.lo(axis)) * mult;
        const long a = std::lround(a_real);
        return multiples_in(a - j, box_len, torus_steps);
    };

    const double hd = std::pow(eg.h(), d);
    const auto sites = lattice_sites(BoxSpec{d, Eigen::VectorXd::Zero(d),
                                             static_cast<double>(L), g.box.bc},
                                     1);
    const auto cm = cell_masses(psi, L);

    Classification cls;
    cls.T = T;
    cls.bc = g.box.bc;
    const double threshold_factor =
        periodic ? 1.0 / (2.0 * std::pow(T, d)) : 1.0 / (2.0 * std::pow(2.0 * T, d));

    double total_mass = 0, weak_mass = 0, tbox_sum = 0;
    for (const auto& k : sites) {
        SiteClassification sc;
        sc.site = k;
        std::vector<int> cell(k.data(), k.data() + d);
        sc.cell_mass = cm.count(cell) ? cm.at(cell) : 0.0;

        double tmass = 0;
        for (Eigen::Index flat = 0; flat < ext.values.size(); ++flat) {
            const double v2 = ext.values(flat) * ext.values(flat);
            if (v2 == 0.0) continue;
            const Eigen::VectorXi multi = eg.unflatten(flat);
            double count = 1.0;
            for (int axis = 0; axis < d; ++axis)
                count *= static_cast<double>(lift_count(k(axis), multi(axis), axis));
            tmass += v2 * count;
        }
        sc.tbox_mass = hd * tmass;

        sc.label = (sc.cell_mass >= threshold_factor * sc.tbox_mass * (1.0 - 1e-12))
                       ? SiteLabel::Dominating
                       : SiteLabel::Weak;
        total_mass += sc.cell_mass;
        if (sc.label == SiteLabel::Weak) weak_mass += sc.cell_mass;
        tbox_sum += sc.tbox_mass;
        cls.sites.push_back(std::move(sc));
    }
    cls.weak_mass_fraction = total_mass > 0 ? weak_mass / total_mass : 0.0;
    cls.dominating_mass_fraction = 1.0 - cls.weak_mass_fraction;
    if (periodic) {
        const double expected = std::pow(T, d) * total_mass;
        cls.cover_identity_residual =
            expected > 0 ? std::abs(tbox_sum - expected) / expected : 0.0;
    }
    return cls;
}

double mass_ratio(const GridFunction& psi, int L, double delta,
                  const std::map<std::vector<int>, Eigen::VectorXd>& centers) {
    const Grid& g = psi.grid;
    if (delta < 2.0 * g.h()) throw OperatorError("UnderResolvedBall: delta < 2h");
    const int d = g.box.d;
    const double hd = std::pow(g.h(), d);
    double ball_mass = 0, total = 0;
    for (Eigen::Index flat = 0; flat < psi.values.size(); ++flat) {
        const Eigen::VectorXd x = g.node(flat);
        const double v2 = psi.values(flat) * psi.values(flat);
        total += v2;
        Eigen::VectorXd z(d);
        bool in_box = true;
        for (int i = 0; i < d; ++i) {
            const int k = static_cast<int>(std::floor(x(i) + 0.5 + 1e-12));
            if (std::abs(k) > (L - 1) / 2) in_box = false;
            z(i) = k;
        }
        if (!in_box) continue;
        std::vector<int> cell(d);
        for (int i = 0; i < d; ++i) cell[static_cast<std::size_t>(i)] = static_cast<int>(z(i));
        auto it = centers.find(cell);
        const Eigen::VectorXd& c = it != centers.end() ? it->second : z;
        if ((x - c).norm() < delta) ball_mass += v2;
    }
    return total > 0 ? (hd * ball_mass) / (hd * total) : 0.0;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

UcpSummary verify_ucp(const std::function<double(const Eigen::VectorXd&)>& V0,
                      const std::vector<int>& L_list, BoundaryCondition bc, int n_eigs,
                      double delta, int n_per_unit, const CarlemanConfig& cfg,
                      const std::map<std::vector<int>, Eigen::VectorXd>& centers) {
    UcpSummary summary;
    summary.L_list = L_list;
    for (int L : L_list) {
        Grid grid;
        grid.box.d = 1;
        grid.box.side = L;
        grid.box.bc = bc;
        grid.n_per_side = n_per_unit * L;
        const GridFunction V = GridFunction::sample(grid, V0);
        const DiscreteHamiltonian H = build_hamiltonian(grid, V);
        const auto pairs = eigs_lowest(H, n_eigs);
        double min_ratio = 1.0;
        for (int e = 0; e < n_eigs; ++e) {
            UcpReport row;
            row.L = L;
            row.bc = bc;
            row.eig_index = e;
            row.lambda = pairs[static_cast<std::size_t>(e)].lambda;
            row.K_V = (V.values.array() - row.lambda).abs().maxCoeff();
            row.ratio = mass_ratio(pairs[static_cast<std::size_t>(e)].psi, L, delta, centers);
            const Classification cls = classify_sites(pairs[static_cast<std::size_t>(e)].psi, L);
            row.weak_fraction = cls.weak_mass_fraction;
            row.T = cls.T;
            row.delta = delta;
            row.c_sfuc_analytic = c_sfuc(1, row.K_V, delta, bc, cfg.C_dim).composed;
            min_ratio = std::min(min_ratio, row.ratio);
            summary.rows.push_back(std::move(row));
        }
        summary.min_ratio_per_L.push_back(min_ratio);
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < L_list.size(); ++i) {
        xs.push_back(static_cast<double>(L_list[i]));
        ys.push_back(std::log(summary.min_ratio_per_L[i]));
    }
    if (xs.size() >= 2) summary.log_ratio_slope = ls_slope(xs, ys);
    return summary;
}

namespace {

// 2d+1 stencil Laplacian value at one node, honoring the boundary condition.
double discrete_laplacian_at(const GridFunction& psi, Eigen::Index flat) {
    const Grid& g = psi.grid;
    const int m = g.nodes_per_side();
    const double h2 = g.h() * g.h();
    const Eigen::VectorXi multi = g.unflatten(flat);
    double acc = -2.0 * g.box.d * psi.values(flat);
    for (int axis = 0; axis < g.box.d; ++axis) {
        for (int dir : {-1, 1}) {
            Eigen::VectorXi nb = multi;
            nb(axis) += dir;
            if (g.box.bc == BoundaryCondition::Periodic)
                nb(axis) = (nb(axis) + m) % m;
            else if (nb(axis) < 0 || nb(axis) >= m)
                continue;
            acc += psi.values(g.flatten(nb));
        }
    }
    return acc / h2;
}

}  // namespace

CacciopoliResult cacciopoli_check(const GridFunction& psi, const GridFunction& V,
                                  const Eigen::VectorXd& center, double a, double b, double c,
                                  double slack) {
    const Grid& g = psi.grid;
    const double outer = c + b;
    for (int i = 0; i < g.box.d; ++i)
        if (center(i) - outer < g.box.lo(i) - 1e-12 || center(i) + outer > g.box.hi(i) + 1e-12)
            throw OperatorError("GeometryViolation: enlarged region exits the domain");

    CacciopoliResult res;
    const double v_inf = V.values.array().abs().maxCoeff();
    res.lhs = gradient_mass(psi, annulus_region(center, a, c));
    const RegionPredicate enlarged = (a > 0.0 && b < a)
                                         ? annulus_region(center, a - b, c + b)
                                         : RegionPredicate(ball_region(center, c + b));
    res.rhs = (1.0 + 9.0 / (b * b) + v_inf * v_inf) * mass(psi, enlarged);
    res.ok = res.lhs <= res.rhs * (1.0 + slack);

    const double psi_inf = psi.values.array().abs().maxCoeff();
    const double scale = psi_inf * (1.0 + v_inf) + 1e-300;
    double worst = 0.0;
    for (Eigen::Index flat = 0; flat < psi.values.size(); ++flat) {
        if (!enlarged(g.node(flat))) continue;
        const double excess = std::abs(discrete_laplacian_at(psi, flat)) -
                              std::abs(V.values(flat) * psi.values(flat));
        worst = std::max(worst, excess / scale);
    }
    res.diffineq_violation = worst;
    return res;
}

LocalFluctuationReport local_fluctuation_experiment(const GridFunction& psi,
                                                    const SiteIndex& site, double delta,
                                                    double K_V, const CarlemanConfig& cfg) {
    const Grid& g = psi.grid;
    const int d = g.box.d;
    if (delta > 1.0 / 20.0) throw OperatorError("DeltaTooLarge: requires delta <= 1/20");
    const int s = 10 * ceil_sqrt_d(d);  // sub-boxes per axis
    const double sub_side = 1.0 / s;

    // Gather nodes of the half-open unit cell.
    std::vector<Eigen::Index> cell_nodes;
    for (Eigen::Index flat = 0; flat < psi.values.size(); ++flat) {
        const Eigen::VectorXd x = g.node(flat);
        bool in = true;
        for (int i = 0; i < d; ++i)
            if (x(i) < site(i) - 0.5 || x(i) >= site(i) + 0.5) in = false;
        if (in) cell_nodes.push_back(flat);
    }

    const double hd = std::pow(g.h(), d);
    LocalFluctuationReport rep;
    rep.site = site;
    double cell_mass = 0;
    std::map<std::vector<int>, double> sub_mass;
    for (Eigen::Index flat : cell_nodes) {
        const Eigen::VectorXd x = g.node(flat);
        const double v2 = hd * psi.values(flat) * psi.values(flat);
        cell_mass += v2;
        std::vector<int> sub(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            int idx = static_cast<int>(std::floor((x(i) - (site(i) - 0.5)) * s + 1e-12));
            sub[static_cast<std::size_t>(i)] = std::min(idx, s - 1);
        }
        sub_mass[sub] += v2;
    }
    rep.cell_mass = cell_mass;

    // Lexicographically first maximizer (std::map iterates in that order).
    std::vector<int> best;
    double best_mass = -1.0;
    for (const auto& [sub, m] : sub_mass) {
        if (m > best_mass * (1.0 + 1e-12)) {
            best_mass = m;
            best = sub;
        }
    }
    rep.maximal_box_mass = best_mass;
    rep.maximal_box_center = Eigen::VectorXd(d);
    for (int i = 0; i < d; ++i)
        rep.maximal_box_center(i) =
            site(i) - 0.5 + (best[static_cast<std::size_t>(i)] + 0.5) * sub_side;
    rep.pigeonhole_ok = best_mass >= cell_mass / std::pow(s, d) * (1.0 - 1e-12);

    // Worst ball over the sub-box-center lattice, balls kept inside the cell.
    rep.min_ball_ratio = 1.0;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        Eigen::VectorXd c(d);
        bool fits = true;
        for (int i = 0; i < d; ++i) {
            c(i) = site(i) - 0.5 + (idx[static_cast<std::size_t>(i)] + 0.5) * sub_side;
            if (c(i) - delta < site(i) - 0.5 || c(i) + delta > site(i) + 0.5) fits = false;
        }
        if (fits) {
            double bm = 0;
            for (Eigen::Index flat : cell_nodes)
                if ((g.node(flat) - c).norm() < delta)
                    bm += hd * psi.values(flat) * psi.values(flat);
            if (cell_mass > 0) rep.min_ball_ratio = std::min(rep.min_ball_ratio, bm / cell_mass);
        }
        int axis = d - 1;
        for (; axis >= 0; --axis) {
            if (++idx[static_cast<std::size_t>(axis)] < s) break;
            idx[static_cast<std::size_t>(axis)] = 0;
        }
        if (axis < 0) break;
    }
    rep.c_lf_analytic = c_lf(d, K_V, delta, cfg).c_lf;
    return rep;
}

}  // namespace ucplab
