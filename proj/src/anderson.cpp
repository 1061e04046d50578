#include "ucplab/anderson.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <thread>

#include "ucplab/quadrature.hpp"
#include "ucplab/rng.hpp"
#include "ucplab/ucp.hpp"

namespace ucplab {

CouplingDistribution CouplingDistribution::uniform(double a, double b) {
    CouplingDistribution d;
    d.kind = Kind::Uniform;
    d.a = a;
    d.b = b;
    return d;
}

CouplingDistribution CouplingDistribution::bernoulli(double p, double v0, double v1) {
    CouplingDistribution d;
    d.kind = Kind::Bernoulli;
    d.p = p;
    d.v0 = v0;
    d.v1 = v1;
    return d;
}

CouplingDistribution CouplingDistribution::truncated_gaussian(double mu, double sigma, double a,
                                                              double b) {
    CouplingDistribution d;
    d.kind = Kind::TruncatedGaussian;
    d.mu = mu;
    d.sigma = sigma;
    d.a = a;
    d.b = b;
    return d;
}

double CouplingDistribution::support_lo() const {
    return kind == Kind::Bernoulli ? std::min(v0, v1) : a;
}

double CouplingDistribution::support_hi() const {
    return kind == Kind::Bernoulli ? std::max(v0, v1) : b;
}

double CouplingDistribution::support_bound() const {
    return std::max(std::abs(support_lo()), std::abs(support_hi()));
}

double CouplingDistribution::sample(std::uint64_t seed, std::uint64_t realization,
                                    std::uint64_t site) const {
    CounterRng rng(seed, realization, site);
    switch (kind) {
        case Kind::Uniform:
            return rng.uniform(a, b);
        case Kind::Bernoulli:
            return rng.uniform() < p ? v1 : v0;
        case Kind::TruncatedGaussian: {
            for (int i = 0; i < 1024; ++i) {
                const double u1 = rng.uniform(), u2 = rng.uniform();
                const double g =
                    mu + sigma * std::sqrt(-2.0 * std::log(1.0 - u1)) *
                             std::cos(2.0 * M_PI * u2);
                if (g >= a && g <= b) return g;
            }
            return std::clamp(mu, a, b);  // pathological σ; keep deterministic
        }
    }
    return 0.0;
}

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double modulus_of_continuity(const CouplingDistribution& dist, double epsilon) {
    if (epsilon <= 0.0) throw AndersonError("modulus_of_continuity: epsilon must be > 0");
    switch (dist.kind) {
        case CouplingDistribution::Kind::Uniform:
            return std::min(1.0, epsilon / (dist.b - dist.a));
        case CouplingDistribution::Kind::Bernoulli:
            return epsilon >= std::abs(dist.v1 - dist.v0) ? 1.0
                                                          : std::max(dist.p, 1.0 - dist.p);
        case CouplingDistribution::Kind::TruncatedGaussian: {
            const double Z = std_normal_cdf((dist.b - dist.mu) / dist.sigma) -
                             std_normal_cdf((dist.a - dist.mu) / dist.sigma);
            const auto window_mass = [&](double E) {
                const double lo = std::max(dist.a, E - epsilon / 2.0);
                const double hi = std::min(dist.b, E + epsilon / 2.0);
                if (hi <= lo) return 0.0;
                return (std_normal_cdf((hi - dist.mu) / dist.sigma) -
                        std_normal_cdf((lo - dist.mu) / dist.sigma)) /
                       Z;
            };
            // Unimodal in E; golden-section maximization.
            double lo = dist.a, hi = dist.b;
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            for (int i = 0; i < 200; ++i) {
                if (window_mass(x1) < window_mass(x2))
                    lo = x1, x1 = x2, x2 = lo + gr * (hi - lo);
                else
                    hi = x2, x2 = x1, x1 = hi - gr * (hi - lo);
            }
            return std::min(1.0, window_mass(0.5 * (lo + hi)));
        }
    }
    return 1.0;
}

void DeloneAndersonModel::validate() const {
    if (!(C_minus > 0 && C_minus <= C_plus))
        throw AndersonError("model: require 0 < C_minus <= C_plus");
    if (!(delta_minus > 0 && delta_minus < delta_plus))
        throw AndersonError("model: require 0 < delta_minus < delta_plus");
}

double DeloneAndersonModel::single_site(const Eigen::VectorXd& z,
                                        const Eigen::VectorXd& x) const {
    const double r = (x - z).norm();
    if (profile == SingleSiteProfile::IndicatorBall)
        return r < delta_minus ? C_minus : 0.0;
    if (r < delta_minus) return C_plus;
    if (r >= delta_plus) return 0.0;
    const double u = (r - delta_minus) / (delta_plus - delta_minus);
    return C_plus * (1.0 - u * u * (3.0 - 2.0 * u));
}

std::pair<GridFunction, CouplingRecord> sample_potential(const DeloneAndersonModel& model,
                                                         const Grid& grid, std::uint64_t seed,
                                                         std::uint64_t realization_id) {
    model.validate();
    CouplingRecord rec;
    std::uint64_t site_ord = 0;
    std::vector<std::pair<Eigen::VectorXd, double>> weighted_sites;
    for (const auto& [cell, z] : model.arrangement.gamma1) {
        const double w = model.dist.sample(seed, realization_id, site_ord++);
        rec.gamma1.push_back(w);
        weighted_sites.emplace_back(z, w);
    }
    for (const auto& z : model.arrangement.gamma2) {
        const double w = model.dist.sample(seed, realization_id, site_ord++);
        rec.gamma2.push_back(w);
        weighted_sites.emplace_back(z, w);
    }
    GridFunction V = GridFunction::zero(grid);
    for (Eigen::Index i = 0; i < V.values.size(); ++i) {
        const Eigen::VectorXd x = grid.node(i);
        double acc = 0.0;
        for (const auto& [z, w] : weighted_sites) acc += w * model.single_site(z, x);
        V.values(i) = acc;
    }
    return {std::move(V), std::move(rec)};
}

GridFunction frozen_gamma1_potential(const DeloneAndersonModel& model, const Grid& grid) {
    GridFunction W = GridFunction::zero(grid);
    for (Eigen::Index i = 0; i < W.values.size(); ++i) {
        const Eigen::VectorXd x = grid.node(i);
        double acc = 0.0;
        for (const auto& [cell, z] : model.arrangement.gamma1)
            acc += model.single_site(z, x);
        W.values(i) = acc;
    }
    return W;
}

WegnerTable wegner_mc(const DeloneAndersonModel& model, const Grid& grid, double E,
                      const std::vector<double>& epsilon_list, int n_real, std::uint64_t seed,
                      double c_W, int n_threads) {
    if (n_real < 2) throw AndersonError("wegner_mc: n_real must be >= 2");
    for (double eps : epsilon_list)
        if (!(eps > 0 && eps <= 1.0 / 3.0))
            throw AndersonError("wegner_mc: epsilon must be in (0, 1/3]");
    n_threads = std::max(1, n_threads);

    const GridFunction Vbg = GridFunction::sample(grid, model.V0);
    // counts[e][r] = -1 marks a dropped realization; slot writes keep the
    // result independent of scheduling.
    std::vector<std::vector<int>> counts(epsilon_list.size(),
                                         std::vector<int>(n_real, -1));
    const auto worker = [&](int r0, int stride) {
        for (int r = r0; r < n_real; r += stride) {
            try {
                auto [Vw, rec] =
                    sample_potential(model, grid, seed, static_cast<std::uint64_t>(r));
                GridFunction V = Vbg;
                V.values += Vw.values;
                const DiscreteHamiltonian H = build_hamiltonian(grid, V);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(H.matrix),
                                                                  Eigen::EigenvaluesOnly);
                const auto& ev = es.eigenvalues();
                for (std::size_t e = 0; e < epsilon_list.size(); ++e) {
                    const double eps = epsilon_list[e];
                    counts[e][r] = static_cast<int>(
                        ((ev.array() >= E - eps) && (ev.array() <= E + eps)).count());
                }
            } catch (const std::exception&) {
                // slot stays -1
            }
        }
    };
    if (n_threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
        for (auto& th : pool) th.join();
    }
    int dropped = 0;
    for (int r = 0; r < n_real; ++r)
        if (counts[0][r] < 0) ++dropped;
    if (dropped > n_real / 20)
        throw AndersonError("wegner_mc: more than 5% of realizations dropped");

    WegnerTable table;
    table.dropped = dropped;
    const double d = grid.box.d;
    const double vol = std::pow(grid.box.side, d);
    std::vector<double> log_eps, log_mean;
    for (std::size_t e = 0; e < epsilon_list.size(); ++e) {
        WegnerRow row;
        row.epsilon = epsilon_list[e];
        std::vector<int> c;
        for (int v : counts[e])
            if (v >= 0) c.push_back(v);
        double mean = 0;
        for (int v : c) mean += v;
        mean /= static_cast<double>(c.size());
        double var = 0;
        for (int v : c) var += (v - mean) * (v - mean);
        var /= static_cast<double>(c.size() - 1);
        const double half = 1.96 * std::sqrt(var / static_cast<double>(c.size()));
        row.mean_count = mean;
        row.ci_lo = mean - half;
        row.ci_hi = mean + half;
        const double s_eps = modulus_of_continuity(model.dist, row.epsilon);
        row.bound_all_E = c_W * s_eps * std::pow(std::abs(std::log(row.epsilon)), d) * vol;
        row.bound_low_E = c_W * s_eps * vol;
        if (mean > 0) {
            log_eps.push_back(std::log(row.epsilon));
            log_mean.push_back(std::log(mean));
        }
        table.rows.push_back(row);
    }
    if (log_eps.size() >= 2) table.loglog_slope = ls_slope(log_eps, log_mean);
    return table;
}

LiftCurve eigenvalue_lift(const DeloneAndersonModel& model, const Grid& grid,
                          const std::vector<double>& t_grid) {
    const GridFunction Vbg = GridFunction::sample(grid, model.V0);
    const GridFunction W = frozen_gamma1_potential(model, grid);
    const int L = static_cast<int>(std::lround(grid.box.side));

    LiftCurve curve;
    curve.t = t_grid;
    std::map<std::vector<int>, Eigen::VectorXd> centers;
    for (const auto& [cell, z] : model.arrangement.gamma1) centers[cell] = z;

    const auto lambda0_at = [&](double t) {
        GridFunction V = Vbg;
        V.values += t * W.values;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Eigen::MatrixXd(build_hamiltonian(grid, V).matrix), Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    };

    double min_ratio = 1.0;
    const double dt = 1e-4;  // fine step so the HF comparison is not limited by the t grid
    for (double t : t_grid) {
        GridFunction V = Vbg;
        V.values += t * W.values;
        const DiscreteHamiltonian H = build_hamiltonian(grid, V);
        const auto pairs = eigs_lowest(H, 2);
        curve.lambda.push_back(pairs[0].lambda);
        curve.hf_valid.push_back(pairs[1].lambda - pairs[0].lambda > 1e-10);
        curve.hf_lhs.push_back((lambda0_at(t + dt) - lambda0_at(t - dt)) / (2.0 * dt));

        GridFunction Wpsi = pairs[0].psi;
        Wpsi.values = W.values.cwiseProduct(pairs[0].psi.values);
        curve.hf_rhs.push_back(inner(pairs[0].psi, Wpsi));

        min_ratio = std::min(min_ratio,
                             mass_ratio(pairs[0].psi, L, model.delta_minus, centers));
    }
    curve.kappa_emp = model.C_minus * min_ratio;
    return curve;
}

UncertaintyResult uncertainty_check(const DiscreteHamiltonian& H0, const GridFunction& W,
                                    double q, double kappa, double tol) {
    if (!(q > 0 && q < 1)) throw AndersonError("uncertainty_check: q must be in (0,1)");
    if (kappa <= 0) throw AndersonError("uncertainty_check: kappa must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(H0.matrix)};
    const double lambda0 = es.eigenvalues()(0);
    const double cutoff = lambda0 + q * kappa;

    UncertaintyResult res;
    res.threshold = (1.0 - q) * kappa;
    std::vector<Eigen::Index> in_I;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= cutoff) in_I.push_back(i);
    res.projector_rank = static_cast<int>(in_I.size());
    if (in_I.empty()) {
        res.empty_projector = true;
        res.ok = true;  // vacuous
        return res;
    }
    // Compression PWP in the eigenbasis of ran P; eigenvectors are
    // orthonormal in the Euclidean sense, which matches the h^d-weighted
    // inner product up to the common factor.
    Eigen::MatrixXd B(in_I.size(), in_I.size());
    for (std::size_t m = 0; m < in_I.size(); ++m)
        for (std::size_t k = m; k < in_I.size(); ++k) {
            const double v = es.eigenvectors()
                                 .col(in_I[m])
                                 .cwiseProduct(W.values)
                                 .dot(es.eigenvectors().col(in_I[k]));
            B(m, k) = B(k, m) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(B, Eigen::EigenvaluesOnly);
    res.min_compression_eigenvalue = bs.eigenvalues()(0);
    res.ok = res.min_compression_eigenvalue >= res.threshold * (1.0 - tol);
    return res;
}

SsfRecord ssf(const Eigen::MatrixXd& H1, const Eigen::MatrixXd& H2, double epsilon) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(H1, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(H2, Eigen::EigenvaluesOnly);
    std::vector<double> ev1(e1.eigenvalues().data(), e1.eigenvalues().data() + H1.rows());
    std::vector<double> ev2(e2.eigenvalues().data(), e2.eigenvalues().data() + H2.rows());

    SsfRecord rec;
    rec.breakpoints.reserve(ev1.size() + ev2.size());
    rec.breakpoints.insert(rec.breakpoints.end(), ev1.begin(), ev1.end());
    rec.breakpoints.insert(rec.breakpoints.end(), ev2.begin(), ev2.end());
    std::sort(rec.breakpoints.begin(), rec.breakpoints.end());

    const auto count_leq = [](const std::vector<double>& ev, double x) {
        return static_cast<int>(std::upper_bound(ev.begin(), ev.end(), x) - ev.begin());
    };
    // ξ on each open interval between consecutive breakpoints.
    for (std::size_t i = 0; i + 1 < rec.breakpoints.size(); ++i) {
        const double mid = 0.5 * (rec.breakpoints[i] + rec.breakpoints[i + 1]);
        rec.xi.push_back(count_leq(ev1, mid) - count_leq(ev2, mid));
    }

    // Trace identity against switch functions centered across the spectrum.
    const RhoSwitch rho(epsilon);
    const double lo = rec.breakpoints.front(), hi = rec.breakpoints.back();
    double worst = 0;
    for (int c = 0; c <= 8; ++c) {
        const double center = lo + (hi - lo) * c / 8.0;
        double lhs = 0;
        for (double v : ev2) lhs += rho(v - center);
        for (double v : ev1) lhs -= rho(v - center);
        double rhs = 0;  // ∫ ρ' ξ, exact piecewise against the step function
        for (std::size_t i = 0; i + 1 < rec.breakpoints.size(); ++i)
            rhs += rec.xi[i] *
                   (rho(rec.breakpoints[i + 1] - center) - rho(rec.breakpoints[i] - center));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    rec.trace_identity_residual = worst;
    return rec;
}

std::vector<SmeRow> sme_check(const CouplingDistribution& dist,
                              const std::function<double(double)>& phi_fn,
                              const std::vector<double>& epsilon_grid) {
    std::vector<SmeRow> out;
    const double a = dist.support_lo(), b = dist.support_hi();
    for (double eps : epsilon_grid) {
        SmeRow row;
        row.epsilon = eps;
        const auto integrand = [&](double lam) { return phi_fn(lam + eps) - phi_fn(lam); };
        switch (dist.kind) {
            case CouplingDistribution::Kind::Uniform:
                row.lhs = gauss_legendre(integrand, a, b, 64) / (b - a);
                break;
            case CouplingDistribution::Kind::Bernoulli:
                row.lhs = dist.p * integrand(dist.v1) + (1.0 - dist.p) * integrand(dist.v0);
                break;
            case CouplingDistribution::Kind::TruncatedGaussian: {
                const double Z = std_normal_cdf((b - dist.mu) / dist.sigma) -
                                 std_normal_cdf((a - dist.mu) / dist.sigma);
                const auto pdf = [&](double x) {
                    const double t = (x - dist.mu) / dist.sigma;
                    return std::exp(-0.5 * t * t) /
                           (dist.sigma * std::sqrt(2.0 * M_PI) * Z);
                };
                row.lhs = gauss_legendre([&](double x) { return integrand(x) * pdf(x); }, a, b,
                                         64);
                break;
            }
        }
        row.rhs = modulus_of_continuity(dist, eps) * (phi_fn(b + eps) - phi_fn(a));
        row.ok = row.lhs <= row.rhs + 1e-10;
        out.push_back(row);
    }
    return out;
}

}  // namespace ucplab
