#include "ucplab/constants.hpp"

#include <algorithm>
#include <cmath>

#include "ucplab/quadrature.hpp"

namespace ucplab {

void CarlemanConfig::validate() const {
    if (C2 < 1.0 || C3 < 1.0) throw ConstantsError("CarlemanConfig: C2, C3 must be >= 1");
    if (K_Delta <= 0.0) throw ConstantsError("CarlemanConfig: K_Delta must be > 0");
    if (C_dim <= 1.0) throw ConstantsError("CarlemanConfig: C_dim must be > 1");
}

namespace {

int ceil_sqrt_d(int d) {
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
}

// ∫₀ˢ (1-e⁻ᵗ)/t dt by the alternating series Σ (-1)^{k+1} s^k/(k·k!).
double exp_integral_series(double s) {
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 80; ++k) {
        term *= s / k;                 // s^k / k!
        const double contrib = term / k;
        sum += (k % 2 == 1) ? contrib : -contrib;
        if (std::abs(contrib) < 1e-17 && k > 4) break;
    }
    return sum;
}

double exp_integral_quadrature(double a, double b) {
    return gauss_legendre([](double t) { return (1.0 - std::exp(-t)) / t; }, a, b);
}

}  // namespace

double phi(double s) {
    if (s < 0.0) throw ConstantsError("phi: domain error, s < 0");
    if (s == 0.0) return 0.0;
    const double integral =
        (s <= 8.0) ? exp_integral_series(s)
                   : exp_integral_series(8.0) + exp_integral_quadrature(8.0, s);
    return s * std::exp(-integral);
}

double weight(const Eigen::VectorXd& x, double rho) {
    if (rho <= 0.0) throw ConstantsError("weight: rho must be > 0");
    return phi(x.norm() / rho);
}

double choose_alpha(const UcpParams& p, const CarlemanConfig& c) {
    c.validate();
    const double a1 = c.C2;
    const double a2 = std::cbrt(std::pow(24.0, 5) * c.C3 * p.K_V * p.K_V *
                                std::pow(p.R, 4));
    const double D1 = std::min(p.D_0, 1.0);
    const double log_arg = std::pow(24.0 * p.R * c.K_Delta / p.D_0, 4) * c.C3 *
                           (1.0 + p.K_V * p.K_V) / (D1 * D1) * p.beta;
    const double a3 = std::max(0.0, 0.5 * std::log(log_arg));
    return std::max({a1, a2, a3});
}

double c_quc_full(const UcpParams& p, const CarlemanConfig& c) {
    if (p.delta >= 4.0 * p.R)
        throw ConstantsError("GeometryViolation: requires delta < 4R");
    const double alpha = choose_alpha(p, c);
    const double pre = (5.0 / 16.0) * (1.0 / 41.0) *
                       std::pow(c.C2, 3) / (c.C3 * std::pow(c.K_Delta, 4));
    return pre * std::pow(p.delta, 4) / (p.R * p.R) *
           std::pow(p.delta / (48.0 * p.R), 2.0 * alpha) /
           (1.0 + p.K_V * p.K_V);
}

double c_quc_corollary(int d, double K_V, double R, double delta, double beta, double C_dim) {
    if (R < std::sqrt(static_cast<double>(d)))
        throw ConstantsError("GeometryViolation: requires sqrt(d) <= R");
    if (delta <= 0.0 || delta > 1.0)
        throw ConstantsError("c_quc_corollary: delta must be in (0, 1]");
    const double exponent =
        C_dim + C_dim * std::pow(R, 4.0 / 3.0) * std::pow(K_V, 2.0 / 3.0) +
        std::log(std::max(beta, 1.0));
    return std::pow(delta / (C_dim * R), exponent);
}

double c_quc_corollary_simplified(int d, double K_V, double delta, double beta, double C_dim) {
    if (delta <= 0.0 || delta > 1.0)
        throw ConstantsError("c_quc_corollary_simplified: delta must be in (0, 1]");
    (void)d;
    const double exponent =
        C_dim + C_dim * std::pow(K_V, 2.0 / 3.0) + std::log(std::max(beta, 1.0));
    return std::pow(delta / C_dim, exponent);
}

SfucValue c_sfuc(int d, double K_V, double delta, BoundaryCondition bc, double C_dim, int M) {
    const int root = ceil_sqrt_d(d);
    const double R = 2.0 * root;
    const int T = 62 * root;
    SfucValue v;
    if (bc == BoundaryCondition::Periodic) {
        const double beta = 2.0 * std::pow(static_cast<double>(T), d);
        v.composed = 0.5 * c_quc_corollary(d, K_V, R, delta, beta, C_dim);
    } else {
        const double beta = 2.0 * std::pow(2.0 * T, d);
        v.composed = 0.25 * c_quc_corollary(d, K_V, R, delta, beta, C_dim);
    }
    v.simplified = std::pow(delta / C_dim, C_dim + C_dim * std::pow(K_V, 2.0 / 3.0));
    v.dilute = std::pow(delta / (C_dim * M),
                        C_dim + C_dim * std::pow(M, 4.0 / 3.0) * std::pow(K_V, 2.0 / 3.0));
    return v;
}

LocalFluctuationConstant c_lf(int d, double K_V, double delta, const CarlemanConfig& c) {
    if (delta <= 0.0 || delta > 1.0 / 20.0)
        throw ConstantsError("DeltaTooLarge: requires delta in (0, 1/20]");
    c.validate();
    const int root = ceil_sqrt_d(d);
    const int T = 30 * root;
    const double subdiv = std::pow(10.0 * root, d);
    const double beta = 2.0 * std::pow(10.0 * root * T, d);
    const auto quc = [&](double dl, double b) {
        return c_quc_corollary_simplified(d, K_V, dl, b, c.C_dim);
    };
    LocalFluctuationConstant out;
    out.beta = beta;
    const double c1_at_1_20 = quc(1.0 / 20.0, beta) / subdiv;
    out.beta_tilde = 2.0 * std::pow(static_cast<double>(T), d) / c1_at_1_20;
    out.c_lf = quc(1.0 / 20.0, beta) * quc(delta, out.beta_tilde) / subdiv;
    out.c1 = quc(delta, beta) / subdiv;
    if (out.c_lf > out.c1 * (1.0 + 1e-12))
        throw ConstantsError("c_lf: two-step constant exceeds c1, inconsistent inputs");
    return out;
}

WegnerConstants kappa_and_cw(double C_minus, double c_sfuc, double E0, int d,
                             double K1, double K2) {
    if (C_minus <= 0.0 || c_sfuc <= 0.0)
        throw ConstantsError("kappa_and_cw: C_minus and c_sfuc must be positive");
    WegnerConstants w;
    w.kappa = C_minus * c_sfuc;
    w.c_E = K1 * std::exp(E0 + 1.0) + std::pow(2.0, d) * K2;
    w.c_W = w.c_E * std::ceil(4.0 / w.kappa);
    return w;
}

ConstantsReport constants_report(int d, double K_V, double delta, BoundaryCondition bc,
                                 const CarlemanConfig& cfg, double C_minus, double E0, int M) {
    ConstantsReport r;
    r.config = cfg;
    r.bc = bc;
    r.params.d = d;
    r.params.K_V = K_V;
    r.params.delta = delta;
    const int root = ceil_sqrt_d(d);
    r.params.R = 2.0 * root;
    r.params.D_0 = r.params.R;
    r.params.beta = (bc == BoundaryCondition::Periodic)
                        ? 2.0 * std::pow(62.0 * root, d)
                        : 2.0 * std::pow(124.0 * root, d);
    r.alpha = choose_alpha(r.params, cfg);
    r.c_quc = c_quc_full(r.params, cfg);
    r.c_sfuc = c_sfuc(d, K_V, delta, bc, cfg.C_dim, M);
    if (delta <= 1.0 / 20.0) r.c_lf = c_lf(d, K_V, delta, cfg);
    r.wegner = kappa_and_cw(C_minus, r.c_sfuc.composed, E0, d);
    return r;
}

}  // namespace ucplab
