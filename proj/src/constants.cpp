#include "crn/constants.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <tuple>

#include "crn/entropy.hpp"
#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "crn/parallel.hpp"

namespace crn {

namespace {

void check_state(const Network& net, const Eigen::VectorXd& c_inf) {
    if (c_inf.size() != static_cast<Eigen::Index>(net.num_species()))
        throw InvalidArgument("equilibrium has wrong dimension");
    if (!(c_inf.array() > 0).all() || !c_inf.allFinite())
        throw InvalidArgument("equilibrium must be strictly positive");
}

double y_at(const Network& net, std::size_t complex, std::size_t species) {
    return net.complex_matrix()(static_cast<Eigen::Index>(complex), static_cast<Eigen::Index>(species));
}

double min_rate_monomial(const Network& net, const Eigen::VectorXd& c_inf) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : net.reactions()) m = std::min(m, r.rate * net.monomial(r.reactant, c_inf));
    return m;
}

double k3_of(const ConstantsReport& rep, const Network& net, double beta2, double beta4) {
    return std::min(2.0 * net.diffusion().minCoeff(),
                    std::min(0.5 * std::min(1.0, rep.beta3 / beta2) * rep.beta1, beta4));
}

} // namespace

double chain_beta2(const Network& net, const Eigen::VectorXd& c_inf, double K_tilde, double beta1, double L) {
    const std::size_t n = net.num_species();
    const double sk = std::sqrt(K_tilde);
    double best = 0.0;
    for (std::size_t y = 0; y < net.num_complexes(); ++y) {
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = y_at(net, y, i);
            if (yi == 0) continue;
            const double ci = c_inf[static_cast<Eigen::Index>(i)];
            const double power = static_cast<double>(n - (i + 1)); // N - i with 1-based i
            double prod = 1.0;
            for (std::size_t l = 0; l + 1 <= n - (i + 1); ++l) prod *= std::pow(ci, y_at(net, y, l));
            const double prefactor = 1.0 / (std::pow(ci, yi - 1.0) * prod);
            const double tail = yi * std::pow(sk + L, yi - 1.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double yj = y_at(net, y, j);
                const double inner = std::pow(sk, yi) + (yj == 0 ? 0.0 : L * yj * std::pow(sk + L, yj - 1.0));
                best = std::max(best, prefactor * std::pow(inner, power) * tail);
            }
        }
    }
    return 2.0 * beta1 * static_cast<double>(n * net.num_reactions()) * best;
}

double chain_beta4(const Network& net, const Eigen::VectorXd& c_inf, double K_tilde, double beta3, double L) {
    double worst = 0.0;
    for (const auto& r : net.reactions()) {
        const double size_in = net.complex_matrix().row(static_cast<Eigen::Index>(r.reactant)).sum();
        const double size_out = net.complex_matrix().row(static_cast<Eigen::Index>(r.product)).sum();
        worst = std::max(worst, 2.0 * (std::pow(K_tilde, size_in) / net.monomial(r.reactant, c_inf) +
                                       std::pow(K_tilde, size_out) / net.monomial(r.product, c_inf)));
    }
    return static_cast<double>(net.num_species()) * beta3 * L * L / worst;
}

std::vector<double> chain_H_script(const Network& net, const Eigen::VectorXd& c_inf, double K_tilde) {
    const std::size_t n = net.num_species();
    const double sk = std::sqrt(K_tilde);
    std::vector<double> h(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double ci = c_inf[static_cast<Eigen::Index>(i)];
        const double power = static_cast<double>(n - (i + 1));
        const double base = sk * (1.0 + std::sqrt(ci));
        double best = 0.0;
        for (std::size_t y = 0; y < net.num_complexes(); ++y) {
            const double yi = y_at(net, y, i);
            if (yi == 0) continue;
            const double front = yi * std::pow(base, yi - 1.0) / std::pow(ci, yi + 1.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double yj = y_at(net, y, j);
                const double cj = c_inf[static_cast<Eigen::Index>(j)];
                double bracket = std::pow(std::sqrt(K_tilde / cj), yj);
                if (yj != 0) bracket += yj * sk / cj * std::pow(base / ci, yj - 1.0);
                best = std::max(best, front * std::pow(bracket, power));
            }
        }
        h[i] = 2.0 * best;
    }
    return h;
}

ConstantsReport chain_constants(const Network& net, const Eigen::VectorXd& c_inf, double K, const ChainConfig& config) {
    check_state(net, c_inf);
    if (!(K > 0)) throw InvalidArgument("K must be positive");
    if (!(config.L > 0) || !(config.C_P > 0) || !(config.C_LSI > 0))
        throw InvalidArgument("L, C_P and C_LSI must be positive");

    const double n = static_cast<double>(net.num_species());
    const double nr = static_cast<double>(net.num_reactions());
    const double d_min = net.diffusion().minCoeff();

    ConstantsReport rep;
    rep.config = config;
    rep.K = K;
    rep.K_tilde = 2.0 * (K + c_inf.sum());
    for (Eigen::Index i = 0; i < c_inf.size(); ++i)
        rep.K1 = std::max(rep.K1, c_inf[i] * phi(rep.K_tilde / c_inf[i]));
    rep.beta1 = 0.5 * min_rate_monomial(net, c_inf);
    rep.beta3 = config.C_P * d_min;

    auto evaluate_L = [&](double L) {
        const double b2 = chain_beta2(net, c_inf, rep.K_tilde, rep.beta1, L);
        const double b4 = chain_beta4(net, c_inf, rep.K_tilde, rep.beta3, L);
        return std::make_tuple(b2, b4, k3_of(rep, net, b2, b4));
    };

    rep.L = config.L;
    auto [b2, b4, k3] = evaluate_L(rep.L);
    if (config.scan_L) {
        constexpr int points = 81;
        for (int p = 0; p < points; ++p) {
            const double L = std::pow(10.0, -2.0 + 4.0 * p / (points - 1));
            const auto [c2, c4, c3] = evaluate_L(L);
            if (c3 > k3) {
                rep.L = L;
                b2 = c2;
                b4 = c4;
                k3 = c3;
            }
        }
    }
    rep.beta2 = b2;
    rep.beta4 = b4;
    rep.K3 = k3;

    rep.H_script = chain_H_script(net, c_inf, rep.K_tilde);
    rep.H_script_max = *std::max_element(rep.H_script.begin(), rep.H_script.end());
    rep.K2 = 0.5 * rep.K3 * std::min(0.5, config.C_P / (n * nr * rep.H_script_max));
    rep.lambda1 = config.C_LSI * d_min;
    return rep;
}

std::vector<Constant> ConstantsReport::entries() const {
    std::vector<Constant> out = {
        {"K", K, "entropy bound of the initial average, input"},
        {"K_tilde", K_tilde, "2 (K + sum_i c_i,inf)"},
        {"K1", K1, "max_i c_i,inf Phi(K_tilde / c_i,inf), Phi(z) = (z log z - z + 1)/(sqrt z - 1)^2"},
        {"beta1", beta1, "1/2 min_r k_r c_inf^y_r"},
        {"beta2", beta2,
         "2 beta1 N |R| max_{y,i,j} [c_i,inf^(y_i - 1) prod_{l=1}^{N-i} c_i,inf^y_l]^-1 "
         "(sqrt(K_tilde)^y_i + L y_j (sqrt(K_tilde) + L)^(y_j - 1))^(N-i) y_i (sqrt(K_tilde) + L)^(y_i - 1)"},
        {"beta3", beta3, "C_P min_i d_i"},
        {"beta4", beta4, "N beta3 L^2 [max_r 2 (K_tilde^|y_r| / c_inf^y_r + K_tilde^|y_r'| / c_inf^y_r')]^-1"},
        {"L", L, config.scan_L ? "argmax of K3 over a log grid on [1e-2, 1e2]" : "configured"},
        {"K3", K3, "min{2 min_j d_j, min{1/2 min{1, beta3 / beta2} beta1, beta4}}"},
        {"H_script_max", H_script_max,
         "max_i 2 max_{y,j} y_i (sqrt(K_tilde)(1 + sqrt c_i,inf))^(y_i - 1) / c_i,inf^(y_i + 1) "
         "[sqrt(K_tilde / c_j,inf)^y_j + y_j sqrt(K_tilde) / c_j,inf (sqrt(K_tilde)(1 + sqrt c_i,inf) / c_i,inf)^(y_j - 1)]^(N-i)"},
        {"K2", K2, "1/2 K3 min{1/2, C_P / (N |R| max_i H_i)}"},
        {"lambda1", lambda1, "C_LSI min_i d_i"},
    };
    if (H1) out.push_back({"H1", *H1, H1_source});
    if (lambda) out.push_back({"lambda", *lambda, "1/2 min{lambda1, K2 H1 / K1}"});
    return out;
}

double lambda_rate(double lambda1, double K2, double H1, double K1) {
    if (!(K1 > 0)) throw InvalidArgument("K1 must be positive");
    return 0.5 * std::min(lambda1, K2 * H1 / K1);
}

double lambda_rate(const ConstantsReport& report) {
    if (!report.H1) throw InvalidArgument("constants report has no H1");
    return lambda_rate(report.lambda1, report.K2, *report.H1, report.K1);
}

// ---- finite-dimensional inequality ----------------------------------------

FdiProblem::FdiProblem(const Network& net, Eigen::VectorXd c_inf)
    : FdiProblem(net, std::move(c_inf), conservation_structure(net).q()) {}

FdiProblem::FdiProblem(const Network& net, Eigen::VectorXd c_inf, Eigen::MatrixXd q)
    : net_(&net), c_inf_(std::move(c_inf)), q_(std::move(q)) {
    check_state(net, c_inf_);
    if (q_.cols() != c_inf_.size()) throw InvalidArgument("conservation matrix has wrong width");
}

FdiPoint FdiProblem::evaluate(const Eigen::VectorXd& mu) const {
    if (mu.size() != c_inf_.size()) throw InvalidArgument("mu has wrong dimension");
    if ((mu.array() < -1).any() || !mu.allFinite()) throw InvalidArgument("mu must be finite and >= -1");
    FdiPoint p;
    p.mu = mu;
    const Eigen::VectorXd one_plus = (mu.array() + 1.0).matrix();
    for (const auto& r : net_->reactions()) {
        const double diff = net_->monomial(r.reactant, one_plus) - net_->monomial(r.product, one_plus);
        p.lhs += diff * diff;
    }
    p.rhs_base = mu.squaredNorm();
    if (q_.rows() > 0) {
        const Eigen::VectorXd shift = c_inf_.cwiseProduct((mu.array() * mu.array() + 2.0 * mu.array()).matrix());
        p.constraint_residual = (q_ * shift).cwiseAbs().maxCoeff();
    }
    return p;
}

double FdiProblem::linearized_ratio() const {
    const Eigen::Index n = c_inf_.size();
    Eigen::MatrixXd z;
    if (q_.rows() == 0) {
        z = Eigen::MatrixXd::Identity(n, n);
    } else {
        const Eigen::MatrixXd b = q_ * c_inf_.asDiagonal();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
        Eigen::Index rank = 0;
        const double cutoff = 1e-12 * std::max(1.0, svd.singularValues()(0));
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()(k) > cutoff) ++rank;
        z = svd.matrixV().rightCols(n - rank);
    }
    if (z.cols() == 0) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd& y = net_->complex_matrix();
    for (const auto& r : net_->reactions()) {
        const Eigen::VectorXd v =
            (y.row(static_cast<Eigen::Index>(r.reactant)) - y.row(static_cast<Eigen::Index>(r.product))).transpose();
        a += v * v.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z.transpose() * a * z);
    return std::max(0.0, eig.eigenvalues()(0));
}

FdiPoint fdi_evaluate(const Network& net, const Eigen::VectorXd& c_inf, const Eigen::VectorXd& mu) {
    return FdiProblem(net, c_inf).evaluate(mu);
}

namespace {

constexpr double kMinLog = -60.0;

struct Objective {
    const Network& net;
    const Eigen::VectorXd& c_inf;
    double linear;

    /// ratio lhs / rhs at u = log(c_bar / c_inf), with its gradient in u.
    double operator()(const Eigen::VectorXd& u, Eigen::VectorXd* grad) const {
        const Eigen::Index n = u.size();
        const Eigen::VectorXd s = (0.5 * u.array()).exp().matrix(); // 1 + mu
        double lhs = 0.0;
        Eigen::VectorXd g_lhs = Eigen::VectorXd::Zero(n);
        const Eigen::MatrixXd& y = net.complex_matrix();
        for (const auto& r : net.reactions()) {
            const auto a = static_cast<Eigen::Index>(r.reactant);
            const auto b = static_cast<Eigen::Index>(r.product);
            const double p = net.monomial(r.reactant, s);
            const double q = net.monomial(r.product, s);
            lhs += (p - q) * (p - q);
            if (grad) g_lhs += (p - q) * (p * y.row(a) - q * y.row(b)).transpose();
        }
        const Eigen::ArrayXd mu = s.array() - 1.0;
        const double rhs = (mu * mu).sum();
        if (rhs < 1e-24) {
            if (grad) grad->setZero(n);
            return linear;
        }
        const double ratio = lhs / rhs;
        if (grad) *grad = (g_lhs - ratio * (mu * s.array()).matrix()) / rhs;
        return ratio;
    }
};

struct StartResult {
    double value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd c_bar;
    bool failed = false;
};

StartResult descend(const Objective& f, const MassVector& mass, const Eigen::VectorXd& c_inf, double K_tilde,
                    Eigen::VectorXd c_bar, int steps) {
    StartResult out;
    auto admissible = [&](const Eigen::VectorXd& c) {
        return c.allFinite() && (c.array() <= K_tilde * (1.0 + 1e-12)).all();
    };
    auto project = [&](const Eigen::VectorXd& c) -> std::optional<Eigen::VectorXd> {
        try {
            Eigen::VectorXd p = project_to_mass_class(mass, c, 1e-12, 100);
            if (!admissible(p)) return std::nullopt;
            return p;
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    auto to_u = [&](const Eigen::VectorXd& c) {
        return Eigen::VectorXd((c.array() / c_inf.array()).log().max(kMinLog));
    };

    const auto start = project(c_bar);
    if (!start) {
        out.failed = true;
        return out;
    }
    c_bar = *start;
    Eigen::VectorXd u = to_u(c_bar);
    Eigen::VectorXd grad;
    double value = f(u, &grad);
    out.value = value;
    out.c_bar = c_bar;

    double t = 1.0;
    for (int it = 0; it < steps; ++it) {
        // Tangent space of {Q (c_inf e^u) = M} at u is ker(Q diag(c_bar)).
        Eigen::VectorXd dir = grad;
        if (mass.q.rows() > 0) {
            const Eigen::MatrixXd b = mass.q * c_bar.asDiagonal();
            const Eigen::VectorXd w = (b * b.transpose()).ldlt().solve(b * grad);
            dir -= b.transpose() * w;
        }
        const double dir_norm2 = dir.squaredNorm();
        if (!(dir_norm2 > 1e-30)) break;

        bool accepted = false;
        t = std::min(1e3, 4.0 * t);
        for (int k = 0; k < 40; ++k, t *= 0.5) {
            const Eigen::VectorXd u_trial = (u - t * dir).cwiseMax(kMinLog).cwiseMin(std::log(K_tilde) + 1.0);
            const auto c_trial = project((c_inf.array() * u_trial.array().exp()).matrix());
            if (!c_trial) continue;
            const Eigen::VectorXd u_new = to_u(*c_trial);
            Eigen::VectorXd g_new;
            const double v_new = f(u_new, &g_new);
            if (v_new <= value - 1e-4 * t * dir_norm2) {
                const double gain = value - v_new;
                u = u_new;
                c_bar = *c_trial;
                grad = g_new;
                value = v_new;
                accepted = true;
                if (gain <= 1e-14 * std::abs(value)) it = steps; // converged
                break;
            }
        }
        if (!accepted) break;
        if (value < out.value) {
            out.value = value;
            out.c_bar = c_bar;
        }
    }
    return out;
}

} // namespace

H1Estimate estimate_H1(const Network& net, const Eigen::VectorXd& c_inf, double K, const MassVector& mass,
                       const H1Budget& budget) {
    check_state(net, c_inf);
    if (!(K > 0)) throw InvalidArgument("K must be positive");
    if (mass.values.size() > 0 && (mass.values.array() <= 0).any())
        throw InvalidArgument("mass vector must be strictly positive");
    if (budget.starts < 0 || budget.steps < 0) throw InvalidArgument("budget must be nonnegative");

    EquilibriumOptions eq_opt;
    eq_opt.seed = budget.seed;
    const auto boundary = find_boundary_equilibria(net, mass, eq_opt);
    if (!boundary.equilibria.empty())
        throw BoundaryEquilibriaPresent("the mass class contains " + std::to_string(boundary.equilibria.size()) +
                                        " boundary equilibria");

    const Eigen::Index n = c_inf.size();
    const double K_tilde = 2.0 * (K + c_inf.sum());
    const FdiProblem problem(net, c_inf, mass.q);
    const Objective objective{net, c_inf, problem.linearized_ratio()};

    H1Estimate est;
    est.linearized_ratio = objective.linear;
    est.value = objective.linear;
    est.from_linearization = true;
    est.mu = Eigen::VectorXd::Zero(n);
    est.c_bar = c_inf;

    // Latin hypercube in mu over [-1, sqrt(K_tilde / c_inf) - 1].
    const auto starts = static_cast<std::size_t>(budget.starts);
    std::mt19937_64 rng(budget.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::VectorXd> initial(starts, Eigen::VectorXd(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<std::size_t> strata(starts);
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        const double hi = std::sqrt(K_tilde / c_inf[i]) - 1.0;
        for (std::size_t s = 0; s < starts; ++s) {
            const double frac = (static_cast<double>(strata[s]) + unit(rng)) / static_cast<double>(starts);
            const double mu = -1.0 + frac * (hi + 1.0);
            initial[s][i] = std::max(c_inf[i] * (1.0 + mu) * (1.0 + mu), 1e-12 * K_tilde);
        }
    }

    std::vector<StartResult> results(starts);
    parallel_for(starts, [&](std::size_t s) {
        results[s] = descend(objective, mass, c_inf, K_tilde, initial[s], budget.steps);
    });

    for (const auto& r : results) {
        if (r.failed) {
            ++est.projection_failures;
            continue;
        }
        ++est.starts_used;
        if (r.value < est.value) {
            est.value = r.value;
            est.c_bar = r.c_bar;
            est.mu = (r.c_bar.array() / c_inf.array()).sqrt() - 1.0;
            est.from_linearization = false;
        }
    }
    return est;
}

// ---- closed forms ----------------------------------------------------------

namespace {

/// Indices of the species with nonzero coefficient in a complex.
std::vector<std::size_t> support_of(const Network& net, std::size_t complex) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < net.num_species(); ++i)
        if (y_at(net, complex, i) != 0) s.push_back(i);
    return s;
}

bool has_reaction(const Network& net, std::size_t from, std::size_t to) {
    return std::any_of(net.reactions().begin(), net.reactions().end(),
                       [&](const Reaction& r) { return r.reactant == from && r.product == to; });
}

} // namespace

std::optional<EnzymeTemplate> match_enzyme(const Network& net) {
    if (net.num_species() != 4 || net.num_complexes() != 3 || net.num_reactions() != 4) return std::nullopt;
    for (std::size_t mid = 0; mid < 3; ++mid) {
        const auto s_mid = support_of(net, mid);
        if (s_mid.size() != 1 || y_at(net, mid, s_mid[0]) != 1) continue;
        const std::size_t e1 = (mid + 1) % 3, e2 = (mid + 2) % 3;
        const auto s1 = support_of(net, e1), s2 = support_of(net, e2);
        if (s1.size() != 2 || s2.size() != 2) continue;
        bool unit = true;
        for (auto i : s1) unit = unit && y_at(net, e1, i) == 1;
        for (auto i : s2) unit = unit && y_at(net, e2, i) == 1;
        if (!unit) continue;
        // Shared species A, private species B (in e1) and D (in e2).
        std::vector<std::size_t> common;
        std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(common));
        if (common.size() != 1) continue;
        const std::size_t a = common[0];
        const std::size_t b = s1[0] == a ? s1[1] : s1[0];
        const std::size_t d = s2[0] == a ? s2[1] : s2[0];
        const std::size_t c = s_mid[0];
        if (c == a || c == b || c == d) continue;
        if (!has_reaction(net, e1, mid) || !has_reaction(net, mid, e1) || !has_reaction(net, mid, e2) ||
            !has_reaction(net, e2, mid))
            continue;
        return EnzymeTemplate{a, b, c, d};
    }
    return std::nullopt;
}

std::optional<CyclicTemplate> match_cyclic(const Network& net) {
    if (net.num_species() != 3 || net.num_complexes() != 3 || net.num_reactions() != 3) return std::nullopt;
    const auto& rx = net.reactions();
    auto next_of = [&](std::size_t c) -> std::optional<std::pair<std::size_t, double>> {
        std::optional<std::pair<std::size_t, double>> found;
        for (const auto& r : rx)
            if (r.reactant == c) {
                if (found) return std::nullopt;
                found = std::make_pair(r.product, r.rate);
            }
        return found;
    };
    for (std::size_t start = 0; start < 3; ++start) {
        const auto s_a = support_of(net, start);
        if (s_a.size() != 1 || y_at(net, start, s_a[0]) != 1) continue;
        const auto step1 = next_of(start);
        if (!step1) continue;
        const auto step2 = next_of(step1->first);
        if (!step2) continue;
        const auto step3 = next_of(step2->first);
        if (!step3 || step3->first != start) continue;

        const std::size_t mid = step1->first, last = step2->first;
        const auto s_last = support_of(net, last);
        if (s_last.size() != 1) continue;
        const std::size_t b = s_last[0];
        const double alpha = y_at(net, last, b) - 1.0;
        if (alpha < 1) continue;
        const auto s_mid = support_of(net, mid);
        if (s_mid.size() != 2 || std::find(s_mid.begin(), s_mid.end(), b) == s_mid.end()) continue;
        const std::size_t c = s_mid[0] == b ? s_mid[1] : s_mid[0];
        const std::size_t a = s_a[0];
        if (a == b || a == c) continue;
        if (y_at(net, mid, b) != alpha || y_at(net, mid, c) != 1) continue;
        return CyclicTemplate{a, b, c, alpha, step1->second, step2->second, step3->second};
    }
    return std::nullopt;
}

EnzymeNu enzyme_nu(const Eigen::VectorXd& c) {
    if (c.size() != 4) throw InvalidArgument("enzyme equilibrium needs 4 components");
    if (!(c.array() > 0).all()) throw InvalidArgument("enzyme equilibrium must be positive");
    const double top = std::pow(std::sqrt(1.0 + c[0] / (2.0 * c[2])) - 1.0, 2);
    const double m2 = -1.0 + std::sqrt(1.0 + (c[2] + c[3]) / c[1]);
    const double m4 = -1.0 + std::sqrt(1.0 + (c[2] + c[1]) / c[3]);
    return {top / (m2 * m2), top / (m4 * m4)};
}

double enzyme_H1(const Eigen::VectorXd& c_inf) {
    const EnzymeNu nu = enzyme_nu(c_inf);
    return std::min({1.0 / 18.0, nu.nu1 / 9.0, nu.nu2 / 9.0});
}

CyclicRho cyclic_rho(double alpha, const Eigen::VectorXd& c) {
    if (!(alpha >= 1)) throw InvalidArgument("alpha must be at least 1");
    if (c.size() != 3 || !(c.array() > 0).all()) throw InvalidArgument("cyclic equilibrium must be 3 positive values");
    CyclicRho out;
    out.b_max = -1.0 + std::sqrt(1.0 + ((alpha + 1.0) * c[0] + c[2]) / c[1]);
    out.rho = std::min(0.25, 1.0 / (4.0 * (alpha + 1.0) * std::pow(std::max(1.0, out.b_max), 2.0 * alpha)));
    return out;
}

double cyclic_h(double t, double alpha, double k3, double inv_bound) {
    if (!(inv_bound > 0) || !std::isfinite(inv_bound)) throw InvalidArgument("inv_bound must be positive and finite");
    return std::pow(1.0 / inv_bound + alpha * (alpha + 1.0) * k3 * t, -1.0 / alpha);
}

double cyclic_H1_of_t(double t, double alpha, double k3, const Eigen::VectorXd& c_inf, double inv_bound) {
    const double rho = cyclic_rho(alpha, c_inf).rho;
    const double h = cyclic_h(t, alpha, k3, inv_bound);
    return rho * std::min(1.0, std::pow(h / c_inf[1], alpha));
}

double cyclic_H1_integral(double T, double alpha, double k3, const Eigen::VectorXd& c_inf, double inv_bound) {
    if (T < 0) throw InvalidArgument("T must be nonnegative");
    const double rho = cyclic_rho(alpha, c_inf).rho;
    // (h / c2)^alpha = 1 / (c2^alpha (A + B t)), which is below 1 from t_star on.
    const double A = 1.0 / inv_bound;
    const double B = alpha * (alpha + 1.0) * k3;
    const double c2a = std::pow(c_inf[1], alpha);
    const double t_star = std::max(0.0, (1.0 / c2a - A) / B);
    if (T <= t_star) return rho * T;
    const double a0 = A + B * t_star;
    return rho * t_star + rho / (c2a * B) * std::log((A + B * T) / a0);
}

double cyclic_elementary_lhs(double alpha, double a, double b, double c) {
    const double t1 = (1.0 + a) - std::pow(1.0 + b, alpha) * (1.0 + c);
    const double t2 = c - b;
    const double t3 = std::pow(1.0 + b, alpha + 1.0) - (1.0 + a);
    return t1 * t1 + t2 * t2 + t3 * t3;
}

double cyclic_constraint(double alpha, const Eigen::VectorXd& c, double a, double b, double cc) {
    return (alpha + 1.0) * c[0] * (a * a + 2.0 * a) + c[1] * (b * b + 2.0 * b) + c[2] * (cc * cc + 2.0 * cc);
}

} // namespace crn
