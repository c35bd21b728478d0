#include "crn/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "crn/errors.hpp"

namespace crn {

namespace {

constexpr double kLogClamp = 60.0;

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0 ? std::abs(a - b) / scale : 0.0;
}

/// Mass-action kinetics over a subset of the species, used both for the full
/// network and for the reduced systems of the boundary search.
struct Kinetics {
    Eigen::MatrixXd complexes; ///< rows are stoichiometric vectors
    struct Edge {
        Eigen::Index reactant;
        Eigen::Index product;
        double rate;
    };
    std::vector<Edge> edges;

    Eigen::Index dim() const { return complexes.cols(); }

    double flux(const Edge& e, const Eigen::VectorXd& u) const {
        return e.rate * std::exp(complexes.row(e.reactant).dot(u));
    }

    /// Per-complex relative residual (o - i)/(o + i) and its Jacobian in u = log c.
    void residual(const Eigen::VectorXd& u, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
        const Eigen::Index nc = complexes.rows();
        Eigen::VectorXd out = Eigen::VectorXd::Zero(nc), in = Eigen::VectorXd::Zero(nc);
        Eigen::MatrixXd dout, din;
        if (jac) {
            dout = Eigen::MatrixXd::Zero(nc, dim());
            din = Eigen::MatrixXd::Zero(nc, dim());
        }
        for (const auto& e : edges) {
            const double f = flux(e, u);
            out[e.reactant] += f;
            in[e.product] += f;
            if (jac) {
                dout.row(e.reactant) += f * complexes.row(e.reactant);
                din.row(e.product) += f * complexes.row(e.reactant);
            }
        }
        r.resize(nc);
        if (jac) jac->setZero(nc, dim());
        for (Eigen::Index y = 0; y < nc; ++y) {
            const double s = out[y] + in[y];
            if (s <= 0) {
                r[y] = 0;
                continue;
            }
            r[y] = (out[y] - in[y]) / s;
            if (jac) jac->row(y) = (2.0 * in[y] * dout.row(y) - 2.0 * out[y] * din.row(y)) / (s * s);
        }
    }
};

Kinetics full_kinetics(const Network& net) {
    Kinetics k;
    k.complexes = net.complex_matrix();
    for (const auto& r : net.reactions())
        k.edges.push_back({static_cast<Eigen::Index>(r.reactant), static_cast<Eigen::Index>(r.product), r.rate});
    return k;
}

struct ReferenceState {
    Eigen::VectorXd log_c;
    int iterations = 0;
};

/// Damped Gauss-Newton on the relative complex-balance residual, restarted
/// from random log-states until the residual drops below tol.
ReferenceState find_reference_state(const Kinetics& kin, const EquilibriumOptions& opt, std::mt19937_64& rng) {
    const Eigen::Index n = kin.dim();
    std::uniform_real_distribution<double> start(-3.0, 3.0);
    double best = std::numeric_limits<double>::infinity();
    int total_iterations = 0;

    for (int attempt = 0; attempt <= opt.max_restarts; ++attempt) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        if (attempt > 0)
            for (Eigen::Index i = 0; i < n; ++i) u[i] = start(rng);

        Eigen::VectorXd r, r_trial;
        Eigen::MatrixXd jac;
        kin.residual(u, r, &jac);
        for (int it = 0; it < opt.max_iterations; ++it) {
            const double norm_inf = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
            best = std::min(best, norm_inf);
            if (norm_inf <= 1e-3 * opt.tol) return {u, total_iterations};
            ++total_iterations;

            const Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(r);
            const double norm2 = r.squaredNorm();
            double t = 1.0;
            bool accepted = false;
            for (int k = 0; k < 40; ++k, t *= 0.5) {
                Eigen::VectorXd trial = (u + t * step).cwiseMax(-kLogClamp).cwiseMin(kLogClamp);
                kin.residual(trial, r_trial, nullptr);
                if (r_trial.squaredNorm() < norm2) {
                    u = std::move(trial);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
            kin.residual(u, r, &jac);
        }
        const double norm_inf = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
        best = std::min(best, norm_inf);
        // (o - i) / (o + i) is half the gap reported by is_complex_balanced.
        if (norm_inf <= 0.5 * opt.tol) return {u, total_iterations};
    }
    throw NotComplexBalanced("no positive complex balanced state found", best);
}

struct MassSolve {
    Eigen::VectorXd c;
    double residual = std::numeric_limits<double>::infinity(); ///< |Qc - M|_inf / |M|_inf
    int iterations = 0;
};

/// Newton with Armijo backtracking on phi(g) = sum c(g) - M.g, c(g) = c* exp(Q^T g).
MassSolve solve_mass(const Eigen::MatrixXd& q, const Eigen::VectorXd& m, const Eigen::VectorXd& log_ref,
                     int max_iterations, bool recentre = true) {
    const Eigen::Index n = log_ref.size();
    MassSolve out;
    if (q.rows() == 0) {
        out.c = log_ref.array().exp();
        out.residual = 0;
        return out;
    }
    const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

    // Start from the state in the class of log_ref closest to a flat profile at the mass scale.
    const Eigen::MatrixXd qqt = q * q.transpose();
    const Eigen::VectorXd target = Eigen::VectorXd::Constant(n, std::log(scale / static_cast<double>(n))) - log_ref;
    Eigen::VectorXd g = recentre ? Eigen::VectorXd(qqt.ldlt().solve(q * target)) : Eigen::VectorXd::Zero(q.rows());

    auto state = [&](const Eigen::VectorXd& gamma) -> Eigen::VectorXd {
        return (log_ref + q.transpose() * gamma).array().min(700.0).exp();
    };
    auto potential = [&](const Eigen::VectorXd& c, const Eigen::VectorXd& gamma) { return c.sum() - m.dot(gamma); };

    Eigen::VectorXd c = state(g);
    double phi = potential(c, g);
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::VectorXd grad = q * c - m;
        out.c = c;
        out.residual = grad.cwiseAbs().maxCoeff() / scale;
        out.iterations = it;
        if (out.residual <= 1e-15) break;

        const Eigen::MatrixXd hess = q * c.asDiagonal() * q.transpose();
        const Eigen::VectorXd dir = -hess.ldlt().solve(grad);
        const double slope = grad.dot(dir);
        if (!(slope < 0)) break;
        double t = 1.0;
        bool accepted = false;
        // Close to the root rounding noise in phi can admit useless tiny
        // steps, so only the residual-norm test below is used there.
        const bool near_root = out.residual < 1e-6;
        for (int k = 0; k < 60 && !near_root; ++k, t *= 0.5) {
            const Eigen::VectorXd g_trial = g + t * dir;
            const Eigen::VectorXd c_trial = state(g_trial);
            const double phi_trial = potential(c_trial, g_trial);
            if (std::isfinite(phi_trial) && phi_trial <= phi + 1e-4 * t * slope) {
                g = g_trial;
                c = c_trial;
                phi = phi_trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            const double norm = grad.norm();
            t = 1.0;
            for (int k = 0; k < 30 && !accepted; ++k, t *= 0.5) {
                const Eigen::VectorXd g_trial = g + t * dir;
                const Eigen::VectorXd c_trial = state(g_trial);
                if ((q * c_trial - m).norm() < norm) {
                    g = g_trial;
                    c = c_trial;
                    phi = potential(c, g);
                    accepted = true;
                }
            }
        }
        if (!accepted) break; // stagnated at rounding level
    }
    const Eigen::VectorXd grad = q * c - m;
    if (grad.cwiseAbs().maxCoeff() / scale < out.residual) {
        out.c = c;
        out.residual = grad.cwiseAbs().maxCoeff() / scale;
    }
    return out;
}

double relative_balance_residual(const Network& net, const Eigen::VectorXd& c) {
    return is_complex_balanced(net, c).max_relative_residual;
}

void check_mass(const Network& net, const MassVector& mass) {
    if (mass.q.cols() != static_cast<Eigen::Index>(net.num_species()) || mass.q.rows() != mass.values.size())
        throw InvalidArgument("mass vector does not match the network");
}

} // namespace

BalanceReport is_complex_balanced(const Network& net, const Eigen::VectorXd& c, double tol) {
    if (c.size() != static_cast<Eigen::Index>(net.num_species())) throw InvalidArgument("state has wrong dimension");
    if ((c.array() < 0).any()) throw InvalidArgument("negative concentration");
    BalanceReport rep;
    const auto nc = static_cast<Eigen::Index>(net.num_complexes());
    rep.outflow = Eigen::VectorXd::Zero(nc);
    rep.inflow = Eigen::VectorXd::Zero(nc);
    for (const auto& r : net.reactions()) {
        const double f = r.rate * net.monomial(r.reactant, c);
        rep.outflow[static_cast<Eigen::Index>(r.reactant)] += f;
        rep.inflow[static_cast<Eigen::Index>(r.product)] += f;
    }
    for (Eigen::Index y = 0; y < nc; ++y) {
        rep.max_residual = std::max(rep.max_residual, std::abs(rep.outflow[y] - rep.inflow[y]));
        rep.max_relative_residual = std::max(rep.max_relative_residual, relative_gap(rep.outflow[y], rep.inflow[y]));
    }
    rep.balanced = rep.max_relative_residual <= tol;
    return rep;
}

DetailedBalanceReport is_detailed_balanced(const Network& net, const Eigen::VectorXd& c, double tol) {
    if (c.size() != static_cast<Eigen::Index>(net.num_species())) throw InvalidArgument("state has wrong dimension");
    if ((c.array() < 0).any()) throw InvalidArgument("negative concentration");
    DetailedBalanceReport rep;
    rep.has_reverse_for_all = true;
    bool ok = true;
    const auto& rx = net.reactions();
    for (std::size_t a = 0; a < rx.size(); ++a) {
        // Sum over parallel edges so duplicated reactions still pair up.
        double forward = 0, backward = 0;
        bool has_reverse = false;
        for (const auto& r : rx) {
            if (r.reactant == rx[a].reactant && r.product == rx[a].product)
                forward += r.rate * net.monomial(r.reactant, c);
            if (r.reactant == rx[a].product && r.product == rx[a].reactant) {
                backward += r.rate * net.monomial(r.reactant, c);
                has_reverse = true;
            }
        }
        if (!has_reverse) {
            rep.has_reverse_for_all = false;
            ok = false;
            continue;
        }
        if (rx[a].reactant < rx[a].product) {
            const double res = relative_gap(forward, backward);
            rep.pair_residuals.push_back(res);
            if (res > tol) ok = false;
        }
    }
    rep.balanced = ok;
    return rep;
}

EquilibriumResult solve_complex_balanced(const Network& net, const MassVector& mass, const EquilibriumOptions& opt) {
    check_mass(net, mass);
    if ((mass.values.array() <= 0).any()) throw InvalidArgument("mass vector must be strictly positive");

    std::mt19937_64 rng(opt.seed);
    const Kinetics kin = full_kinetics(net);
    const ReferenceState ref = find_reference_state(kin, opt, rng);

    const MassSolve ms = solve_mass(mass.q, mass.values, ref.log_c, opt.max_iterations);
    if (!(ms.residual <= opt.tol))
        throw NonConvergence("mass constraint solve did not converge", ms.residual);

    EquilibriumResult res;
    res.c_infty = ms.c;
    res.residual_mass = ms.residual;
    res.residual_complex_balance = relative_balance_residual(net, ms.c);
    res.newton_iterations = ref.iterations + ms.iterations;
    res.is_detailed_balanced = is_detailed_balanced(net, ms.c, std::max(opt.tol, 1e-9)).balanced;
    if (!(res.residual_complex_balance <= opt.tol))
        throw NotComplexBalanced("equilibrium lost complex balance in the mass solve", res.residual_complex_balance);
    return res;
}

namespace {

/// Gauss-Newton for Q_P exp(log_ref + B theta) = M. Returns the relative
/// residual; `c_out` receives the state on P and `rank_deficient` is set when
/// the solution set is locally a continuum.
double solve_restricted_mass(const Eigen::MatrixXd& qp, const Eigen::VectorXd& m, const Eigen::VectorXd& log_ref,
                             const Eigen::MatrixXd& b, const EquilibriumOptions& opt, std::mt19937_64& rng,
                             Eigen::VectorXd& c_out, bool& rank_deficient) {
    const double scale = m.cwiseAbs().maxCoeff();
    std::uniform_real_distribution<double> start(-3.0, 3.0);
    double best = std::numeric_limits<double>::infinity();
    auto eval = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& c) {
        c = (log_ref + b * theta).cwiseMax(-kLogClamp).cwiseMin(kLogClamp).array().exp();
        return Eigen::VectorXd((qp * c - m) / scale);
    };
    for (int attempt = 0; attempt <= opt.max_restarts; ++attempt) {
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(b.cols());
        if (attempt > 0)
            for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = start(rng);
        Eigen::VectorXd c;
        Eigen::VectorXd r = eval(theta, c);
        for (int it = 0; it < opt.max_iterations; ++it) {
            if (r.cwiseAbs().maxCoeff() <= 1e-3 * opt.tol) break;
            const Eigen::MatrixXd jac = qp * c.asDiagonal() * b / scale;
            const Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(r);
            double t = 1.0;
            bool accepted = false;
            for (int k = 0; k < 40; ++k, t *= 0.5) {
                Eigen::VectorXd c_trial;
                const Eigen::VectorXd trial = theta + t * step;
                const Eigen::VectorXd r_trial = eval(trial, c_trial);
                if (r_trial.squaredNorm() < r.squaredNorm()) {
                    theta = trial;
                    r = r_trial;
                    c = c_trial;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
        const double res = r.cwiseAbs().maxCoeff();
        if (res < best) {
            best = res;
            c_out = c;
            const Eigen::MatrixXd jac = qp * c.asDiagonal() * b;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
            lu.setThreshold(1e-10);
            rank_deficient = lu.rank() < b.cols();
        }
        if (best <= opt.tol) break;
    }
    return best;
}

} // namespace

BoundaryEquilibriaResult find_boundary_equilibria(const Network& net, const MassVector& mass,
                                                  const EquilibriumOptions& opt) {
    check_mass(net, mass);
    const std::size_t n = net.num_species();
    if (n > 20) throw SupportLimitExceeded("boundary equilibrium search is limited to 20 species");

    const Eigen::MatrixXd& y = net.complex_matrix();
    const std::size_t nc = net.num_complexes();
    std::vector<std::uint32_t> complex_support(nc, 0);
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t i = 0; i < n; ++i)
            if (y(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) > 0) complex_support[c] |= 1u << i;

    const double scale = mass.values.size() ? mass.values.cwiseAbs().maxCoeff() : 1.0;
    std::mt19937_64 rng(opt.seed);
    BoundaryEquilibriaResult result;
    const std::uint32_t full = (1u << n) - 1;

    for (std::uint32_t zero = 1; zero < full; ++zero) {
        const std::uint32_t pos = full & ~zero;

        // Active reactions have every reactant species present; a product
        // touching the zero set would receive inflow with no outflow.
        std::vector<std::size_t> active;
        bool unbalanced = false;
        for (std::size_t r = 0; r < net.num_reactions(); ++r) {
            const auto& rx = net.reactions()[r];
            if ((complex_support[rx.reactant] & zero) != 0) continue;
            if ((complex_support[rx.product] & zero) != 0) {
                unbalanced = true;
                break;
            }
            active.push_back(r);
        }
        if (unbalanced) continue;

        std::vector<Eigen::Index> keep;
        for (std::size_t i = 0; i < n; ++i)
            if (pos & (1u << i)) keep.push_back(static_cast<Eigen::Index>(i));
        const auto np = static_cast<Eigen::Index>(keep.size());

        Eigen::MatrixXd qp(mass.q.rows(), np);
        for (Eigen::Index j = 0; j < np; ++j) qp.col(j) = mass.q.col(keep[static_cast<std::size_t>(j)]);
        // A conservation law that only sees absent species forces M_j = 0.
        bool infeasible = false;
        for (Eigen::Index row = 0; row < qp.rows(); ++row)
            if (qp.row(row).cwiseAbs().maxCoeff() == 0 && std::abs(mass.values[row]) > opt.tol * scale)
                infeasible = true;
        if (infeasible) continue;

        Eigen::VectorXd log_ref = Eigen::VectorXd::Zero(np);
        Eigen::MatrixXd b = Eigen::MatrixXd::Identity(np, np);
        if (!active.empty()) {
            Kinetics kin;
            std::vector<std::size_t> used;
            auto local = [&](std::size_t c) {
                auto it = std::find(used.begin(), used.end(), c);
                if (it != used.end()) return static_cast<Eigen::Index>(it - used.begin());
                used.push_back(c);
                return static_cast<Eigen::Index>(used.size() - 1);
            };
            for (auto r : active) {
                const auto& rx = net.reactions()[r];
                const Eigen::Index a = local(rx.reactant);
                const Eigen::Index p = local(rx.product);
                kin.edges.push_back({a, p, rx.rate});
            }
            kin.complexes.resize(static_cast<Eigen::Index>(used.size()), np);
            for (std::size_t c = 0; c < used.size(); ++c)
                for (Eigen::Index j = 0; j < np; ++j)
                    kin.complexes(static_cast<Eigen::Index>(c), j) =
                        y(static_cast<Eigen::Index>(used[c]), keep[static_cast<std::size_t>(j)]);
            try {
                log_ref = find_reference_state(kin, opt, rng).log_c;
            } catch (const NotComplexBalanced&) {
                continue;
            }
            // Complex balanced states on P form log_ref + ker(W_P).
            RationalMatrix w;
            for (auto r : active) {
                const auto& rx = net.reactions()[r];
                RationalVector row;
                for (auto i : keep)
                    row.push_back(net.complexes()[rx.product][static_cast<std::size_t>(i)] -
                                  net.complexes()[rx.reactant][static_cast<std::size_t>(i)]);
                w.push_back(std::move(row));
            }
            const RationalMatrix kernel = kernel_basis(w, static_cast<std::size_t>(np));
            b = to_eigen(kernel, static_cast<std::size_t>(np)).transpose();
            if (b.cols() == 0) b.resize(np, 0);
        }

        Eigen::VectorXd cp;
        bool continuum = false;
        double res = 0;
        if (b.cols() == 0) {
            cp = log_ref.array().exp();
            res = qp.rows() ? (qp * cp - mass.values).cwiseAbs().maxCoeff() / scale : 0.0;
        } else {
            res = solve_restricted_mass(qp, mass.values, log_ref, b, opt, rng, cp, continuum);
        }
        if (!(res <= opt.tol)) continue;
        // Components that collapsed towards zero belong to a larger zero set.
        if (cp.minCoeff() < 1e-9 * scale) continue;

        BoundaryEquilibrium be;
        be.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (Eigen::Index j = 0; j < np; ++j) be.values[keep[static_cast<std::size_t>(j)]] = cp[j];
        for (std::size_t i = 0; i < n; ++i)
            if (zero & (1u << i)) be.support.push_back(i);
        be.residual_mass = res;
        be.residual_complex_balance = relative_balance_residual(net, be.values);
        if (be.residual_complex_balance > std::max(opt.tol, 1e-9)) continue;
        if (continuum) result.complete = false;

        const bool duplicate = std::any_of(result.equilibria.begin(), result.equilibria.end(),
                                           [&](const BoundaryEquilibrium& other) {
                                               return (other.values - be.values).cwiseAbs().maxCoeff() <=
                                                      1e-8 * (1 + scale);
                                           });
        if (!duplicate) result.equilibria.push_back(std::move(be));
    }
    return result;
}

Eigen::VectorXd project_to_mass_class(const MassVector& mass, const Eigen::VectorXd& c, double tol,
                                      int max_iterations) {
    if (c.size() != mass.q.cols()) throw InvalidArgument("state has wrong dimension");
    if (!(c.array() > 0).all()) throw InvalidArgument("projection needs a positive state");
    if (mass.q.rows() == 0) return c;
    const MassSolve ms = solve_mass(mass.q, mass.values, c.array().log().matrix(), max_iterations, false);
    if (!(ms.residual <= tol) || !ms.c.allFinite())
        throw ProjectionFailure("projection onto the mass class failed (residual " + std::to_string(ms.residual) + ")");
    return ms.c;
}

} // namespace crn
