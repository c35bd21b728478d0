#include "crn/pdesolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"

namespace crn {

namespace {

constexpr double kOverflowGuard = 1e12;

/// Factorised (I - r L) for the Neumann Laplacian on n cells.
class NeumannSolver {
public:
    NeumannSolver(std::size_t n, double r) : n_(n), r_(r), c_(n), inv_(n) {
        if (n == 1) {
            inv_[0] = 1.0;
            return;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double diag = (j == 0 || j == n - 1) ? 1.0 + r : 1.0 + 2.0 * r;
            const double lower = j == 0 ? 0.0 : -r;
            const double denom = diag - lower * (j == 0 ? 0.0 : c_[j - 1]);
            if (!(std::abs(denom) > 0)) throw LinearSolveFailure("singular diffusion system");
            inv_[j] = 1.0 / denom;
            c_[j] = (j + 1 < n) ? -r * inv_[j] : 0.0;
        }
    }

    /// Solves in place and returns max |A x - b|.
    double solve(double* x, std::vector<double>& scratch) const {
        if (n_ == 1) return 0.0;
        scratch.assign(x, x + n_);
        x[0] = x[0] * inv_[0];
        for (std::size_t j = 1; j < n_; ++j) x[j] = (x[j] + r_ * x[j - 1]) * inv_[j];
        for (std::size_t j = n_ - 1; j-- > 0;) x[j] -= c_[j] * x[j + 1];

        double residual = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            const double left = j > 0 ? x[j - 1] : x[j];
            const double right = j + 1 < n_ ? x[j + 1] : x[j];
            const double ax = x[j] - r_ * (left - 2.0 * x[j] + right);
            residual = std::max(residual, std::abs(ax - scratch[j]));
        }
        if (!std::isfinite(residual)) throw LinearSolveFailure("diffusion solve produced non-finite values");
        return residual;
    }

private:
    std::size_t n_;
    double r_;
    std::vector<double> c_;   // modified super-diagonal
    std::vector<double> inv_; // inverse pivots
};

double jacobian_row_bound(const Network& net, const double* c, const Eigen::MatrixXd& stoich_change,
                          Eigen::MatrixXd& jac) {
    const auto n = static_cast<Eigen::Index>(net.num_species());
    const Eigen::MatrixXd& y = net.complex_matrix();
    jac.setZero(n, n);
    for (std::size_t r = 0; r < net.num_reactions(); ++r) {
        const auto& rx = net.reactions()[r];
        const auto a = static_cast<Eigen::Index>(rx.reactant);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double yj = y(a, j);
            if (yj == 0) continue;
            double deriv = rx.rate * yj * std::pow(c[j], yj - 1.0);
            for (Eigen::Index l = 0; l < n; ++l)
                if (l != j && y(a, l) != 0) deriv *= std::pow(c[l], y(a, l));
            jac.col(j) += deriv * stoich_change.row(static_cast<Eigen::Index>(r)).transpose();
        }
    }
    return jac.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXd stoichiometric_change(const Network& net) {
    const Eigen::MatrixXd& y = net.complex_matrix();
    Eigen::MatrixXd s(static_cast<Eigen::Index>(net.num_reactions()), y.cols());
    for (std::size_t r = 0; r < net.num_reactions(); ++r) {
        const auto& rx = net.reactions()[r];
        s.row(static_cast<Eigen::Index>(r)) =
            y.row(static_cast<Eigen::Index>(rx.product)) - y.row(static_cast<Eigen::Index>(rx.reactant));
    }
    return s;
}

} // namespace

double reaction_jacobian_bound(const Network& net, const SpatialField& c) {
    if (c.num_species() != net.num_species()) throw InvalidArgument("field has wrong number of species");
    const Eigen::MatrixXd s = stoichiometric_change(net);
    Eigen::MatrixXd jac;
    double bound = 0.0;
    for (std::size_t j = 0; j < c.num_cells(); ++j)
        bound = std::max(bound, jacobian_row_bound(net, c.values().col(static_cast<Eigen::Index>(j)).data(), s, jac));
    return bound;
}

SimulationSeries simulate(const Network& net, const SpatialField& initial, const SolverConfig& cfg) {
    const std::size_t n_species = net.num_species();
    if (initial.num_species() != n_species) throw InvalidArgument("initial data has wrong number of species");
    if (initial.num_cells() != cfg.n_x) throw InvalidArgument("initial data has wrong number of cells");
    if (!(cfg.t_end > 0) || !std::isfinite(cfg.t_end)) throw InvalidArgument("t_end must be positive");
    if (cfg.dt < 0 || !std::isfinite(cfg.dt)) throw InvalidArgument("dt must be nonnegative");
    if (cfg.epsilon < 0) throw InvalidArgument("epsilon must be nonnegative");
    if (!(cfg.safety > 0)) throw InvalidArgument("safety factor must be positive");

    SimulationSeries series;
    const auto warn = [&](const std::string& text) {
        series.warnings.push_back(text);
        if (cfg.on_warning) cfg.on_warning(text);
    };
    series.initial = initial;
    series.h = initial.h();

    const ConservationStructure cs = conservation_structure(net);
    const MassVector mass = mass_vector(cs, initial.averages());
    series.initial_mass = mass.values;
    if (cfg.c_inf) {
        if (cfg.c_inf->size() != static_cast<Eigen::Index>(n_species) || !(cfg.c_inf->array() > 0).all())
            throw InvalidArgument("reference equilibrium must be positive with one entry per species");
        series.c_inf = *cfg.c_inf;
    } else {
        series.c_inf = solve_complex_balanced(net, mass).c_infty;
    }

    const double bound0 = reaction_jacobian_bound(net, initial);
    double dt = cfg.dt;
    if (dt == 0.0) dt = bound0 > 0 ? cfg.safety / bound0 : cfg.t_end / 100.0;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_end / dt - 1e-9)));
    dt = cfg.t_end / static_cast<double>(steps);
    series.dt = dt;
    series.steps = steps;
    if (dt * bound0 > cfg.safety * (1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " exceeds the reaction stability estimate " << cfg.safety / bound0;
        warn(msg.str());
    }

    std::vector<NeumannSolver> diffusion;
    for (std::size_t i = 0; i < n_species; ++i)
        diffusion.emplace_back(cfg.n_x, dt * net.diffusion()[static_cast<Eigen::Index>(i)] / (series.h * series.h));

    const Eigen::MatrixXd stoich = stoichiometric_change(net);
    SpatialField field = initial;
    Eigen::MatrixXd& v = field.values();
    std::vector<double> scratch;
    std::vector<double> row(cfg.n_x);
    Eigen::VectorXd rates(static_cast<Eigen::Index>(n_species));
    Eigen::MatrixXd jac;
    series.min_before_clip = v.minCoeff();

    double integral = 0.0;
    double current_d = entropy_dissipation(net, field, series.c_inf).total();
    double last_reaction = 0.0, last_residual = 0.0;

    auto record = [&](double t) {
        series.times.push_back(t);
        series.entropy.push_back(relative_entropy(field, series.c_inf));
        series.dissipation.push_back(current_d);
        series.dissipation_integral.push_back(integral);
        const Eigen::VectorXd avg = field.averages();
        series.averages.push_back(avg);
        series.masses.push_back(mass.q * avg);
        series.minima.push_back(v.rowwise().minCoeff());
        Eigen::VectorXd l1(static_cast<Eigen::Index>(n_species));
        for (Eigen::Index i = 0; i < l1.size(); ++i)
            l1[i] = (v.row(i).array() - series.c_inf[i]).abs().sum() * series.h;
        series.l1_distance.push_back(l1);
        series.max_reaction.push_back(last_reaction);
        series.linear_residual.push_back(last_residual);
    };
    record(0.0);

    for (std::size_t step = 1; step <= steps; ++step) {
        // Implicit diffusion, species by species. Rows of v are strided, so
        // copy through a contiguous buffer.
        last_residual = 0.0;
        for (std::size_t i = 0; i < n_species; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            for (std::size_t j = 0; j < cfg.n_x; ++j) row[j] = v(ii, static_cast<Eigen::Index>(j));
            last_residual = std::max(last_residual, diffusion[i].solve(row.data(), scratch));
            for (std::size_t j = 0; j < cfg.n_x; ++j) v(ii, static_cast<Eigen::Index>(j)) = row[j];
        }

        // D at the state between the two sub-steps: the implicit diffusion
        // step dissipates at least dt * D_diff there, and the explicit
        // reaction step starts from it.
        integral += dt * entropy_dissipation(net, field, series.c_inf).total();

        // Explicit reaction, cell by cell.
        last_reaction = 0.0;
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            const double* c = v.col(j).data();
            const std::span<const double> cell(c, n_species);
            rates.setZero();
            for (std::size_t r = 0; r < net.num_reactions(); ++r) {
                const auto& rx = net.reactions()[r];
                const double flux = rx.rate * net.monomial(rx.reactant, cell);
                if (flux != 0.0) rates += flux * stoich.row(static_cast<Eigen::Index>(r)).transpose();
            }
            const double size = rates.cwiseAbs().sum();
            last_reaction = std::max(last_reaction, size);
            v.col(j) += dt / (1.0 + cfg.epsilon * size) * rates;
        }

        const double lowest = v.minCoeff();
        series.min_before_clip = std::min(series.min_before_clip, lowest);
        if (lowest < 0) {
            double removed = 0.0;
            for (Eigen::Index k = 0; k < v.size(); ++k) {
                double& x = v.data()[k];
                if (x < 0) {
                    removed += -x;
                    x = 0.0;
                    ++series.clip_events;
                }
            }
            removed *= series.h;
            series.clipped_mass += removed;
            series.max_clip_per_step = std::max(series.max_clip_per_step, removed);
        }
        const double t = static_cast<double>(step) * dt;
        if (!v.allFinite() || v.maxCoeff() > kOverflowGuard)
            throw BlowUp("solution exceeded " + std::to_string(kOverflowGuard) + " at t = " + std::to_string(t), t);

        if (step % cfg.output_every == 0 || step == steps) {
            current_d = entropy_dissipation(net, field, series.c_inf).total();
            record(t);
        }

        if (cfg.recheck_every > 0 && step % cfg.recheck_every == 0) {
            double bound = 0.0;
            for (Eigen::Index j = 0; j < v.cols(); ++j)
                bound = std::max(bound, jacobian_row_bound(net, v.col(j).data(), stoich, jac));
            if (dt * bound > cfg.safety * (1.0 + 1e-9)) {
                std::ostringstream msg;
                msg << "t = " << t << ": dt = " << dt << " exceeds the reaction stability estimate "
                    << cfg.safety / bound;
                warn(msg.str());
            }
        }
    }
    series.final_state = field;
    return series;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& entropy, double t0, double t1) {
    if (times.size() != entropy.size()) throw InvalidArgument("times and entropy differ in length");
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t0 || times[k] > t1) continue;
        if (!(entropy[k] > 1e-14)) throw InvalidArgument("entropy below the positivity floor 1e-14 in the window");
        ts.push_back(times[k]);
        ys.push_back(std::log(entropy[k]));
    }
    if (ts.size() < 10) throw InvalidArgument("decay window holds fewer than 10 samples");
    const double n = static_cast<double>(ts.size());
    double mt = 0, my = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        mt += ts[k];
        my += ys[k];
    }
    mt /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        sxy += (ts[k] - mt) * (ys[k] - my);
        sxx += (ts[k] - mt) * (ts[k] - mt);
    }
    if (!(sxx > 0)) throw InvalidArgument("decay window has no time spread");
    DecayFit fit;
    fit.rate = -sxy / sxx;
    fit.samples = ts.size();
    return fit;
}

DecayFit fit_decay_rate(const SimulationSeries& series, double t0, double t1) {
    DecayFit fit = fit_decay_rate(series.times, series.entropy, t0, t1);
    const std::size_t n = series.l1_distance.empty() ? 0 : static_cast<std::size_t>(series.l1_distance[0].size());
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> ts, ds;
        bool positive = true;
        for (std::size_t k = 0; k < series.times.size(); ++k) {
            if (series.times[k] < t0 || series.times[k] > t1) continue;
            const double d = series.l1_distance[k][static_cast<Eigen::Index>(i)];
            if (!(d > 1e-14)) positive = false;
            ts.push_back(series.times[k]);
            ds.push_back(d);
        }
        fit.species_rate.push_back(positive ? fit_decay_rate(ts, ds, t0, t1).rate
                                            : std::numeric_limits<double>::quiet_NaN());
    }
    return fit;
}

WeakLawCheck check_weak_entropy_law(const std::vector<double>& times, const std::vector<double>& entropy,
                                    const std::vector<double>& integral, double tolerance) {
    if (times.size() != entropy.size() || times.size() != integral.size())
        throw InvalidArgument("series columns differ in length");
    WeakLawCheck out;
    out.tolerance = tolerance;
    out.max_violation = -std::numeric_limits<double>::infinity();
    // F = E + int_0^t D; the worst violation is max_{s<t} F(t) - F(s).
    double min_f = std::numeric_limits<double>::infinity();
    double min_time = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double f = entropy[k] + integral[k];
        if (k > 0 && f - min_f > out.max_violation) {
            out.max_violation = f - min_f;
            out.s = min_time;
            out.t = times[k];
        }
        if (f < min_f) {
            min_f = f;
            min_time = times[k];
        }
    }
    if (times.size() < 2) out.max_violation = 0.0;
    out.holds = out.max_violation <= tolerance;
    return out;
}

WeakLawCheck check_weak_entropy_law(const SimulationSeries& series) {
    const double e0 = series.entropy.empty() ? 0.0 : series.entropy.front();
    const double tol = kWeakLawConstant * (series.dt + series.h * series.h) * e0;
    return check_weak_entropy_law(series.times, series.entropy, series.dissipation_integral, tol);
}

void write_series_csv(std::ostream& out, const SimulationSeries& s) {
    const Eigen::Index m = s.masses.empty() ? 0 : s.masses[0].size();
    const Eigen::Index n = s.averages.empty() ? 0 : s.averages[0].size();
    out << "t,E,D";
    for (Eigen::Index k = 0; k < m; ++k) out << ",mass_" << k + 1;
    for (Eigen::Index i = 0; i < n; ++i) out << ",avg_" << i + 1;
    for (Eigen::Index i = 0; i < n; ++i) out << ",min_" << i + 1;
    out << '\n';
    out.precision(17);
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        out << s.times[k] << ',' << s.entropy[k] << ',' << s.dissipation[k];
        for (Eigen::Index q = 0; q < m; ++q) out << ',' << s.masses[k][q];
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << s.averages[k][i];
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << s.minima[k][i];
        out << '\n';
    }
}

void write_snapshot_csv(std::ostream& out, const SpatialField& field) {
    out << 'x';
    for (std::size_t i = 0; i < field.num_species(); ++i) out << ",c_" << i + 1;
    out << '\n';
    out.precision(17);
    for (std::size_t j = 0; j < field.num_cells(); ++j) {
        out << field.x(j);
        for (std::size_t i = 0; i < field.num_species(); ++i)
            out << ',' << field.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out << '\n';
    }
}

} // namespace crn
