// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "crn/constants.hpp"
#include "crn/entropy.hpp"
#include "crn/equilibrium.hpp"
#include "crn/initial_data.hpp"
#include "crn/pdesolver.hpp"
#include "support.hpp"

using namespace crn;
using crn::test::vec;

namespace {

// Pinned tolerances.
constexpr double kEquilibriumTol = 1e-10;
constexpr double kEquilibriumSeconds = 1.0;
constexpr double kH1Expected = 0.0104726;
constexpr double kH1Tol = 1e-6;
constexpr int kFdiSamples = 100000;
constexpr double kFdiSeconds = 60.0;
constexpr int kTriples = 100000;
constexpr int kFields = 100;
constexpr double kMonotoneTol = 1e-8;   // relative to E(0)
constexpr double kMassDriftTol = 1e-9;
constexpr double kEnvelopeTol = 1e-8;
constexpr double kSimulationSeconds = 120.0;
constexpr double kHalvingRatio = 1.8;
constexpr int kRandomNetworks = 20;
constexpr double kSpanTol = 1e-9;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what << " (" << detail << ")" << std::endl;
    if (!ok) ++failures;
}

/// Runs a criterion and turns an escaping exception into a FAIL line.
void criterion(int n, const std::string& what, const std::function<bool(std::ostringstream&)>& body) {
    std::ostringstream detail;
    detail.precision(6);
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << "exception: " << e.what();
    }
    std::string text = detail.str();
    while (text.size() >= 2 && text.compare(text.size() - 2, 2, "; ") == 0) text.resize(text.size() - 2);
    report(n, ok, what, text);
}

MassVector mass_of(const Network& net, const Eigen::VectorXd& c) { return mass_vector(conservation_structure(net), c); }

} // namespace

int main() {
    const Network enzyme = crn::test::enzyme();
    const Network cyclic = crn::test::cyclic();
    const Eigen::VectorXd ones4 = Eigen::VectorXd::Ones(4);

    criterion(1, "enzyme equilibrium for M = (2, 3)", [&](auto& d) {
        MassVector m;
        m.values = vec({2, 3});
        m.q = conservation_structure(enzyme).q();
        const auto t0 = Clock::now();
        const EquilibriumResult eq = solve_complex_balanced(enzyme, m);
        const double secs = seconds_since(t0);
        const double err = (eq.c_infty - ones4).cwiseAbs().maxCoeff();
        d << "max |c_inf - 1| = " << err << " <= " << kEquilibriumTol << ", " << secs << " s < " << kEquilibriumSeconds
          << " s";
        return err <= kEquilibriumTol && secs < kEquilibriumSeconds;
    });

    criterion(2, "closed-form enzyme H1", [&](auto& d) {
        const double h1 = enzyme_H1(ones4);
        // independent evaluation of min{1/18, nu/9}
        const double nu = std::pow(std::sqrt(1.5) - 1, 2) / std::pow(std::sqrt(3.0) - 1, 2);
        const double direct = std::min(1.0 / 18, nu / 9);
        d.precision(10);
        d << "H1 = " << h1 << ", direct " << direct << ", expected " << kH1Expected << " +- " << kH1Tol;
        return std::abs(h1 - kH1Expected) <= kH1Tol && std::abs(h1 - direct) <= 1e-15;
    });

    criterion(3, "FDI sampling for the enzyme", [&](auto& d) {
        const MassVector m = mass_of(enzyme, ones4);
        const double h1 = enzyme_H1(ones4);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1.0, 2.0);
        std::size_t violations = 0;
        double worst = std::numeric_limits<double>::infinity();
        const auto t0 = Clock::now();
        for (int k = 0; k < kFdiSamples; ++k) {
            Eigen::VectorXd c0(4);
            for (auto& x : c0) x = std::pow(1.0 + u(rng), 2) + 1e-12;
            const Eigen::VectorXd c_bar = project_to_mass_class(m, c0);
            const FdiPoint p = fdi_evaluate(enzyme, ones4, (c_bar.array() / ones4.array()).sqrt() - 1.0);
            if (p.lhs < h1 * p.rhs_base) ++violations;
            if (p.rhs_base > 0) worst = std::min(worst, p.lhs / p.rhs_base);
        }
        const double secs = seconds_since(t0);
        d << kFdiSamples << " points, " << violations << " violations, smallest ratio " << worst << ", " << secs
          << " s < " << kFdiSeconds << " s";
        return violations == 0 && secs < kFdiSeconds;
    });

    criterion(4, "elementary inequality for the cycle, alpha in {1, 2}", [&](auto& d) {
        const Eigen::VectorXd c_inf = vec({1, 1, 1});
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-1.0, 5.0);
        bool ok = std::abs(cyclic_rho(1.0, c_inf).rho - 0.125) <= 1e-15 && cyclic_rho(1.0, c_inf).b_max == 1.0;
        d << "rho(alpha=1) = " << cyclic_rho(1.0, c_inf).rho;
        for (double alpha : {1.0, 2.0}) {
            const double rho = cyclic_rho(alpha, c_inf).rho;
            int accepted = 0;
            std::size_t violations = 0;
            while (accepted < kTriples) {
                const double a = u(rng), b = u(rng);
                // constraint solved for c
                const double s = -((alpha + 1) * (a * a + 2 * a) + (b * b + 2 * b));
                if (1 + s < 0) continue;
                const double c = -1 + std::sqrt(1 + s);
                if (c > 5) continue;
                ++accepted;
                if (cyclic_elementary_lhs(alpha, a, b, c) < rho * (a * a + b * b + c * c) * (1 - 1e-12)) ++violations;
            }
            d << "; alpha " << alpha << ": " << accepted << " triples, " << violations << " violations";
            ok = ok && violations == 0;
        }
        return ok;
    });

    criterion(5, "D >= lambda E on random enzyme fields with E(c_bar | c_inf) <= 1", [&](auto& d) {
        const double K = 1.0;
        ConstantsReport rep = chain_constants(enzyme, ones4, K);
        rep.H1 = enzyme_H1(ones4);
        const double lambda = lambda_rate(rep);
        const MassVector m = mass_of(enzyme, ones4);
        std::mt19937_64 rng(5);
        int accepted = 0;
        std::size_t violations = 0;
        double worst = std::numeric_limits<double>::infinity();
        while (accepted < kFields) {
            const SpatialField f = crn::test::random_field_in_class(m, 4, 128, rng, 1.5);
            const EntropyReport r = entropy_report(enzyme, f, ones4);
            if (r.average_part > K) continue;
            ++accepted;
            if (r.dissipation.total() < lambda * r.total) ++violations;
            worst = std::min(worst, r.dissipation.total() / r.total);
        }
        d << accepted << " fields, lambda = " << lambda << ", smallest D/E = " << worst << ", " << violations
          << " violations";
        return violations == 0;
    });

    criterion(6, "enzyme decay from c0 = (1.5, 0.5, 1.5, 0.5)", [&](auto& d) {
        SolverConfig cfg;
        cfg.n_x = 256;
        cfg.t_end = 20.0;
        cfg.dt = 1e-3;
        const SpatialField c0 = SpatialField::constant(vec({1.5, 0.5, 1.5, 0.5}), cfg.n_x);
        const auto t0 = Clock::now();
        const SimulationSeries s = simulate(enzyme, c0, cfg);
        const double secs = seconds_since(t0);

        const double e0 = s.entropy.front();
        double worst_rise = 0.0, drift = 0.0, worst_envelope = -std::numeric_limits<double>::infinity();
        const double K = std::max(1.0, relative_entropy(c0.averages(), s.c_inf));
        ConstantsReport rep = chain_constants(enzyme, s.c_inf, K);
        rep.H1 = enzyme_H1(s.c_inf);
        const double lambda = lambda_rate(rep);
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            if (k > 0) worst_rise = std::max(worst_rise, s.entropy[k] - s.entropy[k - 1]);
            drift = std::max(drift, (s.masses[k] - s.initial_mass).cwiseAbs().maxCoeff());
            worst_envelope = std::max(worst_envelope, s.entropy[k] - e0 * std::exp(-lambda * s.times[k]));
        }
        const DecayFit fit = fit_decay_rate(s, 0.1, 1.5);
        d << "E0 = " << e0 << ", max rise " << worst_rise << " <= " << kMonotoneTol * e0 << ", mass drift " << drift
          << " <= " << kMassDriftTol << ", lambda_emp = " << fit.rate << " >= lambda = " << lambda
          << ", max E - E0 exp(-lambda t) = " << worst_envelope << " <= " << kEnvelopeTol << ", " << secs << " s";
        return worst_rise <= kMonotoneTol * e0 && drift <= kMassDriftTol && fit.rate >= lambda &&
               worst_envelope <= kEnvelopeTol && secs < kSimulationSeconds;
    });

    criterion(7, "cyclic average c2 >= 1/(1 + 2t) for t <= 50, eps in {0, 1e-3}", [&](auto& d) {
        bool ok = true;
        const auto t0 = Clock::now();
        for (double eps : {0.0, 1e-3}) {
            SolverConfig cfg;
            cfg.n_x = 256;
            cfg.t_end = 50.0;
            cfg.epsilon = eps;
            const SimulationSeries s = simulate(
                cyclic, field_from_expressions({"0.75 + 0.25*cos(pi*x)", "1", "1.5 + 0.5*cos(2*pi*x)"}, cfg.n_x), cfg);
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < s.times.size(); ++k)
                margin = std::min(margin, s.averages[k][1] - 1.0 / (1.0 + 2.0 * s.times[k]));
            d << "eps " << eps << ": min margin " << margin << " over " << s.times.size() << " records; ";
            ok = ok && margin >= 0.0 && s.times.back() >= 50.0 - 1e-9;
        }
        const double secs = seconds_since(t0);
        d << secs << " s";
        return ok && secs < kSimulationSeconds;
    });

    criterion(8, "weak entropy law with first-order convergence", [&](auto& d) {
        double prev = 0.0, ratio = 0.0;
        bool holds = true;
        for (double dt : {0.02, 0.01}) {
            SolverConfig cfg;
            cfg.n_x = 128;
            cfg.t_end = 2.0;
            cfg.dt = dt;
            const SimulationSeries s = simulate(
                enzyme, field_from_expressions({"1.5 + 0.5*cos(pi*x)", "0.5", "1.5", "0.5 + 0.3*cos(2*pi*x)"}, cfg.n_x),
                cfg);
            const WeakLawCheck w = check_weak_entropy_law(s);
            d << "dt " << dt << ": violation " << w.max_violation << " <= tol " << w.tolerance << "; ";
            holds = holds && w.holds;
            if (prev > 0) ratio = prev / w.max_violation;
            prev = w.max_violation;
        }
        d << "ratio " << ratio << " >= " << kHalvingRatio;
        return holds && ratio >= kHalvingRatio;
    });

    criterion(9, "exact conservation laws on random networks", [&](auto& d) {
        std::mt19937_64 rng(9);
        int exact_ok = 0, oracle_ok = 0;
        for (int k = 0; k < kRandomNetworks; ++k) {
            const Network net = crn::test::random_network(rng);
            const ConservationStructure cs = conservation_structure(net);
            const std::size_t n = cs.num_species;
            bool zero = true;
            if (cs.codim > 0) {
                const RationalMatrix prod = multiply(cs.q_matrix, transpose(cs.wegscheider, n), cs.wegscheider.size());
                for (const auto& row : prod)
                    for (const auto& v : row) zero = zero && v == 0;
            }
            exact_ok += zero;

            // Oracle: floating-point kernel of W from a full-pivot LU; same span as Q.
            const Eigen::MatrixXd w = cs.w();
            const Eigen::FullPivLU<Eigen::MatrixXd> lu(w);
            const Eigen::Index dim = static_cast<Eigen::Index>(n) - lu.rank();
            bool same = dim == static_cast<Eigen::Index>(cs.codim);
            if (same && dim > 0) {
                const Eigen::MatrixXd kernel = lu.kernel().transpose();
                Eigen::MatrixXd stacked(2 * dim, static_cast<Eigen::Index>(n));
                stacked << cs.q(), kernel;
                Eigen::FullPivLU<Eigen::MatrixXd> joint(stacked);
                joint.setThreshold(kSpanTol);
                same = joint.rank() == dim;
            }
            oracle_ok += same;
        }
        d << exact_ok << "/" << kRandomNetworks << " exact Q W^T = 0, " << oracle_ok << "/" << kRandomNetworks
          << " match the LU kernel";
        return exact_ok == kRandomNetworks && oracle_ok == kRandomNetworks;
    });

    criterion(10, "integral of the cyclic H1(t) diverges like log T", [&](auto& d) {
        const Eigen::VectorXd c_inf = vec({1, 1, 1});
        const double k3 = 1.0, inv_bound = 1.0;
        bool ok = true;
        for (double alpha : {1.0, 2.0}) {
            const double rho = cyclic_rho(alpha, c_inf).rho;
            // T H1(T) tends to rho / (c2^alpha alpha (alpha + 1) k3); require half of it.
            const double slope_floor = 0.5 * rho / (std::pow(c_inf[1], alpha) * alpha * (alpha + 1) * k3);
            double prev = cyclic_H1_integral(10.0, alpha, k3, c_inf, inv_bound);
            double min_slope = std::numeric_limits<double>::infinity();
            bool monotone = true;
            for (int j = 1; j <= 60; ++j) {
                const double t_prev = std::pow(10.0, 1.0 + (j - 1) / 20.0), t = std::pow(10.0, 1.0 + j / 20.0);
                const double value = cyclic_H1_integral(t, alpha, k3, c_inf, inv_bound);
                monotone = monotone && value > prev;
                min_slope = std::min(min_slope, (value - prev) / std::log(t / t_prev));
                prev = value;
            }
            d << "alpha " << alpha << ": integral(1e4) = " << prev << ", min slope in log T " << min_slope
              << " >= " << slope_floor << "; ";
            ok = ok && monotone && min_slope >= slope_floor;
        }
        return ok;
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
