#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crn/constants.hpp"
#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "support.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace crn;
using crn::test::vec;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;

MassVector mass_of(const Network& net, const Eigen::VectorXd& c) { return mass_vector(conservation_structure(net), c); }

Network dimer() { return parse_network("species: S1, S2\nreaction: 2 S1 <-> S2 @ 1, 1\n"); }

} // namespace

TEST_CASE("enzyme chain constants", "[constants][chain]") {
    const ConstantsReport r = chain_constants(crn::test::enzyme(), Eigen::VectorXd::Ones(4), 1.0);
    CHECK_THAT(r.K_tilde, WithinRel(10.0, 1e-15));
    // Phi(10) evaluated independently
    const double phi10 = (10 * std::log(10.0) - 9) / std::pow(std::sqrt(10.0) - 1, 2);
    CHECK_THAT(r.K1, WithinRel(phi10, 1e-14));
    CHECK_THAT(r.K1, WithinAbs(2.99989667, 1e-8));
    CHECK_THAT(r.beta1, WithinRel(0.5, 1e-15));
    CHECK_THAT(r.beta3, WithinRel(kPi2, 1e-15));
    CHECK_THAT(r.lambda1, WithinRel(kPi2 / 2, 1e-15));
    CHECK(r.L == 1.0);
    CHECK_FALSE(r.H1);
    CHECK_THROWS_AS(lambda_rate(r), InvalidArgument);
    for (const Constant& c : r.entries()) {
        INFO(c.name);
        CHECK(c.value > 0);
        CHECK_FALSE(c.formula.empty());
    }
}

TEST_CASE("chain constants for 2 S1 <-> S2", "[constants][chain][oracle]") {
    const Network net = dimer();
    const Eigen::VectorXd c_inf = vec({2, 4});
    const ConstantsReport r = chain_constants(net, c_inf, 1.0);
    CHECK_THAT(r.K_tilde, WithinRel(14.0, 1e-15));
    // Symbolic evaluation of the per-species constant: 14 sqrt(14) + 21 sqrt(7) and 1/8.
    REQUIRE(r.H_script.size() == 2);
    CHECK_THAT(r.H_script[0], WithinRel(107.94398094719158, 1e-13));
    CHECK_THAT(r.H_script[1], WithinRel(0.125, 1e-13));
    // beta4 = N beta3 L^2 / max_r 2 (K~^2 / c1^2 + K~ / c2) = 2 pi^2 / 105
    CHECK_THAT(r.beta4, WithinRel(2 * kPi2 / 105.0, 1e-13));
    CHECK_THAT(r.beta1, WithinRel(2.0, 1e-15));
}

TEST_CASE("chain constants respond monotonically to K", "[constants][chain][property]") {
    const Network net = crn::test::enzyme();
    const Eigen::VectorXd c_inf = Eigen::VectorXd::Ones(4);
    double prev_k1 = 0, prev_k2 = INFINITY, prev_k3 = INFINITY;
    for (double K : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        const ConstantsReport r = chain_constants(net, c_inf, K);
        INFO("K = " << K);
        CHECK(r.K1 > prev_k1);
        CHECK(r.K2 <= prev_k2);
        CHECK(r.K3 <= prev_k3);
        prev_k1 = r.K1;
        prev_k2 = r.K2;
        prev_k3 = r.K3;
    }
}

TEST_CASE("structural bounds of the chain", "[constants][chain][property]") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.2, 4.0);
    const Network nets[] = {crn::test::enzyme(), crn::test::cyclic(), crn::test::reversible(), dimer()};
    for (const Network& net : nets) {
        const std::size_t n = net.num_species();
        for (int k = 0; k < 10; ++k) {
            Eigen::VectorXd c0(static_cast<Eigen::Index>(n));
            for (auto& x : c0) x = u(rng);
            const Eigen::VectorXd c_inf = solve_complex_balanced(net, mass_of(net, c0)).c_infty;
            ConstantsReport r = chain_constants(net, c_inf, u(rng));
            CHECK(r.K3 <= 2 * net.diffusion().minCoeff());
            CHECK(r.K2 <= r.K3 / 2);
            r.H1 = 0.5;
            CHECK(lambda_rate(r) <= r.lambda1 / 2);
            CHECK(lambda_rate(r) > 0);
        }
    }
}

TEST_CASE("scanning L never lowers K3", "[constants][chain]") {
    ChainConfig scan;
    scan.scan_L = true;
    const Network net = crn::test::enzyme();
    const ConstantsReport fixed = chain_constants(net, Eigen::VectorXd::Ones(4), 1.0);
    const ConstantsReport best = chain_constants(net, Eigen::VectorXd::Ones(4), 1.0, scan);
    CHECK(best.K3 >= fixed.K3);
    CHECK(best.L >= 1e-2);
    CHECK(best.L <= 1e2);
}

TEST_CASE("chain rejects bad inputs", "[constants][errors]") {
    const Network net = crn::test::enzyme();
    CHECK_THROWS_AS(chain_constants(net, vec({1, 1, 0, 1}), 1.0), InvalidArgument);
    CHECK_THROWS_AS(chain_constants(net, Eigen::VectorXd::Ones(4), 0.0), InvalidArgument);
    ChainConfig bad;
    bad.L = -1;
    CHECK_THROWS_AS(chain_constants(net, Eigen::VectorXd::Ones(4), 1.0, bad), InvalidArgument);
}

TEST_CASE("lambda rate branches", "[constants][lambda]") {
    CHECK(lambda_rate(1.0, 3.0, 1.0, 1.0) == 0.5);
    CHECK(lambda_rate(4.0, 1.0, 1.0, 1.0) == 0.5);
}

TEST_CASE("enzyme closed-form H1", "[constants][enzyme]") {
    const EnzymeNu nu = enzyme_nu(Eigen::VectorXd::Ones(4));
    const double expected = std::pow(std::sqrt(1.5) - 1, 2) / std::pow(std::sqrt(3.0) - 1, 2);
    CHECK_THAT(nu.nu1, WithinRel(expected, 1e-14));
    CHECK_THAT(nu.nu2, WithinRel(expected, 1e-14));
    CHECK_THAT(expected, WithinAbs(0.0942535, 1e-7));
    CHECK_THAT(enzyme_H1(Eigen::VectorXd::Ones(4)), WithinAbs(0.0104726, 1e-6));

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const double c24 = u(rng);
        const Eigen::VectorXd c = vec({u(rng), c24, u(rng), c24});
        const EnzymeNu sym = enzyme_nu(c);
        CHECK_THAT(sym.nu1, WithinRel(sym.nu2, 1e-12));
        CHECK(enzyme_H1(vec({u(rng), u(rng), u(rng), u(rng)})) <= 1.0 / 18);
    }
    CHECK_THROWS_AS(enzyme_H1(vec({1, 1, 1})), InvalidArgument);
}

TEST_CASE("template matching is structural", "[constants][templates]") {
    CHECK(match_enzyme(crn::test::enzyme()));
    CHECK_FALSE(match_enzyme(crn::test::cyclic()));
    const auto cyc = match_cyclic(crn::test::cyclic());
    REQUIRE(cyc);
    CHECK(cyc->alpha == 1.0);
    CHECK_FALSE(match_cyclic(crn::test::enzyme()));

    // Renamed and reordered enzyme still matches.
    const Network renamed = parse_network(
        "species: P, E, C, S\n"
        "reaction: C -> E + P @ 2\nreaction: E + S -> C @ 1\nreaction: C -> E + S @ 3\nreaction: E + P -> C @ 1\n");
    const auto t = match_enzyme(renamed);
    REQUIRE(t);
    CHECK(t->a == 1);
    CHECK(t->c == 2);

    const Network alpha2 = parse_network("species: A, B, C\nreaction: A -> 2 B + C @ 1\nreaction: 2 B + C -> 3 B @ 1\nreaction: 3 B -> A @ 1\n");
    REQUIRE(match_cyclic(alpha2));
    CHECK(match_cyclic(alpha2)->alpha == 2.0);
}

TEST_CASE("FDI evaluation", "[constants][fdi]") {
    const Network net = crn::test::enzyme();
    const Eigen::VectorXd c_inf = Eigen::VectorXd::Ones(4);
    const FdiPoint zero = fdi_evaluate(net, c_inf, Eigen::VectorXd::Zero(4));
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs_base == 0.0);
    CHECK(zero.constraint_residual == 0.0);
    CHECK_THROWS_AS(fdi_evaluate(net, c_inf, vec({0, -1.5, 0, 0})), InvalidArgument);

    // Start from (0.1, 0.1, 0, 0.1) and move it onto the constraint.
    const MassVector m = mass_of(net, c_inf);
    const Eigen::VectorXd start = vec({0.1, 0.1, 0.0, 0.1});
    const Eigen::VectorXd c_bar =
        project_to_mass_class(m, c_inf.array() * (1.0 + start.array()).square());
    const Eigen::VectorXd mu = (c_bar.array() / c_inf.array()).sqrt() - 1.0;
    const FdiPoint p = fdi_evaluate(net, c_inf, mu);
    CHECK(p.constraint_residual <= 1e-12);
    CHECK(p.lhs > 0);
}

TEST_CASE("FDI holds with the enzyme closed form on sampled points", "[constants][fdi][property]") {
    const Network net = crn::test::enzyme();
    const Eigen::VectorXd c_inf = Eigen::VectorXd::Ones(4);
    const MassVector m = mass_of(net, c_inf);
    const double h1 = enzyme_H1(c_inf);
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    std::size_t violations = 0;
    for (int k = 0; k < 10000; ++k) {
        Eigen::VectorXd c0(4);
        for (auto& x : c0) x = std::pow(1.0 + u(rng), 2) + 1e-12;
        const Eigen::VectorXd c_bar = project_to_mass_class(m, c0);
        const FdiPoint p = fdi_evaluate(net, c_inf, (c_bar.array() / c_inf.array()).sqrt() - 1.0);
        if (p.lhs < h1 * p.rhs_base) ++violations;
        // lhs = 0 forces mu = 0 when there is no boundary equilibrium
        if (p.lhs < 1e-20) CHECK(p.rhs_base < 1e-8);
    }
    CHECK(violations == 0);
}

TEST_CASE("linearised quotient against an eigen-decomposition oracle", "[constants][fdi][oracle]") {
    const Network net = crn::test::enzyme();
    const Eigen::VectorXd c_inf = vec({1.3, 0.7, 0.91, 0.7});
    const FdiProblem problem(net, c_inf);

    // Tangent space {eta : Q diag(c_inf) eta = 0} from a full-pivot LU, orthonormalised by QR.
    const Eigen::MatrixXd q = conservation_structure(net).q();
    const Eigen::MatrixXd kernel = (q * c_inf.asDiagonal()).fullPivLu().kernel();
    const Eigen::MatrixXd z = Eigen::HouseholderQR<Eigen::MatrixXd>(kernel).householderQ() *
                              Eigen::MatrixXd::Identity(4, kernel.cols());
    const Eigen::MatrixXd y = net.complex_matrix();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    for (const auto& rx : net.reactions()) {
        const Eigen::VectorXd d = (y.row(static_cast<Eigen::Index>(rx.reactant)) - y.row(static_cast<Eigen::Index>(rx.product))).transpose();
        a += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z.transpose() * a * z);
    const double oracle = eig.eigenvalues().minCoeff();
    CHECK_THAT(problem.linearized_ratio(), WithinRel(oracle, 1e-10));

    // The exact quotient along the minimising direction approaches it.
    const Eigen::VectorXd dir = z * eig.eigenvectors().col(0);
    const MassVector m = mass_of(net, c_inf);
    const Eigen::VectorXd c_bar = project_to_mass_class(m, c_inf.array() * (1.0 + 1e-5 * dir.array()).square());
    const FdiPoint p = problem.evaluate((c_bar.array() / c_inf.array()).sqrt() - 1.0);
    CHECK_THAT(p.lhs / p.rhs_base, WithinRel(oracle, 1e-3));
}

TEST_CASE("H1 estimate for the enzyme respects the closed-form bound", "[constants][estimate]") {
    const Network net = crn::test::enzyme();
    const Eigen::VectorXd c_inf = Eigen::VectorXd::Ones(4);
    H1Budget budget;
    budget.starts = 64;
    const H1Estimate est = estimate_H1(net, c_inf, 1.0, mass_of(net, c_inf), budget);
    CHECK(est.value >= 0.0104726);
    CHECK(est.value <= est.linearized_ratio + 1e-12);
    CHECK(est.starts_used + est.projection_failures == budget.starts);
}

TEST_CASE("H1 estimate for S1 <-> S2 matches a dense grid", "[constants][estimate][oracle]") {
    const Network net = crn::test::reversible();
    const Eigen::VectorXd c_inf = vec({1, 1});
    // Constraint (1+mu1)^2 + (1+mu2)^2 = 2, parametrised by an angle.
    double grid = INFINITY;
    const int n = 2'000'000;
    for (int k = 0; k <= n; ++k) {
        const double th = 0.5 * std::numbers::pi * k / n;
        const double u = std::sqrt(2.0) * std::cos(th), v = std::sqrt(2.0) * std::sin(th);
        const double rhs = (u - 1) * (u - 1) + (v - 1) * (v - 1);
        if (rhs < 1e-12) continue;
        grid = std::min(grid, 2 * (u - v) * (u - v) / rhs);
    }
    const H1Estimate est = estimate_H1(net, c_inf, 1.0, mass_of(net, c_inf));
    CHECK_THAT(est.value, WithinAbs(grid, 1e-3));
}

TEST_CASE("H1 estimate is independent of the thread count", "[constants][estimate]") {
    const Network net = crn::test::enzyme();
    const Eigen::VectorXd c_inf = Eigen::VectorXd::Ones(4);
    const MassVector m = mass_of(net, c_inf);
    H1Budget budget;
    budget.starts = 32;
    budget.steps = 100;
    ::setenv("CRN_ENTROPY_THREADS", "1", 1);
    const H1Estimate one = estimate_H1(net, c_inf, 1.0, m, budget);
    ::setenv("CRN_ENTROPY_THREADS", "4", 1);
    const H1Estimate four = estimate_H1(net, c_inf, 1.0, m, budget);
    ::unsetenv("CRN_ENTROPY_THREADS");
    CHECK(one.value == four.value);
    CHECK(one.mu == four.mu);
}

TEST_CASE("H1 estimate refuses boundary equilibria", "[constants][estimate][errors]") {
    const Network net = crn::test::cyclic();
    CHECK_THROWS_AS(estimate_H1(net, vec({1, 1, 1}), 1.0, mass_of(net, vec({1, 1, 1}))), BoundaryEquilibriaPresent);
}

TEST_CASE("cyclic rho", "[constants][cyclic]") {
    const CyclicRho r = cyclic_rho(1.0, vec({1, 1, 1}));
    CHECK_THAT(r.b_max, WithinAbs(1.0, 1e-15));
    CHECK_THAT(r.rho, WithinAbs(0.125, 1e-15));
    // max{1, b_max} >= 1 keeps rho at 1/(4 (alpha + 1)) once b_max <= 1.
    const CyclicRho big = cyclic_rho(1.0, vec({1, 1e12, 1}));
    CHECK(big.b_max < 1e-5);
    CHECK_THAT(big.rho, WithinAbs(0.125, 1e-15));
    CHECK_THAT(cyclic_rho(2.0, vec({1, 1e12, 1})).rho, WithinAbs(1.0 / 12, 1e-15));
    const CyclicRho small = cyclic_rho(1.0, vec({4, 0.1, 4}));
    CHECK_THAT(small.b_max, WithinRel(-1 + std::sqrt(1 + 12 / 0.1), 1e-14));
    CHECK_THAT(small.rho, WithinRel(1 / (8 * std::pow(small.b_max, 2)), 1e-14));
    CHECK_THROWS_AS(cyclic_rho(0.5, vec({1, 1, 1})), InvalidArgument);
}

TEST_CASE("elementary inequality for the cycle on sampled triples", "[constants][cyclic][property]") {
    const Eigen::VectorXd c_inf = vec({1, 1, 1});
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-1.0, 5.0);
    for (double alpha : {1.0, 2.0}) {
        const double rho = cyclic_rho(alpha, c_inf).rho;
        std::size_t accepted = 0, violations = 0;
        while (accepted < 10000) {
            const double a = u(rng), b = u(rng);
            // solve the constraint for c
            const double s = -((alpha + 1) * (a * a + 2 * a) + (b * b + 2 * b));
            if (1 + s < 0) continue;
            const double c = -1 + std::sqrt(1 + s);
            if (c > 5) continue;
            ++accepted;
            REQUIRE(std::abs(cyclic_constraint(alpha, c_inf, a, b, c)) <= 1e-9 * (1 + std::abs(s)));
            if (cyclic_elementary_lhs(alpha, a, b, c) < rho * (a * a + b * b + c * c) * (1 - 1e-12)) ++violations;
        }
        INFO("alpha = " << alpha);
        CHECK(violations == 0);
    }
}

TEST_CASE("time-dependent H1 for the cycle", "[constants][cyclic]") {
    const Eigen::VectorXd c_inf = vec({1, 1, 1});
    for (double t : {0.0, 0.5, 3.0, 100.0}) CHECK_THAT(cyclic_h(t, 1.0, 1.0, 1.0), WithinRel(1.0 / (1 + 2 * t), 1e-14));
    CHECK_THAT(cyclic_H1_of_t(0.0, 1.0, 1.0, c_inf, 1.0), WithinRel(0.125, 1e-15));
    CHECK_THAT(cyclic_H1_of_t(4.5, 1.0, 1.0, c_inf, 1.0), WithinRel(0.125 / 10, 1e-14));
}

TEST_CASE("integral of the time-dependent H1 against quadrature", "[constants][cyclic][oracle]") {
    for (double alpha : {1.0, 2.0}) {
        for (double inv_bound : {0.5, 1.0, 4.0}) {
            const Eigen::VectorXd c_inf = vec({1.0, 0.8, 1.2});
            const auto f = [&](double t) { return cyclic_H1_of_t(t, alpha, 1.3, c_inf, inv_bound); };
            double prev = 0;
            for (double T : {10.0, 100.0, 1000.0}) {
                const double closed = cyclic_H1_integral(T, alpha, 1.3, c_inf, inv_bound);
                const double quad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, T, 20, 1e-12);
                INFO("alpha " << alpha << " inv " << inv_bound << " T " << T);
                CHECK_THAT(closed, WithinRel(quad, 1e-8));
                CHECK(closed > prev);
                prev = closed;
            }
        }
    }
}
