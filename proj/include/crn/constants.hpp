#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crn/network.hpp"

namespace crn {

struct ChainConfig {
    double L = 1.0;                     ///< splitting threshold for the Poincare argument
    double C_P = 9.869604401089358;     ///< Poincare constant, pi^2 on the unit interval
    double C_LSI = 4.934802200544679;   ///< log-Sobolev constant, pi^2 / 2
    bool scan_L = false;                ///< maximise K3 over L on a log grid in [1e-2, 1e2]
};

/// One named constant with the formula used to compute it.
struct Constant {
    std::string name;
    double value = 0.0;
    std::string formula;
};

struct ConstantsReport {
    double K = 0.0;
    double K_tilde = 0.0;
    double K1 = 0.0;
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0, beta4 = 0.0;
    double L = 0.0;
    double K3 = 0.0;
    std::vector<double> H_script; ///< per species
    double H_script_max = 0.0;
    double K2 = 0.0;
    double lambda1 = 0.0;
    std::optional<double> H1;
    std::string H1_source;        ///< "closed-form enzyme", "estimate", ...
    std::optional<double> lambda;
    ChainConfig config;

    /// All entries in chain order, with their formulas.
    std::vector<Constant> entries() const;
};

/// Every constant of the entropy method except H1. Throws InvalidArgument on
/// nonpositive c_inf, K or L.
ConstantsReport chain_constants(const Network& net, const Eigen::VectorXd& c_inf, double K,
                                const ChainConfig& config = {});

/// The chain pieces that depend on L, exposed for the L scan and for tests.
double chain_beta2(const Network& net, const Eigen::VectorXd& c_inf, double K_tilde, double beta1, double L);
double chain_beta4(const Network& net, const Eigen::VectorXd& c_inf, double K_tilde, double beta3, double L);
std::vector<double> chain_H_script(const Network& net, const Eigen::VectorXd& c_inf, double K_tilde);

/// lambda = 1/2 min{lambda1, K2 H1 / K1}. Throws InvalidArgument without H1.
double lambda_rate(const ConstantsReport& report);
double lambda_rate(double lambda1, double K2, double H1, double K1);

// ---- finite-dimensional inequality -------------------------------------

struct FdiPoint {
    Eigen::VectorXd mu;
    double constraint_residual = 0.0; ///< |Q (c_inf (mu^2 + 2 mu))|_inf
    double lhs = 0.0;                 ///< sum_r [(1+mu)^{y_r} - (1+mu)^{y_r'}]^2
    double rhs_base = 0.0;            ///< sum_i mu_i^2
};

/// Evaluates the inequality in the variables c_bar = c_inf (1 + mu)^2.
class FdiProblem {
public:
    FdiProblem(const Network& net, Eigen::VectorXd c_inf);
    FdiProblem(const Network& net, Eigen::VectorXd c_inf, Eigen::MatrixXd q);

    /// Throws InvalidArgument if some mu_i < -1.
    FdiPoint evaluate(const Eigen::VectorXd& mu) const;

    /// Minimum of the linearised quotient sum_r ((y_r - y_r').eta)^2 / |eta|^2
    /// over eta tangent to the constraint at mu = 0.
    double linearized_ratio() const;

    const Network& network() const { return *net_; }
    const Eigen::VectorXd& c_inf() const { return c_inf_; }
    const Eigen::MatrixXd& q() const { return q_; }

private:
    const Network* net_;
    Eigen::VectorXd c_inf_;
    Eigen::MatrixXd q_;
};

FdiPoint fdi_evaluate(const Network& net, const Eigen::VectorXd& c_inf, const Eigen::VectorXd& mu);

struct H1Budget {
    int starts = 256;
    int steps = 500;
    std::uint64_t seed = 42;
};

struct H1Estimate {
    double value = 0.0;      ///< smallest ratio lhs / rhs_base found
    Eigen::VectorXd mu;      ///< where it was found (zero for the linearised branch)
    Eigen::VectorXd c_bar;
    bool from_linearization = false;
    double linearized_ratio = 0.0;
    int starts_used = 0;
    int projection_failures = 0;
};

/// Upper bound on the infimum of lhs / rhs_base over {c_bar in [0, K_tilde]^N : Q c_bar = M},
/// by multi-start projected descent in log coordinates plus the linearisation
/// at c_inf. Throws BoundaryEquilibriaPresent if the class has a boundary
/// equilibrium. Deterministic for a given seed regardless of thread count.
H1Estimate estimate_H1(const Network& net, const Eigen::VectorXd& c_inf, double K, const MassVector& mass,
                       const H1Budget& budget = {});

// ---- closed forms --------------------------------------------------------

/// Species roles of the reversible enzyme pattern A + B <-> C <-> A + D.
struct EnzymeTemplate {
    std::size_t a, b, c, d;
};

/// Roles of the cycle A -> alpha B + C -> (alpha + 1) B -> A.
struct CyclicTemplate {
    std::size_t a, b, c;
    double alpha;
    double k1, k2, k3;
};

std::optional<EnzymeTemplate> match_enzyme(const Network& net);
std::optional<CyclicTemplate> match_cyclic(const Network& net);

/// min{1/18, nu1/9, nu2/9} for the enzyme equilibrium (c1, c2, c3, c4).
double enzyme_H1(const Eigen::VectorXd& c_inf);
struct EnzymeNu {
    double nu1, nu2;
};
EnzymeNu enzyme_nu(const Eigen::VectorXd& c_inf);

struct CyclicRho {
    double b_max;
    double rho;
};

/// Throws InvalidArgument for alpha < 1 or nonpositive c_inf.
CyclicRho cyclic_rho(double alpha, const Eigen::VectorXd& c_inf);

/// h(t) = [1/inv_bound + alpha (alpha + 1) k3 t]^{-1/alpha}, inv_bound = ||c_{2,0}^{-alpha}||_inf.
double cyclic_h(double t, double alpha, double k3, double inv_bound);

/// rho min{1, (h(t) / c_{2,inf})^alpha}.
double cyclic_H1_of_t(double t, double alpha, double k3, const Eigen::VectorXd& c_inf, double inv_bound);

/// Integral of cyclic_H1_of_t over [0, T], in closed form.
double cyclic_H1_integral(double T, double alpha, double k3, const Eigen::VectorXd& c_inf, double inv_bound);

/// Left side of the elementary inequality for the cycle,
/// [(1+a) - (1+b)^alpha (1+c)]^2 + (c - b)^2 + [(1+b)^{alpha+1} - (1+a)]^2.
double cyclic_elementary_lhs(double alpha, double a, double b, double c);

/// (alpha+1) c1 (a^2+2a) + c2 (b^2+2b) + c3 (c^2+2c).
double cyclic_constraint(double alpha, const Eigen::VectorXd& c_inf, double a, double b, double c);

} // namespace crn
