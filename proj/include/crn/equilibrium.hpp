#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "crn/network.hpp"

namespace crn {

struct EquilibriumOptions {
    double tol = 1e-10;       ///< relative tolerance on balance and mass residuals
    int max_iterations = 200; ///< Newton iteration cap per stage
    int max_restarts = 16;    ///< random restarts of the reference-state search
    std::uint64_t seed = 42;
};

struct BalanceReport {
    Eigen::VectorXd outflow; ///< per complex
    Eigen::VectorXd inflow;
    double max_residual = 0.0;          ///< max |outflow - inflow|
    double max_relative_residual = 0.0; ///< max |outflow - inflow| / max(outflow + inflow, tiny)
    bool balanced = false;
};

struct DetailedBalanceReport {
    std::vector<double> pair_residuals; ///< |k_f c^y - k_b c^y'| per reversible pair
    bool has_reverse_for_all = false;
    bool balanced = false;
};

struct EquilibriumResult {
    Eigen::VectorXd c_infty;
    double residual_complex_balance = 0.0; ///< relative, max over complexes
    double residual_mass = 0.0;            ///< relative |Q c - M| / (1 + |M|)
    bool is_detailed_balanced = false;
    int newton_iterations = 0;
};

struct BoundaryEquilibrium {
    std::vector<std::size_t> support; ///< indices of the zero components
    Eigen::VectorXd values;
    double residual_complex_balance = 0.0;
    double residual_mass = 0.0;
};

struct BoundaryEquilibriaResult {
    std::vector<BoundaryEquilibrium> equilibria;
    /// False when some zero pattern admits a continuum of solutions; the list
    /// then holds only a sample of it.
    bool complete = true;
};

/// Outflow/inflow per complex. `tol` is applied to the relative residual.
BalanceReport is_complex_balanced(const Network& net, const Eigen::VectorXd& c, double tol = 1e-10);

/// True iff every reaction has a reverse and each pair balances to `tol`
/// (relative to the larger of the two fluxes).
DetailedBalanceReport is_detailed_balanced(const Network& net, const Eigen::VectorXd& c, double tol = 1e-10);

/// Positive complex balanced equilibrium in the class Q c = M.
///
/// Throws InvalidArgument for M not strictly positive or of wrong length,
/// NotComplexBalanced when no positive complex balanced state exists, and
/// NonConvergence when the mass solve hits its iteration cap.
EquilibriumResult solve_complex_balanced(const Network& net, const MassVector& mass,
                                         const EquilibriumOptions& options = {});

/// Complex balanced states in the class Q c = M having at least one zero
/// component, found by enumerating zero patterns. Throws SupportLimitExceeded
/// for more than 20 species.
BoundaryEquilibriaResult find_boundary_equilibria(const Network& net, const MassVector& mass,
                                                  const EquilibriumOptions& options = {});

/// The unique state c exp(Q^T g) with Q c exp(Q^T g) = M. Entries of c must
/// be positive. Throws ProjectionFailure if the residual stays above `tol`
/// relative to |M|_inf.
Eigen::VectorXd project_to_mass_class(const MassVector& mass, const Eigen::VectorXd& c, double tol = 1e-12,
                                      int max_iterations = 200);

} // namespace crn
