#pragma once

#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "crn/network.hpp"

namespace crn {

/// Psi(x, y) = x log(x/y) - x + y with Psi(0, y) = y and Psi(x > 0, 0) = +inf.
double psi(double x, double y);

/// Phi(z) = (z log z - z + 1) / (sqrt(z) - 1)^2, extended by Phi(0) = 1 and Phi(1) = 2.
double phi(double z);

/// Concentrations on a uniform grid of n_x cells on [0, 1].
class SpatialField {
public:
    SpatialField(std::size_t num_species, std::size_t num_cells);
    /// Takes an N x n_x array; throws InvalidArgument on negative entries.
    explicit SpatialField(Eigen::MatrixXd values);
    static SpatialField constant(const Eigen::VectorXd& c, std::size_t num_cells);

    std::size_t num_species() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t num_cells() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    double h() const noexcept { return 1.0 / static_cast<double>(values_.cols()); }
    /// Midpoint of cell j.
    double x(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * h(); }

    const Eigen::MatrixXd& values() const noexcept { return values_; }
    Eigen::MatrixXd& values() noexcept { return values_; }
    Eigen::VectorXd averages() const { return values_.rowwise().mean(); }

private:
    Eigen::MatrixXd values_;
};

struct Dissipation {
    double diffusion = 0.0;
    double reaction = 0.0;
    double total() const { return diffusion + reaction; }
};

struct EntropyReport {
    double total = 0.0;         ///< E(c | c_inf)
    double spatial_part = 0.0;  ///< E(c | c_bar)
    double average_part = 0.0;  ///< E(c_bar | c_inf)
    Dissipation dissipation;
};

/// Sum_i integral of c_i log(c_i / ref_i) - c_i + ref_i, midpoint rule.
double relative_entropy(const SpatialField& c, const Eigen::VectorXd& ref);

/// The same functional for a spatially constant state.
double relative_entropy(const Eigen::VectorXd& c, const Eigen::VectorXd& ref);

/// Entropy dissipation split into its diffusion and reaction parts.
///
/// The diffusion part is the face sum d_i (c_{j+1} - c_j)(log c_{j+1} - log c_j) / h,
/// which equals d_i |grad c|^2 / c with c taken as the logarithmic mean of the
/// two neighbouring cells. No-flux boundary faces contribute nothing. A zero
/// cell next to a positive one, or a reaction whose product monomial vanishes
/// while its reactant does not, yields +inf.
Dissipation entropy_dissipation(const Network& net, const SpatialField& c, const Eigen::VectorXd& c_inf);

EntropyReport entropy_report(const Network& net, const SpatialField& c, const Eigen::VectorXd& c_inf);

/// Lower bound E(c | c_inf) >= C sum_i ||c_i - c_i,inf||_1^2 with
/// C = min_i 1 / (2 (c_bar_i + 2 c_i,inf)).
struct CkpCheck {
    double constant = 0.0;
    double entropy = 0.0;
    double l1_squared = 0.0;
    /// entropy / l1_squared, +inf when both sides vanish.
    double ratio = std::numeric_limits<double>::infinity();
    bool holds = true;
};

/// Throws InvalidArgument if |Q c_bar - M| exceeds `mass_tol` relative to |M|.
CkpCheck ckp_bound(const SpatialField& c, const Eigen::VectorXd& c_inf, const MassVector& mass,
                   double mass_tol = 1e-9);

} // namespace crn
