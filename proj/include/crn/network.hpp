#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "crn/linalg.hpp"

namespace crn {

/// Stoichiometric vector of a complex, one exact coefficient per species.
using Stoichiometry = RationalVector;

struct Reaction {
    std::size_t reactant = 0; ///< index into Network::complexes()
    std::size_t product = 0;
    double rate = 0.0;

    bool operator==(const Reaction&) const = default;
};

/// A mass-action reaction network with diffusion coefficients.
///
/// Immutable once constructed. The constructor enforces the three structural
/// conditions (every species used by some complex with coefficient >= 1, no
/// trivial reaction, every complex used by a reaction) as well as positivity
/// of all rates and diffusion coefficients.
class Network {
public:
    Network(std::vector<std::string> species, std::vector<Stoichiometry> complexes,
            std::vector<Reaction> reactions, std::vector<double> diffusion);

    std::size_t num_species() const noexcept { return species_.size(); }
    std::size_t num_complexes() const noexcept { return complexes_.size(); }
    std::size_t num_reactions() const noexcept { return reactions_.size(); }

    const std::vector<std::string>& species() const noexcept { return species_; }
    const std::vector<Stoichiometry>& complexes() const noexcept { return complexes_; }
    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
    const Eigen::VectorXd& diffusion() const noexcept { return diffusion_; }

    /// |C| x N matrix of the stoichiometric coefficients as doubles.
    const Eigen::MatrixXd& complex_matrix() const noexcept { return complex_matrix_; }

    std::optional<std::size_t> species_index(std::string_view name) const;

    /// c^y for complex `complex`, with 0^0 = 1.
    double monomial(std::size_t complex, std::span<const double> c) const;
    double monomial(std::size_t complex, const Eigen::VectorXd& c) const {
        return monomial(complex, std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
    }

    bool operator==(const Network& other) const;

private:
    struct Factor {
        std::size_t species;
        double exponent;
        int integer_exponent; ///< -1 when the exponent is not an integer
    };

    std::vector<std::string> species_;
    std::vector<Stoichiometry> complexes_;
    std::vector<Reaction> reactions_;
    Eigen::VectorXd diffusion_;
    Eigen::MatrixXd complex_matrix_;
    std::vector<std::vector<Factor>> factors_;
};

/// Parse the line-oriented network description format:
///
///     species: S1, S2, S3
///     diffusion: S1=1.0, S2=0.5, S3=2.0
///     reaction: 1 S1 + 1 S2 -> 1 S3 @ 1.0
///
/// Coefficients are optional (default 1) and may be written as decimals or
/// fractions; `0` denotes the empty complex. Species missing from the
/// diffusion line get d = 1. `#` starts a comment.
Network parse_network(std::string_view text);
Network load_network(const std::filesystem::path& path);

/// Render a network in the format accepted by parse_network.
std::string to_text(const Network& net);

/// Wegscheider matrix and a canonical basis of its kernel.
struct ConservationStructure {
    RationalMatrix wegscheider; ///< |R| x N, rows y_r' - y_r
    RationalMatrix q_matrix;    ///< m x N, rows span ker(W)
    std::size_t num_species = 0;
    std::size_t codim = 0;      ///< m = N - rank(W)

    Eigen::MatrixXd q() const { return to_eigen(q_matrix, num_species); }
    Eigen::MatrixXd w() const { return to_eigen(wegscheider, num_species); }
};

/// Exact kernel of W. Rows of Q are the reduced row echelon form of a kernel
/// basis, scaled to coprime integers with positive leading entry, so the
/// result is a deterministic function of the network.
ConservationStructure conservation_structure(const Network& net);

/// R(c) = sum_r k_r c^{y_r} (y_r' - y_r). Throws InvalidArgument on negative c.
Eigen::VectorXd reaction_rates(const Network& net, const Eigen::VectorXd& c);

struct MassVector {
    Eigen::VectorXd values; ///< M = Q c0
    Eigen::MatrixXd q;      ///< the Q the values refer to
};

MassVector mass_vector(const ConservationStructure& cs, const Eigen::VectorXd& initial_average);

} // namespace crn
