#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "crn/entropy.hpp"
#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "crn/network.hpp"

namespace crn::test {

inline std::filesystem::path network_path(const std::string& name) {
    return std::filesystem::path(CRN_NETWORK_DIR) / (name + ".crn");
}

inline Network enzyme() { return load_network(network_path("enzyme")); }
inline Network cyclic() { return load_network(network_path("cyclic")); }
inline Network reversible() { return load_network(network_path("reversible")); }

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

/// Random valid network with up to max_species species and max_reactions
/// reactions, integer coefficients in 0..2.
inline Network random_network(std::mt19937_64& rng, std::size_t max_species = 8, std::size_t max_reactions = 12) {
    std::uniform_int_distribution<std::size_t> n_dist(1, max_species), r_dist(1, max_reactions);
    std::uniform_int_distribution<int> coef(0, 2);
    std::bernoulli_distribution sparse(0.35);
    std::uniform_real_distribution<double> rate(0.2, 5.0);
    while (true) {
        const std::size_t n = n_dist(rng), nr = r_dist(rng);
        auto random_complex = [&] {
            Stoichiometry y(n, 0);
            for (auto& v : y)
                if (sparse(rng)) v = coef(rng);
            return y;
        };
        std::vector<Stoichiometry> complexes;
        std::vector<Reaction> reactions;
        auto intern = [&](const Stoichiometry& y) {
            for (std::size_t k = 0; k < complexes.size(); ++k)
                if (complexes[k] == y) return k;
            complexes.push_back(y);
            return complexes.size() - 1;
        };
        for (std::size_t r = 0; r < nr; ++r) {
            const auto a = intern(random_complex());
            const auto b = intern(random_complex());
            reactions.push_back({a, b, rate(rng)});
        }
        // Make sure every species is used somewhere.
        for (std::size_t i = 0; i < n; ++i) {
            bool used = false;
            for (const auto& y : complexes) used = used || y[i] >= 1;
            if (!used) complexes[std::uniform_int_distribution<std::size_t>(0, complexes.size() - 1)(rng)][i] = 1;
        }
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
        try {
            return Network(names, complexes, reactions, std::vector<double>(n, 1.0));
        } catch (const Error&) {
            // duplicate complexes, trivial reactions, ...: draw again
        }
    }
}

/// Smooth random field of cosine modes whose averages are moved into the
/// class Q c_bar = M by a per-species rescaling.
inline SpatialField random_field_in_class(const MassVector& mass, std::size_t num_species, std::size_t num_cells,
                                          std::mt19937_64& rng, double spread = 2.0) {
    std::uniform_real_distribution<double> level(-spread, spread), amp(0.0, 0.9), phase(0.0, 6.283185307179586);
    std::uniform_int_distribution<int> mode(1, 4);
    Eigen::MatrixXd v(static_cast<Eigen::Index>(num_species), static_cast<Eigen::Index>(num_cells));
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const double base = std::exp(level(rng)), a = amp(rng), ph = phase(rng);
        const int k = mode(rng);
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(num_cells);
            v(i, j) = base * (1.0 + a * std::cos(3.141592653589793 * k * x + ph));
        }
    }
    const Eigen::VectorXd avg = v.rowwise().mean();
    const Eigen::VectorXd target = project_to_mass_class(mass, avg);
    for (Eigen::Index i = 0; i < v.rows(); ++i) v.row(i) *= target[i] / avg[i];
    return SpatialField(std::move(v));
}

} // namespace crn::test
