#pragma once

#include <json.hpp>

#include "crn/constants.hpp"
#include "crn/entropy.hpp"
#include "crn/equilibrium.hpp"
#include "crn/network.hpp"

namespace crn {

/// Rationals are written as strings ("3", "-1/2") so they round-trip exactly.
nlohmann::json to_json(const ConservationStructure& cs);
nlohmann::json to_json(const MassVector& mass);
nlohmann::json to_json(const EquilibriumResult& eq);
nlohmann::json to_json(const BoundaryEquilibriaResult& boundary);
nlohmann::json to_json(const ConstantsReport& report);
nlohmann::json to_json(const EntropyReport& report);
nlohmann::json to_json(const H1Estimate& estimate);
nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);

/// Inverse of to_json(const ConservationStructure&).
ConservationStructure conservation_structure_from_json(const nlohmann::json& j);

} // namespace crn
