#include "crn/json_io.hpp"

#include "crn/errors.hpp"

namespace crn {

namespace {

nlohmann::json rational_matrix(const RationalMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : m) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& x : row) r.push_back(to_string(x));
        rows.push_back(std::move(r));
    }
    return rows;
}

RationalMatrix rational_matrix_from(const nlohmann::json& j, std::size_t columns) {
    RationalMatrix m;
    for (const auto& row : j) {
        if (row.size() != columns) throw InvalidArgument("matrix row has wrong length");
        RationalVector r;
        for (const auto& x : row) r.push_back(parse_rational(x.get<std::string>()));
        m.push_back(std::move(r));
    }
    return m;
}

} // namespace

nlohmann::json to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
    return out;
}

nlohmann::json to_json(const ConservationStructure& cs) {
    return {{"num_species", cs.num_species},
            {"codim", cs.codim},
            {"wegscheider", rational_matrix(cs.wegscheider)},
            {"q_matrix", rational_matrix(cs.q_matrix)}};
}

ConservationStructure conservation_structure_from_json(const nlohmann::json& j) {
    ConservationStructure cs;
    cs.num_species = j.at("num_species").get<std::size_t>();
    cs.codim = j.at("codim").get<std::size_t>();
    cs.wegscheider = rational_matrix_from(j.at("wegscheider"), cs.num_species);
    cs.q_matrix = rational_matrix_from(j.at("q_matrix"), cs.num_species);
    if (cs.q_matrix.size() != cs.codim) throw InvalidArgument("codim does not match q_matrix");
    return cs;
}

nlohmann::json to_json(const MassVector& mass) {
    return {{"values", to_json(mass.values)}, {"q", to_json(mass.q)}};
}

nlohmann::json to_json(const EquilibriumResult& eq) {
    return {{"c_infty", to_json(eq.c_infty)},
            {"residual_complex_balance", eq.residual_complex_balance},
            {"residual_mass", eq.residual_mass},
            {"is_detailed_balanced", eq.is_detailed_balanced},
            {"newton_iterations", eq.newton_iterations}};
}

nlohmann::json to_json(const BoundaryEquilibriaResult& boundary) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& b : boundary.equilibria) {
        nlohmann::json zero = nlohmann::json::array();
        for (auto i : b.support) zero.push_back(i + 1);
        list.push_back({{"zero_species", zero},
                        {"values", to_json(b.values)},
                        {"residual_complex_balance", b.residual_complex_balance},
                        {"residual_mass", b.residual_mass}});
    }
    return {{"equilibria", list}, {"complete", boundary.complete}};
}

nlohmann::json to_json(const ConstantsReport& report) {
    nlohmann::json constants = nlohmann::json::array();
    nlohmann::json values = nlohmann::json::object();
    for (const auto& c : report.entries()) {
        constants.push_back({{"name", c.name}, {"value", c.value}, {"formula", c.formula}});
        values[c.name] = c.value;
    }
    nlohmann::json h = nlohmann::json::array();
    for (double x : report.H_script) h.push_back(x);
    return {{"config",
             {{"K", report.K},
              {"L", report.config.L},
              {"scan_L", report.config.scan_L},
              {"C_P", report.config.C_P},
              {"C_LSI", report.config.C_LSI}}},
            {"constants", constants},
            {"values", values},
            {"H1_source", report.H1_source},
            {"H_script", h}};
}

nlohmann::json to_json(const EntropyReport& report) {
    return {{"total", report.total},
            {"spatial_part", report.spatial_part},
            {"average_part", report.average_part},
            {"dissipation",
             {{"diffusion", report.dissipation.diffusion},
              {"reaction", report.dissipation.reaction},
              {"total", report.dissipation.total()}}}};
}

nlohmann::json to_json(const H1Estimate& e) {
    return {{"value", e.value},
            {"mu", to_json(e.mu)},
            {"c_bar", to_json(e.c_bar)},
            {"from_linearization", e.from_linearization},
            {"linearized_ratio", e.linearized_ratio},
            {"starts_used", e.starts_used},
            {"projection_failures", e.projection_failures}};
}

} // namespace crn
