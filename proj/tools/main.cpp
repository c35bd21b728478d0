// crn-entropy: command-line front end for the reaction-network toolkit.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "crn/constants.hpp"
#include "crn/entropy.hpp"
#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "crn/initial_data.hpp"
#include "crn/json_io.hpp"
#include "crn/network.hpp"
#include "crn/pdesolver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace crn;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kParse = 1, kUsage = 2, kNoConvergence = 3, kBoundary = 4, kBlowUp = 5 };

struct Globals {
    std::uint64_t seed = 42;
    std::string out_dir;
    std::string format = "json";
    std::vector<std::string> argv;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// SHA-1 of "blob <size>\0<bytes>", the hash git gives the same file.
std::string git_blob_hash(const std::string& bytes) {
    const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-1 computation failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Collects the files a command writes and the manifest describing them.
class Run {
public:
    Run(const Globals& g, std::string command, const fs::path& network_file)
        : globals_(g), command_(std::move(command)), network_file_(network_file), start_(std::chrono::steady_clock::now()) {
        document_ = read_file(network_file);
        if (!g.out_dir.empty()) fs::create_directories(g.out_dir);
    }

    const std::string& document() const { return document_; }
    bool writes_files() const { return !globals_.out_dir.empty(); }

    /// Write `content` to <out-dir>/name when an output directory is set.
    void write(const std::string& name, const std::string& content) {
        if (!writes_files()) return;
        std::ofstream out(fs::path(globals_.out_dir) / name, std::ios::binary);
        if (!out) throw InvalidArgument("cannot write " + name);
        out << content;
        outputs_.push_back(name);
    }

    void finish(const json& config) {
        if (!writes_files()) return;
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json manifest = {{"command", command_},
                         {"argv", globals_.argv},
                         {"network", {{"path", network_file_.string()}, {"git_blob_sha1", git_blob_hash(document_)}}},
                         {"config", config},
                         {"seed", globals_.seed},
                         {"version", kVersion},
                         {"started_utc", started_utc_},
                         {"wall_clock_seconds", seconds},
                         {"outputs", outputs_}};
        std::ofstream out(fs::path(globals_.out_dir) / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
    }

private:
    const Globals& globals_;
    std::string command_;
    fs::path network_file_;
    std::string document_;
    std::chrono::steady_clock::time_point start_;
    std::string started_utc_ = utc_now();
    std::vector<std::string> outputs_;
};

/// Print a report and store it as <stem>.json or <stem>.csv.
void emit(Run& run, const Globals& g, const std::string& stem, const json& report, const std::string& csv) {
    const std::string text = g.format == "csv" ? csv : report.dump(2) + "\n";
    std::cout << text;
    run.write(stem + (g.format == "csv" ? ".csv" : ".json"), text);
}

std::string csv_number(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

// ---- mass selection ------------------------------------------------------

struct MassArgs {
    std::vector<double> mass;
    std::vector<double> initial;
};

void add_mass_options(CLI::App* cmd, MassArgs& args) {
    auto* m = cmd->add_option("--mass", args.mass, "mass vector M, one value per conservation law");
    auto* i = cmd->add_option("--initial", args.initial, "initial averages c_bar_0, one value per species");
    m->excludes(i);
}

MassVector resolve_mass(const Network& net, const ConservationStructure& cs, const MassArgs& args) {
    MassVector mass;
    if (!args.initial.empty()) {
        if (args.initial.size() != net.num_species())
            throw InvalidArgument("--initial needs " + std::to_string(net.num_species()) + " values");
        mass = mass_vector(cs, to_vector(args.initial));
    } else {
        if (args.mass.size() != cs.codim)
            throw InvalidArgument("--mass needs " + std::to_string(cs.codim) + " values (one per conservation law)");
        mass.values = to_vector(args.mass);
        mass.q = cs.q();
    }
    if (mass.values.size() > 0 && !(mass.values.array() > 0).all())
        throw InvalidArgument("every mass component must be positive");
    return mass;
}

json species_json(const Network& net) { return net.species(); }

// ---- analyze ---------------------------------------------------------------

int cmd_analyze(const Globals& g, const fs::path& file) {
    Run run(g, "analyze", file);
    const Network net = parse_network(run.document());
    const ConservationStructure cs = conservation_structure(net);

    json complexes = json::array();
    for (const auto& y : net.complexes()) {
        json row = json::array();
        for (const auto& v : y) row.push_back(to_string(v));
        complexes.push_back(row);
    }
    json reactions = json::array();
    for (const auto& r : net.reactions())
        reactions.push_back({{"reactant", r.reactant}, {"product", r.product}, {"rate", r.rate}});
    json report = {{"species", species_json(net)},
                   {"diffusion", to_json(net.diffusion())},
                   {"complexes", complexes},
                   {"reactions", reactions},
                   {"conservation", to_json(cs)},
                   {"m", cs.codim}};
    if (auto t = match_enzyme(net)) report["template"] = "enzyme";
    else if (auto c = match_cyclic(net)) report["template"] = "cyclic";

    std::string csv = "row";
    for (const auto& s : net.species()) csv += "," + s;
    csv += "\n";
    for (std::size_t k = 0; k < cs.q_matrix.size(); ++k) {
        csv += "q" + std::to_string(k + 1);
        for (const auto& v : cs.q_matrix[k]) csv += "," + to_string(v);
        csv += "\n";
    }
    emit(run, g, "analyze", report, csv);
    run.finish({{"file", file.string()}});
    return kOk;
}

// ---- equilibrium ---------------------------------------------------------

int cmd_equilibrium(const Globals& g, const fs::path& file, const MassArgs& args) {
    Run run(g, "equilibrium", file);
    const Network net = parse_network(run.document());
    const ConservationStructure cs = conservation_structure(net);
    const MassVector mass = resolve_mass(net, cs, args);
    EquilibriumOptions opt;
    opt.seed = g.seed;
    const EquilibriumResult eq = solve_complex_balanced(net, mass, opt);
    const BoundaryEquilibriaResult boundary = find_boundary_equilibria(net, mass, opt);

    const json report = {{"species", species_json(net)},
                         {"mass", to_json(mass)},
                         {"equilibrium", to_json(eq)},
                         {"boundary_equilibria", to_json(boundary)}};
    std::string csv = "species,c_infty\n";
    for (std::size_t i = 0; i < net.num_species(); ++i)
        csv += net.species()[i] + "," + csv_number(eq.c_infty[static_cast<Eigen::Index>(i)]) + "\n";
    emit(run, g, "equilibrium", report, csv);
    run.finish({{"mass", to_json(mass.values)}});
    return kOk;
}

// ---- constants ---------------------------------------------------------------

struct ConstantsArgs {
    MassArgs mass;
    double K = 1.0;
    double L = 1.0;
    double C_P = ChainConfig{}.C_P;
    double C_LSI = ChainConfig{}.C_LSI;
    bool scan_L = false;
    bool time_dependent = false;
    std::vector<double> times{0, 1, 10, 100, 1000};
    std::optional<double> inv_bound;
    int starts = 256;
    int steps = 500;
};

void add_chain_options(CLI::App* cmd, ConstantsArgs& a) {
    cmd->add_option("--K", a.K, "bound on E(c_bar | c_inf) for the states of interest")->check(CLI::PositiveNumber);
    cmd->add_option("--L", a.L, "splitting threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--C-P", a.C_P, "Poincare constant of the domain")->check(CLI::PositiveNumber);
    cmd->add_option("--C-LSI", a.C_LSI, "log-Sobolev constant of the domain")->check(CLI::PositiveNumber);
    cmd->add_flag("--scan-L", a.scan_L, "choose L in [1e-2, 1e2] maximising K3");
    cmd->add_option("--starts", a.starts, "multi-start budget of the H1 estimate")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", a.steps, "descent steps per start")->check(CLI::PositiveNumber);
}

ChainConfig chain_config(const ConstantsArgs& a) {
    ChainConfig c;
    c.L = a.L;
    c.C_P = a.C_P;
    c.C_LSI = a.C_LSI;
    c.scan_L = a.scan_L;
    return c;
}

/// Cyclic equilibrium reordered to the template roles (a, b, c).
Eigen::VectorXd cyclic_roles(const CyclicTemplate& t, const Eigen::VectorXd& c) {
    Eigen::VectorXd out(3);
    out << c[static_cast<Eigen::Index>(t.a)], c[static_cast<Eigen::Index>(t.b)], c[static_cast<Eigen::Index>(t.c)];
    return out;
}

/// H1 for a network without boundary equilibria: closed form when the
/// network is the enzyme pattern, otherwise the multi-start estimate.
void fill_H1(ConstantsReport& rep, json& extra, const Network& net, const Eigen::VectorXd& c_inf, const MassVector& mass,
             const ConstantsArgs& a, std::uint64_t seed) {
    if (auto t = match_enzyme(net)) {
        Eigen::VectorXd roles(4);
        roles << c_inf[static_cast<Eigen::Index>(t->a)], c_inf[static_cast<Eigen::Index>(t->b)],
            c_inf[static_cast<Eigen::Index>(t->c)], c_inf[static_cast<Eigen::Index>(t->d)];
        const EnzymeNu nu = enzyme_nu(roles);
        rep.H1 = enzyme_H1(roles);
        rep.H1_source = "closed-form enzyme: min{1/18, nu1/9, nu2/9}";
        extra["nu1"] = nu.nu1;
        extra["nu2"] = nu.nu2;
    } else {
        H1Budget budget;
        budget.starts = a.starts;
        budget.steps = a.steps;
        budget.seed = seed;
        const H1Estimate est = estimate_H1(net, c_inf, a.K, mass, budget);
        rep.H1 = est.value;
        rep.H1_source = "estimate: smallest sampled ratio, an upper bound on the infimum";
        extra["H1_estimate"] = to_json(est);
    }
    rep.lambda = lambda_rate(rep);
}

int cmd_constants(const Globals& g, const fs::path& file, const ConstantsArgs& a) {
    Run run(g, "constants", file);
    const Network net = parse_network(run.document());
    const ConservationStructure cs = conservation_structure(net);
    const MassVector mass = resolve_mass(net, cs, a.mass);
    EquilibriumOptions opt;
    opt.seed = g.seed;
    const Eigen::VectorXd c_inf = solve_complex_balanced(net, mass, opt).c_infty;
    const BoundaryEquilibriaResult boundary = find_boundary_equilibria(net, mass, opt);

    ConstantsReport rep = chain_constants(net, c_inf, a.K, chain_config(a));
    json extra = json::object();
    std::string csv = "name,value,formula\n";

    if (!boundary.equilibria.empty()) {
        if (!a.time_dependent) {
            std::cerr << "error: the mass class contains " << boundary.equilibria.size()
                      << " boundary equilibrium/equilibria, so no uniform H1 exists; rerun with --time-dependent\n";
            return kBoundary;
        }
        const auto t = match_cyclic(net);
        if (!t) {
            std::cerr << "error: time-dependent constants are only available for the cyclic pattern "
                         "A -> alpha B + C -> (alpha + 1) B -> A\n";
            return kBoundary;
        }
        const Eigen::VectorXd roles = cyclic_roles(*t, c_inf);
        const CyclicRho rho = cyclic_rho(t->alpha, roles);
        const double inv_bound = a.inv_bound ? *a.inv_bound
                                 : !a.mass.initial.empty()
                                     ? std::pow(a.mass.initial[t->b], -t->alpha)
                                     : std::pow(roles[1], -t->alpha);
        json table = json::array();
        for (double time : a.times) {
            table.push_back({{"t", time},
                             {"h", cyclic_h(time, t->alpha, t->k3, inv_bound)},
                             {"H1", cyclic_H1_of_t(time, t->alpha, t->k3, roles, inv_bound)},
                             {"integral_H1", cyclic_H1_integral(time, t->alpha, t->k3, roles, inv_bound)}});
            csv += "H1(t=" + csv_number(time) + ")," + csv_number(cyclic_H1_of_t(time, t->alpha, t->k3, roles, inv_bound)) +
                   ",rho min{1; (h(t)/c_b,inf)^alpha}\n";
        }
        extra["time_dependent"] = {{"alpha", t->alpha}, {"b_max", rho.b_max}, {"rho", rho.rho},
                                   {"inv_bound", inv_bound}, {"table", table}};
        rep.H1_source = "time-dependent, see time_dependent";
        csv += "b_max," + csv_number(rho.b_max) + ",-1 + sqrt(1 + ((alpha+1) c_a,inf + c_c,inf) / c_b,inf)\n";
        csv += "rho," + csv_number(rho.rho) + ",min{1/4; 1/(4 (alpha+1) max{1, b_max}^(2 alpha))}\n";
    } else {
        fill_H1(rep, extra, net, c_inf, mass, a, g.seed);
    }

    json report = to_json(rep);
    report["c_infty"] = to_json(c_inf);
    report["mass"] = to_json(mass.values);
    report["boundary_equilibria"] = to_json(boundary);
    for (auto& [k, v] : extra.items()) report[k] = v;
    for (const Constant& c : rep.entries()) csv += c.name + "," + csv_number(c.value) + ",\"" + c.formula + "\"\n";
    emit(run, g, "constants", report, csv);
    run.finish({{"mass", to_json(mass.values)},
                {"K", a.K},
                {"L", a.L},
                {"C_P", a.C_P},
                {"C_LSI", a.C_LSI},
                {"scan_L", a.scan_L},
                {"time_dependent", a.time_dependent}});
    return kOk;
}

// ---- fdi -------------------------------------------------------------------

struct FdiArgs {
    ConstantsArgs chain;
    int samples = 10000;
};

int cmd_fdi(const Globals& g, const fs::path& file, const FdiArgs& a) {
    Run run(g, "fdi", file);
    const Network net = parse_network(run.document());
    const ConservationStructure cs = conservation_structure(net);
    const MassVector mass = resolve_mass(net, cs, a.chain.mass);
    EquilibriumOptions opt;
    opt.seed = g.seed;
    const Eigen::VectorXd c_inf = solve_complex_balanced(net, mass, opt).c_infty;

    H1Budget budget;
    budget.starts = a.chain.starts;
    budget.steps = a.chain.steps;
    budget.seed = g.seed;
    const H1Estimate est = estimate_H1(net, c_inf, a.chain.K, mass, budget);
    const FdiProblem problem(net, c_inf, mass.q);

    json report = {{"c_infty", to_json(c_inf)}, {"estimate", to_json(est)}};
    std::string csv = "quantity,value\nH1_estimate," + csv_number(est.value) + "\nlinearized_ratio," +
                      csv_number(est.linearized_ratio) + "\n";

    // Sample the constraint set and compare with a known lower bound when there is one.
    std::optional<double> bound;
    if (auto t = match_enzyme(net)) {
        Eigen::VectorXd roles(4);
        roles << c_inf[static_cast<Eigen::Index>(t->a)], c_inf[static_cast<Eigen::Index>(t->b)],
            c_inf[static_cast<Eigen::Index>(t->c)], c_inf[static_cast<Eigen::Index>(t->d)];
        bound = enzyme_H1(roles);
    }
    std::mt19937_64 rng(g.seed);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    const double k_tilde = 2.0 * (a.chain.K + c_inf.sum());
    int admitted = 0, violations = 0, failures = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < a.samples; ++k) {
        Eigen::VectorXd start(c_inf.size());
        for (Eigen::Index i = 0; i < start.size(); ++i) start[i] = c_inf[i] * std::pow(1.0 + u(rng), 2) + 1e-12;
        Eigen::VectorXd c_bar;
        try {
            c_bar = project_to_mass_class(mass, start);
        } catch (const ProjectionFailure&) {
            ++failures;
            continue;
        }
        if (c_bar.maxCoeff() > k_tilde) continue;
        const FdiPoint p = problem.evaluate((c_bar.array() / c_inf.array()).sqrt() - 1.0);
        if (!(p.rhs_base > 0)) continue;
        ++admitted;
        worst = std::min(worst, p.lhs / p.rhs_base);
        if (bound && p.lhs < *bound * p.rhs_base) ++violations;
    }
    report["samples"] = {{"requested", a.samples},
                         {"admitted", admitted},
                         {"projection_failures", failures},
                         {"smallest_ratio", admitted ? json(worst) : json(nullptr)}};
    if (bound) {
        report["closed_form_bound"] = *bound;
        report["violations"] = violations;
        csv += "closed_form_bound," + csv_number(*bound) + "\nviolations," + std::to_string(violations) + "\n";
    }
    csv += "samples_admitted," + std::to_string(admitted) + "\n";
    emit(run, g, "fdi", report, csv);
    run.finish({{"mass", to_json(mass.values)}, {"K", a.chain.K}, {"samples", a.samples}, {"starts", a.chain.starts},
                {"steps", a.chain.steps}});
    return kOk;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
    ConstantsArgs chain;
    std::size_t n_x = 256;
    double dt = 0.0;
    double t_end = 1.0;
    double epsilon = 0.0;
    std::vector<std::string> init;
    std::string init_csv;
    std::size_t output_every = 1;
    bool check_lower_bound = false;
    std::vector<double> fit_window;
};

SpatialField initial_field(const Network& net, const SimulateArgs& a) {
    if (!a.init_csv.empty()) return field_from_csv(a.init_csv, net.num_species(), a.n_x);
    if (a.init.size() != net.num_species())
        throw InvalidArgument("--init needs one expression per species (" + std::to_string(net.num_species()) + ")");
    return field_from_expressions(a.init, a.n_x);
}

/// Largest recorded window [0, t] on which E stays well above rounding.
std::optional<std::pair<double, double>> default_fit_window(const SimulationSeries& s) {
    if (s.entropy.empty() || !(s.entropy.front() > 0)) return std::nullopt;
    const double floor = std::max(1e-12, 1e-10 * s.entropy.front());
    std::size_t last = 0;
    while (last + 1 < s.entropy.size() && s.entropy[last + 1] > floor) ++last;
    if (last < 10) return std::nullopt;
    return std::make_pair(s.times.front(), s.times[last]);
}

int cmd_simulate(const Globals& g, const fs::path& file, const SimulateArgs& a) {
    Run run(g, "simulate", file);
    const Network net = parse_network(run.document());
    const SpatialField initial = initial_field(net, a);
    SolverConfig cfg;
    cfg.n_x = a.n_x;
    cfg.dt = a.dt;
    cfg.t_end = a.t_end;
    cfg.epsilon = a.epsilon;
    cfg.output_every = a.output_every;
    cfg.on_warning = [](const std::string& w) { std::cerr << "warning: " << w << "\n"; };

    const ConservationStructure cs = conservation_structure(net);
    const MassVector mass = mass_vector(cs, initial.averages());
    if (mass.values.size() > 0 && !(mass.values.array() > 0).all())
        throw InvalidArgument("initial data must have positive mass in every conservation law");

    const SimulationSeries s = simulate(net, initial, cfg);

    std::ostringstream series_csv, final_csv;
    write_series_csv(series_csv, s);
    write_snapshot_csv(final_csv, s.final_state);
    run.write("series.csv", series_csv.str());
    run.write("final.csv", final_csv.str());

    json summary = {{"c_infty", to_json(s.c_inf)},
                    {"initial_mass", to_json(s.initial_mass)},
                    {"dt", s.dt},
                    {"h", s.h},
                    {"steps", s.steps},
                    {"E0", s.entropy.front()},
                    {"E_final", s.entropy.back()},
                    {"clip_events", s.clip_events},
                    {"clipped_mass", s.clipped_mass},
                    {"min_before_clip", s.min_before_clip},
                    {"warnings", s.warnings}};

    double mass_drift = 0.0;
    for (const auto& m : s.masses) mass_drift = std::max(mass_drift, (m - s.initial_mass).cwiseAbs().maxCoeff());
    summary["mass_drift"] = mass_drift;

    const WeakLawCheck weak = check_weak_entropy_law(s);
    summary["weak_entropy_law"] = {{"max_violation", weak.max_violation}, {"s", weak.s}, {"t", weak.t},
                                   {"tolerance", weak.tolerance}, {"holds", weak.holds}};

    std::optional<double> lambda_emp;
    std::optional<std::pair<double, double>> window;
    if (a.fit_window.size() == 2) window = std::make_pair(a.fit_window[0], a.fit_window[1]);
    else window = default_fit_window(s);
    if (window) {
        try {
            const DecayFit fit = fit_decay_rate(s, window->first, window->second);
            lambda_emp = fit.rate;
            summary["fit"] = {{"window", {window->first, window->second}}, {"rate", fit.rate}, {"samples", fit.samples}};
        } catch (const InvalidArgument& e) {
            summary["fit"] = {{"error", e.what()}};
        }
    }

    // Theoretical rate from the constants chain, with K large enough for the initial average.
    std::optional<double> lambda;
    const BoundaryEquilibriaResult boundary = find_boundary_equilibria(net, mass);
    if (boundary.equilibria.empty()) {
        ConstantsArgs chain = a.chain;
        chain.K = std::max(chain.K, relative_entropy(initial.averages(), s.c_inf));
        ConstantsReport rep = chain_constants(net, s.c_inf, chain.K, chain_config(chain));
        json extra;
        fill_H1(rep, extra, net, s.c_inf, mass, chain, g.seed);
        lambda = rep.lambda;
        summary["constants"] = to_json(rep);
    }
    summary["lambda_emp"] = lambda_emp ? json(*lambda_emp) : json(nullptr);
    summary["lambda"] = lambda ? json(*lambda) : json(nullptr);

    if (a.check_lower_bound) {
        const auto t = match_cyclic(net);
        if (!t) throw InvalidArgument("--check-lower-bound needs the cyclic pattern A -> alpha B + C -> (alpha + 1) B -> A");
        const double inv_bound = initial.values().row(static_cast<Eigen::Index>(t->b)).array().pow(-t->alpha).maxCoeff();
        bool all_ok = true;
        std::ostringstream lb;
        lb.precision(17);
        lb << "t,avg,h,ok\n";
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            const double avg = s.averages[k][static_cast<Eigen::Index>(t->b)];
            const double h = cyclic_h(s.times[k], t->alpha, t->k3, inv_bound);
            const bool ok = avg >= h;
            all_ok = all_ok && ok;
            lb << s.times[k] << ',' << avg << ',' << h << ',' << (ok ? 1 : 0) << '\n';
            if (!run.writes_files())
                std::cout << "t = " << s.times[k] << ": avg " << avg << (ok ? " >= " : " < ") << "h " << h
                          << (ok ? " ok" : " VIOLATED") << "\n";
        }
        run.write("lower_bound.csv", lb.str());
        summary["lower_bound"] = {{"species", net.species()[t->b]}, {"inv_bound", inv_bound}, {"holds", all_ok}};
        std::cout << "lower bound avg(" << net.species()[t->b] << ")(t) >= h(t): " << (all_ok ? "PASS" : "FAIL") << "\n";
    }

    const auto show = [](const std::optional<double>& v) {
        std::ostringstream s;
        s << std::setprecision(6);
        if (v) s << *v;
        else s << "n/a";
        return s.str();
    };
    std::cout << std::setprecision(6) << "lambda_emp = " << show(lambda_emp) << ", lambda = " << show(lambda);
    if (lambda_emp && lambda) std::cout << (*lambda_emp >= *lambda ? " (lambda_emp >= lambda)" : " (lambda_emp < lambda)");
    std::cout << "\nweak entropy law: max violation " << weak.max_violation << " vs tolerance " << weak.tolerance
              << (weak.holds ? " (holds)" : " (violated)") << "\n";
    if (g.format == "csv" && !run.writes_files()) std::cout << series_csv.str();
    run.write("summary.json", summary.dump(2) + "\n");

    json config = {{"n_x", a.n_x},        {"dt", s.dt},
                   {"t_end", a.t_end},    {"epsilon", a.epsilon},
                   {"init", a.init},      {"init_csv", a.init_csv},
                   {"output_every", a.output_every}, {"check_lower_bound", a.check_lower_bound}};
    run.finish(config);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy-method toolkit for mass-action reaction-diffusion networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Globals g;
    g.argv.assign(argv, argv + argc);
    app.add_option("--seed", g.seed, "seed for every randomised procedure");
    app.add_option("--out-dir", g.out_dir, "write reports, CSV files and manifest.json here");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));

    std::string file;
    auto network_arg = [&](CLI::App* cmd) { cmd->add_option("network", file, "network description file")->required(); };

    auto* analyze = app.add_subcommand("analyze", "validate a network and report W, Q and m");
    network_arg(analyze);

    MassArgs eq_args;
    auto* equilibrium = app.add_subcommand("equilibrium", "complex balanced and boundary equilibria");
    network_arg(equilibrium);
    add_mass_options(equilibrium, eq_args);

    ConstantsArgs const_args;
    auto* constants = app.add_subcommand("constants", "entropy-method constant chain, H1 and lambda");
    network_arg(constants);
    add_mass_options(constants, const_args.mass);
    add_chain_options(constants, const_args);
    constants->add_flag("--time-dependent", const_args.time_dependent, "use H1(t) when boundary equilibria exist");
    constants->add_option("--times", const_args.times, "times for the H1(t) table");
    constants->add_option("--inv-bound", const_args.inv_bound, "sup of c_b,0^-alpha over the domain")
        ->check(CLI::PositiveNumber);

    FdiArgs fdi_args;
    auto* fdi = app.add_subcommand("fdi", "estimate H1 and sample the finite-dimensional inequality");
    network_arg(fdi);
    add_mass_options(fdi, fdi_args.chain.mass);
    add_chain_options(fdi, fdi_args.chain);
    fdi->add_option("--samples", fdi_args.samples, "constrained points to sample")->check(CLI::NonNegativeNumber);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "reaction-diffusion run with entropy diagnostics");
    network_arg(sim);
    add_chain_options(sim, sim_args.chain);
    sim->add_option("--n-x", sim_args.n_x, "grid cells")->check(CLI::PositiveNumber);
    sim->add_option("--dt", sim_args.dt, "time step (0 picks one from the reaction Jacobian)")->check(CLI::NonNegativeNumber);
    sim->add_option("--t-end", sim_args.t_end, "final time")->check(CLI::PositiveNumber);
    sim->add_option("--epsilon", sim_args.epsilon, "kinetics R / (1 + epsilon |R|)")->check(CLI::NonNegativeNumber);
    auto* init = sim->add_option("--init", sim_args.init, "initial profile per species, e.g. \"1 + 0.5*cos(pi*x)\"");
    auto* init_csv = sim->add_option("--init-csv", sim_args.init_csv, "initial profiles from a CSV with header x,c_1..");
    init->excludes(init_csv);
    sim->add_option("--output-every", sim_args.output_every, "record every k steps")->check(CLI::PositiveNumber);
    sim->add_flag("--check-lower-bound", sim_args.check_lower_bound, "check avg(c_b)(t) >= h(t) for the cycle");
    sim->add_option("--fit-window", sim_args.fit_window, "t0 t1 of the decay fit")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*analyze) return cmd_analyze(g, file);
        if (*equilibrium) return cmd_equilibrium(g, file, eq_args);
        if (*constants) return cmd_constants(g, file, const_args);
        if (*fdi) return cmd_fdi(g, file, fdi_args);
        if (*sim) return cmd_simulate(g, file, sim_args);
    } catch (const ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kParse;
    } catch (const ValidationError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const BoundaryEquilibriaPresent& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBoundary;
    } catch (const BlowUp& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBlowUp;
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const NotComplexBalanced& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const ProjectionFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const SupportLimitExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    }
    return kUsage;
}
