#include "crn/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "crn/errors.hpp"

namespace crn {

Network::Network(std::vector<std::string> species, std::vector<Stoichiometry> complexes,
                 std::vector<Reaction> reactions, std::vector<double> diffusion)
    : species_(std::move(species)), complexes_(std::move(complexes)), reactions_(std::move(reactions)) {
    const std::size_t n = species_.size();
    if (n == 0) throw ValidationError(0, "network has no species");
    if (diffusion.size() != n) throw ValidationError(0, "diffusion vector has wrong length");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (species_[i] == species_[j]) throw ValidationError(0, "duplicate species '" + species_[i] + "'");

    for (std::size_t c = 0; c < complexes_.size(); ++c) {
        if (complexes_[c].size() != n) throw ValidationError(0, "complex " + std::to_string(c) + " has wrong length");
        for (const auto& y : complexes_[c])
            if (y < 0 || (y > 0 && y < 1))
                throw ValidationError(0, "stoichiometric coefficients must be 0 or at least 1");
        for (std::size_t d = 0; d < c; ++d)
            if (complexes_[d] == complexes_[c]) throw ValidationError(0, "duplicate complex " + std::to_string(c));
    }

    for (std::size_t i = 0; i < n; ++i) {
        const bool used = std::any_of(complexes_.begin(), complexes_.end(),
                                      [i](const Stoichiometry& y) { return y[i] >= 1; });
        if (!used)
            throw ValidationError(1, "species '" + species_[i] + "' has no complex with coefficient >= 1");
    }

    std::vector<bool> complex_used(complexes_.size(), false);
    for (std::size_t r = 0; r < reactions_.size(); ++r) {
        const auto& rx = reactions_[r];
        if (rx.reactant >= complexes_.size() || rx.product >= complexes_.size())
            throw ValidationError(0, "reaction " + std::to_string(r + 1) + " refers to an unknown complex");
        if (rx.reactant == rx.product)
            throw ValidationError(2, "reaction " + std::to_string(r + 1) + " has identical reactant and product");
        if (!(rx.rate > 0) || !std::isfinite(rx.rate))
            throw ValidationError(0, "reaction " + std::to_string(r + 1) + " has nonpositive rate constant");
        complex_used[rx.reactant] = complex_used[rx.product] = true;
    }
    for (std::size_t c = 0; c < complexes_.size(); ++c)
        if (!complex_used[c])
            throw ValidationError(3, "complex " + std::to_string(c + 1) + " takes part in no reaction");

    diffusion_ = Eigen::VectorXd::Map(diffusion.data(), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        if (!(diffusion[i] > 0) || !std::isfinite(diffusion[i]))
            throw ValidationError(0, "diffusion coefficient of '" + species_[i] + "' must be positive");

    complex_matrix_.resize(static_cast<Eigen::Index>(complexes_.size()), static_cast<Eigen::Index>(n));
    factors_.resize(complexes_.size());
    for (std::size_t c = 0; c < complexes_.size(); ++c)
        for (std::size_t i = 0; i < n; ++i) {
            const Rational& y = complexes_[c][i];
            const double value = y.convert_to<double>();
            complex_matrix_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = value;
            if (y == 0) continue;
            int integer = -1;
            if (denominator(y) == 1 && numerator(y) <= 64) integer = static_cast<int>(numerator(y));
            factors_[c].push_back({i, value, integer});
        }
}

std::optional<std::size_t> Network::species_index(std::string_view name) const {
    for (std::size_t i = 0; i < species_.size(); ++i)
        if (species_[i] == name) return i;
    return std::nullopt;
}

double Network::monomial(std::size_t complex, std::span<const double> c) const {
    double value = 1.0;
    for (const auto& f : factors_[complex]) {
        const double x = c[f.species];
        if (f.integer_exponent >= 0) {
            double p = 1.0;
            for (int k = 0; k < f.integer_exponent; ++k) p *= x;
            value *= p;
        } else {
            value *= std::pow(x, f.exponent);
        }
    }
    return value;
}

bool Network::operator==(const Network& other) const {
    return species_ == other.species_ && complexes_ == other.complexes_ && reactions_ == other.reactions_ &&
           diffusion_ == other.diffusion_;
}

namespace {

bool is_name_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) != 0 || ch == '_'; }
bool is_name_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_'; }
bool is_number_char(char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) != 0 || ch == '.' || ch == '/' || ch == 'e' || ch == 'E';
}

/// Cursor over a single line, reporting 1-based columns.
class LineCursor {
public:
    LineCursor(std::string_view text, std::size_t line, std::size_t offset)
        : text_(text), line_(line), offset_(offset) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool consume(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) != token) return false;
        pos_ += token.size();
        return true;
    }
    void expect(std::string_view token) {
        if (!consume(token)) fail("expected '" + std::string(token) + "'");
    }
    std::string_view name() {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ >= text_.size() || !is_name_start(text_[pos_])) fail("expected a species name");
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }
    /// A numeric literal; signs and exponents are accepted.
    std::string_view number() {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        while (pos_ < text_.size()) {
            const char ch = text_[pos_];
            if (is_number_char(ch)) {
                ++pos_;
                if ((ch == 'e' || ch == 'E') && pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                    ++pos_;
            } else {
                break;
            }
        }
        if (pos_ == start) fail("expected a number");
        return text_.substr(start, pos_ - start);
    }
    double real() {
        const std::size_t start = column();
        const std::string_view token = number();
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            // fractions are allowed for rates too
            try {
                value = parse_rational(token).convert_to<double>();
            } catch (const InvalidArgument&) {
                throw ParseError(line_, start, "malformed number '" + std::string(token) + "'");
            }
        }
        return value;
    }
    bool starts_number() {
        const char ch = peek();
        return std::isdigit(static_cast<unsigned char>(ch)) != 0 || ch == '.';
    }
    std::size_t column() {
        skip_space();
        return offset_ + pos_ + 1;
    }
    [[noreturn]] void fail(const std::string& what) { throw ParseError(line_, column(), what); }
    std::size_t line() const { return line_; }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t offset_;
    std::size_t pos_ = 0;
};

struct Draft {
    std::vector<std::string> species;
    std::map<std::string, double, std::less<>> diffusion;
    std::vector<Stoichiometry> complexes;
    std::vector<Reaction> reactions;
    bool have_species = false;
};

std::size_t intern_complex(Draft& d, Stoichiometry y) {
    for (std::size_t c = 0; c < d.complexes.size(); ++c)
        if (d.complexes[c] == y) return c;
    d.complexes.push_back(std::move(y));
    return d.complexes.size() - 1;
}

Stoichiometry parse_complex(LineCursor& cur, const Draft& d) {
    Stoichiometry y(d.species.size(), Rational(0));
    // A lone "0" is the empty complex.
    if (cur.peek() == '0') {
        LineCursor probe = cur;
        const std::string_view tok = probe.number();
        const char next = probe.peek();
        if (tok == "0" && !is_name_start(next)) {
            cur = probe;
            return y;
        }
    }
    while (true) {
        Rational coefficient = 1;
        if (cur.starts_number()) {
            const std::size_t col = cur.column();
            const std::string_view tok = cur.number();
            try {
                coefficient = parse_rational(tok);
            } catch (const InvalidArgument& e) {
                throw ParseError(cur.line(), col, e.what());
            }
            if (coefficient < 1)
                throw ParseError(cur.line(), col, "stoichiometric coefficient must be at least 1");
        }
        const std::size_t col = cur.column();
        const std::string_view name = cur.name();
        const auto it = std::find(d.species.begin(), d.species.end(), name);
        if (it == d.species.end()) throw ParseError(cur.line(), col, "undeclared species '" + std::string(name) + "'");
        y[static_cast<std::size_t>(it - d.species.begin())] += coefficient;
        if (!cur.consume("+")) break;
    }
    return y;
}

void parse_species_line(LineCursor& cur, Draft& d) {
    if (d.have_species) cur.fail("species declared twice");
    d.have_species = true;
    do {
        const std::size_t col = cur.column();
        std::string name(cur.name());
        if (std::find(d.species.begin(), d.species.end(), name) != d.species.end())
            throw ParseError(cur.line(), col, "duplicate species '" + name + "'");
        d.species.push_back(std::move(name));
    } while (cur.consume(","));
    if (!cur.at_end()) cur.fail("unexpected text after species list");
}

void parse_diffusion_line(LineCursor& cur, Draft& d) {
    if (!d.have_species) cur.fail("diffusion given before species");
    do {
        const std::size_t col = cur.column();
        std::string name(cur.name());
        if (std::find(d.species.begin(), d.species.end(), name) == d.species.end())
            throw ParseError(cur.line(), col, "undeclared species '" + name + "'");
        if (d.diffusion.count(name) != 0) throw ParseError(cur.line(), col, "diffusion of '" + name + "' given twice");
        cur.expect("=");
        d.diffusion[name] = cur.real();
    } while (cur.consume(","));
    if (!cur.at_end()) cur.fail("unexpected text after diffusion list");
}

void parse_reaction_line(LineCursor& cur, Draft& d) {
    if (!d.have_species) cur.fail("reaction given before species");
    Stoichiometry lhs = parse_complex(cur, d);
    bool reversible = false;
    if (cur.consume("<->")) {
        reversible = true;
    } else {
        cur.expect("->");
    }
    Stoichiometry rhs = parse_complex(cur, d);
    cur.expect("@");
    const double forward = cur.real();
    double backward = 0.0;
    if (reversible) {
        cur.expect(",");
        backward = cur.real();
    }
    if (!cur.at_end()) cur.fail("unexpected text after rate constant");
    const std::size_t a = intern_complex(d, std::move(lhs));
    const std::size_t b = intern_complex(d, std::move(rhs));
    d.reactions.push_back({a, b, forward});
    if (reversible) d.reactions.push_back({b, a, backward});
}

} // namespace

Network parse_network(std::string_view text) {
    Draft d;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        LineCursor cur(line, line_no, 0);
        if (!cur.at_end()) {
            const std::size_t col = cur.column();
            const std::string_view keyword = cur.name();
            cur.expect(":");
            if (keyword == "species") {
                parse_species_line(cur, d);
            } else if (keyword == "diffusion") {
                parse_diffusion_line(cur, d);
            } else if (keyword == "reaction") {
                parse_reaction_line(cur, d);
            } else {
                throw ParseError(line_no, col, "unknown keyword '" + std::string(keyword) + "'");
            }
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    if (!d.have_species) throw ParseError(line_no, 1, "missing species declaration");
    if (d.reactions.empty()) throw ParseError(line_no, 1, "no reactions declared");

    std::vector<double> diffusion(d.species.size(), 1.0);
    for (std::size_t i = 0; i < d.species.size(); ++i)
        if (auto it = d.diffusion.find(d.species[i]); it != d.diffusion.end()) diffusion[i] = it->second;
    return Network(std::move(d.species), std::move(d.complexes), std::move(d.reactions), std::move(diffusion));
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_network(buffer.str());
}

namespace {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string format_complex(const Network& net, const Stoichiometry& y) {
    std::string out;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0) continue;
        if (!out.empty()) out += " + ";
        out += to_string(y[i]) + " " + net.species()[i];
    }
    return out.empty() ? "0" : out;
}

} // namespace

std::string to_text(const Network& net) {
    std::string out = "species: ";
    for (std::size_t i = 0; i < net.num_species(); ++i) out += (i ? ", " : "") + net.species()[i];
    out += "\ndiffusion: ";
    for (std::size_t i = 0; i < net.num_species(); ++i)
        out += (i ? ", " : "") + net.species()[i] + "=" + format_double(net.diffusion()[static_cast<Eigen::Index>(i)]);
    out += "\n";
    // The parser numbers complexes by first appearance, so a parsed network
    // round-trips exactly.
    for (const auto& r : net.reactions())
        out += "reaction: " + format_complex(net, net.complexes()[r.reactant]) + " -> " +
               format_complex(net, net.complexes()[r.product]) + " @ " + format_double(r.rate) + "\n";
    return out;
}

ConservationStructure conservation_structure(const Network& net) {
    const std::size_t n = net.num_species();
    ConservationStructure cs;
    cs.num_species = n;
    for (const auto& r : net.reactions()) {
        RationalVector row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = net.complexes()[r.product][i] - net.complexes()[r.reactant][i];
        cs.wegscheider.push_back(std::move(row));
    }
    RationalMatrix basis = kernel_basis(cs.wegscheider, n);
    rref(basis, n);
    for (auto& row : basis) row = normalize_integer_row(row);
    cs.q_matrix = std::move(basis);
    cs.codim = cs.q_matrix.size();
    return cs;
}

Eigen::VectorXd reaction_rates(const Network& net, const Eigen::VectorXd& c) {
    const auto n = static_cast<Eigen::Index>(net.num_species());
    if (c.size() != n) throw InvalidArgument("state has wrong dimension");
    if ((c.array() < 0).any()) throw InvalidArgument("negative concentration");
    const Eigen::MatrixXd& y = net.complex_matrix();
    Eigen::VectorXd rates = Eigen::VectorXd::Zero(n);
    for (const auto& r : net.reactions()) {
        const double flux = r.rate * net.monomial(r.reactant, c);
        if (flux == 0.0) continue;
        rates += flux * (y.row(static_cast<Eigen::Index>(r.product)) - y.row(static_cast<Eigen::Index>(r.reactant)))
                            .transpose();
    }
    return rates;
}

MassVector mass_vector(const ConservationStructure& cs, const Eigen::VectorXd& initial_average) {
    if (initial_average.size() != static_cast<Eigen::Index>(cs.num_species))
        throw InvalidArgument("initial average has wrong dimension");
    if ((initial_average.array() < 0).any()) throw InvalidArgument("negative initial average");
    MassVector m;
    m.q = cs.q();
    m.values = m.q * initial_average;
    return m;
}

} // namespace crn
