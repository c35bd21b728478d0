#include "crn/initial_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "crn/errors.hpp"

namespace crn {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call } kind;
    double value = 0.0;
    char op = 0;
    double (*fn)(double) = nullptr;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double x) const {
        switch (kind) {
        case Kind::Number: return value;
        case Kind::Variable: return x;
        case Kind::Unary: return -lhs->eval(x);
        case Kind::Call: return fn(lhs->eval(x));
        case Kind::Binary: {
            const double a = lhs->eval(x), b = rhs->eval(x);
            switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
            }
        }
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr number(double v) { return std::make_shared<Expression::Node>(Expression::Node{Kind::Number, v, 0, nullptr, {}, {}}); }

NodePtr binary(char op, NodePtr a, NodePtr b) {
    return std::make_shared<Expression::Node>(Expression::Node{Kind::Binary, 0, op, nullptr, std::move(a), std::move(b)});
}

struct Function {
    std::string_view name;
    double (*fn)(double);
};

double abs_fn(double v) { return std::abs(v); }
double sin_fn(double v) { return std::sin(v); }
double cos_fn(double v) { return std::cos(v); }
double tan_fn(double v) { return std::tan(v); }
double exp_fn(double v) { return std::exp(v); }
double log_fn(double v) { return std::log(v); }
double sqrt_fn(double v) { return std::sqrt(v); }
double tanh_fn(double v) { return std::tanh(v); }

constexpr Function kFunctions[] = {{"sin", sin_fn},   {"cos", cos_fn},   {"tan", tan_fn}, {"exp", exp_fn},
                                   {"log", log_fn},   {"sqrt", sqrt_fn}, {"abs", abs_fn}, {"tanh", tanh_fn}};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr n = sum();
        skip();
        if (pos_ != text_.size()) fail("unexpected character");
        return n;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument("expression '" + std::string(text_) + "': " + what + " at offset " +
                              std::to_string(pos_));
    }
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char ch) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        NodePtr n = product();
        while (true) {
            if (eat('+')) n = binary('+', n, product());
            else if (eat('-')) n = binary('-', n, product());
            else return n;
        }
    }
    NodePtr product() {
        NodePtr n = unary();
        while (true) {
            if (eat('*')) n = binary('*', n, unary());
            else if (eat('/')) n = binary('/', n, unary());
            else return n;
        }
    }
    NodePtr unary() {
        if (eat('-')) return std::make_shared<Expression::Node>(Expression::Node{Kind::Unary, 0, '-', nullptr, unary(), {}});
        if (eat('+')) return unary();
        return power();
    }
    // Right associative, binds tighter than unary minus: -x^2 = -(x^2).
    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) return binary('^', base, unary());
        return base;
    }
    NodePtr atom() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end");
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            NodePtr n = sum();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            char* end = nullptr;
            const std::string tmp(text_.substr(pos_));
            const double v = std::strtod(tmp.c_str(), &end);
            if (end == tmp.c_str()) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - tmp.c_str());
            return number(v);
        }
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == "x") return std::make_shared<Expression::Node>(Expression::Node{Kind::Variable, 0, 0, nullptr, {}, {}});
            if (name == "pi") return number(std::numbers::pi);
            if (name == "e") return number(std::numbers::e);
            for (const auto& f : kFunctions)
                if (f.name == name) {
                    if (!eat('(')) fail("expected '(' after " + std::string(name));
                    NodePtr arg = sum();
                    if (!eat(')')) fail("expected ')'");
                    return std::make_shared<Expression::Node>(Expression::Node{Kind::Call, 0, 0, f.fn, arg, {}});
                }
            pos_ = start;
            fail("unknown name '" + std::string(name) + "'");
        }
        fail("unexpected character");
    }
};

} // namespace

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

double Expression::operator()(double x) const { return root_->eval(x); }

SpatialField field_from_expressions(const std::vector<std::string>& expressions, std::size_t num_cells) {
    if (num_cells == 0) throw InvalidArgument("field needs at least one cell");
    Eigen::MatrixXd v(static_cast<Eigen::Index>(expressions.size()), static_cast<Eigen::Index>(num_cells));
    const double h = 1.0 / static_cast<double>(num_cells);
    for (std::size_t i = 0; i < expressions.size(); ++i) {
        const Expression e = Expression::parse(expressions[i]);
        for (std::size_t j = 0; j < num_cells; ++j) {
            const double value = e((static_cast<double>(j) + 0.5) * h);
            if (!std::isfinite(value) || value < 0)
                throw InvalidArgument("initial value of species " + std::to_string(i + 1) + " is negative or not finite");
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
        }
    }
    return SpatialField(std::move(v));
}

SpatialField field_from_csv(const std::filesystem::path& path, std::size_t num_species, std::size_t num_cells) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument(path.string() + " is empty");
    std::vector<double> xs;
    std::vector<std::vector<double>> cols(num_species);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": not a number");
            }
        }
        if (row.size() != num_species + 1)
            throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(num_species + 1) + " columns");
        xs.push_back(row[0]);
        for (std::size_t i = 0; i < num_species; ++i) cols[i].push_back(row[i + 1]);
    }
    if (xs.empty()) throw InvalidArgument(path.string() + " has no data rows");
    if (!std::is_sorted(xs.begin(), xs.end())) throw InvalidArgument(path.string() + ": x must be increasing");

    Eigen::MatrixXd v(static_cast<Eigen::Index>(num_species), static_cast<Eigen::Index>(num_cells));
    for (std::size_t j = 0; j < num_cells; ++j) {
        const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(num_cells);
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        for (std::size_t i = 0; i < num_species; ++i) {
            double value;
            if (it == xs.begin()) {
                value = cols[i].front();
            } else if (it == xs.end()) {
                value = cols[i].back();
            } else {
                const auto k = static_cast<std::size_t>(it - xs.begin());
                const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
                value = (1 - w) * cols[i][k - 1] + w * cols[i][k];
            }
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
        }
    }
    return SpatialField(std::move(v));
}

} // namespace crn
