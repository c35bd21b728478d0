#include "crn/linalg.hpp"

#include <algorithm>
#include <cctype>

#include "crn/errors.hpp"

namespace crn {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch) != 0; });
}

// cpp_int reads a leading 0 as an octal prefix.
boost::multiprecision::cpp_int decimal_int(std::string_view digits) {
    while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
    return boost::multiprecision::cpp_int(std::string(digits.empty() ? "0" : digits));
}

boost::multiprecision::cpp_int pow10(long exponent) {
    boost::multiprecision::cpp_int result = 1;
    for (long i = 0; i < exponent; ++i) result *= 10;
    return result;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
    bool negative = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 4)
            throw InvalidArgument("malformed number '" + std::string(original) + "'");
        exponent = std::stol(std::string(exp_part));
        if (exp_negative) exponent = -exponent;
        text = text.substr(0, e);
    }
    std::string_view int_part = text;
    std::string_view frac_part;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        int_part = text.substr(0, dot);
        frac_part = text.substr(dot + 1);
    }
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)))
        throw InvalidArgument("malformed number '" + std::string(original) + "'");

    const boost::multiprecision::cpp_int digits = decimal_int(std::string(int_part) + std::string(frac_part));
    exponent -= static_cast<long>(frac_part.size());
    Rational value = exponent >= 0 ? Rational(digits * pow10(exponent)) : Rational(digits, pow10(-exponent));
    return negative ? Rational(-value) : value;
}

} // namespace

Rational parse_rational(std::string_view text) {
    if (text.empty()) throw InvalidArgument("empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::string_view num = text.substr(0, slash);
        std::string_view den = text.substr(slash + 1);
        std::string_view num_digits = num;
        if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) num_digits.remove_prefix(1);
        if (!all_digits(num_digits) || !all_digits(den))
            throw InvalidArgument("malformed fraction '" + std::string(text) + "'");
        const boost::multiprecision::cpp_int d = decimal_int(den);
        if (d == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
        boost::multiprecision::cpp_int n = decimal_int(num_digits);
        if (!num.empty() && num.front() == '-') n = -n;
        return Rational(n, d);
    }
    return parse_decimal(text, text);
}

std::string to_string(const Rational& value) {
    if (denominator(value) == 1) return numerator(value).str();
    return numerator(value).str() + "/" + denominator(value).str();
}

std::vector<std::size_t> rref(RationalMatrix& m, std::size_t columns) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < columns && row < m.size(); ++col) {
        std::size_t sel = row;
        while (sel < m.size() && m[sel][col] == 0) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        const Rational inv = 1 / m[row][col];
        for (auto& x : m[row]) x *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            const Rational factor = m[r][col];
            for (std::size_t c = col; c < columns; ++c) m[r][c] -= factor * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

std::size_t rank(RationalMatrix matrix, std::size_t columns) {
    return rref(matrix, columns).size();
}

RationalMatrix kernel_basis(const RationalMatrix& matrix, std::size_t columns) {
    RationalMatrix reduced = matrix;
    const auto pivots = rref(reduced, columns);
    std::vector<bool> is_pivot(columns, false);
    for (auto p : pivots) is_pivot[p] = true;

    RationalMatrix basis;
    for (std::size_t free = 0; free < columns; ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(columns, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -reduced[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

RationalVector normalize_integer_row(const RationalVector& row) {
    using boost::multiprecision::cpp_int;
    cpp_int lcm_den = 1;
    for (const auto& x : row) {
        if (x == 0) continue;
        lcm_den = boost::multiprecision::lcm(lcm_den, denominator(x));
    }
    cpp_int g = 0;
    for (const auto& x : row) {
        if (x == 0) continue;
        cpp_int scaled = numerator(x) * (lcm_den / denominator(x));
        g = boost::multiprecision::gcd(g, abs(scaled));
    }
    if (g == 0) return row;
    RationalVector out(row.size());
    int sign = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] == 0) {
            out[i] = 0;
            continue;
        }
        if (sign == 0) sign = row[i] > 0 ? 1 : -1;
        out[i] = Rational(numerator(row[i]) * (lcm_den / denominator(row[i])) / g) * sign;
    }
    return out;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b, std::size_t b_columns) {
    RationalMatrix out(a.size(), RationalVector(b_columns, Rational(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < b_columns; ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

RationalMatrix transpose(const RationalMatrix& a, std::size_t columns) {
    RationalMatrix out(columns, RationalVector(a.size(), Rational(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < columns; ++j) out[j][i] = a[i][j];
    return out;
}

Eigen::MatrixXd to_eigen(const RationalMatrix& matrix, std::size_t columns) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(matrix.size()), static_cast<Eigen::Index>(columns));
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t j = 0; j < columns; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = matrix[i][j].convert_to<double>();
    return out;
}

} // namespace crn
