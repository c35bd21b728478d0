#include "crn/entropy.hpp"

#include <cmath>

#include "crn/errors.hpp"

namespace crn {

double psi(double x, double y) {
    if (x < 0 || y < 0 || std::isnan(x) || std::isnan(y)) throw InvalidArgument("psi requires nonnegative arguments");
    if (x == 0) return y;
    if (y == 0) return std::numeric_limits<double>::infinity();
    return x * std::log(x / y) - x + y;
}

double phi(double z) {
    if (z < 0 || std::isnan(z)) throw InvalidArgument("phi requires z >= 0");
    if (z == 0) return 1.0;
    const double e = z - 1.0;
    if (std::abs(e) < 1e-4) return 2.0 + e / 3.0 - e * e / 8.0;
    const double s = std::sqrt(z) - 1.0;
    return (z * std::log(z) - z + 1.0) / (s * s);
}

SpatialField::SpatialField(std::size_t num_species, std::size_t num_cells)
    : values_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_species), static_cast<Eigen::Index>(num_cells))) {
    if (num_cells == 0) throw InvalidArgument("field needs at least one cell");
}

SpatialField::SpatialField(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.cols() == 0) throw InvalidArgument("field needs at least one cell");
    if ((values_.array() < 0).any() || !values_.allFinite())
        throw InvalidArgument("field values must be finite and nonnegative");
}

SpatialField SpatialField::constant(const Eigen::VectorXd& c, std::size_t num_cells) {
    if (num_cells == 0) throw InvalidArgument("field needs at least one cell");
    return SpatialField(Eigen::MatrixXd(c.replicate(1, static_cast<Eigen::Index>(num_cells))));
}

namespace {

double entropy_density(double c, double ref) {
    if (c == 0) return ref;
    return c * std::log(c / ref) - c + ref;
}

void check_reference(const Eigen::VectorXd& ref, Eigen::Index n) {
    if (ref.size() != n) throw InvalidArgument("reference state has wrong dimension");
    if (!(ref.array() > 0).all()) throw InvalidArgument("reference state must be strictly positive");
}

} // namespace

double relative_entropy(const SpatialField& c, const Eigen::VectorXd& ref) {
    const Eigen::MatrixXd& v = c.values();
    check_reference(ref, v.rows());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < v.cols(); ++j) row += entropy_density(v(i, j), ref[i]);
        sum += row;
    }
    return sum * c.h();
}

double relative_entropy(const Eigen::VectorXd& c, const Eigen::VectorXd& ref) {
    check_reference(ref, c.size());
    if ((c.array() < 0).any()) throw InvalidArgument("negative concentration");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) sum += entropy_density(c[i], ref[i]);
    return sum;
}

Dissipation entropy_dissipation(const Network& net, const SpatialField& c, const Eigen::VectorXd& c_inf) {
    const Eigen::MatrixXd& v = c.values();
    const auto n = static_cast<Eigen::Index>(net.num_species());
    if (v.rows() != n) throw InvalidArgument("field has wrong number of species");
    check_reference(c_inf, n);
    const double inf = std::numeric_limits<double>::infinity();
    const double h = c.h();

    Dissipation d;
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j + 1 < v.cols(); ++j) {
            const double a = v(i, j), b = v(i, j + 1);
            if (a == b) continue;
            if (a == 0 || b == 0) {
                sum = inf;
                break;
            }
            sum += (b - a) * (std::log(b) - std::log(a));
        }
        d.diffusion += net.diffusion()[i] * sum / h;
    }

    std::vector<double> eq_monomial(net.num_complexes());
    for (std::size_t y = 0; y < net.num_complexes(); ++y) eq_monomial[y] = net.monomial(y, c_inf);
    Eigen::VectorXd cell(n);
    std::vector<double> ratio(net.num_complexes());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        cell = v.col(j);
        for (std::size_t y = 0; y < net.num_complexes(); ++y) ratio[y] = net.monomial(y, cell) / eq_monomial[y];
        for (const auto& r : net.reactions())
            d.reaction += r.rate * eq_monomial[r.reactant] * psi(ratio[r.reactant], ratio[r.product]) * h;
    }
    return d;
}

EntropyReport entropy_report(const Network& net, const SpatialField& c, const Eigen::VectorXd& c_inf) {
    EntropyReport rep;
    const Eigen::VectorXd avg = c.averages();
    rep.total = relative_entropy(c, c_inf);
    rep.average_part = relative_entropy(avg, c_inf);
    rep.spatial_part = (avg.array() > 0).all() ? relative_entropy(c, avg) : 0.0;
    rep.dissipation = entropy_dissipation(net, c, c_inf);
    return rep;
}

CkpCheck ckp_bound(const SpatialField& c, const Eigen::VectorXd& c_inf, const MassVector& mass, double mass_tol) {
    const Eigen::MatrixXd& v = c.values();
    check_reference(c_inf, v.rows());
    if (mass.q.cols() != v.rows()) throw InvalidArgument("mass vector does not match the field");
    const Eigen::VectorXd avg = c.averages();
    if (mass.values.size() > 0) {
        const double scale = std::max(1.0, mass.values.cwiseAbs().maxCoeff());
        const double err = (mass.q * avg - mass.values).cwiseAbs().maxCoeff();
        if (err > mass_tol * scale) throw InvalidArgument("field violates the mass constraint");
    }

    CkpCheck out;
    out.constant = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        out.constant = std::min(out.constant, 1.0 / (2.0 * (avg[i] + 2.0 * c_inf[i])));
        const double l1 = (v.row(i).array() - c_inf[i]).abs().sum() * c.h();
        out.l1_squared += l1 * l1;
    }
    out.entropy = relative_entropy(c, c_inf);
    if (out.l1_squared > 0) out.ratio = out.entropy / out.l1_squared;
    // Rounding slack for states within a few ulps of c_inf.
    out.holds = out.entropy >= out.constant * out.l1_squared - 1e-14 * (1.0 + out.entropy);
    return out;
}

} // namespace crn
