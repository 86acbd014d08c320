// U(1)-valued Cech cochains sampled at points of a box cover, the
// multiplicative coboundary, and the bundle / gerbe cocycle verifiers.
//
// Cochains are stored under sorted label tuples. Reading at a permuted tuple
// returns the stored value or its inverse according to the permutation
// parity (the standard alternating convention, used for every degree).
#pragma once

#include <qgerbe/cover.hpp>
#include <qgerbe/errors.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qgerbe {

using cplx = std::complex<double>;

/// Unit-modulus complex number.
class U1Value {
public:
    static constexpr double modulus_tolerance = 1e-12;

    U1Value() = default;

    explicit U1Value(cplx z) : z_(z)
    {
        if (!(std::abs(std::abs(z) - 1.0) <= modulus_tolerance))
            throw DomainError("U(1) value must have unit modulus, got |z| = " + std::to_string(std::abs(z)));
    }

    static U1Value from_phase(double phase) { return U1Value(std::polar(1.0, phase)); }

    /// z / |z|; throws VanishingModulusError for |z| below `floor`.
    static U1Value normalize(cplx z, double floor = 1e-300)
    {
        const double r = std::abs(z);
        if (!(r > floor))
            throw VanishingModulusError("cannot normalize a vanishing complex number");
        U1Value u;
        u.z_ = z / r;
        return u;
    }

    cplx value() const { return z_; }
    double phase() const { return std::arg(z_); }
    U1Value inverse() const
    {
        U1Value u;
        u.z_ = std::conj(z_);
        return u;
    }

    friend U1Value operator*(U1Value a, U1Value b)
    {
        U1Value u;
        u.z_ = a.z_ * b.z_;
        // keep rounding drift from accumulating in long products
        u.z_ /= std::abs(u.z_);
        return u;
    }

private:
    cplx z_{1.0, 0.0};
};

/// Sorts `labels` in place; returns +1 for an even permutation, -1 for odd.
/// Repeated labels are a DomainError.
inline int sort_with_parity(Labels& labels)
{
    int parity = 1;
    for (std::size_t i = 1; i < labels.size(); ++i)
        for (std::size_t j = i; j > 0 && labels[j - 1] > labels[j]; --j) {
            std::swap(labels[j - 1], labels[j]);
            parity = -parity;
        }
    for (std::size_t i = 1; i < labels.size(); ++i)
        if (labels[i] == labels[i - 1])
            throw DomainError("repeated chart label in cochain index");
    return parity;
}

inline std::string labels_to_string(const Labels& l)
{
    std::string s = "(";
    for (std::size_t i = 0; i < l.size(); ++i)
        s += (i ? "," : "") + std::to_string(l[i]);
    return s + ")";
}

class U1Cochain {
public:
    using PointMap = std::map<Point, U1Value>;

    U1Cochain(Cover cover, int degree) : cover_(std::move(cover)), degree_(degree)
    {
        if (degree_ < 0)
            throw DomainError("cochain degree must be nonnegative");
    }

    int degree() const { return degree_; }
    const Cover& cover() const { return cover_; }
    const std::map<Labels, PointMap>& data() const { return data_; }

    std::size_t size() const
    {
        std::size_t n = 0;
        for (const auto& [_, pts] : data_)
            n += pts.size();
        return n;
    }

    /// Store a value at `labels` (any order) and point `p` inside their overlap.
    void set(Labels labels, const Point& p, U1Value v)
    {
        check_arity(labels);
        const int parity = sort_with_parity(labels);
        const OverlapRegion r = cover_.region(labels);
        if (r.empty)
            throw DomainError("overlap " + labels_to_string(labels) + " is empty");
        if (!r.contains(p))
            throw DomainError("sample point lies outside overlap " + labels_to_string(labels));
        data_[labels][p] = parity > 0 ? v : v.inverse();
    }

    bool contains(Labels labels, const Point& p) const
    {
        sort_with_parity(labels);
        auto it = data_.find(labels);
        return it != data_.end() && it->second.count(p) > 0;
    }

    /// Value at permuted labels; odd permutations return the inverse.
    U1Value at(Labels labels, const Point& p) const
    {
        check_arity(labels);
        const Labels original = labels;
        const int parity = sort_with_parity(labels);
        auto it = data_.find(labels);
        if (it != data_.end()) {
            auto jt = it->second.find(p);
            if (jt != it->second.end())
                return parity > 0 ? jt->second : jt->second.inverse();
        }
        throw IncompleteDataError("cochain has no entry for " + labels_to_string(original) + " at requested point");
    }

    /// Points stored under the sorted tuple `labels` (empty when absent).
    std::vector<Point> points(Labels labels) const
    {
        sort_with_parity(labels);
        std::vector<Point> out;
        auto it = data_.find(labels);
        if (it != data_.end())
            for (const auto& [p, _] : it->second)
                out.push_back(p);
        return out;
    }

    /// Every cloud point inside a nonempty (degree+1)-fold overlap receives fn(labels, p).
    static U1Cochain from_function(const Cover& cover, int degree, const std::vector<Point>& cloud,
                                   const std::function<U1Value(const Labels&, const Point&)>& fn)
    {
        U1Cochain c(cover, degree);
        for (const auto& subset : label_subsets(cover.labels(), static_cast<std::size_t>(degree) + 1)) {
            const OverlapRegion r = cover.region(subset);
            if (r.empty)
                continue;
            for (const auto& p : cloud)
                if (r.contains(p))
                    c.data_[subset][p] = fn(subset, p);
        }
        return c;
    }

    static U1Cochain constant(const Cover& cover, int degree, const std::vector<Point>& cloud, U1Value v = {})
    {
        return from_function(cover, degree, cloud, [v](const Labels&, const Point&) { return v; });
    }

private:
    void check_arity(const Labels& labels) const
    {
        if (labels.size() != static_cast<std::size_t>(degree_) + 1)
            throw DomainError("degree-" + std::to_string(degree_) + " cochain indexed by " +
                              std::to_string(labels.size()) + " labels");
    }

    Cover cover_;
    int degree_;
    std::map<Labels, PointMap> data_;
};

/// Multiplicative alternating coboundary:
/// (dc)_{i0..i(k+1)}(x) = prod_j c_{i0..^ij..i(k+1)}(x)^{(-1)^j}.
/// Evaluated at every stored point of a face that lies in the (k+2)-fold overlap.
inline U1Cochain coboundary(const U1Cochain& c)
{
    const Cover& cover = c.cover();
    const std::size_t arity = static_cast<std::size_t>(c.degree()) + 2;
    U1Cochain out(cover, c.degree() + 1);
    for (const auto& subset : label_subsets(cover.labels(), arity)) {
        const OverlapRegion r = cover.region(subset);
        if (r.empty)
            continue;
        std::vector<Labels> faces;
        for (std::size_t j = 0; j < arity; ++j) {
            Labels f;
            for (std::size_t i = 0; i < arity; ++i)
                if (i != j)
                    f.push_back(subset[i]);
            faces.push_back(std::move(f));
        }
        std::map<Point, bool> pts;
        for (const auto& f : faces)
            for (const auto& p : c.points(f))
                if (r.contains(p))
                    pts[p] = true;
        for (const auto& [p, _] : pts) {
            U1Value v;
            for (std::size_t j = 0; j < arity; ++j) {
                const U1Value face = c.at(faces[j], p);
                v = v * (j % 2 == 0 ? face : face.inverse());
            }
            out.set(subset, p, v);
        }
    }
    return out;
}

struct CocycleReport {
    double max_cocycle_deviation = 0.0;   ///< from the cyclic product identity
    double max_inverse_deviation = 0.0;   ///< from the transposition identities
    std::size_t checked_points = 0;
    bool pass = false;
};

/// lambda_12 lambda_23 lambda_31 = 1 on triple overlaps and lambda_21 lambda_12 = 1.
inline CocycleReport verify_line_bundle_cocycle(const U1Cochain& lambda, double tol = 1e-9)
{
    if (lambda.degree() != 1)
        throw DomainError("line bundle cocycle check needs a degree-1 cochain");
    const Cover& cover = lambda.cover();
    CocycleReport rep;
    for (const auto& [labels, pts] : lambda.data()) {
        const Labels rev{labels[1], labels[0]};
        for (const auto& [p, v] : pts) {
            const double dev = std::abs((lambda.at(rev, p) * v).value() - 1.0);
            rep.max_inverse_deviation = std::max(rep.max_inverse_deviation, dev);
        }
    }
    for (const auto& t : label_subsets(cover.labels(), 3)) {
        const OverlapRegion r = cover.region(t);
        if (r.empty)
            continue;
        std::map<Point, bool> pts;
        for (const Labels& pair : {Labels{t[0], t[1]}, Labels{t[1], t[2]}, Labels{t[0], t[2]}})
            for (const auto& p : lambda.points(pair))
                if (r.contains(p))
                    pts[p] = true;
        for (const auto& [p, _] : pts) {
            const cplx prod = lambda.at({t[0], t[1]}, p).value() * lambda.at({t[1], t[2]}, p).value() *
                              lambda.at({t[2], t[0]}, p).value();
            rep.max_cocycle_deviation = std::max(rep.max_cocycle_deviation, std::abs(prod - 1.0));
            ++rep.checked_points;
        }
    }
    rep.pass = rep.max_cocycle_deviation < tol && rep.max_inverse_deviation < tol;
    return rep;
}

/// Transposition identities g_123 = g_213^-1 = g_132^-1 = g_321^-1 and
/// g_234 g_134^-1 g_124 g_123^-1 = 1 on quadruple overlaps.
inline CocycleReport verify_gerbe_cocycle(const U1Cochain& g, double tol = 1e-9)
{
    if (g.degree() != 2)
        throw DomainError("gerbe cocycle check needs a degree-2 cochain");
    const Cover& cover = g.cover();
    CocycleReport rep;
    for (const auto& [l, pts] : g.data()) {
        const Labels swaps[3] = {{l[1], l[0], l[2]}, {l[0], l[2], l[1]}, {l[2], l[1], l[0]}};
        for (const auto& [p, v] : pts)
            for (const auto& s : swaps) {
                const double dev = std::abs((g.at(s, p) * v).value() - 1.0);
                rep.max_inverse_deviation = std::max(rep.max_inverse_deviation, dev);
            }
    }
    for (const auto& q : label_subsets(cover.labels(), 4)) {
        const OverlapRegion r = cover.region(q);
        if (r.empty)
            continue;
        const Labels f234{q[1], q[2], q[3]}, f134{q[0], q[2], q[3]}, f124{q[0], q[1], q[3]}, f123{q[0], q[1], q[2]};
        std::map<Point, bool> pts;
        for (const Labels& f : {f234, f134, f124, f123})
            for (const auto& p : g.points(f))
                if (r.contains(p))
                    pts[p] = true;
        for (const auto& [p, _] : pts) {
            const cplx prod = g.at(f234, p).value() * std::conj(g.at(f134, p).value()) * g.at(f124, p).value() *
                              std::conj(g.at(f123, p).value());
            rep.max_cocycle_deviation = std::max(rep.max_cocycle_deviation, std::abs(prod - 1.0));
            ++rep.checked_points;
        }
    }
    rep.pass = rep.max_cocycle_deviation < tol && rep.max_inverse_deviation < tol;
    return rep;
}

} // namespace qgerbe
