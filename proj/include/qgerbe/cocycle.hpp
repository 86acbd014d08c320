// Gerbe 2-cocycle assembled from trivialisations, the six-propagator g~,
// piecewise-classical loops through a common midpoint, and the split of such
// a loop into three lobes.
#pragma once

#include <qgerbe/cech.hpp>
#include <qgerbe/cover.hpp>
#include <qgerbe/errors.hpp>
#include <qgerbe/kernels.hpp>
#include <qgerbe/trivialisation.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace qgerbe {

/// tau on an ordered chart pair; must satisfy tau(j,i) = tau(i,j)^-1.
using PairEvaluator = std::function<U1Value(int, int, const Point&)>;

/// Wraps a function defined on sorted pairs i < j into an antisymmetric evaluator.
inline PairEvaluator antisymmetric(std::function<U1Value(int, int, const Point&)> sorted)
{
    return [f = std::move(sorted)](int i, int j, const Point& p) {
        if (i == j)
            throw DomainError("trivialisation needs two distinct charts");
        return i < j ? f(i, j, p) : f(j, i, p).inverse();
    };
}

/// g_{abc}(q) = tau_ab(q) tau_bc(q) tau_ca(q) at a point of the triple overlap.
inline U1Value two_cocycle(const Cover& cover, const Labels& triple, const PairEvaluator& tau, const Point& q123)
{
    if (triple.size() != 3)
        throw DomainError("two_cocycle needs three chart labels");
    Labels sorted = triple;
    sort_with_parity(sorted);
    if (!overlap(cover, sorted).contains(q123))
        throw DomainError("midpoint lies outside the triple overlap " + labels_to_string(sorted));
    const int a = triple[0], b = triple[1], c = triple[2];
    return tau(a, b, q123) * tau(b, c, q123) * tau(c, a, q123);
}

/// Degree-2 cochain g on every nonempty triple overlap at the cloud points.
inline U1Cochain gerbe_cochain(const Cover& cover, const std::vector<Point>& cloud, const PairEvaluator& tau)
{
    return U1Cochain::from_function(cover, 2, cloud, [&](const Labels& l, const Point& p) {
        return two_cocycle(cover, l, tau, p);
    });
}

namespace detail {

inline const std::array<const char*, 9>& loop_time_names()
{
    static const std::array<const char*, 9> names = {"t_a1", "t_123", "t_a2", "t'_a2", "t'_123",
                                                     "t_a3", "t'_a3", "t''_123", "t'_a1"};
    return names;
}

inline void check_loop_times(const std::array<double, 9>& t)
{
    const auto& n = loop_time_names();
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(t[i + 1]))
            throw TimeOrderError("loop times must be finite");
        if (!(t[i] < t[i + 1]))
            throw TimeOrderError(std::string("time ordering violated: ") + n[i] + " < " + n[i + 1] + " fails (" +
                                 std::to_string(t[i]) + " vs " + std::to_string(t[i + 1]) + ")");
    }
}

} // namespace detail

/// Nine event times of the three trivialisations in g~, in chain order.
inline std::array<double, 9> chain_times(const std::array<TrivParams, 3>& tp)
{
    return {tp[0].t1, tp[0].t12, tp[0].t2, tp[1].t1, tp[1].t12, tp[1].t2, tp[2].t1, tp[2].t12, tp[2].t2};
}

struct GTildeResult {
    cplx value;
    U1Value phase;
    std::array<TrivResult, 3> factors;
};

/// Six-propagator amplitude: a product of three tau~ double integrals, all
/// meeting at q123. The kernels must agree and the nine times must be
/// strictly increasing.
inline GTildeResult g_tilde_numeric(const std::array<TrivParams, 3>& tp, const Point& q123,
                                    const QuadratureSpec& quad = {})
{
    for (int k = 1; k < 3; ++k) {
        const auto &a = tp[0].kernel, &b = tp[k].kernel;
        if (a.kind != b.kind || a.mass != b.mass || a.hbar != b.hbar || a.dim != b.dim || a.force != b.force ||
            a.omega != b.omega)
            throw DomainError("g~ needs one kernel shared by all three trivialisations");
    }
    detail::check_loop_times(chain_times(tp));
    GTildeResult r;
    r.value = cplx{1.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        r.factors[k] = tau_numeric(tp[k], q123, quad);
        r.value *= r.factors[k].tau_tilde_modulus * r.factors[k].tau.value();
    }
    r.phase = U1Value::normalize(r.value);
    return r;
}

/// Closed loop a1 -> 123 -> a2 -> 123 -> a3 -> 123 -> a1 made of six classical
/// segments. `times` holds (t_a1, t_123, t_a2, t'_a2, t'_123, t_a3, t'_a3,
/// t''_123, t'_a1).
struct LoopSpec {
    KernelParams kernel;
    std::array<Point, 3> anchors;
    Point midpoint;
    std::array<double, 9> times{};

    void validate() const
    {
        kernel.validate();
        const auto d = static_cast<std::size_t>(kernel.dim);
        for (const auto& a : anchors)
            if (a.size() != d)
                throw DomainError("anchor dimension does not match the kernel");
        if (midpoint.size() != d)
            throw DomainError("midpoint dimension does not match the kernel");
        detail::check_loop_times(times);
    }

    /// Segment endpoints in traversal order.
    std::array<std::pair<SpacetimePoint, SpacetimePoint>, 6> segments() const
    {
        const auto& t = times;
        const Point& m = midpoint;
        return {{{{anchors[0], t[0]}, {m, t[1]}},
                 {{m, t[1]}, {anchors[1], t[2]}},
                 {{anchors[1], t[3]}, {m, t[4]}},
                 {{m, t[4]}, {anchors[2], t[5]}},
                 {{anchors[2], t[6]}, {m, t[7]}},
                 {{m, t[7]}, {anchors[0], t[8]}}}};
    }

    /// Same loop started at the second anchor. The first pair of segments is
    /// moved to the end, delayed so it starts `dwell` after the old final time.
    LoopSpec rotated(double dwell = 1.0) const
    {
        if (!(dwell > 0.0))
            throw DomainError("dwell must be positive");
        LoopSpec r = *this;
        r.anchors = {anchors[1], anchors[2], anchors[0]};
        const double shift = times[8] + dwell - times[0];
        r.times = {times[3], times[4], times[5], times[6], times[7], times[8],
                   times[0] + shift, times[1] + shift, times[2] + shift};
        return r;
    }
};

struct LoopAction {
    double S_loop = 0.0;
    std::array<double, 6> segment_actions{};
    U1Value g;
};

inline LoopAction loop_action(const LoopSpec& loop)
{
    loop.validate();
    LoopAction r;
    const auto segs = loop.segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        r.segment_actions[k] = classical_action(loop.kernel, segs[k].first, segs[k].second);
        r.S_loop += r.segment_actions[k];
    }
    r.g = U1Value::from_phase(r.S_loop / loop.kernel.hbar);
    return r;
}

/// g = exp(i S_loop / hbar) on the extremal piecewise-classical loop.
inline U1Value steepest_descent_cocycle(const LoopSpec& loop)
{
    return loop_action(loop).g;
}

/// Moves every anchor to the stationary point of S_loop, the midpoint and
/// times fixed. S_loop is quadratic in each anchor coordinate, so a
/// three-point fit is exact. Zero or negative curvature is a DomainError.
inline LoopSpec extremize_anchors(LoopSpec loop)
{
    loop.validate();
    for (std::size_t a = 0; a < 3; ++a)
        for (int i = 0; i < loop.kernel.dim; ++i) {
            const double x = loop.anchors[a][i];
            const double h = std::max(1.0, std::abs(x));
            auto at = [&](double v) {
                LoopSpec l = loop;
                l.anchors[a][i] = v;
                return loop_action(l).S_loop;
            };
            const double sm = at(x - h), s0 = at(x), sp = at(x + h);
            const double curv = (sp - 2.0 * s0 + sm) / (h * h);
            if (!(curv > 0.0))
                throw DomainError("loop action has no minimum in anchor " + std::to_string(a + 1));
            loop.anchors[a][i] = x - (sp - sm) / (2.0 * h) / curv;
        }
    return loop;
}

/// Closed polyline through configuration space: the six classical segments,
/// each sampled with `per_segment` >= 2 vertices. First and last vertex are
/// both the first anchor.
inline std::vector<Point> loop_polyline(const LoopSpec& loop, std::size_t per_segment)
{
    loop.validate();
    std::vector<Point> out;
    for (const auto& [a, b] : loop.segments()) {
        const auto path = classical_path(loop.kernel, a, b, per_segment);
        for (std::size_t k = out.empty() ? 0 : 1; k < path.size(); ++k)
            out.push_back(path[k].q);
    }
    return out;
}

/// Three closed sub-loops, each starting and ending at the midpoint.
struct LobeDecomposition {
    std::array<std::vector<Point>, 3> lobes;
    /// Vertex index of each midpoint visit in the input polyline.
    std::array<std::size_t, 3> visits{};
};

namespace detail {

inline bool same_point(const Point& a, const Point& b, double tol)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol)
            return false;
    return true;
}

} // namespace detail

/// Splits a closed polyline (first vertex == last vertex) at its three
/// visits of `midpoint`.
inline LobeDecomposition decompose_loop(const std::vector<Point>& loop, const Point& midpoint, double tol = 1e-12)
{
    if (loop.size() < 4 || !detail::same_point(loop.front(), loop.back(), tol))
        throw DomainError("loop must be a closed polyline");
    const std::size_t n = loop.size() - 1; // distinct vertices
    std::vector<std::size_t> visits;
    for (std::size_t k = 0; k < n; ++k)
        if (detail::same_point(loop[k], midpoint, tol))
            visits.push_back(k);
    if (visits.size() != 3)
        throw DomainError("loop visits the midpoint " + std::to_string(visits.size()) + " times, expected 3");
    LobeDecomposition r;
    for (std::size_t j = 0; j < 3; ++j) {
        r.visits[j] = visits[j];
        const std::size_t from = visits[j];
        const std::size_t to = j + 1 < 3 ? visits[j + 1] : visits[0] + n;
        for (std::size_t k = from; k <= to; ++k)
            r.lobes[j].push_back(loop[k % n]);
    }
    return r;
}

/// Signed shoelace area of a closed polyline projected to axes (i, j).
inline double shoelace_area(const std::vector<Point>& loop, std::size_t i = 0, std::size_t j = 1)
{
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < loop.size(); ++k)
        s += loop[k].at(i) * loop[k + 1].at(j) - loop[k + 1].at(i) * loop[k].at(j);
    return 0.5 * s;
}

/// Directed edges of a closed polyline, for comparing chains.
inline std::vector<std::pair<Point, Point>> chain_edges(const std::vector<Point>& loop)
{
    std::vector<std::pair<Point, Point>> e;
    for (std::size_t k = 0; k + 1 < loop.size(); ++k)
        e.emplace_back(loop[k], loop[k + 1]);
    return e;
}

} // namespace qgerbe
