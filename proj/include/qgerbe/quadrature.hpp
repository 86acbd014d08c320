// Regularized quadrature for Fresnel-type (chirped Gaussian) integrals.
//
// Two regularizations of the conditionally convergent integral
//     I = lim_{eps->0+} \int f(x) exp(-eps (x-c)^2 / 2l^2) dx
// are provided:
//
//  * damped:  the real-line integral is computed for a ladder of damping
//             strengths eps and extrapolated to eps = 0 (Neville). The
//             integrand is sampled only on the real line.
//  * rotated: the contour is rotated through the stationary point by
//             exp(+-i pi/4), turning the chirp into a decaying Gaussian.
//             Needs the integrand analytically continued to complex x, and
//             supports nested (chain) integrals of any depth.
//
// Both locate the stationary point and the chirp rate numerically from the
// integrand's phase, so callers only supply rough center/length hints.
#pragma once

#include <qgerbe/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace qgerbe {

using cplx = std::complex<double>;

enum class Regularization { damped, rotated };

struct QuadratureSpec {
    Regularization method = Regularization::damped;
    /// Damping ladder, in units of the integrand's chirp rate (damped only).
    std::vector<double> eps{0.08, 0.04, 0.02, 0.01, 0.005};
    /// Half-width of the grid in units of the chirp length; unset = derived
    /// from the truncation exponent.
    std::optional<double> half_width;
    /// Fixed node count per integration variable; 0 = automatic.
    std::size_t nodes = 0;
    /// Upper bound on automatically chosen node counts.
    std::size_t max_nodes = std::size_t{1} << 18;
    /// The integrand envelope is cut where it has decayed by exp(-truncation).
    double truncation = 37.0;

    void validate() const
    {
        if (half_width && !(*half_width > 0.0))
            throw QuadratureError("quadrature domain has zero width");
        if (method == Regularization::damped) {
            if (eps.empty())
                throw QuadratureError("damped quadrature needs at least one eps value");
            for (double e : eps)
                if (!(e > 0.0))
                    throw QuadratureError("eps values must be positive");
            for (std::size_t i = 0; i < eps.size(); ++i)
                for (std::size_t j = i + 1; j < eps.size(); ++j)
                    if (eps[i] == eps[j])
                        throw QuadratureError("eps values must be distinct");
        }
        if (nodes == 1)
            throw QuadratureError("a quadrature grid needs at least two nodes");
        if (!(truncation > 0.0))
            throw QuadratureError("truncation exponent must be positive");
    }
};

inline QuadratureSpec rotated_quadrature()
{
    QuadratureSpec q;
    q.method = Regularization::rotated;
    return q;
}

namespace detail {

/// Dense symmetric solve / Cholesky helpers for the small Hessians we meet.
inline std::vector<double> solve(std::vector<double> a, std::vector<double> b, std::size_t n)
{
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c]))
                piv = r;
        if (a[piv * n + c] == 0.0)
            throw QuadratureError("singular stationary-phase Hessian");
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k)
                std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k)
                a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    return x;
}

inline bool positive_definite(const std::vector<double>& a, std::size_t n)
{
    std::vector<double> l(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (!(s > 0.0))
                    return false;
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    return true;
}

inline std::vector<double> inverse(const std::vector<double>& a, std::size_t n)
{
    std::vector<double> inv(n * n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        auto col = solve(a, e, n);
        for (std::size_t r = 0; r < n; ++r)
            inv[r * n + c] = col[r];
    }
    return inv;
}

/// Phase difference arg(F(y)) - arg(F(x)) without branch ambiguity for
/// nearby x, y. Supplied by the caller as a sum of per-factor ratios.
using PhaseDiff = std::function<double(const std::vector<double>& x, const std::vector<double>& y)>;

struct Stationary {
    std::vector<double> point;
    std::vector<double> hessian; // row-major n x n
};

/// Newton iteration for grad(phase) = 0 using central differences. Exact in
/// one step for quadratic phases; a second step polishes rounding.
inline Stationary stationary_point(const PhaseDiff& dphi, std::vector<double> x, double scale)
{
    const std::size_t n = x.size();
    const double h = 1e-3 * scale;
    Stationary st;
    for (int iter = 0; iter < 3; ++iter) {
        std::vector<double> g(n), hess(n * n);
        auto shifted = [&](std::size_t i, double si, std::size_t j, double sj) {
            std::vector<double> y = x;
            y[i] += si;
            y[j] += sj;
            return y;
        };
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = dphi(xm, xp) / (2 * h);
            hess[i * n + i] = (dphi(x, xp) + dphi(x, xm)) / (h * h);
            for (std::size_t j = 0; j < i; ++j) {
                const double v = (dphi(x, shifted(i, h, j, h)) - dphi(x, shifted(i, h, j, -h)) -
                                  dphi(x, shifted(i, -h, j, h)) + dphi(x, shifted(i, -h, j, -h))) /
                                 (4 * h * h);
                hess[i * n + j] = hess[j * n + i] = v;
            }
        }
        double hmax = 0.0;
        for (double v : hess)
            hmax = std::max(hmax, std::abs(v));
        if (!(hmax * scale * scale > 1e-10))
            throw QuadratureError("integrand has no quadratic phase; oscillatory integral does not converge");
        for (double& v : g)
            v = -v;
        const auto step = solve(hess, g, n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] += step[i];
        st.hessian = std::move(hess);
    }
    st.point = x;
    return st;
}

} // namespace detail

/// Polynomial extrapolation of values(eps) to eps = 0 (Neville's scheme).
inline cplx extrapolate_to_zero(const std::vector<double>& eps, const std::vector<cplx>& values)
{
    if (eps.size() != values.size() || eps.empty())
        throw QuadratureError("extrapolation needs matching, nonempty eps/value lists");
    std::vector<cplx> p = values;
    const std::size_t n = eps.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            p[i] = (eps[i + m] * p[i] - eps[i] * p[i + 1]) / (eps[i + m] - eps[i]);
    return p[0];
}

struct ChirpEstimate {
    double center = 0.0;    ///< stationary point of the phase
    double curvature = 0.0; ///< second derivative of the phase there
    double length() const { return 1.0 / std::sqrt(std::abs(curvature)); }
};

/// Stationary point and chirp rate of a real-line integrand.
inline ChirpEstimate estimate_chirp(const std::function<cplx(double)>& f, double center_hint, double scale_hint)
{
    detail::PhaseDiff dphi = [&](const std::vector<double>& x, const std::vector<double>& y) {
        return std::arg(f(y[0]) / f(x[0]));
    };
    auto st = detail::stationary_point(dphi, {center_hint}, scale_hint);
    return {st.point[0], st.hessian[0]};
}

/// iε-regularized real-line integral with extrapolation in the damping.
inline cplx integrate_damped(const std::function<cplx(double)>& f, const QuadratureSpec& spec,
                             double center_hint, double scale_hint)
{
    spec.validate();
    const ChirpEstimate chirp = estimate_chirp(f, center_hint, scale_hint);
    const double ell = chirp.length();
    std::vector<cplx> values;
    values.reserve(spec.eps.size());
    for (double eps : spec.eps) {
        const double r = spec.half_width ? *spec.half_width : std::sqrt(2.0 * spec.truncation / eps);
        // |FT| of the damped chirp at frequency k decays like exp(-k^2 eps / 2(1+eps^2))
        const double h_needed =
            0.9 * 2.0 * std::numbers::pi * std::sqrt(eps / (2.0 * spec.truncation * (1.0 + eps * eps)));
        std::size_t n;
        if (spec.nodes > 0) {
            n = spec.nodes;
            if (2.0 * r / static_cast<double>(n - 1) > h_needed)
                throw QuadratureError("oscillation estimate exceeds node budget: need " +
                                      std::to_string(static_cast<std::size_t>(std::ceil(2.0 * r / h_needed)) + 1) +
                                      " nodes, have " + std::to_string(n));
        } else {
            n = static_cast<std::size_t>(std::ceil(2.0 * r / h_needed)) + 1;
            if (n > spec.max_nodes)
                throw QuadratureError("oscillation estimate exceeds node budget (" + std::to_string(n) + " > " +
                                      std::to_string(spec.max_nodes) + ")");
        }
        const double h = 2.0 * r / static_cast<double>(n - 1);
        cplx sum{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double u = -r + h * static_cast<double>(j);
            const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
            sum += w * std::exp(-0.5 * eps * u * u) * f(chirp.center + ell * u);
        }
        values.push_back(sum * h * ell);
    }
    return extrapolate_to_zero(spec.eps, values);
}

/// Link factor of a chain integral: link(k, x_k, x_{k+1}).
using ChainLink = std::function<cplx(std::size_t k, cplx x, cplx y)>;

/// \int dx_1..dx_n  prod_{k=0..n} link(k, x_k, x_{k+1}),  x_0 = first, x_{n+1} = last,
/// evaluated on the contour rotated through the joint stationary point.
/// `guess` seeds the stationary-point search; `scale` is a typical length.
inline cplx integrate_chain_rotated(const ChainLink& link, double first, double last, std::vector<double> guess,
                                    double scale, const QuadratureSpec& spec)
{
    spec.validate();
    const std::size_t n = guess.size();
    if (n == 0)
        throw QuadratureError("chain integral needs at least one integration variable");
    auto at = [&](const std::vector<double>& x, std::size_t k) { return k == 0 ? first : (k == n + 1 ? last : x[k - 1]); };
    detail::PhaseDiff dphi = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t k = 0; k <= n; ++k)
            s += std::arg(link(k, at(y, k), at(y, k + 1)) / link(k, at(x, k), at(x, k + 1)));
        return s;
    };
    const auto st = detail::stationary_point(dphi, std::move(guess), scale);

    std::vector<double> env = st.hessian;
    double theta;
    if (detail::positive_definite(env, n)) {
        theta = std::numbers::pi / 4;
    } else {
        for (double& v : env)
            v = -v;
        if (!detail::positive_definite(env, n))
            throw QuadratureError("indefinite stationary-phase Hessian: contour rotation not applicable");
        theta = -std::numbers::pi / 4;
    }
    const auto cov = detail::inverse(env, n);
    double lam = 0.0; // Gershgorin bound on the largest envelope eigenvalue
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += std::abs(env[i * n + j]);
        lam = std::max(lam, s);
    }
    const double h_needed = 0.9 * 2.0 * std::numbers::pi / std::sqrt(2.0 * spec.truncation * lam);
    const cplx rot = std::polar(1.0, theta);

    std::vector<std::vector<cplx>> grid(n);
    std::vector<std::vector<double>> weight(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double sigma = std::sqrt(cov[k * n + k]);
        const double r = spec.half_width ? *spec.half_width * sigma : std::sqrt(2.0 * spec.truncation) * sigma;
        std::size_t m;
        if (spec.nodes > 0) {
            m = spec.nodes;
            if (2.0 * r / static_cast<double>(m - 1) > h_needed)
                throw QuadratureError("oscillation estimate exceeds node budget in chain variable " + std::to_string(k));
        } else {
            m = static_cast<std::size_t>(std::ceil(2.0 * r / h_needed)) + 1;
            if (m > spec.max_nodes)
                throw QuadratureError("oscillation estimate exceeds node budget in chain variable " + std::to_string(k));
        }
        const double h = 2.0 * r / static_cast<double>(m - 1);
        grid[k].resize(m);
        weight[k].resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            grid[k][j] = st.point[k] + rot * (-r + h * static_cast<double>(j));
            weight[k][j] = ((j == 0 || j + 1 == m) ? 0.5 : 1.0) * h;
        }
    }

    std::vector<cplx> v(grid[0].size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = link(0, first, grid[0][j]) * weight[0][j] * rot;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<cplx> next(grid[k].size(), cplx{0.0, 0.0});
        for (std::size_t m = 0; m < next.size(); ++m) {
            cplx s{0.0, 0.0};
            for (std::size_t j = 0; j < v.size(); ++j)
                s += v[j] * link(k, grid[k - 1][j], grid[k][m]);
            next[m] = s * weight[k][m] * rot;
        }
        v = std::move(next);
    }
    cplx total{0.0, 0.0};
    for (std::size_t j = 0; j < v.size(); ++j)
        total += v[j] * link(n, grid[n - 1][j], last);
    return total;
}

/// Single-variable integral through the rotated contour; `f` must accept complex x.
inline cplx integrate_rotated(const std::function<cplx(cplx)>& f, const QuadratureSpec& spec, double center_hint,
                              double scale_hint)
{
    ChainLink link = [&](std::size_t k, cplx, cplx y) { return k == 0 ? f(y) : cplx{1.0, 0.0}; };
    return integrate_chain_rotated(link, 0.0, 0.0, {center_hint}, scale_hint, spec);
}

/// Gauss-Legendre nodes/weights on [-1, 1].
inline void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                const double kd = static_cast<double>(k);
                p0 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p2) / kd;
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15)
                break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

/// Proper integral over [lo, hi]: composite 16-point Gauss-Legendre, panels
/// doubled until successive results agree to `tol` (relative).
inline cplx integrate_interval(const std::function<cplx(double)>& f, double lo, double hi, double tol = 1e-12,
                               std::size_t max_panels = std::size_t{1} << 16)
{
    if (!(hi > lo))
        throw QuadratureError("quadrature domain has zero width");
    std::vector<double> gx, gw;
    gauss_legendre(16, gx, gw);
    auto rule = [&](std::size_t panels) {
        cplx s{0.0, 0.0};
        const double w = (hi - lo) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = lo + w * static_cast<double>(p);
            for (std::size_t i = 0; i < gx.size(); ++i)
                s += gw[i] * f(a + 0.5 * w * (gx[i] + 1.0));
        }
        return s * 0.5 * w;
    };
    cplx prev = rule(4);
    for (std::size_t panels = 8; panels <= max_panels; panels *= 2) {
        const cplx cur = rule(panels);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur)))
            return cur;
        prev = cur;
    }
    throw QuadratureError("finite-interval quadrature did not converge");
}

} // namespace qgerbe
