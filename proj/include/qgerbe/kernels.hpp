// Closed-form propagators for the free particle, the constant force and the
// isotropic harmonic oscillator, their classical actions and trajectories,
// and numerical composition (semigroup and time-sliced) of the kernels.
//
// Branch convention: every [.]^{d/2} prefactor is the d-th power of the
// principal square root, sqrt(i) = exp(i pi/4). The harmonic kernel refuses to
// evaluate within `caustic_tolerance` of sin(omega dt) = 0.
#pragma once

#include <qgerbe/errors.hpp>
#include <qgerbe/quadrature.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace qgerbe {

enum class KernelKind { free, linear, harmonic };

inline const char* to_string(KernelKind k)
{
    switch (k) {
    case KernelKind::free: return "free";
    case KernelKind::linear: return "linear";
    case KernelKind::harmonic: return "harmonic";
    }
    return "?";
}

inline constexpr double caustic_tolerance = 1e-9;

struct KernelParams {
    KernelKind kind = KernelKind::free;
    double mass = 1.0;
    double hbar = 1.0;
    int dim = 1;
    /// Constant force, one component per axis (linear kind only).
    std::vector<double> force;
    /// Oscillator frequency (harmonic kind only). omega = 0 is accepted and
    /// evaluates as the free-particle limit.
    double omega = 0.0;

    static KernelParams free_particle(double m = 1.0, double hbar = 1.0, int d = 1)
    {
        KernelParams p{KernelKind::free, m, hbar, d, {}, 0.0};
        p.validate();
        return p;
    }

    /// Force vector; a single component with d > 1 acts along the first axis.
    static KernelParams linear(double m, double hbar, std::vector<double> force, int d = 1)
    {
        if (force.size() == 1 && d > 1)
            force.resize(static_cast<std::size_t>(d), 0.0);
        KernelParams p{KernelKind::linear, m, hbar, d, std::move(force), 0.0};
        p.validate();
        return p;
    }

    static KernelParams harmonic(double m, double hbar, double omega, int d = 1)
    {
        KernelParams p{KernelKind::harmonic, m, hbar, d, {}, omega};
        p.validate();
        return p;
    }

    void validate() const
    {
        if (!(mass > 0.0))
            throw DomainError("mass must be positive");
        if (!(hbar > 0.0))
            throw DomainError("hbar must be positive");
        if (dim < 1)
            throw DomainError("spatial dimension must be at least 1");
        if (kind == KernelKind::linear) {
            if (force.size() != static_cast<std::size_t>(dim))
                throw DomainError("linear kernel needs one force component per axis");
        } else if (!force.empty()) {
            throw DomainError("force is only meaningful for the linear kernel");
        }
        if (kind == KernelKind::harmonic) {
            if (!(omega >= 0.0) || !std::isfinite(omega))
                throw DomainError("harmonic frequency must be nonnegative");
        } else if (omega != 0.0) {
            throw DomainError("omega is only meaningful for the harmonic kernel");
        }
    }

    double force_on(int axis) const { return kind == KernelKind::linear ? force[static_cast<std::size_t>(axis)] : 0.0; }

    /// The one-dimensional kernel acting on coordinate `axis`.
    KernelParams axis(int axis) const
    {
        KernelParams p = *this;
        p.dim = 1;
        if (kind == KernelKind::linear)
            p.force = {force[static_cast<std::size_t>(axis)]};
        return p;
    }
};

struct SpacetimePoint {
    std::vector<double> q;
    double t = 0.0;
};

namespace detail {

inline void check_point(const KernelParams& p, const SpacetimePoint& a)
{
    if (a.q.size() != static_cast<std::size_t>(p.dim))
        throw DomainError("position has " + std::to_string(a.q.size()) + " components, kernel dimension is " +
                          std::to_string(p.dim));
}

inline double elapsed(const SpacetimePoint& a, const SpacetimePoint& b)
{
    const double dt = b.t - a.t;
    if (!(dt > 0.0))
        throw TimeOrderError("propagation requires t2 > t1 (got t1 = " + std::to_string(a.t) +
                             ", t2 = " + std::to_string(b.t) + ")");
    return dt;
}

/// sin(omega dt)/omega, continuous at omega = 0.
inline double sin_over_omega(double omega, double dt)
{
    return omega == 0.0 ? dt : std::sin(omega * dt) / omega;
}

inline void check_caustic(const KernelParams& p, double dt)
{
    if (p.kind == KernelKind::harmonic && p.omega > 0.0 && std::abs(std::sin(p.omega * dt)) < caustic_tolerance)
        throw CausticError("harmonic kernel at a caustic: omega*dt = " + std::to_string(p.omega * dt));
}

/// Phase S/hbar of a one-dimensional kernel between x and y (x at the
/// earlier time). Templated so the quadrature can continue it to complex x.
template <class T>
T phase_1d(const KernelParams& p, double force, T x, T y, double dt)
{
    const double m = p.mass, hb = p.hbar;
    switch (p.kind) {
    case KernelKind::free:
        return m * (y - x) * (y - x) / (2.0 * hb * dt);
    case KernelKind::linear:
        return (m * (y - x) * (y - x) / (2.0 * dt) + 0.5 * force * dt * (x + y) -
                force * force * dt * dt * dt / (24.0 * m)) /
               hb;
    case KernelKind::harmonic: {
        const double s = sin_over_omega(p.omega, dt);
        const double c = std::cos(p.omega * dt);
        // (x^2+y^2) cos - 2xy, written to avoid cancellation for small omega dt
        const double one_minus_c = 2.0 * std::pow(std::sin(0.5 * p.omega * dt), 2);
        return m / (2.0 * hb * s) * ((y - x) * (y - x) * c - 2.0 * x * y * one_minus_c);
    }
    }
    return T{};
}

} // namespace detail

/// One-dimensional prefactor [m/(2 pi i hbar s)]^{1/2} with s = dt or sin(omega dt)/omega.
inline cplx prefactor_1d(const KernelParams& p, double dt)
{
    const double s = p.kind == KernelKind::harmonic ? detail::sin_over_omega(p.omega, dt) : dt;
    return std::sqrt(cplx{p.mass, 0.0} / (cplx{0.0, 2.0 * std::numbers::pi * p.hbar} * s));
}

/// Full d-dimensional prefactor, the d-th power of the one-dimensional one.
inline cplx prefactor(const KernelParams& p, double dt)
{
    const cplx one = prefactor_1d(p, dt);
    cplx out{1.0, 0.0};
    for (int i = 0; i < p.dim; ++i)
        out *= one;
    return out;
}

inline double classical_action(const KernelParams& p, const SpacetimePoint& a, const SpacetimePoint& b)
{
    p.validate();
    detail::check_point(p, a);
    detail::check_point(p, b);
    const double dt = detail::elapsed(a, b);
    detail::check_caustic(p, dt);
    double s = 0.0;
    for (int i = 0; i < p.dim; ++i)
        s += detail::phase_1d<double>(p, p.force_on(i), a.q[i], b.q[i], dt);
    return s * p.hbar;
}

inline cplx propagator(const KernelParams& p, const SpacetimePoint& a, const SpacetimePoint& b)
{
    const double s = classical_action(p, a, b);
    return prefactor(p, b.t - a.t) * std::polar(1.0, s / p.hbar);
}

/// One-dimensional kernel continued to complex positions (for contour quadrature).
inline cplx propagator_1d(const KernelParams& p1, cplx x, double tx, cplx y, double ty)
{
    const double dt = ty - tx;
    return prefactor_1d(p1, dt) * std::exp(cplx{0.0, 1.0} * detail::phase_1d<cplx>(p1, p1.force_on(0), x, y, dt));
}

/// Position on the classical trajectory from a to b at time t.
inline std::vector<double> classical_position(const KernelParams& p, const SpacetimePoint& a,
                                              const SpacetimePoint& b, double t)
{
    const double dt = detail::elapsed(a, b);
    detail::check_caustic(p, dt);
    const double s = t - a.t;
    std::vector<double> q(static_cast<std::size_t>(p.dim));
    for (int i = 0; i < p.dim; ++i) {
        const double x = a.q[i], y = b.q[i];
        switch (p.kind) {
        case KernelKind::free:
            q[i] = x + (y - x) * s / dt;
            break;
        case KernelKind::linear: {
            const double f = p.force_on(i);
            const double v0 = (y - x) / dt - f * dt / (2.0 * p.mass);
            q[i] = x + v0 * s + f * s * s / (2.0 * p.mass);
            break;
        }
        case KernelKind::harmonic:
            if (p.omega == 0.0)
                q[i] = x + (y - x) * s / dt;
            else
                q[i] = (x * std::sin(p.omega * (dt - s)) + y * std::sin(p.omega * s)) / std::sin(p.omega * dt);
            break;
        }
    }
    return q;
}

/// `vertices` >= 2 equally spaced events along the classical trajectory.
inline std::vector<SpacetimePoint> classical_path(const KernelParams& p, const SpacetimePoint& a,
                                                  const SpacetimePoint& b, std::size_t vertices)
{
    if (vertices < 2)
        throw DomainError("a path needs at least two vertices");
    std::vector<SpacetimePoint> out;
    out.reserve(vertices);
    for (std::size_t k = 0; k < vertices; ++k) {
        const double t = a.t + (b.t - a.t) * static_cast<double>(k) / static_cast<double>(vertices - 1);
        out.push_back({k == 0 ? a.q : (k + 1 == vertices ? b.q : classical_position(p, a, b, t)), t});
    }
    return out;
}

/// Mechanical Lagrangian m|v|^2/2 - V(q) of the kernel's system.
inline double lagrangian(const KernelParams& p, const std::vector<double>& q, const std::vector<double>& v)
{
    double kin = 0.0, pot = 0.0;
    for (int i = 0; i < p.dim; ++i) {
        kin += 0.5 * p.mass * v[i] * v[i];
        if (p.kind == KernelKind::linear)
            pot -= p.force_on(i) * q[i];
        else if (p.kind == KernelKind::harmonic)
            pot += 0.5 * p.mass * p.omega * p.omega * q[i] * q[i];
    }
    return kin - pot;
}

/// Action of a polygonal path: edge velocity, trapezoidal potential.
inline double path_action(const KernelParams& p, const std::vector<SpacetimePoint>& path)
{
    if (path.size() < 2)
        throw DomainError("a path needs at least two vertices");
    double s = 0.0;
    const std::vector<double> zero(static_cast<std::size_t>(p.dim), 0.0);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const auto& a = path[k];
        const auto& b = path[k + 1];
        const double dt = b.t - a.t;
        std::vector<double> v(static_cast<std::size_t>(p.dim));
        for (int i = 0; i < p.dim; ++i)
            v[i] = (b.q[i] - a.q[i]) / dt;
        const double kin = lagrangian(p, zero, v);
        const double pot_a = -lagrangian(p, a.q, zero), pot_b = -lagrangian(p, b.q, zero);
        s += (kin - 0.5 * (pot_a + pot_b)) * dt;
    }
    return s;
}

namespace detail {

inline double natural_length(const KernelParams& p, double dt)
{
    return std::sqrt(p.hbar * dt / p.mass);
}

} // namespace detail

/// \int d^d q  G(a -> (q, tmid)) G((q, tmid) -> b), regularized; the kernels
/// factorize over axes, so the d-dimensional integral is a product of
/// one-dimensional ones.
inline cplx compose_semigroup(const KernelParams& p, const SpacetimePoint& a, double tmid, const SpacetimePoint& b,
                              const QuadratureSpec& quad = {})
{
    p.validate();
    detail::check_point(p, a);
    detail::check_point(p, b);
    if (!(a.t < tmid && tmid < b.t))
        throw TimeOrderError("composition requires t1 < tmid < t2");
    detail::check_caustic(p, tmid - a.t);
    detail::check_caustic(p, b.t - tmid);
    quad.validate();
    const double scale = detail::natural_length(p, std::min(tmid - a.t, b.t - tmid));
    cplx out{1.0, 0.0};
    for (int i = 0; i < p.dim; ++i) {
        const KernelParams p1 = p.axis(i);
        const double x = a.q[i], y = b.q[i];
        const double guess = x + (y - x) * (tmid - a.t) / (b.t - a.t);
        if (quad.method == Regularization::damped) {
            auto f = [&](double z) {
                return propagator_1d(p1, x, a.t, z, tmid) * propagator_1d(p1, z, tmid, y, b.t);
            };
            out *= integrate_damped(f, quad, guess, scale);
        } else {
            auto f = [&](cplx z) {
                return propagator_1d(p1, x, a.t, z, tmid) * propagator_1d(p1, z, tmid, y, b.t);
            };
            out *= integrate_rotated(f, quad, guess, scale);
        }
    }
    return out;
}

/// Time-sliced kernel: N - 1 nested integrals over intermediate positions at
/// equally spaced times, each link the exact short-time kernel. Integrated on
/// the rotated contour unless the QuadratureSpec asks for damping with N = 2.
inline cplx timeslice_propagator(const KernelParams& p, const SpacetimePoint& a, const SpacetimePoint& b,
                                 std::size_t slices, QuadratureSpec quad = rotated_quadrature())
{
    p.validate();
    detail::check_point(p, a);
    detail::check_point(p, b);
    if (slices < 2)
        throw DomainError("time slicing needs at least two slices");
    const double total = detail::elapsed(a, b);
    const double step = total / static_cast<double>(slices);
    detail::check_caustic(p, step);
    if (quad.method == Regularization::damped) {
        if (slices != 2)
            throw QuadratureError("damped quadrature supports a single intermediate integral; use the rotated contour");
        return compose_semigroup(p, a, a.t + step, b, quad);
    }
    quad.validate();
    const std::size_t inner = slices - 1;
    const double scale = detail::natural_length(p, step);
    cplx out{1.0, 0.0};
    for (int i = 0; i < p.dim; ++i) {
        const KernelParams p1 = p.axis(i);
        std::vector<double> guess(inner);
        for (std::size_t k = 0; k < inner; ++k)
            guess[k] = a.q[i] + (b.q[i] - a.q[i]) * static_cast<double>(k + 1) / static_cast<double>(slices);
        ChainLink link = [&](std::size_t k, cplx x, cplx y) {
            const double tx = a.t + step * static_cast<double>(k);
            return propagator_1d(p1, x, tx, y, tx + step);
        };
        out *= integrate_chain_rotated(link, a.q[i], b.q[i], guess, scale, quad);
    }
    return out;
}

/// S/hbar -> hbar/S.
inline double duality_phase(double s_over_hbar)
{
    if (s_over_hbar == 0.0)
        throw PoleError("duality map has a pole at S/hbar = 0");
    return 1.0 / s_over_hbar;
}

/// Regularized \int exp(i (a x^2/2 + b x)) dx = sqrt(2 pi/|a|) e^{i sgn(a) pi/4} e^{-i b^2/(2a)}.
inline cplx fresnel_gaussian(double a, double b)
{
    if (a == 0.0)
        throw DivergentIntegralError("Fresnel-Gaussian integral diverges for a = 0");
    const double sgn = a > 0 ? 1.0 : -1.0;
    return std::sqrt(2.0 * std::numbers::pi / std::abs(a)) * std::polar(1.0, sgn * std::numbers::pi / 4) *
           std::polar(1.0, -b * b / (2.0 * a));
}

} // namespace qgerbe
