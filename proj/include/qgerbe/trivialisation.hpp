// Gerbe trivialisation on a double overlap: the phase of
//   tau~(q12) = \int dq1 dq2 G(q1,t1; q12,t12) G(q12,t12; q2,t2),
// computed by regularized quadrature or from the closed forms of the three
// quadratic systems, together with the one-leg integrals J (constant force)
// and K (oscillator).
#pragma once

#include <qgerbe/cech.hpp>
#include <qgerbe/errors.hpp>
#include <qgerbe/kernels.hpp>
#include <qgerbe/quadrature.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace qgerbe {

inline constexpr double tangent_pole_tolerance = 1e-9;
inline constexpr double vanishing_modulus = 1e-12;

struct TrivParams {
    KernelParams kernel;
    double t1 = 0.0;
    double t12 = 0.5;
    double t2 = 1.0;

    double first_gap() const { return t12 - t1; }
    double second_gap() const { return t2 - t12; }

    void validate() const
    {
        kernel.validate();
        if (!(t1 < t12 && t12 < t2))
            throw TimeOrderError("trivialisation requires t1 < t12 < t2");
        detail::check_caustic(kernel, first_gap());
        detail::check_caustic(kernel, second_gap());
    }
};

enum class TrivMethod { numeric, closed };

struct TrivResult {
    U1Value tau;
    double tau_tilde_modulus = 0.0;
    TrivMethod method = TrivMethod::closed;
};

enum class Leg { first, second };

/// Integration region for tau~. `full` reproduces the closed forms; `chart`
/// integrates q1 over box [lo1, hi1] and q2 over [lo2, hi2] and has no
/// closed-form counterpart.
struct TrivDomain {
    bool full = true;
    std::vector<double> lo1, hi1, lo2, hi2;

    static TrivDomain charts(std::vector<double> lo1, std::vector<double> hi1, std::vector<double> lo2,
                             std::vector<double> hi2)
    {
        return {false, std::move(lo1), std::move(hi1), std::move(lo2), std::move(hi2)};
    }
};

namespace detail {

inline double leg_gap(const TrivParams& tp, Leg leg)
{
    return leg == Leg::first ? tp.first_gap() : tp.second_gap();
}

inline void check_q12(const TrivParams& tp, const std::vector<double>& q12)
{
    if (q12.size() != static_cast<std::size_t>(tp.kernel.dim))
        throw DomainError("midpoint dimension does not match the kernel");
    for (double x : q12)
        if (!std::isfinite(x))
            throw DomainError("midpoint must be finite");
}

inline double tan_over_omega(double omega, double dt)
{
    if (omega == 0.0)
        return dt;
    if (std::abs(std::cos(omega * dt)) < tangent_pole_tolerance)
        throw PoleError("tangent pole at omega*dt = " + std::to_string(omega * dt));
    return std::tan(omega * dt) / omega;
}

} // namespace detail

/// Closed form of the constant-force leg integral
/// J = [2 pi i hbar dt/m]^{d/2} exp{(i/hbar)[-(|F|^2/6m) dt^3 + F.q12 dt]}.
inline cplx eval_J_linear(const TrivParams& tp, const std::vector<double>& q12, Leg leg)
{
    if (tp.kernel.kind != KernelKind::linear)
        throw DomainError("J integral is defined for the linear kernel");
    tp.validate();
    detail::check_q12(tp, q12);
    const auto& k = tp.kernel;
    const double dt = detail::leg_gap(tp, leg);
    const cplx one = std::sqrt(cplx{0.0, 2.0 * std::numbers::pi * k.hbar * dt / k.mass});
    cplx pre{1.0, 0.0};
    double f2 = 0.0, fq = 0.0;
    for (int i = 0; i < k.dim; ++i) {
        pre *= one;
        f2 += k.force[i] * k.force[i];
        fq += k.force[i] * q12[i];
    }
    return pre * std::polar(1.0, (-f2 / (6.0 * k.mass) * dt * dt * dt + fq * dt) / k.hbar);
}

/// Closed form of the oscillator leg integral
/// K = [2 pi i hbar tan(w dt)/(m w)]^{d/2} exp{-(i m w/2 hbar) tan(w dt) |q12|^2}.
inline cplx eval_K_harmonic(const TrivParams& tp, const std::vector<double>& q12, Leg leg)
{
    if (tp.kernel.kind != KernelKind::harmonic)
        throw DomainError("K integral is defined for the harmonic kernel");
    tp.validate();
    detail::check_q12(tp, q12);
    const auto& k = tp.kernel;
    const double tw = detail::tan_over_omega(k.omega, detail::leg_gap(tp, leg)); // tan(w dt)/w
    const cplx one = std::sqrt(cplx{0.0, 2.0 * std::numbers::pi * k.hbar * tw / k.mass});
    cplx pre{1.0, 0.0};
    double q2 = 0.0;
    for (int i = 0; i < k.dim; ++i) {
        pre *= one;
        q2 += q12[i] * q12[i];
    }
    return pre * std::polar(1.0, -k.mass * k.omega * k.omega * tw * q2 / (2.0 * k.hbar));
}

/// Closed-form trivialisation (constant time-only phases dropped).
inline TrivResult tau_closed(const TrivParams& tp, const std::vector<double>& q12)
{
    tp.validate();
    detail::check_q12(tp, q12);
    const auto& k = tp.kernel;
    TrivResult r;
    r.method = TrivMethod::closed;
    r.tau_tilde_modulus = 1.0;
    switch (k.kind) {
    case KernelKind::free:
        r.tau = U1Value{};
        break;
    case KernelKind::linear: {
        double f2 = 0.0, fq = 0.0;
        for (int i = 0; i < k.dim; ++i) {
            f2 += k.force[i] * k.force[i];
            fq += k.force[i] * q12[i];
        }
        auto leg = [&](double dt) { return -f2 / (6.0 * k.mass) * dt * dt * dt + fq * dt; };
        r.tau = U1Value::from_phase((leg(tp.first_gap()) + leg(tp.second_gap())) / k.hbar);
        break;
    }
    case KernelKind::harmonic: {
        if (k.omega == 0.0) {
            r.tau = U1Value{};
            break;
        }
        double q2 = 0.0;
        for (double x : q12)
            q2 += x * x;
        const double tans = k.omega * (detail::tan_over_omega(k.omega, tp.first_gap()) +
                                       detail::tan_over_omega(k.omega, tp.second_gap()));
        r.tau = U1Value::from_phase(-k.mass * k.omega / (2.0 * k.hbar) * tans * q2);
        break;
    }
    }
    return r;
}

/// Numerical trivialisation: the q1 and q2 integrals separate, each is done
/// per axis with the regularized quadrature (or over chart boxes).
inline TrivResult tau_numeric(const TrivParams& tp, const std::vector<double>& q12, const QuadratureSpec& quad = {},
                              const TrivDomain& domain = {})
{
    tp.validate();
    detail::check_q12(tp, q12);
    quad.validate();
    const auto& k = tp.kernel;
    cplx tilde{1.0, 0.0};
    for (int i = 0; i < k.dim; ++i) {
        const KernelParams p1 = k.axis(i);
        const double m = q12[i];
        auto first = [&](cplx q1) { return propagator_1d(p1, q1, tp.t1, m, tp.t12); };
        auto second = [&](cplx q2) { return propagator_1d(p1, m, tp.t12, q2, tp.t2); };
        const double s1 = detail::natural_length(k, tp.first_gap());
        const double s2 = detail::natural_length(k, tp.second_gap());
        cplx i1, i2;
        if (!domain.full) {
            auto r1 = [&](double x) { return first(x); };
            auto r2 = [&](double x) { return second(x); };
            i1 = integrate_interval(r1, domain.lo1.at(i), domain.hi1.at(i));
            i2 = integrate_interval(r2, domain.lo2.at(i), domain.hi2.at(i));
        } else if (quad.method == Regularization::damped) {
            auto r1 = [&](double x) { return first(x); };
            auto r2 = [&](double x) { return second(x); };
            i1 = integrate_damped(r1, quad, m, s1);
            i2 = integrate_damped(r2, quad, m, s2);
        } else {
            i1 = integrate_rotated(first, quad, m, s1);
            i2 = integrate_rotated(second, quad, m, s2);
        }
        tilde *= i1 * i2;
    }
    const double mod = std::abs(tilde);
    if (!(mod >= vanishing_modulus))
        throw VanishingModulusError("tau~ vanishes at this midpoint (|tau~| = " + std::to_string(mod) + ")");
    TrivResult r;
    r.method = TrivMethod::numeric;
    r.tau = U1Value::normalize(tilde);
    r.tau_tilde_modulus = mod;
    return r;
}

/// Wrapped phase difference arg(a / b) in (-pi, pi].
inline double phase_gap(cplx a, cplx b)
{
    return std::arg(a * std::conj(b));
}

} // namespace qgerbe
