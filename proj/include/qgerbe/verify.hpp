// Acceptance checks AC1..AC9 as self-contained routines, shared by the
// acceptance test binary and `qgerbe verify`.
#pragma once

#include <qgerbe/cech.hpp>
#include <qgerbe/charclass.hpp>
#include <qgerbe/cocycle.hpp>
#include <qgerbe/cover.hpp>
#include <qgerbe/geometry.hpp>
#include <qgerbe/kernels.hpp>
#include <qgerbe/mesh.hpp>
#include <qgerbe/trivialisation.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace qgerbe::verify {

struct Result {
    std::string id;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;
};

namespace detail {

inline std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class Body>
Result timed(const char* id, const char* title, double limit, Body body)
{
    Result r{id, title, false, {}, 0.0, limit};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.pass = body(r.detail);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail += std::string(" exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > limit) {
        r.pass = false;
        r.detail += " runtime limit exceeded";
    }
    return r;
}

/// Largest phase error of tau(q)/tau(q0) between numeric and closed forms.
inline double ratio_error(const TrivParams& tp, const std::vector<double>& grid)
{
    const U1Value n0 = tau_numeric(tp, {grid.front()}).tau, c0 = tau_closed(tp, {grid.front()}).tau;
    double worst = 0.0;
    for (double q : grid) {
        const cplx n = tau_numeric(tp, {q}).tau.value() * std::conj(n0.value());
        const cplx c = tau_closed(tp, {q}).tau.value() * std::conj(c0.value());
        worst = std::max(worst, std::abs(phase_gap(n, c)));
    }
    return worst;
}

inline std::vector<double> grid(double lo, double hi, int n)
{
    std::vector<double> g;
    for (int i = 0; i < n; ++i)
        g.push_back(lo + (hi - lo) * i / (n - 1));
    return g;
}

inline TrivParams random_times(const KernelParams& k, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.2, 0.9);
    const double t1 = u(rng) - 0.5;
    const double t12 = t1 + u(rng);
    return {k, t1, t12, t12 + u(rng)};
}

inline Cover four_chart_cover()
{
    return Cover(2, {Chart{1, {0.0, 0.0}, {0.6, 0.6}}, Chart{2, {0.4, 0.0}, {1.0, 0.6}},
                     Chart{3, {0.0, 0.4}, {0.6, 1.0}}, Chart{4, {0.4, 0.4}, {1.0, 1.0}},
                     Chart{5, {0.3, 0.3}, {0.7, 0.7}}});
}

} // namespace detail

inline Result ac1(std::uint64_t seed = 1)
{
    return detail::timed("AC1", "free-particle trivialisation", 30.0, [&](std::string& d) {
        std::mt19937_64 rng(seed);
        const auto k = KernelParams::free_particle();
        const auto g = detail::grid(-2.0, 2.0, 9);
        double worst = 0.0;
        bool exact = true;
        for (int i = 0; i < 10; ++i) {
            const TrivParams tp = detail::random_times(k, rng);
            for (double q : g)
                exact = exact && tau_closed(tp, {q}).tau.value() == cplx{1.0, 0.0};
            worst = std::max(worst, detail::ratio_error(tp, g));
        }
        d = "closed==1: " + std::string(exact ? "yes" : "no") + detail::fmt(", max ratio phase err %.2e", worst);
        return exact && worst < 1e-5;
    });
}

inline Result ac2(std::uint64_t = 1)
{
    return detail::timed("AC2", "linear-potential trivialisation", 120.0, [&](std::string& d) {
        const auto g = detail::grid(-2.0, 2.0, 21);
        double worst = 0.0;
        for (auto [m, h, F] : {std::array{1.0, 1.0, 1.0}, std::array{2.0, 1.0, 0.5}}) {
            const TrivParams tp{KernelParams::linear(m, h, {F}), 0.0, 0.7, 1.5};
            worst = std::max(worst, detail::ratio_error(tp, g));
        }
        double limit = 0.0;
        const TrivParams tiny{KernelParams::linear(1.0, 1.0, {1e-9}), 0.0, 0.7, 1.5};
        const TrivParams free{KernelParams::free_particle(), 0.0, 0.7, 1.5};
        for (double q : g) {
            limit = std::max(limit, std::abs(phase_gap(tau_closed(tiny, {q}).tau.value(), tau_closed(free, {q}).tau.value())));
            limit = std::max(limit, std::abs(phase_gap(tau_numeric(tiny, {q}).tau.value(), tau_numeric(free, {q}).tau.value())));
        }
        d = detail::fmt("max ratio phase err %.2e", worst) + detail::fmt(", F->0 gap %.2e", limit);
        return worst < 1e-5 && limit < 1e-7;
    });
}

inline Result ac3(std::uint64_t = 1)
{
    return detail::timed("AC3", "harmonic trivialisation", 120.0, [&](std::string& d) {
        const auto g = detail::grid(-2.0, 2.0, 21);
        double worst = 0.0;
        for (double w : {0.5, 1.0}) {
            const TrivParams tp{KernelParams::harmonic(1.0, 1.0, w), 0.0, 0.6, 1.3};
            worst = std::max(worst, detail::ratio_error(tp, g));
        }
        double limit = 0.0;
        const TrivParams tiny{KernelParams::harmonic(1.0, 1.0, 1e-8), 0.0, 0.6, 1.3};
        const TrivParams free{KernelParams::free_particle(), 0.0, 0.6, 1.3};
        for (double q : g) {
            limit = std::max(limit, std::abs(phase_gap(tau_closed(tiny, {q}).tau.value(), tau_closed(free, {q}).tau.value())));
            limit = std::max(limit, std::abs(phase_gap(tau_numeric(tiny, {q}).tau.value(), tau_numeric(free, {q}).tau.value())));
        }
        d = detail::fmt("max ratio phase err %.2e", worst) + detail::fmt(", omega->0 gap %.2e", limit);
        return worst < 1e-5 && limit < 1e-7;
    });
}

inline Result ac4(std::uint64_t seed = 1)
{
    return detail::timed("AC4", "semigroup and time slicing", 120.0, [&](std::string& d) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> pos(-1.5, 1.5), gap(0.3, 0.9);
        const KernelParams kinds[3] = {KernelParams::free_particle(1.3, 0.9), KernelParams::linear(1.0, 1.0, {0.8}),
                                       KernelParams::harmonic(1.0, 1.0, 0.9)};
        double compose = 0.0, slice = 0.0;
        for (const auto& k : kinds)
            for (int i = 0; i < 20; ++i) {
                const SpacetimePoint a{{pos(rng)}, 0.0};
                const double tm = gap(rng);
                const SpacetimePoint b{{pos(rng)}, tm + gap(rng)};
                const cplx direct = propagator(k, a, b);
                compose = std::max(compose, std::abs(compose_semigroup(k, a, tm, b) - direct) / std::abs(direct));
                if (i < 3)
                    for (std::size_t n : {2u, 3u, 4u})
                        slice = std::max(slice, std::abs(timeslice_propagator(k, a, b, n) - direct) / std::abs(direct));
            }
        d = detail::fmt("max compose rel err %.2e", compose) + detail::fmt(", max timeslice rel err %.2e", slice);
        return compose < 1e-5 && slice < 1e-5;
    });
}

inline Result ac5(std::uint64_t seed = 1)
{
    return detail::timed("AC5", "Cech identities", 10.0, [&](std::string& d) {
        const Cover cover = detail::four_chart_cover();
        const auto cloud = sample_cloud(cover, 4, 1, seed);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
        auto random = [&](int degree) {
            return U1Cochain::from_function(cover, degree, cloud,
                                            [&](const Labels&, const Point&) { return U1Value::from_phase(ph(rng)); });
        };
        double dd = 0.0;
        bool all_pass = true, all_detected = true;
        std::size_t injected = 0;
        for (int i = 0; i < 1000; ++i) {
            const U1Cochain h = random(0);
            const U1Cochain ddh = coboundary(coboundary(h));
            for (const auto& [_, pts] : ddh.data())
                for (const auto& [p, v] : pts)
                    dd = std::max(dd, std::abs(v.value() - 1.0));
            const U1Cochain g = coboundary(random(1));
            all_pass = all_pass && verify_gerbe_cocycle(g).pass;
            if (i % 10 == 0) {
                // perturb a stored value at a point some quadruple overlap sees
                std::vector<std::pair<Labels, Point>> seen;
                for (const auto& [labels, pts] : g.data())
                    for (const auto& [p, _] : pts)
                        for (const auto& q : label_subsets(cover.labels(), 4))
                            if (std::includes(q.begin(), q.end(), labels.begin(), labels.end()) &&
                                cover.region(q).contains(p)) {
                                seen.emplace_back(labels, p);
                                break;
                            }
                if (seen.empty())
                    throw DomainError("cover has no quadruple overlap sample");
                const auto& [labels, p] = seen[static_cast<std::size_t>(i / 10 * 7) % seen.size()];
                U1Cochain bad = g;
                const double delta = (i % 20 == 0 ? 1.0 : -1.0) * (1e-3 + 1e-3 * (i % 7));
                bad.set(labels, p, bad.at(labels, p) * U1Value::from_phase(delta));
                all_detected = all_detected && !verify_gerbe_cocycle(bad).pass;
                ++injected;
            }
        }
        d = detail::fmt("max |dd h - 1| %.2e", dd) + ", all coboundaries pass: " + (all_pass ? "yes" : "no") +
            ", perturbations detected: " + (all_detected ? "all " : "not all ") + std::to_string(injected);
        return dd < 1e-12 && all_pass && all_detected;
    });
}

/// The documented free-particle loop: anchors 0, 2, -2, midpoint 1, unit gaps.
inline LoopSpec reference_loop()
{
    return {KernelParams::free_particle(), {Point{0.0}, Point{2.0}, Point{-2.0}}, Point{1.0}, {0, 1, 2, 3, 4, 5, 6, 7, 8}};
}

inline Result ac6(std::uint64_t = 1)
{
    return detail::timed("AC6", "steepest-descent cocycle", 1.0, [&](std::string& d) {
        const LoopSpec loop = reference_loop();
        const LoopAction a = loop_action(loop);
        const double g_err = std::abs(a.g.value() - std::polar(1.0, 11.0));
        double rot = 0.0;
        LoopSpec r = loop;
        for (int i = 0; i < 3; ++i) {
            r = r.rotated(0.5 + i);
            rot = std::max(rot, std::abs(loop_action(r).S_loop - a.S_loop));
        }
        LoopSpec flat = loop;
        flat.anchors = {Point{1.0}, Point{1.0}, Point{1.0}};
        const double degen = std::abs(steepest_descent_cocycle(flat).value() - 1.0);
        d = detail::fmt("S_loop %.15g", a.S_loop) + detail::fmt(", |g - e^11i| %.1e", g_err) +
            detail::fmt(", rotation drift %.1e", rot) + detail::fmt(", degenerate |g-1| %.1e", degen);
        return std::abs(a.S_loop - 11.0) < 1e-12 && g_err < 1e-12 && rot < 1e-12 && degen < 1e-12;
    });
}

inline Result ac7(std::uint64_t seed = 1)
{
    return detail::timed("AC7", "Stokes convergence and connection", 60.0, [&](std::string& d) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> c(-1.0, 1.0);
        double lo = 1e9, hi = -1e9;
        for (int trial = 0; trial < 5; ++trial) {
            const double a = c(rng), b = c(rng), e = c(rng), f = 0.5 + std::abs(c(rng));
            LagrangianField L{[=](const std::vector<double>& q, double t) {
                                  const double x = q[0];
                                  return f * x * x * x + a * x * x * t + b * x * t * t + e * x * x;
                              },
                              {}};
            std::vector<double> hs, errs;
            for (std::size_t n : {4u, 8u, 16u, 32u}) {
                hs.push_back(1.0 / static_cast<double>(n));
                errs.push_back(stokes_check(L, square_surface(n, 1.0, 0.3 + 0.2 * trial, {0.1 * trial, -0.2})).residual);
            }
            const double s = convergence_slope(hs, errs);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        // connection residual densities at two resolutions
        std::array<double, 3> coarse{}, fine{};
        bool order = true;
        {
            const auto r4 = verify_connection(sample_connection(ConnectionFields::smooth(), box_volume(4)));
            const auto r8 = verify_connection(sample_connection(ConnectionFields::smooth(), box_volume(8)));
            for (int i = 0; i < 3; ++i) {
                coarse[i] = r4.max_density[i];
                fine[i] = r8.max_density[i];
                const bool roundoff = fine[i] < 1e-12;
                order = order && (roundoff || std::log2(coarse[i] / fine[i]) >= 1.8);
            }
        }
        auto bad = sample_connection(ConnectionFields::smooth(), box_volume(4));
        perturb_connection(bad, 0.1);
        const auto rb = verify_connection(bad);
        const double pert = std::max(rb.max_residual[1], rb.max_residual[2]);
        d = detail::fmt("Stokes slopes [%.3f", lo) + detail::fmt(", %.3f]", hi) +
            detail::fmt(", density h4->h8 (i) %.2e", coarse[0]) + detail::fmt("->%.2e", fine[0]) +
            detail::fmt(" (ii) %.2e", coarse[1]) + detail::fmt("->%.2e", fine[1]) +
            detail::fmt(" (iii) %.2e", fine[2]) + detail::fmt(", perturbed residual %.3f", pert);
        return lo >= 1.8 && hi <= 2.2 && order && pert >= 0.09;
    });
}

inline Result ac8(std::uint64_t seed = 1)
{
    return detail::timed("AC8", "quantization", 30.0, [&](std::string& d) {
        const double two_pi = 2.0 * std::numbers::pi;
        const DiscreteVolume torus = torus_volume(4);
        bool planted = true;
        for (long n : {0L, 1L, 2L, 5L}) {
            const auto r = integrate_H_closed_volume(planted_H(torus, two_pi * static_cast<double>(n)), torus);
            planted = planted && r.pass && r.n == n;
        }
        // gluing: half the instances consistent, half not
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> k(-3, 3);
        const std::size_t half = torus.tets.size() / 2;
        const DiscreteVolume v1 = torus.slice(0, half), v2 = torus.slice(half, torus.tets.size());
        const DiscreteSurface s = v1.boundary_surface();
        int agree = 0;
        for (int i = 0; i < 20; ++i) {
            const int k1 = k(rng), k2 = k(rng);
            Cochain H = planted_H(v1, two_pi * k1);
            for (const auto& [sx, val] : planted_H(v2, two_pi * k2))
                H[sx] += val;
            const double hbar = 0.5 + 0.1 * i;
            const double offset = i % 4 == 1 ? 1.0 : (i % 4 == 3 ? 0.5 : 0.0);
            const double flux = std::numbers::pi * hbar * (k1 + k2 + offset);
            const auto g = gluing_check(planted_flux(s, flux), H, v1, v2, hbar);
            const bool iff = g.equivalent == (g.surface.pass && g.volume.pass && g.surface.n == g.volume.n);
            const bool expected = offset == 0.0;
            agree += (iff && g.equivalent == expected) ? 1 : 0;
        }
        // free-particle loops with hbar chosen so S_loop / hbar = 2 pi m
        std::uniform_real_distribution<double> x(-2.0, 2.0);
        bool even = true;
        int loops = 0;
        for (int i = 0; i < 20; ++i) {
            LoopSpec loop = reference_loop();
            loop.anchors = {Point{x(rng)}, Point{x(rng)}, Point{x(rng)}};
            loop.midpoint = Point{x(rng)};
            const double S = loop_action(loop).S_loop;
            if (S < 1e-3)
                continue;
            const int m = 1 + i % 3;
            loop.kernel.hbar = S / (two_pi * m);
            const LoopAction a = loop_action(loop);
            const auto r = cocycle_integer_form(a.g, winding_of(a.S_loop / loop.kernel.hbar));
            even = even && r.pass && r.even && r.n == 2 * m;
            ++loops;
        }
        d = std::string("planted n {0,1,2,5}: ") + (planted ? "exact" : "wrong") + ", gluing " +
            std::to_string(agree) + "/20, even parity on " + std::to_string(loops) + " loops: " + (even ? "yes" : "no");
        return planted && agree == 20 && even && loops > 0;
    });
}

inline Result ac9(std::uint64_t seed = 1)
{
    return detail::timed("AC9", "gauge invariance", 10.0, [&](std::string& d) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const LagrangianField L{[](const std::vector<double>& q, double t) { return q[0] * q[0] - 0.3 * q[1] * t; }, {}};
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double a = u(rng), b = u(rng), c = u(rng);
            auto f = [=](const std::vector<double>& q) { return a * std::sin(3.0 * q[0]) + b * q[1] * q[1] + c; };
            std::vector<SpacetimePoint> pts;
            const int n = 3 + i % 7;
            for (int k = 0; k < n; ++k)
                pts.push_back({{u(rng), u(rng)}, u(rng)});
            const PathForm form = discretize(L, DiscretePath::loop(pts));
            worst = std::max(worst, std::abs(gauge_transform(form, f).integral() - form.integral()));
        }
        const double C = 0.77, hbar = 0.6;
        std::vector<std::vector<double>> samples;
        for (int i = 0; i < 50; ++i)
            samples.push_back({u(rng), u(rng)});
        auto R = [](const std::vector<double>& q) { return std::exp(-q[0] * q[0]); };
        auto S = [](const std::vector<double>& q) { return q[0] * q[1] + 2.0 * q[1]; };
        const auto psi = wkb_phase(R, S, {}, hbar, samples);
        const auto gauged = wkb_phase(R, S, [C](const std::vector<double>&) { return C; }, hbar, samples);
        double wkb = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i)
            wkb = std::max(wkb, std::abs(gauged[i] - psi[i] * std::polar(1.0, C / hbar)));
        d = detail::fmt("max loop action shift %.2e", worst) + detail::fmt(", max WKB deviation %.2e", wkb);
        return worst <= 1e-12 && wkb <= 1e-12;
    });
}

inline std::vector<std::function<Result(std::uint64_t)>> all_checks()
{
    return {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
}

inline std::vector<Result> run_all(std::uint64_t seed = 1)
{
    std::vector<Result> out;
    for (const auto& check : all_checks())
        out.push_back(check(seed));
    return out;
}

inline std::string format_line(const Result& r)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, " (%.2fs / %.0fs)", r.seconds, r.limit_seconds);
    return r.id + (r.pass ? " PASS " : " FAIL ") + r.title + ": " + r.detail + buf;
}

} // namespace qgerbe::verify
