#include <qgerbe/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qgerbe;

namespace {

constexpr double pi = std::numbers::pi;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

std::vector<KernelParams> kinds()
{
    return {KernelParams::free_particle(1.3, 0.8), KernelParams::linear(1.0, 1.0, {0.7}),
            KernelParams::harmonic(1.0, 1.0, 0.9)};
}

} // namespace

TEST(Propagator, FreeAtOrigin)
{
    const cplx g = propagator(KernelParams::free_particle(), {{0.0}, 0.0}, {{0.0}, 1.0});
    const cplx expect = std::polar(1.0 / std::sqrt(2 * pi), -pi / 4);
    EXPECT_LT(std::abs(g - expect), 1e-15);
}

TEST(Propagator, LinearWithZeroForceIsFree)
{
    const SpacetimePoint a{{0.3}, 0.1}, b{{-1.2}, 1.7};
    EXPECT_EQ(propagator(KernelParams::linear(1.1, 0.9, {0.0}), a, b),
              propagator(KernelParams::free_particle(1.1, 0.9), a, b));
}

TEST(Propagator, HarmonicSmallOmegaIsFree)
{
    const SpacetimePoint a{{0.3}, 0.0}, b{{-0.5}, 1.5};
    EXPECT_LT(rel(propagator(KernelParams::harmonic(1.0, 1.0, 1e-6), a, b),
                  propagator(KernelParams::free_particle(), a, b)),
              1e-9);
}

TEST(Propagator, HarmonicCaustic)
{
    EXPECT_THROW(propagator(KernelParams::harmonic(1.0, 1.0, 1.0), {{0.0}, 0.0}, {{1.0}, pi}), CausticError);
}

TEST(Propagator, TimeOrder)
{
    EXPECT_THROW(propagator(KernelParams::free_particle(), {{0.0}, 1.0}, {{0.0}, 1.0}), TimeOrderError);
    EXPECT_THROW(propagator(KernelParams::free_particle(), {{0.0}, 2.0}, {{0.0}, 1.0}), TimeOrderError);
}

TEST(Propagator, BadParams)
{
    EXPECT_THROW(KernelParams::free_particle(0.0, 1.0), DomainError);
    EXPECT_THROW(KernelParams::free_particle(1.0, -1.0), DomainError);
    EXPECT_THROW(KernelParams::linear(1.0, 1.0, {1.0, 2.0}, 1), DomainError);
    EXPECT_THROW(propagator(KernelParams::free_particle(1.0, 1.0, 2), {{0.0}, 0.0}, {{0.0}, 1.0}), DomainError);
}

TEST(Propagator, PhaseIsActionAfterPrefactor)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const auto& k : kinds())
        for (int i = 0; i < 20; ++i) {
            const SpacetimePoint a{{u(rng)}, 0.0}, b{{u(rng)}, 0.6 + 0.5 * std::abs(u(rng))};
            const cplx g = propagator(k, a, b);
            const cplx pf = prefactor(k, b.t - a.t);
            const cplx expect = std::polar(1.0, classical_action(k, a, b) / k.hbar) * pf / std::abs(pf);
            EXPECT_LT(std::abs(g / std::abs(g) - expect), 1e-10);
        }
}

TEST(Propagator, Symmetry)
{
    const SpacetimePoint a{{0.4}, 0.0}, b{{-0.9}, 1.2};
    const SpacetimePoint as{{-0.9}, 0.0}, bs{{0.4}, 1.2};
    for (const auto& k : {KernelParams::free_particle(), KernelParams::harmonic(1.0, 1.0, 1.3)})
        EXPECT_LT(rel(propagator(k, a, b), propagator(k, as, bs)), 1e-14);
}

TEST(Propagator, FactorizesOverAxes)
{
    const SpacetimePoint a{{0.1, -0.4, 0.9}, 0.2}, b{{0.5, 0.3, -0.2}, 1.1};
    const std::vector<KernelParams> ks{KernelParams::free_particle(1.2, 0.7, 3),
                                       KernelParams::linear(1.0, 1.0, {0.3, -1.0, 2.0}, 3),
                                       KernelParams::harmonic(0.8, 1.1, 0.6, 3)};
    for (const auto& k : ks) {
        cplx prod{1.0, 0.0};
        for (int i = 0; i < 3; ++i)
            prod *= propagator(k.axis(i), {{a.q[i]}, a.t}, {{b.q[i]}, b.t});
        EXPECT_LT(rel(propagator(k, a, b), prod), 1e-12);
    }
}

TEST(ClassicalAction, Values)
{
    EXPECT_DOUBLE_EQ(classical_action(KernelParams::free_particle(), {{0.0}, 0.0}, {{1.0}, 1.0}), 0.5);
    const SpacetimePoint a{{0.2}, 0.0}, b{{1.3}, 0.7};
    EXPECT_EQ(classical_action(KernelParams::linear(1.0, 1.0, {0.0}), a, b),
              classical_action(KernelParams::free_particle(), a, b));
    EXPECT_NEAR(classical_action(KernelParams::harmonic(1.0, 1.0, 1e-5), a, b),
                classical_action(KernelParams::free_particle(), a, b), 1e-8);
    // linear, hand substitution: dq=1.1, dt=0.7, F=2, m=1
    const double S = 1.1 * 1.1 / 1.4 + 0.5 * 2.0 * 0.7 * 1.5 - 4.0 * 0.343 / 24.0;
    EXPECT_NEAR(classical_action(KernelParams::linear(1.0, 1.0, {2.0}), a, b), S, 1e-14);
}

TEST(ClassicalAction, EqualsPathActionOfClassicalPath)
{
    const SpacetimePoint a{{0.2}, 0.0}, b{{1.3}, 0.9};
    for (const auto& k : kinds()) {
        const auto path = classical_path(k, a, b, 4001);
        EXPECT_NEAR(path_action(k, path), classical_action(k, a, b), 1e-6);
    }
}

TEST(Compose, FreeMatchesDirect)
{
    const auto k = KernelParams::free_particle();
    for (double x : {0.0, 1.0}) {
        const SpacetimePoint a{{0.0}, 0.0}, b{{x}, 2.0};
        EXPECT_LT(rel(compose_semigroup(k, a, 1.0, b), propagator(k, a, b)), 1e-6);
    }
}

TEST(Compose, LinearMatchesDirect)
{
    const auto k = KernelParams::linear(1.0, 1.0, {1.0});
    for (double x : {0.0, 1.0}) {
        const SpacetimePoint a{{0.0}, 0.0}, b{{x}, 2.0};
        EXPECT_LT(rel(compose_semigroup(k, a, 1.0, b), propagator(k, a, b)), 1e-6);
    }
}

TEST(Compose, SemigroupSeeded)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& k : kinds())
        for (int i = 0; i < 20; ++i) {
            const double t2 = 0.5 + u(rng);
            const SpacetimePoint a{{2 * u(rng) - 1}, 0.0}, b{{2 * u(rng) - 1}, t2};
            const double tm = t2 * (0.2 + 0.6 * u(rng));
            EXPECT_LT(rel(compose_semigroup(k, a, tm, b), propagator(k, a, b)), 1e-5);
        }
}

TEST(Compose, Errors)
{
    const auto k = KernelParams::free_particle();
    QuadratureSpec q;
    q.half_width = 0.0;
    EXPECT_THROW(compose_semigroup(k, {{0.0}, 0.0}, 0.5, {{0.0}, 1.0}, q), QuadratureError);
    EXPECT_THROW(compose_semigroup(k, {{0.0}, 0.0}, 1.5, {{0.0}, 1.0}), TimeOrderError);
}

TEST(TimeSlice, FreeIndependentOfSlices)
{
    const auto k = KernelParams::free_particle();
    const SpacetimePoint a{{0.0}, 0.0}, b{{0.7}, 1.0};
    const cplx g2 = timeslice_propagator(k, a, b, 2);
    EXPECT_LT(rel(g2, propagator(k, a, b)), 1e-6);
    EXPECT_LT(rel(timeslice_propagator(k, a, b, 4), g2), 1e-6);
}

TEST(TimeSlice, HarmonicThreeSlices)
{
    const auto k = KernelParams::harmonic(1.0, 1.0, 1.0);
    const SpacetimePoint a{{0.2}, 0.0}, b{{-0.4}, 1.0};
    EXPECT_LT(rel(timeslice_propagator(k, a, b, 3), propagator(k, a, b)), 1e-5);
}

TEST(TimeSlice, NeedsTwoSlices)
{
    EXPECT_THROW(timeslice_propagator(KernelParams::free_particle(), {{0.0}, 0.0}, {{0.0}, 1.0}, 1), DomainError);
}

TEST(Duality, Reciprocal)
{
    EXPECT_DOUBLE_EQ(duality_phase(2.0), 0.5);
    EXPECT_DOUBLE_EQ(duality_phase(1.0), 1.0);
    for (double x : {-3.0, 0.25, 7.5})
        EXPECT_NEAR(duality_phase(duality_phase(x)), x, 1e-15);
    EXPECT_THROW(duality_phase(0.0), PoleError);
}
