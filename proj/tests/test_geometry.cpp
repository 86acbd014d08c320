#include <qgerbe/geometry.hpp>
#include <qgerbe/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qgerbe;

namespace {

LagrangianField field(std::function<double(double, double)> f)
{
    return {[f](const std::vector<double>& q, double t) { return f(q[0], t); }, nullptr};
}

LagrangianField linear_q() { return field([](double q, double) { return q; }); }

DiscretePath unit_square_loop()
{
    return DiscretePath::loop({{{0.0}, 0.0}, {{1.0}, 0.0}, {{1.0}, 1.0}, {{0.0}, 1.0}});
}

// L = c3 q^3 + c2 q^2 t + c1 q t + c0 t^2, with analytic gradient
LagrangianField cubic(double c3, double c2, double c1, double c0)
{
    LagrangianField L;
    L.value = [=](const std::vector<double>& q, double t) {
        const double x = q[0];
        return c3 * x * x * x + c2 * x * x * t + c1 * x * t + c0 * t * t;
    };
    L.gradient = [=](const std::vector<double>& q, double t) {
        const double x = q[0];
        return std::vector<double>{3 * c3 * x * x + 2 * c2 * x * t + c1 * t};
    };
    return L;
}

DiscretePath random_loop(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<SpacetimePoint> pts;
    for (std::size_t k = 0; k < n; ++k)
        pts.push_back({{u(rng)}, u(rng)});
    return DiscretePath::loop(pts);
}

} // namespace

TEST(LineIntegral, UnitSquare)
{
    EXPECT_DOUBLE_EQ(action_line_integral(linear_q(), unit_square_loop()), 1.0);
}

TEST(LineIntegral, ConstantOnClosedLoopVanishes)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i)
        EXPECT_NEAR(action_line_integral(LagrangianField::constant(2.5), random_loop(rng, 7)), 0.0, 1e-13);
}

TEST(LineIntegral, ClassicalFreeSegment)
{
    const auto k = KernelParams::free_particle();
    const SpacetimePoint a{{0.0}, 0.0}, b{{1.0}, 1.0};
    DiscretePath path{classical_path(k, a, b, 1000), false};
    // kinetic energy of the classical velocity field through the segment
    const double v = 1.0;
    const auto L = field([v](double, double) { return 0.5 * v * v; });
    EXPECT_NEAR(action_line_integral(L, path), 0.5, 1e-5);
    EXPECT_NEAR(action_line_integral(L, path), classical_action(k, a, b), 1e-5);
}

TEST(LineIntegral, PathValidation)
{
    DiscretePath one{{{{0.0}, 0.0}}, false};
    EXPECT_THROW(one.validate(), DomainError);
    DiscretePath bad{{{{0.0}, 0.0}, {{1.0}, 0.0}, {{1.0}, 1.0}}, true};
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(SurfaceIntegral, UnitSquare)
{
    for (std::size_t n : {1u, 3u, 8u})
        EXPECT_NEAR(surface_integral_dL_dt(linear_q(), square_surface(n)), 1.0, 1e-9);
}

TEST(SurfaceIntegral, ConstantIsZero)
{
    EXPECT_EQ(surface_integral_dL_dt(LagrangianField::constant(3.0), square_surface(4, 1.0, 0.4)), 0.0);
}

TEST(SurfaceIntegral, FiniteDifferenceGradient)
{
    // central differences against the analytic gradient on the same mesh
    const auto fd = field([](double q, double t) { return q * q * t; });
    LagrangianField exact = fd;
    exact.gradient = [](const std::vector<double>& q, double t) { return std::vector<double>{2 * q[0] * t}; };
    const auto s = square_surface(6, 1.0, 0.3, {0.5, 0.2});
    EXPECT_NEAR(surface_integral_dL_dt(fd, s), surface_integral_dL_dt(exact, s), 1e-9);
}

TEST(Stokes, UnitSquare)
{
    const auto r = stokes_check(linear_q(), square_surface(5));
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.residual, 1e-9);
    EXPECT_NEAR(r.line, 1.0, 1e-12);
    EXPECT_FALSE(r.closed);
}

TEST(Stokes, QuadraticIsResolvedExactly)
{
    // the centroid rule integrates the linear 2-form of L = q^2 exactly, so
    // the residual is at rounding level on every refinement
    const auto L = field([](double q, double) { return q * q; });
    for (std::size_t n : {2u, 4u, 8u})
        EXPECT_LT(stokes_check(L, square_surface(n, 1.3, 0.5, {0.2, -0.1})).residual, 1e-10);
}

TEST(Stokes, CubicConvergesAtSecondOrder)
{
    const auto L = cubic(1.0, 0.4, -0.3, 0.2);
    std::vector<double> h, e;
    for (std::size_t n : {2u, 4u, 8u, 16u}) {
        h.push_back(1.0 / static_cast<double>(n));
        e.push_back(stokes_check(L, square_surface(n, 1.0, 0.37, {0.1, 0.3})).residual);
    }
    const double slope = convergence_slope(h, e);
    EXPECT_GT(slope, 1.8);
    EXPECT_LT(slope, 2.2);
}

TEST(Stokes, RandomPolynomialsAndMeshes)
{
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const auto L = cubic(0.5 + u(rng), 2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1);
        const double side = 0.5 + u(rng), angle = 3.0 * u(rng);
        const Point c{u(rng) - 0.5, u(rng) - 0.5};
        const double e8 = stokes_check(L, square_surface(8, side, angle, c)).residual;
        const double e16 = stokes_check(L, square_surface(16, side, angle, c)).residual;
        const double slope = std::log2(e8 / e16);
        EXPECT_GT(slope, 1.8) << "instance " << i;
        EXPECT_LT(slope, 2.2) << "instance " << i;
    }
}

TEST(Stokes, ClosedSurface)
{
    // boundary of a cube in (q1, q2, t)
    const auto s = box_volume(2).boundary_surface();
    LagrangianField L;
    L.value = [](const std::vector<double>& q, double t) { return q[0] * q[1] + t * q[0]; };
    L.gradient = [](const std::vector<double>& q, double t) { return std::vector<double>{q[1] + t, q[0]}; };
    const auto r = stokes_check(L, s);
    EXPECT_TRUE(r.closed);
    EXPECT_EQ(r.line, 0.0);
    EXPECT_LT(std::abs(r.surface), 1e-12);
    EXPECT_TRUE(r.pass);
}

TEST(Vev, SingleLoop)
{
    const auto r = vev_report(linear_q(), {unit_square_loop()}, 0);
    ASSERT_EQ(r.hbar.size(), 1u);
    EXPECT_DOUBLE_EQ(r.hbar[0], 1.0);
    EXPECT_DOUBLE_EQ(r.hbar_phys, 1.0);
}

TEST(Vev, LoopAndBoundedSurfaceAgree)
{
    const auto L = cubic(0.8, 0.1, 0.5, 0.0);
    const auto surf = square_surface(32, 1.0, 0.0);
    DiscretePath loop{{}, true};
    const auto cycles = surf.boundary_cycles();
    ASSERT_EQ(cycles.size(), 1u);
    for (std::size_t idx : cycles[0])
        loop.vertices.push_back({{surf.vertices[idx][0]}, surf.vertices[idx][1]});
    if (!(loop.vertices.front().q == loop.vertices.back().q && loop.vertices.front().t == loop.vertices.back().t))
        loop.vertices.push_back(loop.vertices.front());
    const auto r = vev_report(L, {loop, surf}, 1);
    EXPECT_NEAR(r.hbar[0], r.hbar[1], 1e-3);
    EXPECT_NEAR(r.hbar[0], stokes_check(L, surf).line, 1e-12);
    EXPECT_DOUBLE_EQ(r.hbar_phys, r.hbar[1]);
}

TEST(Vev, Linearity)
{
    std::mt19937_64 rng(8);
    const auto L = cubic(1.0, -0.5, 0.25, 0.7);
    const std::vector<VevCandidate> c{random_loop(rng, 6), square_surface(4, 0.8, 0.2)};
    const auto base = vev_report(L, c, 0);
    for (double lam : {-2.0, 0.5, 3.0}) {
        const auto s = vev_report(L.scaled(lam), c, 0);
        for (std::size_t i = 0; i < c.size(); ++i)
            EXPECT_NEAR(s.hbar[i], lam * base.hbar[i], 1e-12 * std::max(1.0, std::abs(lam * base.hbar[i])));
    }
}

TEST(Vev, IndexOutOfRange)
{
    EXPECT_THROW(vev_report(linear_q(), {unit_square_loop()}, 1), LookupError);
}

TEST(Gauge, ConstantShiftLeavesFormUnchanged)
{
    const auto f = discretize(linear_q(), unit_square_loop());
    const auto g = gauge_transform(f, [](const std::vector<double>&) { return 4.2; });
    EXPECT_EQ(f.edges, g.edges);
}

TEST(Gauge, ClosedLoopsInvariant)
{
    std::mt19937_64 rng(100);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto L = cubic(0.3, 1.0, -0.2, 0.5);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        auto f = [=](const std::vector<double>& q) { return a * std::sin(b * q[0]) + c * q[0] * q[0]; };
        const auto form = discretize(L, random_loop(rng, 3 + static_cast<std::size_t>(i % 7)));
        EXPECT_NEAR(gauge_transform(form, f).integral(), form.integral(), 1e-12);
    }
}

TEST(Gauge, OpenPathShiftIsEndpointDifference)
{
    DiscretePath p{{{{0.2}, 0.0}, {{0.9}, 0.4}, {{-0.3}, 1.1}}, false};
    auto f = [](const std::vector<double>& q) { return std::exp(q[0]); };
    const auto form = discretize(linear_q(), p);
    const double shift = gauge_transform(form, f).integral() - form.integral();
    EXPECT_NEAR(shift, std::exp(-0.3) - std::exp(0.2), 1e-15);
}

TEST(Wkb, GaugePhases)
{
    const std::vector<std::vector<double>> xs{{-1.0}, {0.0}, {0.7}, {2.0}};
    auto R = [](const std::vector<double>& q) { return std::exp(-q[0] * q[0]); };
    auto S = [](const std::vector<double>& q) { return 0.5 * q[0] * q[0] - q[0]; };
    const double hbar = 0.7;
    const auto psi0 = wkb_phase(R, S, nullptr, hbar, xs);
    const auto same = wkb_phase(R, S, [](const std::vector<double>&) { return 0.0; }, hbar, xs);
    const auto shifted = wkb_phase(R, S, [](const std::vector<double>&) { return 1.3; }, hbar, xs);
    const auto any = wkb_phase(R, S, [](const std::vector<double>& q) { return std::cos(3 * q[0]); }, hbar, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        EXPECT_EQ(psi0[i], same[i]);
        EXPECT_LT(std::abs(shifted[i] - psi0[i] * std::polar(1.0, 1.3 / hbar)), 1e-15);
        EXPECT_NEAR(std::abs(any[i]), std::abs(psi0[i]), 1e-15);
    }
    EXPECT_THROW(wkb_phase(R, S, nullptr, 0.0, xs), DomainError);
}

TEST(ConnectionFromLagrangian, ZeroField)
{
    SimplicialComplex mesh(square_surface(3));
    for (const auto& [e, v] : connection_from_lagrangian(LagrangianField::constant(0.0), mesh, 1.0))
        EXPECT_EQ(v, 0.0);
}

TEST(ConnectionFromLagrangian, HolonomyOfLoop)
{
    const double hbar = 0.6;
    const auto L = cubic(0.2, 0.1, 1.0, 0.0);
    const auto loop = unit_square_loop();
    const auto A = connection_from_lagrangian(L, loop, hbar);
    EXPECT_LT(std::abs(std::polar(1.0, A.integral()) - std::polar(1.0, action_line_integral(L, loop) / hbar)), 1e-14);
}

TEST(ConnectionFromLagrangian, CurvatureMatchesSurfaceIntegral)
{
    const double hbar = 2.0;
    const auto L = cubic(0.5, 0.2, 0.3, 0.1);
    double prev = 0.0;
    for (std::size_t n : {4u, 8u}) {
        const auto surf = square_surface(n, 1.0, 0.3);
        SimplicialComplex mesh(surf);
        const auto dA = mesh.d(1, connection_from_lagrangian(L, mesh, hbar));
        const double err = std::abs(integrate(dA, surf.chain()) - surface_integral_dL_dt(L, surf) / hbar);
        EXPECT_LT(err, 0.05 / static_cast<double>(n * n));
        if (prev > 0.0) {
            EXPECT_GT(prev / err, 3.5);
        }
        prev = err;
    }
}

TEST(ExteriorDerivative, DDIsZero)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SimplicialComplex mesh(box_volume(3));
    Cochain f, w;
    for (const auto& v : mesh.simplices(0))
        f[v] = u(rng);
    for (const auto& e : mesh.simplices(1))
        w[e] = u(rng);
    double m0 = 0.0, m1 = 0.0;
    for (const auto& [s, v] : mesh.d(1, mesh.d(0, f)))
        m0 = std::max(m0, std::abs(v));
    for (const auto& [s, v] : mesh.d(2, mesh.d(1, w)))
        m1 = std::max(m1, std::abs(v));
    EXPECT_LT(m0, 1e-12);
    EXPECT_LT(m1, 1e-12);
}

TEST(Connection, SmoothConvergesAtSecondOrder)
{
    const auto f = ConnectionFields::smooth();
    const auto r4 = verify_connection(sample_connection(f, box_volume(4)));
    const auto r8 = verify_connection(sample_connection(f, box_volume(8)));
    for (int eq = 0; eq < 3; ++eq)
        EXPECT_GT(r4.checked[eq], 0u);
    for (int eq = 0; eq < 2; ++eq)
        EXPECT_GT(std::log2(r4.max_density[eq] / r8.max_density[eq]), 1.8) << "equation " << eq;
    // (iii) is exact: theta differences telescope
    EXPECT_LT(r8.max_residual[2], 1e-12);
}

TEST(Connection, FlatPasses)
{
    const auto r = verify_connection(sample_connection(ConnectionFields::flat(), box_volume(3)), 1e-12);
    EXPECT_TRUE(r.pass);
    for (double x : r.max_residual)
        EXPECT_LT(x, 1e-12);
}

TEST(Connection, PerturbationReported)
{
    auto data = sample_connection(ConnectionFields::flat(), box_volume(3));
    perturb_connection(data, 0.1);
    const auto r = verify_connection(data, 1e-6);
    EXPECT_FALSE(r.pass);
    EXPECT_GE(std::max(r.max_residual[1], r.max_residual[2]), 0.1 - 1e-12);
}

TEST(Connection, IncompleteData)
{
    auto data = sample_connection(ConnectionFields::flat(), box_volume(2));
    data.A.erase({1, 3});
    EXPECT_THROW(verify_connection(data), IncompleteDataError);
}
