#include <qgerbe/cech.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qgerbe;

namespace {

// Three intervals with a nonempty triple overlap and a fourth chart making
// one quadruple overlap.
Cover test_cover()
{
    return Cover(1, {{1, {0.0}, {3.0}}, {2, {1.0}, {4.0}}, {3, {2.0}, {5.0}}, {4, {2.5}, {6.0}}});
}

U1Cochain random_cochain(const Cover& c, int degree, const std::vector<Point>& cloud, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.2, 3.2);
    return U1Cochain::from_function(c, degree, cloud, [&](const Labels&, const Point&) {
        return U1Value::from_phase(u(rng));
    });
}

} // namespace

TEST(U1Value, RejectsNonUnitModulus)
{
    EXPECT_THROW(U1Value(cplx{2.0, 0.0}), DomainError);
    EXPECT_NO_THROW(U1Value(cplx{0.6, 0.8}));
    EXPECT_THROW(U1Value::normalize(cplx{0.0, 0.0}), VanishingModulusError);
    EXPECT_NEAR(std::abs(U1Value::normalize(cplx{3.0, 4.0}).value()), 1.0, 1e-15);
}

TEST(Parity, SortWithParity)
{
    Labels a{3, 1, 2};
    EXPECT_EQ(sort_with_parity(a), 1);
    EXPECT_EQ(a, (Labels{1, 2, 3}));
    Labels b{2, 1, 3};
    EXPECT_EQ(sort_with_parity(b), -1);
    Labels c{1, 1};
    EXPECT_THROW(sort_with_parity(c), DomainError);
}

TEST(Cochain, AntisymmetricAccess)
{
    const auto c = test_cover();
    U1Cochain g(c, 2);
    const Point p{2.6};
    const auto v = U1Value::from_phase(0.7);
    g.set({1, 2, 3}, p, v);
    EXPECT_NEAR(g.at({2, 1, 3}, p).phase(), -0.7, 1e-15);
    EXPECT_NEAR(g.at({1, 3, 2}, p).phase(), -0.7, 1e-15);
    EXPECT_NEAR(g.at({3, 1, 2}, p).phase(), 0.7, 1e-15);
    EXPECT_NEAR(g.at({3, 2, 1}, p).phase(), -0.7, 1e-15);
}

TEST(Cochain, SetOutsideOverlapRejected)
{
    U1Cochain l(test_cover(), 1);
    EXPECT_THROW(l.set({1, 2}, {0.5}, {}), DomainError);
    EXPECT_THROW(l.set({1, 2, 3}, {2.5}, {}), DomainError);
    EXPECT_THROW(l.at({1, 2}, {1.5}), IncompleteDataError);
}

TEST(Coboundary, ConstantOneStaysOne)
{
    const auto c = test_cover();
    const auto cloud = sample_cloud(c, 4, 3, 1);
    const auto one = U1Cochain::constant(c, 1, cloud);
    const auto d = coboundary(one);
    ASSERT_GT(d.size(), 0u);
    for (const auto& [l, pts] : d.data())
        for (const auto& [p, v] : pts)
            EXPECT_EQ(v.value(), cplx(1.0, 0.0));
}

TEST(Coboundary, DegreeOneFormula)
{
    // (d tau)_123 = tau_12 tau_23 tau_31
    const auto c = test_cover();
    const Point p{2.7};
    U1Cochain tau(c, 1);
    tau.set({1, 2}, p, U1Value::from_phase(0.3));
    tau.set({2, 3}, p, U1Value::from_phase(0.5));
    tau.set({1, 3}, p, U1Value::from_phase(0.11));
    tau.set({1, 4}, p, U1Value::from_phase(0.2));
    tau.set({2, 4}, p, U1Value::from_phase(0.4));
    tau.set({3, 4}, p, U1Value::from_phase(0.6));
    const auto g = coboundary(tau);
    EXPECT_NEAR(g.at({1, 2, 3}, p).phase(), 0.3 + 0.5 - 0.11, 1e-14);
}

TEST(Coboundary, DDIsOne)
{
    const auto c = test_cover();
    const auto cloud = sample_cloud(c, 4, 4, 9);
    const auto h = random_cochain(c, 0, cloud, 5);
    const auto lambda = coboundary(h);
    const auto dd = coboundary(lambda);
    ASSERT_GT(dd.size(), 0u);
    for (const auto& [l, pts] : dd.data())
        for (const auto& [p, v] : pts)
            EXPECT_LT(std::abs(v.value() - 1.0), 1e-12);
    const auto rep = verify_line_bundle_cocycle(lambda);
    EXPECT_TRUE(rep.pass);
    EXPECT_LT(rep.max_cocycle_deviation, 1e-12);
    EXPECT_GT(rep.checked_points, 0u);
}

TEST(Coboundary, MissingFaceIsIncomplete)
{
    const auto c = test_cover();
    U1Cochain tau(c, 1);
    tau.set({1, 2}, {2.5}, {});
    EXPECT_THROW(coboundary(tau), IncompleteDataError);
}

TEST(LineBundle, ConstantPasses)
{
    const auto c = test_cover();
    const auto one = U1Cochain::constant(c, 1, sample_cloud(c, 3, 2, 2));
    EXPECT_TRUE(verify_line_bundle_cocycle(one).pass);
}

TEST(LineBundle, PerturbationReported)
{
    const auto c = test_cover();
    const Point p{2.2};
    const auto h = random_cochain(c, 0, {p}, 3);
    auto lambda = coboundary(h);
    lambda.set({1, 2}, p, lambda.at({1, 2}, p) * U1Value::from_phase(0.1));
    const auto rep = verify_line_bundle_cocycle(lambda, 1e-6);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.max_cocycle_deviation, 2.0 * std::sin(0.05), 1e-12);
}

TEST(Gerbe, CoboundariesPassForManySeeds)
{
    const auto c = test_cover();
    const auto cloud = sample_cloud(c, 4, 2, 11);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto g = coboundary(random_cochain(c, 1, cloud, seed));
        const auto rep = verify_gerbe_cocycle(g);
        ASSERT_TRUE(rep.pass) << "seed " << seed;
        ASSERT_LT(rep.max_cocycle_deviation, 1e-12);
    }
}

TEST(Gerbe, OnePasses)
{
    const auto c = test_cover();
    const auto g = U1Cochain::constant(c, 2, sample_cloud(c, 4, 3, 4));
    const auto rep = verify_gerbe_cocycle(g);
    EXPECT_TRUE(rep.pass);
    EXPECT_GT(rep.checked_points, 0u);
}

TEST(Gerbe, QuadrupleFacePerturbationReported)
{
    const auto c = test_cover();
    const Point p{2.75};
    auto g = coboundary(random_cochain(c, 1, {p}, 8));
    g.set({1, 2, 4}, p, g.at({1, 2, 4}, p) * U1Value::from_phase(0.2));
    const auto rep = verify_gerbe_cocycle(g, 1e-9);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.max_cocycle_deviation, 2.0 * std::sin(0.1), 1e-12);
}

TEST(Gerbe, WrongDegree)
{
    U1Cochain l(test_cover(), 1);
    EXPECT_THROW(verify_gerbe_cocycle(l), DomainError);
    EXPECT_THROW(verify_line_bundle_cocycle(U1Cochain(test_cover(), 2)), DomainError);
}
