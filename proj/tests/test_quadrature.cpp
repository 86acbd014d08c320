#include <qgerbe/kernels.hpp>
#include <qgerbe/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qgerbe;

namespace {

constexpr double pi = std::numbers::pi;

// Independent oracle: damped integrand on [-R, R], composite Simpson, then
// Richardson in eps (the damped value is analytic in eps).
cplx simpson_fresnel(double a, double b, double eps, double R, std::size_t n)
{
    const double h = 2.0 * R / static_cast<double>(n);
    auto f = [&](double x) { return std::exp(cplx{-0.5 * eps * x * x, 0.5 * a * x * x + b * x}); };
    cplx s = f(-R) + f(R);
    for (std::size_t k = 1; k < n; ++k)
        s += (k % 2 ? 4.0 : 2.0) * f(-R + h * static_cast<double>(k));
    return s * h / 3.0;
}

cplx fresnel_oracle(double a, double b)
{
    const double e = 1e-3, R = 200.0;
    const std::size_t n = 400000;
    const cplx i1 = simpson_fresnel(a, b, e, R, n);
    const cplx i2 = simpson_fresnel(a, b, 2 * e, R, n);
    const cplx i4 = simpson_fresnel(a, b, 4 * e, R, n);
    // remove O(e) and O(e^2)
    return (8.0 * i1 - 6.0 * i2 + i4) / 3.0;
}

} // namespace

TEST(FresnelGaussian, UnitCurvatureAgainstOracle)
{
    const cplx expect = std::sqrt(2 * pi) * std::polar(1.0, pi / 4);
    EXPECT_LT(std::abs(fresnel_oracle(1.0, 0.0) - expect), 1e-5);
    EXPECT_LT(std::abs(fresnel_gaussian(1.0, 0.0) - expect), 1e-14);
}

TEST(FresnelGaussian, CurvatureTwoAgainstOracle)
{
    const cplx expect = std::sqrt(pi) * std::polar(1.0, pi / 4);
    EXPECT_LT(std::abs(fresnel_oracle(2.0, 0.0) - expect), 1e-5);
    EXPECT_LT(std::abs(fresnel_gaussian(2.0, 0.0) - expect), 1e-14);
}

TEST(FresnelGaussian, LinearTermAndNegativeCurvature)
{
    EXPECT_LT(std::abs(fresnel_gaussian(1.5, 0.7) - fresnel_oracle(1.5, 0.7)), 1e-5);
    EXPECT_LT(std::abs(fresnel_gaussian(-1.0, 0.3) - fresnel_oracle(-1.0, 0.3)), 1e-5);
}

TEST(FresnelGaussian, EvenInB)
{
    EXPECT_EQ(fresnel_gaussian(1.3, 0.4), fresnel_gaussian(1.3, -0.4));
}

TEST(FresnelGaussian, ZeroCurvatureDiverges)
{
    EXPECT_THROW(fresnel_gaussian(0.0, 1.0), DivergentIntegralError);
}

TEST(Quadrature, DampedMatchesClosedForm)
{
    QuadratureSpec spec;
    for (double a : {0.5, 1.0, 3.0})
        for (double b : {-1.0, 0.0, 0.8}) {
            auto f = [=](double x) { return std::exp(cplx{0.0, 0.5 * a * x * x + b * x}); };
            const cplx v = integrate_damped(f, spec, 0.0, 1.0);
            EXPECT_LT(std::abs(v - fresnel_gaussian(a, b)) / std::abs(fresnel_gaussian(a, b)), 1e-7)
                << "a=" << a << " b=" << b;
        }
}

TEST(Quadrature, RotatedMatchesClosedForm)
{
    const auto spec = rotated_quadrature();
    for (double a : {0.5, 2.0}) {
        auto f = [=](cplx x) { return std::exp(cplx{0.0, 1.0} * (0.5 * a * x * x + 0.3 * x)); };
        EXPECT_LT(std::abs(integrate_rotated(f, spec, 0.0, 1.0) - fresnel_gaussian(a, 0.3)), 1e-10);
    }
}

TEST(Quadrature, GaussLegendreExactOnPolynomials)
{
    std::vector<double> x, w;
    gauss_legendre(8, x, w);
    for (int deg = 0; deg <= 15; ++deg) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += w[i] * std::pow(x[i], deg);
        const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
        EXPECT_NEAR(s, exact, 1e-14) << deg;
    }
}

TEST(Quadrature, IntervalIntegral)
{
    auto f = [](double x) { return cplx{std::cos(x), std::sin(x)}; };
    const cplx v = integrate_interval(f, 0.0, pi);
    EXPECT_NEAR(v.real(), 0.0, 1e-12);
    EXPECT_NEAR(v.imag(), 2.0, 1e-12);
    EXPECT_THROW(integrate_interval(f, 1.0, 1.0), QuadratureError);
}

TEST(Quadrature, NevilleIsExactForPolynomials)
{
    const std::vector<double> e{0.4, 0.2, 0.1};
    std::vector<cplx> v;
    for (double x : e)
        v.push_back(cplx{3.0 + 2.0 * x - x * x, -1.0 + x});
    const cplx r = extrapolate_to_zero(e, v);
    EXPECT_NEAR(r.real(), 3.0, 1e-14);
    EXPECT_NEAR(r.imag(), -1.0, 1e-14);
}

TEST(Quadrature, SpecValidation)
{
    QuadratureSpec s;
    s.half_width = 0.0;
    EXPECT_THROW(s.validate(), QuadratureError);
    s = {};
    s.eps = {};
    EXPECT_THROW(s.validate(), QuadratureError);
    s = {};
    s.eps = {0.1, 0.1};
    EXPECT_THROW(s.validate(), QuadratureError);
    s = {};
    s.nodes = 1;
    EXPECT_THROW(s.validate(), QuadratureError);
}
