#include <qgerbe/cover.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace qgerbe;

namespace {

Cover line_cover()
{
    return Cover(1, {{1, {0.0}, {2.0}}, {2, {1.0}, {3.0}}, {3, {2.0}, {3.0}}});
}

} // namespace

TEST(Cover, IntervalIntersection)
{
    const auto r = overlap(line_cover(), {1, 2});
    EXPECT_FALSE(r.empty);
    EXPECT_DOUBLE_EQ(r.lo[0], 1.0);
    EXPECT_DOUBLE_EQ(r.hi[0], 2.0);
}

TEST(Cover, DisjointBoxesAreEmpty)
{
    Cover c(1, {{1, {0.0}, {1.0}}, {2, {2.0}, {3.0}}});
    EXPECT_TRUE(overlap(c, {1, 2}).empty);
}

TEST(Cover, TouchingOpenBoxesAreEmpty)
{
    // open charts (0,2) and (2,3) share no point
    EXPECT_TRUE(overlap(line_cover(), {1, 3}).empty);
}

TEST(Cover, RegionOfOneChartIsTheChart)
{
    const auto c = line_cover();
    const auto r = c.region({2, 2});
    EXPECT_EQ(r.lo, c.chart(2).lo);
    EXPECT_EQ(r.hi, c.chart(2).hi);
}

TEST(Cover, UnknownLabel)
{
    EXPECT_THROW(overlap(line_cover(), {1, 7}), LookupError);
    EXPECT_THROW(line_cover().chart(0), LookupError);
}

TEST(Cover, OverlapNeedsTwoLabels)
{
    EXPECT_THROW(overlap(line_cover(), {1}), DomainError);
}

TEST(Cover, BadCharts)
{
    EXPECT_THROW(Cover(1, {{1, {1.0}, {0.0}}}), DomainError);
    EXPECT_THROW(Cover(2, {{1, {0.0}, {1.0}}}), DomainError);
    EXPECT_THROW(Cover(1, {{1, {0.0}, {1.0}}, {1, {0.5}, {2.0}}}), DomainError);
    EXPECT_THROW(Cover(1, {}), DomainError);
}

TEST(Cover, OrderOfLabelsDoesNotMatter)
{
    Cover c(2, {{1, {0, 0}, {2, 2}}, {2, {1, 0.5}, {3, 3}}, {3, {0.5, 1}, {2.5, 2.5}}});
    const auto a = overlap(c, {1, 2, 3});
    for (const Labels& perm : {Labels{3, 2, 1}, Labels{2, 1, 3}, Labels{1, 3, 2}}) {
        const auto b = overlap(c, perm);
        EXPECT_EQ(a.lo, b.lo);
        EXPECT_EQ(a.hi, b.hi);
    }
    // associativity: (12)3 as boxes equals 1(23)
    const auto r12 = overlap(c, {1, 2}), r23 = overlap(c, {2, 3});
    for (int i = 0; i < 2; ++i) {
        EXPECT_DOUBLE_EQ(std::max(r12.lo[i], c.chart(3).lo[i]), std::max(c.chart(1).lo[i], r23.lo[i]));
        EXPECT_DOUBLE_EQ(std::min(r12.hi[i], c.chart(3).hi[i]), std::min(c.chart(1).hi[i], r23.hi[i]));
    }
}

TEST(Cover, TripleInsideEachPair)
{
    Cover c(2, {{1, {0, 0}, {2, 2}}, {2, {1, 0.5}, {3, 3}}, {3, {0.5, 1}, {2.5, 2.5}}});
    const auto t = overlap(c, {1, 2, 3});
    for (const Labels& p : {Labels{1, 2}, Labels{2, 3}, Labels{1, 3}})
        EXPECT_TRUE(overlap(c, p).contains_box(t));
}

TEST(SamplePoints, Deterministic)
{
    OverlapRegion unit{{}, {0.0, 0.0}, {1.0, 1.0}, false};
    EXPECT_EQ(sample_points(unit, 1, 42), sample_points(unit, 1, 42));
}

TEST(SamplePoints, StrictlyInside)
{
    OverlapRegion box{{}, {-1.0, 2.0, 0.0}, {0.0, 2.5, 1e-3}, false};
    for (const auto& p : sample_points(box, 5, 7))
        EXPECT_TRUE(box.contains(p));
}

TEST(SamplePoints, SeedsGiveDifferentPoints)
{
    OverlapRegion unit{{}, {0.0}, {1.0}, false};
    std::set<std::vector<double>> seen;
    for (std::uint64_t s = 0; s < 100; ++s)
        seen.insert(sample_points(unit, 3, s)[0]);
    EXPECT_EQ(seen.size(), 100u);
}

TEST(SamplePoints, EmptyRegionRejected)
{
    OverlapRegion e{{}, {1.0}, {0.0}, true};
    EXPECT_THROW(sample_points(e, 1, 1), DomainError);
    OverlapRegion unit{{}, {0.0}, {1.0}, false};
    EXPECT_THROW(sample_points(unit, 0, 1), DomainError);
}

TEST(SampleCloud, CoversEveryNonemptyOverlap)
{
    const auto c = line_cover();
    const auto cloud = sample_cloud(c, 3, 4, 3);
    for (const auto& subset : {Labels{1}, Labels{2}, Labels{3}, Labels{1, 2}, Labels{2, 3}}) {
        const auto r = c.region(subset);
        std::size_t inside = 0;
        for (const auto& p : cloud)
            inside += r.contains(p) ? 1 : 0;
        EXPECT_GE(inside, 4u);
    }
}
