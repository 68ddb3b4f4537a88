#include "gmv/ensemble.hpp"
#include "gmv/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace gmv;

namespace {

// Every metric on every component is a planted function of the mechanism.
std::vector<RunSummary> planted(const std::function<double(const FocalMechanism&)>& f)
{
    std::vector<RunSummary> runs;
    for (const auto& fm : build_grid(FocalMechanism(45.0, 55.0, 90.0)).mechanisms()) {
        RunSummary s;
        s.fm = fm;
        for (auto& row : s.metrics)
            for (auto& v : row) v = f(fm);
        runs.push_back(s);
    }
    return runs;
}

double permutation_p(std::vector<double> x, const std::vector<double>& y, std::size_t shuffles, unsigned seed)
{
    const double r0 = std::abs(*pearson(x, y));
    std::mt19937_64 rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < shuffles; ++i) {
        std::shuffle(x.begin(), x.end(), rng);
        if (std::abs(*pearson(x, y)) >= r0 - 1e-12) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(shuffles);
}

PointSourceScenario short_scenario()
{
    PointSourceScenario sc;
    sc.duration = 12.0;
    return sc;
}

} // namespace

TEST(Grid, DefaultAngleLists)
{
    const auto g = build_grid(FocalMechanism(45.0, 55.0, 90.0));
    EXPECT_EQ(g.strikes, (std::vector<double>{40.0, 45.0, 50.0}));
    EXPECT_EQ(g.dips, (std::vector<double>{50.0, 55.0, 60.0}));
    EXPECT_EQ(g.rakes, (std::vector<double>{80.0, 90.0, 100.0}));
    const auto m = g.mechanisms();
    ASSERT_EQ(m.size(), 27u);
    EXPECT_EQ(m.front(), FocalMechanism(40.0, 50.0, 80.0));
    EXPECT_EQ(m.back(), FocalMechanism(50.0, 60.0, 100.0));
    EXPECT_TRUE(std::is_sorted(m.begin(), m.end()));
}

TEST(Grid, DegenerateAndOutOfRange)
{
    EXPECT_EQ(build_grid(FocalMechanism(45.0, 55.0, 90.0), {0.0, 0.0, 0.0}).size(), 1u);
    EXPECT_EQ(build_grid(FocalMechanism(45.0, 55.0, 90.0), {5.0, 0.0, 10.0}).size(), 9u);
    EXPECT_THROW(build_grid(FocalMechanism(358.0, 55.0, 90.0)), Error);
    EXPECT_THROW(build_grid(FocalMechanism(45.0, 88.0, 90.0)), Error);
    EXPECT_THROW(build_grid(FocalMechanism(45.0, 55.0, 175.0)), Error);
    EXPECT_THROW(build_grid(FocalMechanism(45.0, 55.0, 90.0), {-1.0, 5.0, 10.0}), Error);
}

TEST(Pearson, ExactLinearity)
{
    std::vector<double> x(27), y(27);
    for (int i = 0; i < 27; ++i) {
        x[i] = i;
        y[i] = 2.0 * i + 1.0;
    }
    const auto r = pearson(x, y);
    ASSERT_TRUE(r);
    EXPECT_NEAR(*r, 1.0, 1e-15);
    EXPECT_LT(p_value(*r, 27), 1e-6);
    for (double& v : y) v = -v;
    EXPECT_NEAR(*pearson(x, y), -1.0, 1e-15);
}

TEST(Pearson, UndefinedCases)
{
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0}, c{5.0, 5.0, 5.0, 5.0};
    EXPECT_FALSE(pearson(x, c));
    EXPECT_FALSE(pearson(c, x));
    EXPECT_FALSE(pearson(std::vector<double>{1.0, 2.0}, std::vector<double>{2.0, 1.0}));
    // Rounding-level spread is still constant.
    const std::vector<double> nearly{10.0, 10.0, 9.999999999999998, 10.0};
    EXPECT_FALSE(pearson(x, nearly));
    EXPECT_THROW(pearson(x, std::vector<double>{1.0}), Error);
}

TEST(Pearson, IndependentNormalsMonteCarlo)
{
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    int small = 0;
    const int trials = 5000;
    std::vector<double> x(27), y(27);
    for (int t = 0; t < trials; ++t) {
        for (int i = 0; i < 27; ++i) {
            x[i] = nd(rng);
            y[i] = nd(rng);
        }
        const double r = *pearson(x, y);
        ASSERT_LE(std::abs(r), 1.0);
        if (std::abs(r) < 0.5) ++small;
    }
    EXPECT_GE(static_cast<double>(small) / trials, 0.99);
}

TEST(PValue, AgreesWithPermutationTest)
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (double target : {0.05, 0.2, 0.35, 0.5, 0.6}) {
        std::vector<double> x(27), y(27);
        for (int i = 0; i < 27; ++i) x[i] = static_cast<double>(i % 3) * 5.0 + static_cast<double>(i / 9);
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / 27.0;
        for (int i = 0; i < 27; ++i) y[i] = target * (x[i] - mx) / 4.0 + std::sqrt(1.0 - target * target) * nd(rng);
        const double r = *pearson(x, y);
        if (std::abs(r) > 0.6) continue;
        const double perm = permutation_p(x, y, 100000, 11);
        EXPECT_NEAR(p_value(r, 27), perm, 0.02) << "r = " << r;
    }
}

TEST(PValue, KnownValuesAndDomain)
{
    EXPECT_EQ(p_value(0.0, 27), 1.0);
    EXPECT_EQ(p_value(1.0, 27), 0.0);
    EXPECT_NEAR(p_value(0.5, 27), 0.007912738358005815, 1e-12); // scipy.stats.t.sf
    EXPECT_EQ(p_value(0.3, 27), p_value(-0.3, 27));
    EXPECT_THROW(p_value(0.5, 2), Error);
    EXPECT_THROW(p_value(1.5, 27), Error);
}

TEST(Correlate, PlantedRakeDependence)
{
    const auto runs = planted([](const FocalMechanism& fm) { return 3.0 + 0.05 * fm.rake(); });
    for (Component c : all_components) {
        const auto t = correlate(runs, c);
        EXPECT_TRUE(t.qualitative());
        for (std::size_t m = 0; m < metric_count; ++m) {
            const auto& rake = t.cell(FaultParameter::rake, m);
            ASSERT_TRUE(rake.value);
            EXPECT_EQ(rake.n, 27u);
            EXPECT_NEAR(rake.value->r, 1.0, 1e-12);
            EXPECT_LT(rake.value->p, 0.05);
            for (FaultParameter p : {FaultParameter::strike, FaultParameter::dip}) {
                ASSERT_TRUE(t.cell(p, m).value);
                EXPECT_LT(std::abs(t.cell(p, m).value->r), 1e-9);
            }
        }
        const auto masked = significant(t);
        for (std::size_t m = 0; m < metric_count; ++m) {
            EXPECT_TRUE(masked.cell(FaultParameter::rake, m).value);
            EXPECT_FALSE(masked.cell(FaultParameter::strike, m).value);
            EXPECT_TRUE(masked.cell(FaultParameter::strike, m).masked);
        }
    }
}

TEST(Correlate, ConstantMetricIsUndefinedNotMasked)
{
    const auto runs = planted([](const FocalMechanism&) { return 10.0; });
    const auto t = significant(correlate(runs, Component::ew));
    for (const auto& cell : t.cells) {
        EXPECT_FALSE(cell.value);
        EXPECT_FALSE(cell.masked);
        EXPECT_EQ(cell.n, 27u);
    }
}

TEST(Correlate, FailedAndMissingRunsDropOut)
{
    auto runs = planted([](const FocalMechanism& fm) { return 0.1 * fm.dip() - 0.02 * fm.strike(); });
    runs[4].error = "boom";
    runs[9].metrics[0][5].reset();
    const auto t = correlate(runs, Component::ew);
    EXPECT_EQ(t.cell(FaultParameter::dip, 0).n, 26u);
    EXPECT_EQ(t.cell(FaultParameter::dip, 5).n, 25u);
    EXPECT_EQ(correlate(runs, Component::ns).cell(FaultParameter::dip, 5).n, 26u);
    EXPECT_GT(t.cell(FaultParameter::dip, 0).value->r, 0.9);
    EXPECT_LT(t.cell(FaultParameter::strike, 0).value->r, 0.0);
}

TEST(Significant, BlanksOnlyAboveAlpha)
{
    CorrelationTable t;
    t.cells(0, 0).value = Correlation{0.2, 0.051};
    t.cells(0, 1).value = Correlation{0.6, 0.05};
    t.cells(0, 2).value = Correlation{-0.7, 0.001};
    const auto m = significant(t, 0.05);
    EXPECT_FALSE(m.cells(0, 0).value);
    EXPECT_TRUE(m.cells(0, 0).masked);
    ASSERT_TRUE(m.cells(0, 1).value);
    EXPECT_EQ(m.cells(0, 1).value->r, 0.6);
    EXPECT_EQ(m.cells(0, 2).value->r, -0.7);
    EXPECT_FALSE(m.cells(1, 0).masked);
}

TEST(GroupReport, NineRunsPerValue)
{
    const auto runs = planted([](const FocalMechanism& fm) { return fm.rake() / 12.0 + fm.dip() / 100.0; });
    const auto rows = group_report(runs);
    EXPECT_EQ(rows.size(), 3u * 3u * 3u * metric_count);
    for (const auto& row : rows) {
        EXPECT_EQ(row.scores.size(), 9u);
        EXPECT_LE(row.min, row.mean);
        EXPECT_LE(row.mean, row.max);
    }
    const auto it = std::find_if(rows.begin(), rows.end(), [](const GroupRow& r) {
        return r.parameter == FaultParameter::rake && r.value == 100.0 && r.component == Component::ud && r.metric == 0;
    });
    ASSERT_NE(it, rows.end());
    EXPECT_NEAR(it->mean, 100.0 / 12.0 + 0.55, 1e-12);
    EXPECT_EQ(it->quality(), Quality::excellent);
}

TEST(GroupReport, SkipsFailedRuns)
{
    auto runs = planted([](const FocalMechanism&) { return 5.0; });
    runs[0].error = "x";
    const auto rows = group_report(runs);
    const auto it = std::find_if(rows.begin(), rows.end(), [](const GroupRow& r) {
        return r.parameter == FaultParameter::strike && r.value == 40.0;
    });
    ASSERT_NE(it, rows.end());
    EXPECT_EQ(it->scores.size(), 8u);
    EXPECT_EQ(it->quality(), Quality::fair);
}

TEST(Sweep, IdenticalAcrossWorkerCounts)
{
    const auto sc = short_scenario();
    const auto grid = build_grid(FocalMechanism(45.0, 55.0, 90.0));
    const auto reference = synth_fullspace(sc, FocalMechanism(45.0, 55.0, 90.0));
    const auto one = run_sweep(sc, grid, reference, {}, 1);
    const auto four = run_sweep(sc, grid, reference, {}, 4);
    ASSERT_EQ(one.size(), 27u);
    ASSERT_EQ(four.size(), 27u);
    for (std::size_t i = 0; i < one.size(); ++i) {
        ASSERT_TRUE(one[i].ok()) << *one[i].error;
        EXPECT_EQ(one[i].fm, four[i].fm);
        EXPECT_EQ(report::run_json(one[i], all_components).dump(), report::run_json(four[i], all_components).dump());
        for (Component c : all_components) {
            EXPECT_GE(one[i].component(c).tf.eg, 0.0);
            EXPECT_LE(one[i].component(c).tf.eg, 10.0);
        }
    }
    // The center mechanism reproduces the reference.
    const auto& center = one[13];
    EXPECT_EQ(center.fm, FocalMechanism(45.0, 55.0, 90.0));
    for (Component c : all_components) {
        EXPECT_EQ(center.component(c).tf.eg, 10.0);
        EXPECT_EQ(center.component(c).anderson.aggregate(Im::pga)->mean, 10.0);
    }
}

TEST(Sweep, FailuresAreRecordedPerRun)
{
    const auto sc = short_scenario();
    const auto grid = build_grid(FocalMechanism(45.0, 55.0, 90.0), {5.0, 0.0, 0.0});
    const auto reference = synth_fullspace(sc, FocalMechanism(45.0, 55.0, 90.0));
    const auto results = run_sweep(
        grid, reference,
        [&](const FocalMechanism& fm) {
            if (fm.strike() == 40.0) throw Error(ErrorCode::io, "missing waveform");
            return synth_fullspace(sc, fm);
        },
        {}, 2);
    ASSERT_EQ(results.size(), 3u);
    EXPECT_FALSE(results[0].ok());
    EXPECT_NE(results[0].error->find("missing waveform"), std::string::npos);
    EXPECT_EQ(results[0].fm.strike(), 40.0);
    EXPECT_TRUE(results[1].ok());
    EXPECT_TRUE(results[2].ok());
    const auto s = summarize(results[0]);
    EXPECT_FALSE(s.ok());
    EXPECT_FALSE(s.row(Component::ew)[0]);
}

TEST(Summary, MetricOrder)
{
    EXPECT_EQ(metric_name(0), "EG");
    EXPECT_EQ(metric_name(1), "PG");
    EXPECT_EQ(metric_name(2), im_name(all_ims[0]));
    EXPECT_EQ(parse_metric("PG"), 1u);
    EXPECT_EQ(parse_metric(im_name(all_ims[9])), 11u);
    EXPECT_THROW(parse_metric("XX"), Error);
}
