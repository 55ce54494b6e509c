#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "dualmem/evaluation.hpp"

using namespace dualmem;

TEST(MatchAnswer, OperatorSpacingNormalizes) {
    EXPECT_TRUE(match_answer("p < 0.001", "the current cutoff is p<0.001."));
    EXPECT_TRUE(match_answer("p<0.001", "we settled on p < 0.001 yesterday"));
}

TEST(MatchAnswer, ExactnessRejectsApproximation) {
    EXPECT_FALSE(match_answer("178", "approximately 180 samples"));
    EXPECT_TRUE(match_answer("178", "the cohort has 178 samples"));
}

TEST(MatchAnswer, DirectContainment) {
    EXPECT_TRUE(match_answer("FAP", "FAP+ CAFs drive chemoresistance"));
}

TEST(MatchAnswer, EmptyExpectedRejected) {
    EXPECT_THROW(match_answer("", "anything"), std::invalid_argument);
}

TEST(MatchAnswer, CaseSymmetryProperty) {
    std::uint64_t rng = 3;
    for (int trial = 0; trial < 300; ++trial) {
        std::string e, a;
        std::size_t el = 1 + bounded(rng, 10);
        for (std::size_t i = 0; i < el; ++i) e += static_cast<char>('a' + bounded(rng, 26));
        std::size_t al = bounded(rng, 30);
        for (std::size_t i = 0; i < al; ++i) a += static_cast<char>('a' + bounded(rng, 27));
        if (bounded(rng, 2) == 0) a += e;  // force some positives
        std::string e_lower = lowercase(e);
        std::string a_upper = a;
        for (char& c : a_upper)
            if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        EXPECT_EQ(match_answer(e, a), match_answer(e_lower, a_upper));
    }
}

TEST(RunCost, ZeroRecordsCostZero) {
    EXPECT_DOUBLE_EQ(run_cost(std::vector<PricedCall>{}, PricingTable::defaults()), 0.0);
}

TEST(RunCost, UnitPriceDefinition) {
    PricingTable pricing = PricingTable::defaults();
    EXPECT_DOUBLE_EQ(call_cost({"gpt-4o", 1000000, 0}, pricing), 2.50);
    EXPECT_DOUBLE_EQ(call_cost({"gpt-4o", 0, 1000000}, pricing), 10.00);
    EXPECT_DOUBLE_EQ(call_cost({"gpt-4o-mini", 1000000, 1000000}, pricing), 0.75);
}

TEST(RunCost, MissingPricingEntryIsAnError) {
    EXPECT_THROW(call_cost({"unknown-model", 10, 10}, PricingTable::defaults()), ConfigError);
}

TEST(RunCost, AdditivityOverPartitions) {
    std::uint64_t rng = 8;
    PricingTable pricing = PricingTable::defaults();
    std::vector<PricedCall> all;
    for (int i = 0; i < 200; ++i)
        all.push_back({i % 2 ? "gpt-4o" : "gpt-4o-mini", bounded(rng, 100000), bounded(rng, 5000)});
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PricedCall> a, b;
        for (const auto& c : all) (bounded(rng, 2) ? a : b).push_back(c);
        EXPECT_NEAR(run_cost(a, pricing) + run_cost(b, pricing), run_cost(all, pricing), 1e-9);
    }
}

TEST(RunCost, BenchmarkRecordOverloadUsesRecordModels) {
    PricingTable pricing = PricingTable::defaults();
    std::vector<BenchmarkRecord> records(2);
    records[0].model = "gpt-4o";
    records[0].input_tokens = 1000000;
    records[1].model = "gpt-4o-mini";
    records[1].output_tokens = 1000000;
    EXPECT_DOUBLE_EQ(run_cost(records, pricing), 2.50 + 0.60);
}

TEST(CostModel, PaperScaleTotalsUnderAssumptionLedger) {
    CostAssumptions assumptions;
    PricingTable pricing = PricingTable::defaults();
    std::vector<std::uint64_t> grid = {100, 1000};
    auto dp = dp_cost_curve(grid, assumptions, pricing);
    auto fc = fc_cost_curve(grid, assumptions, pricing);
    EXPECT_GE(dp[1], 8.80 * 0.85);
    EXPECT_LE(dp[1], 8.80 * 1.15);
    EXPECT_GE(fc[1], 50.00 * 0.85);
    EXPECT_LE(fc[1], 50.00 * 1.15);
}

TEST(CostModel, CrossoverInPaperBand) {
    CostAssumptions assumptions;
    PricingTable pricing = PricingTable::defaults();
    std::vector<std::uint64_t> grid;
    for (std::uint64_t t = 1; t <= 500; ++t) grid.push_back(t);
    auto dp = dp_cost_curve(grid, assumptions, pricing);
    auto fc = fc_cost_curve(grid, assumptions, pricing);
    auto crossover = crossover_point(dp, fc, grid);
    ASSERT_TRUE(crossover.has_value());
    EXPECT_GE(*crossover, 20u);
    EXPECT_LE(*crossover, 100u);
    // Once crossed, DP stays cheaper on this grid.
    for (std::size_t i = *crossover; i < grid.size(); ++i) EXPECT_LT(dp[i], fc[i]);
}

TEST(CostModel, IdenticalCurvesHaveNoCrossover) {
    std::vector<std::uint64_t> grid = {1, 2, 3};
    std::vector<double> same = {1.0, 2.0, 3.0};
    EXPECT_FALSE(crossover_point(same, same, grid).has_value());
}

TEST(CostModel, MismatchedGridsRejected) {
    EXPECT_THROW(crossover_point({1.0}, {1.0, 2.0}, {1, 2}), std::invalid_argument);
}

namespace {

BenchmarkRecord quick_record(Architecture arch, bool matched, std::size_t tokens,
                             CallRecord::Outcome outcome = CallRecord::Outcome::ok) {
    BenchmarkRecord r;
    r.architecture = arch;
    r.scale = 10000;
    r.matched = matched && outcome == CallRecord::Outcome::ok;
    r.input_tokens = tokens;
    r.latency = std::chrono::milliseconds(100);
    r.outcome = outcome;
    return r;
}

}  // namespace

TEST(SummarizeScale, SeventeenOfTwentyIsEightyFivePercent) {
    std::vector<BenchmarkRecord> records;
    for (int i = 0; i < 20; ++i)
        records.push_back(quick_record(Architecture::dual_process, i < 17, 180));
    ScaleSummary s = summarize_scale(records);
    ASSERT_EQ(s.per_architecture.size(), 1u);
    EXPECT_DOUBLE_EQ(s.per_architecture[0].accuracy, 0.85);
    EXPECT_FALSE(s.per_architecture[0].crash);
    EXPECT_EQ(s.per_architecture[0].n, 20u);
}

TEST(SummarizeScale, AllOverflowRendersCrash) {
    std::vector<BenchmarkRecord> records;
    for (int i = 0; i < 20; ++i)
        records.push_back(
            quick_record(Architecture::full_context, false, 130000, CallRecord::Outcome::overflow));
    ScaleSummary s = summarize_scale(records);
    ASSERT_EQ(s.per_architecture.size(), 1u);
    EXPECT_TRUE(s.per_architecture[0].crash);
    EXPECT_DOUBLE_EQ(s.per_architecture[0].accuracy, 0.0);
    ReportMeta meta;
    std::string report = emit_report({s}, ReportFormat::markdown, meta);
    EXPECT_NE(report.find("0.0% (Crash)"), std::string::npos);
}

TEST(SummarizeScale, PerfectScoreClampsUpperCi) {
    std::vector<BenchmarkRecord> records;
    for (int i = 0; i < 20; ++i) records.push_back(quick_record(Architecture::rag, true, 500));
    ScaleSummary s = summarize_scale(records);
    EXPECT_DOUBLE_EQ(s.per_architecture[0].ci_high, 1.0);
    EXPECT_DOUBLE_EQ(s.per_architecture[0].accuracy, 1.0);
}

TEST(FitGrowthLaw, ExactLinearSeries) {
    GrowthSeries series;
    for (std::uint64_t x = 10; x <= 100; x += 10) series.emplace_back(x, 3 * x + 78);
    GrowthFit fit = fit_growth_law(series);
    EXPECT_NEAR(fit.slope, 3.0, 1e-9);
    EXPECT_NEAR(fit.intercept, 78.0, 1e-6);
    ASSERT_TRUE(fit.r2_defined);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(FitGrowthLaw, ConstantSeriesHasUndefinedR2) {
    GrowthSeries series = {{10, 50}, {20, 50}, {30, 50}};
    GrowthFit fit = fit_growth_law(series);
    EXPECT_DOUBLE_EQ(fit.slope, 0.0);
    EXPECT_FALSE(fit.r2_defined);
}

TEST(FitGrowthLaw, NeedsThreePoints) {
    EXPECT_THROW(fit_growth_law({{1, 1}, {2, 2}}), std::invalid_argument);
}

TEST(EmitReport, EmptyInputIsHeaderOnly) {
    ReportMeta meta;
    meta.config_hash = "abc";
    std::string report = emit_report({}, ReportFormat::markdown, meta);
    EXPECT_NE(report.find("config hash"), std::string::npos);
    EXPECT_NE(report.find("| Scale (T) |"), std::string::npos);
}

TEST(EmitReport, TwoArchitecturesTwoRowsInFixedOrder) {
    std::vector<BenchmarkRecord> records;
    records.push_back(quick_record(Architecture::full_context, true, 100));
    records.push_back(quick_record(Architecture::dual_process, true, 100));
    ScaleSummary s = summarize_scale(records);
    ReportMeta meta;
    std::string report = emit_report({s}, ReportFormat::markdown, meta);
    std::size_t dp = report.find("dual_process");
    std::size_t fc = report.find("full_context");
    ASSERT_NE(dp, std::string::npos);
    ASSERT_NE(fc, std::string::npos);
    EXPECT_LT(dp, fc);
}

TEST(EmitReport, DeterministicAcrossCalls) {
    std::vector<BenchmarkRecord> records;
    for (int i = 0; i < 12; ++i)
        records.push_back(quick_record(i % 2 ? Architecture::rag : Architecture::dual_process, i % 3, 200));
    ScaleSummary s = summarize_scale(records);
    ReportMeta meta;
    meta.config_hash = "f00d";
    meta.seeds = {1, 2, 3};
    EXPECT_EQ(emit_report({s}, ReportFormat::markdown, meta),
              emit_report({s}, ReportFormat::markdown, meta));
    EXPECT_EQ(emit_report({s}, ReportFormat::line_records, meta),
              emit_report({s}, ReportFormat::line_records, meta));
}

TEST(EmitReport, SimulatedLatencyBannerWhenScripted) {
    ReportMeta meta;
    meta.simulated_latency = true;
    EXPECT_NE(emit_report({}, ReportFormat::markdown, meta).find("SIMULATED"), std::string::npos);
    meta.simulated_latency = false;
    EXPECT_EQ(emit_report({}, ReportFormat::markdown, meta).find("SIMULATED"), std::string::npos);
}

TEST(BenchmarkRecordJson, RoundTripPreservesFields) {
    BenchmarkRecord r;
    r.architecture = Architecture::rag;
    r.scale = 15000;
    r.seed = 99;
    r.query_type = QueryType::multi_hop;
    r.expected = "0.1; 0.2";
    r.actual = "0.1; 0.2 (a: 0.1 | b: 0.2)";
    r.matched = true;
    r.latency = std::chrono::milliseconds(1234);
    r.input_tokens = 2500;
    r.output_tokens = 20;
    r.outcome = CallRecord::Outcome::ok;
    r.model = "gpt-4o";
    r.cost = 0.00645;
    BenchmarkRecord back = record_from_json(record_to_json(r));
    EXPECT_EQ(back.architecture, r.architecture);
    EXPECT_EQ(back.scale, r.scale);
    EXPECT_EQ(back.query_type, r.query_type);
    EXPECT_EQ(back.expected, r.expected);
    EXPECT_EQ(back.actual, r.actual);
    EXPECT_EQ(back.matched, r.matched);
    EXPECT_EQ(back.latency, r.latency);
    EXPECT_DOUBLE_EQ(back.cost, r.cost);
}

TEST(SummarizeByType, GroupsInFixedTypeOrder) {
    std::vector<BenchmarkRecord> records;
    for (QueryType t : kAllQueryTypes) {
        for (int i = 0; i < 4; ++i) {
            BenchmarkRecord r = quick_record(Architecture::dual_process, i < 2, 100);
            r.query_type = t;
            records.push_back(r);
        }
    }
    auto summaries = summarize_by_type(records);
    ASSERT_EQ(summaries.size(), kAllQueryTypes.size());
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        EXPECT_EQ(summaries[i].type, kAllQueryTypes[i]);
        EXPECT_DOUBLE_EQ(summaries[i].accuracy, 0.5);
        EXPECT_EQ(summaries[i].n, 4u);
    }
}
