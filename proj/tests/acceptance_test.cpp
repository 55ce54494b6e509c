/*
 * Acceptance suite: one test per criterion, each printing a pass/fail line.
 * All expectations run with deterministic scripted backends; tolerances are
 * pinned in code.
 */
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "dualmem/dualmem.hpp"

using namespace dualmem;

namespace {

TokenCounter counter;

struct CriterionBanner {
    int number;
    const char* name;
    explicit CriterionBanner(int n, const char* label) : number(n), name(label) {}
    ~CriterionBanner() {
        bool failed = ::testing::Test::HasFailure();
        std::cout << "[ACCEPTANCE " << number << "] " << name << ": " << (failed ? "FAIL" : "PASS")
                  << std::endl;
    }
};

std::filesystem::path temp_dir(const char* tag) {
    auto dir = std::filesystem::temp_directory_path() /
               (std::string("dualmem_accept_") + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

QueryCase capacity_probe(const FactSpec& fact) {
    QueryCase probe;
    probe.type = QueryType::recent_state;
    probe.question = "What is the current value of " + fact.key + "?";
    probe.expected = fact.value;
    probe.keys = {fact.key};
    return probe;
}

RunParams params_for(std::uint64_t scale, std::uint64_t seed) {
    RunParams params;
    params.scale = scale;
    params.seed = seed;
    params.policy.cadence = 5;  // every 10 messages: windows tile the stream
    return params;
}

}  // namespace

// Criterion 1: window law over 1,000 random append sequences, T up to
// 100,000, W in {1, 10, 50}; window equals the suffix oracle exactly and
// the token footprint stays capacity-bounded. Runtime < 10s.
TEST(Acceptance, C01WindowLaw) {
    CriterionBanner banner(1, "window law vs suffix oracle");
    std::uint64_t rng = 0x817d01u;
    const std::size_t kChoices[] = {1, 10, 50};
    Message proto = make_message(Role::user, "filler text unit", 0, counter);
    for (int seq = 0; seq < 1000; ++seq) {
        std::size_t w = kChoices[bounded(rng, 3)];
        // Mix of small and large T with mean well under the 100k cap.
        std::uint64_t t = bounded(rng, 100) == 0 ? 1 + bounded(rng, 100000) : 1 + bounded(rng, 2000);
        EpisodicBuffer buffer(w);
        std::deque<std::uint64_t> oracle;
        for (std::uint64_t i = 0; i < t; ++i) {
            proto.index = i;
            buffer.append(proto);
            oracle.push_back(i);
            if (oracle.size() > w) oracle.pop_front();
        }
        auto window = buffer.window();
        ASSERT_EQ(window.size(), std::min<std::uint64_t>(t, w));
        ASSERT_EQ(window.size(), oracle.size());
        bool equal = true;
        for (std::size_t i = 0; i < window.size(); ++i)
            if (window[i].index != oracle[i]) equal = false;
        ASSERT_TRUE(equal) << "sequence " << seq;
        std::size_t footprint = 0;
        for (const auto& m : window) footprint += m.token_count;
        ASSERT_LE(footprint, w * proto.token_count);
    }
}

// Criterion 2: Full Context reproduces the truncation loss boundary at
// 120,000 / 100 messages (+-1); end-placed facts survive to 100k; Dual
// Process with oracle consolidation answers everything, with a constant
// context footprint in the 180-token band net of the preamble.
TEST(Acceptance, C02TruncationLossPattern) {
    CriterionBanner banner(2, "capacity truncation loss pattern");
    ScriptedChatBackend answerer;

    auto fc_correct = [&](std::uint64_t t, FactSpec fact, std::uint64_t seed) {
        auto messages = generate_capacity_run(t, fact, seed, counter, 100);
        auto records = run_full_context(messages, {capacity_probe(fact)}, params_for(t, seed),
                                        kDefaultTruncationLimit, answerer);
        EXPECT_EQ(records[0].outcome, CallRecord::Outcome::ok);
        return records[0].matched;
    };

    // Beginning placement: correct up to the 1,200-message boundary.
    for (std::uint64_t t : {std::uint64_t{1100}, std::uint64_t{1200}}) {
        FactSpec fact;
        fact.placement = Placement::beginning;
        fact.value = "0.421";
        EXPECT_TRUE(fc_correct(t, fact, t)) << "T=" << t;
    }
    for (std::uint64_t t : {std::uint64_t{1300}, std::uint64_t{1500}, std::uint64_t{5000}}) {
        FactSpec fact;
        fact.placement = Placement::beginning;
        fact.value = "0.421";
        EXPECT_FALSE(fc_correct(t, fact, t)) << "T=" << t;
    }
    // End placement: survives at every scale up to 100k.
    for (std::uint64_t t : {std::uint64_t{10}, std::uint64_t{1000}, std::uint64_t{30000},
                            std::uint64_t{100000}}) {
        FactSpec fact;
        fact.explicit_index = t - 1;
        fact.value = "0.733";
        EXPECT_TRUE(fc_correct(t, fact, t)) << "T=" << t;
    }

    // Dual Process: 100% at every scale and placement, via oracle
    // consolidation into the profile.
    for (std::uint64_t t : {std::uint64_t{10}, std::uint64_t{1000}, std::uint64_t{10000},
                            std::uint64_t{100000}}) {
        for (Placement p : {Placement::beginning, Placement::middle, Placement::end}) {
            FactSpec fact;
            fact.placement = p;
            fact.value = "0.577";
            auto messages = generate_capacity_run(t, fact, t + static_cast<int>(p), counter, 100);
            RuleBasedConsolidatorBackend consolidator;
            auto dp = run_dual_process(messages, {capacity_probe(fact)}, params_for(t, t), consolidator,
                                       answerer);
            EXPECT_TRUE(dp.records[0].matched) << "T=" << t << " placement " << static_cast<int>(p);
        }
    }

    // Footprint band: natural short fillers, net of the configured preamble.
    {
        FactSpec fact;
        fact.placement = Placement::middle;
        fact.value = "0.654";
        auto messages = generate_capacity_run(10000, fact, 99, counter);  // natural density
        RuleBasedConsolidatorBackend consolidator;
        RunParams params = params_for(10000, 99);
        params.preamble = kDefaultPreamble;
        auto dp = run_dual_process(messages, {capacity_probe(fact)}, params, consolidator, answerer);
        std::size_t preamble_tokens = counter.count(kDefaultPreamble);
        std::size_t net = dp.records[0].input_tokens - preamble_tokens;
        EXPECT_TRUE(dp.records[0].matched);
        EXPECT_GE(net, 140u) << "net tokens " << net;
        EXPECT_LE(net, 220u) << "net tokens " << net;
    }
}

// Criterion 3: realistic density (~13 tokens/message) without the sliding
// window crashes Full Context at T in {10000, 15000} and never at
// T <= 7500; summaries render the crash; overflow onset sits within 10% of
// hard_limit / mean_density.
TEST(Acceptance, C03RealisticCrashSemantics) {
    CriterionBanner banner(3, "realistic crash semantics");
    ScriptedChatBackend answerer;
    std::vector<BenchmarkRecord> crash_scale_records;
    for (std::uint64_t t : {std::uint64_t{4000}, std::uint64_t{7500}, std::uint64_t{10000},
                            std::uint64_t{15000}}) {
        for (std::uint64_t s = 0; s < 5; ++s) {
            WorkloadSpec wspec;
            wspec.total_messages = t;
            wspec.seed = 1000 * t + s;
            RealisticRun run = generate_realistic_run(wspec, counter);
            auto records = run_full_context(run.messages, run.probes, params_for(t, wspec.seed),
                                            std::nullopt, answerer);
            for (const auto& r : records) {
                if (t >= 10000)
                    EXPECT_EQ(r.outcome, CallRecord::Outcome::overflow) << "T=" << t << " seed " << s;
                else
                    EXPECT_EQ(r.outcome, CallRecord::Outcome::ok) << "T=" << t << " seed " << s;
            }
            if (t == 10000)
                crash_scale_records.insert(crash_scale_records.end(), records.begin(), records.end());
        }
    }
    ReportMeta meta;
    std::string report = emit_report({summarize_scale(crash_scale_records)}, ReportFormat::markdown, meta);
    EXPECT_NE(report.find("0.0% (Crash)"), std::string::npos);

    // Overflow onset tolerance: stream one 15k run and find the first
    // message where the assembled context exceeds the hard limit.
    WorkloadSpec wspec;
    wspec.total_messages = 15000;
    wspec.seed = 4242;
    RealisticRun run = generate_realistic_run(wspec, counter);
    FullHistory history(std::nullopt, kDefaultHardModelLimit);
    std::uint64_t onset = 0;
    for (const auto& m : run.messages) {
        history.append_and_truncate(m);
        if (onset == 0) {
            auto r = full_context_answer_context(history, "probe?", counter);
            if (r.outcome == ContextOutcome::overflow) onset = m.index + 1;
        }
    }
    ASSERT_GT(onset, 0u);
    // Mean density measured on serialized parts, the unit that accumulates
    // in the context window.
    std::size_t serialized_tokens = 0;
    for (const auto& m : run.messages) serialized_tokens += counter.count(serialize_message(m));
    double density = static_cast<double>(serialized_tokens) / static_cast<double>(run.messages.size());
    double expected_onset = static_cast<double>(kDefaultHardModelLimit) / density;
    EXPECT_GE(static_cast<double>(onset), expected_onset * 0.9);
    EXPECT_LE(static_cast<double>(onset), expected_onset * 1.1);
}

// Criterion 4: growth-law analog. Oracle consolidator absorbing one
// 30-token fact per 10 messages over T = 100..15,000 fits slope 3.0 +- 0.1
// with R^2 >= 0.99. Runtime < 1 min.
TEST(Acceptance, C04GrowthLawShape) {
    CriterionBanner banner(4, "profile growth law");
    auto messages = generate_growth_run(15000, 31337, counter);
    RuleBasedConsolidatorBackend consolidator;
    ScriptedChatBackend answerer;
    auto dp = run_dual_process(messages, {}, params_for(15000, 31337), consolidator, answerer);
    GrowthSeries full = dp.growth;
    ASSERT_GE(full.size(), 1400u);
    // Keep samples from message 100 onward, per the stated range.
    GrowthSeries series;
    for (const auto& p : full)
        if (p.first >= 100) series.push_back(p);
    GrowthFit fit = fit_growth_law(series);
    EXPECT_GE(fit.slope, 2.9);
    EXPECT_LE(fit.slope, 3.1);
    ASSERT_TRUE(fit.r2_defined);
    EXPECT_GE(fit.r_squared, 0.99);
    // Per-sample affinity: tokens within +-1 of the fitted line.
    for (const auto& [x, y] : series) {
        double pred = fit.slope * static_cast<double>(x) + fit.intercept;
        EXPECT_LE(std::abs(static_cast<double>(y) - pred), 1.5) << "at message " << x;
    }
}

// Criterion 5: retrieve_top_k matches a brute-force cosine oracle on
// membership and order over 200 random indices up to 10,000 chunks, d=64.
TEST(Acceptance, C05RetrievalExactness) {
    CriterionBanner banner(5, "top-k retrieval exactness");
    std::uint64_t rng = 0x5eef;
    auto random_vec = [&rng]() {
        std::vector<double> v(64);
        for (auto& x : v) x = unit_real(rng) * 2.0 - 1.0;
        return v;
    };
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + bounded(rng, 10000);
        ChunkIndex index(64);
        std::vector<std::vector<double>> vectors;
        vectors.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            vectors.push_back(random_vec());
            Chunk c;
            c.id = i;
            index.add(c, std::vector<double>(vectors.back()));
        }
        auto query = random_vec();
        auto got = index.retrieve_top_k(query, 5);

        // Independent oracle: full sort over separately computed cosines.
        std::vector<std::pair<double, std::uint64_t>> oracle;
        oracle.reserve(n);
        double qn = 0;
        for (double x : query) qn += x * x;
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0, vn = 0;
            for (std::size_t k = 0; k < 64; ++k) {
                dot += query[k] * vectors[i][k];
                vn += vectors[i][k] * vectors[i][k];
            }
            oracle.emplace_back(dot / (std::sqrt(qn) * std::sqrt(vn)), i);
        }
        std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::size_t take = std::min<std::size_t>(5, n);
        ASSERT_EQ(got.size(), take);
        for (std::size_t i = 0; i < take; ++i) {
            ASSERT_EQ(got[i].chunk.id, oracle[i].second) << "trial " << trial << " rank " << i;
            ASSERT_DOUBLE_EQ(got[i].score, oracle[i].first);
        }
    }
}

// Criterion 6: chunker reconstruction over 500 random histories up to 50k
// tokens: byte-exact de-overlapped concatenation, all chunks <= 500
// tokens, interior overlaps exactly 50 tokens (200 codepoints).
TEST(Acceptance, C06ChunkerReconstruction) {
    CriterionBanner banner(6, "chunker byte-exact reconstruction");
    std::uint64_t rng = 0xc4ce;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Message> messages;
        std::size_t budget_chars = 100 + bounded(rng, 200000);  // up to 50k tokens
        std::size_t produced = 0;
        std::uint64_t index = 0;
        while (produced < budget_chars) {
            std::size_t len = 1 + bounded(rng, 360);
            std::string text;
            text.reserve(len);
            for (std::size_t i = 0; i < len; ++i) {
                std::uint64_t roll = bounded(rng, 16);
                if (roll == 0 && i != 0 && i + 1 != len && text.back() != ' ')
                    text += ' ';
                else if (roll == 1 && i + 2 < len && !text.empty() && text.back() != ' ')
                    text += ". ";
                else
                    text += static_cast<char>('a' + roll % 26);
            }
            produced += text.size() + 8;
            messages.push_back(
                make_message(index % 2 == 0 ? Role::user : Role::agent, text, index, counter));
            ++index;
        }
        std::string source = serialize_history(messages);
        auto chunks = chunk_history(messages, {}, counter);
        ASSERT_EQ(reconstruct_history(chunks), source) << "trial " << trial;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            ASSERT_LE(chunks[i].token_count, 500u);
            if (i > 0) ASSERT_EQ(chunks[i - 1].end_cp - chunks[i].begin_cp, 200u);
        }
    }
}

// Criterion 7: temporal precedence over 200 random contradiction schedules
// (K <= 20): the consolidated profile holds exactly the final value, the
// probe matches it, and earlier values are gone.
TEST(Acceptance, C07TemporalPrecedence) {
    CriterionBanner banner(7, "temporal precedence");
    std::uint64_t rng = 0x7e3;
    ScriptedChatBackend answerer;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t k = 2 + bounded(rng, 19);  // 2..20 values
        // Multiple of 10 so every block ends with a consolidation trigger
        // and the final assertion is always absorbed into the profile.
        std::uint64_t t = ((40 + 20 * k + bounded(rng, 400)) / 10) * 10;
        std::string key = "contested_param_001";

        // Distinct fixed-width values.
        std::vector<std::string> values;
        std::vector<int> codes(1000);
        for (int i = 0; i < 1000; ++i) codes[i] = i;
        for (std::size_t i = 1000; i > 1; --i) std::swap(codes[i - 1], codes[bounded(rng, i)]);
        for (std::size_t i = 0; i < k; ++i) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "0.%03d", codes[i]);
            values.emplace_back(buf);
        }
        // Strictly increasing injection indices on user turns: one even
        // index per disjoint bucket of width >= 20.
        std::vector<std::uint64_t> at;
        for (std::size_t i = 0; i < k; ++i) {
            std::uint64_t lo = t * i / k;
            std::uint64_t hi = t * (i + 1) / k;
            std::uint64_t even_lo = (lo + 1) / 2;
            std::uint64_t even_hi = (hi - 1) / 2;  // inclusive
            at.push_back(2 * (even_lo + bounded(rng, even_hi - even_lo + 1)));
        }

        std::vector<Message> messages;
        std::size_t assert_i = 0;
        std::uint64_t filler_rng = rng;
        for (std::uint64_t i = 0; i < t; ++i) {
            std::string text;
            if (assert_i < k && at[assert_i] == i) {
                text = "Revision: " + render_fact_marker(key, values[assert_i]) + "; applies now.";
                ++assert_i;
            } else {
                text = corpus::kCapacityFiller[bounded(filler_rng, std::size(corpus::kCapacityFiller))];
            }
            messages.push_back(
                make_message(i % 2 == 0 ? Role::user : Role::agent, text, i, counter));
        }
        ASSERT_EQ(assert_i, k);

        RuleBasedConsolidatorBackend consolidator;
        QueryCase probe;
        probe.type = QueryType::recent_state;
        probe.question = "What is the current value of " + key + "?";
        probe.expected = values.back();
        probe.keys = {key};
        auto dp = run_dual_process(messages, {probe}, params_for(t, trial), consolidator, answerer);

        ASSERT_EQ(last_fact_value(dp.final_profile.text, key), values.back()) << "trial " << trial;
        // Exactly one line for the key, holding the final value only.
        std::size_t occurrences = 0;
        for (const auto& f : scan_facts(dp.final_profile.text))
            if (f.key == key) ++occurrences;
        ASSERT_EQ(occurrences, 1u);
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            ASSERT_EQ(dp.final_profile.text.find(values[i]), std::string::npos)
                << "stale value " << values[i] << " in trial " << trial;
        ASSERT_TRUE(dp.records[0].matched) << "trial " << trial;
    }
}

// Criterion 8: honest-120 structural run through the command layer: 120
// queries x 2 architectures, Table-4-shaped report with 20 cases per type,
// DP recent_state 100%, RAG historical (unique-fact) 100%, and RAG
// retrieval sets containing the chunks of both contradiction candidates.
TEST(Acceptance, C08Honest120Structure) {
    CriterionBanner banner(8, "honest-120 structural run");
    auto out = temp_dir("honest");
    RunConfig config;
    config.command = "honest120";
    config.total_messages = 2000;
    config.seed = 11;
    config.out_dir = out.string();
    auto dir = run_command(config);

    auto records = load_records(dir / "records.ldj");
    ASSERT_EQ(records.size(), 240u);

    for (Architecture arch : {Architecture::dual_process, Architecture::rag}) {
        for (QueryType type : kAllQueryTypes) {
            std::size_t n = 0;
            for (const auto& r : records)
                if (r.architecture == arch && r.query_type == type) ++n;
            ASSERT_EQ(n, 20u) << architecture_label(arch) << "/" << query_type_label(type);
        }
    }

    auto accuracy = [&](Architecture arch, QueryType type) {
        std::size_t n = 0, m = 0;
        for (const auto& r : records)
            if (r.architecture == arch && r.query_type == type) {
                ++n;
                if (r.matched) ++m;
            }
        return static_cast<double>(m) / static_cast<double>(n);
    };
    EXPECT_DOUBLE_EQ(accuracy(Architecture::dual_process, QueryType::recent_state), 1.0);
    EXPECT_DOUBLE_EQ(accuracy(Architecture::rag, QueryType::historical_retrieval), 1.0);

    // Retrieval-set property for contradiction cases: the chunks holding the
    // first and the final assertion both appear among the retrieved ids.
    std::string retrievals = read_file(dir / "retrievals.ldj");
    std::size_t checked = 0;
    std::size_t pos = 0;
    while (pos < retrievals.size()) {
        std::size_t end = retrievals.find('\n', pos);
        if (end == std::string::npos) end = retrievals.size();
        nlohmann::json j = nlohmann::json::parse(retrievals.substr(pos, end - pos));
        pos = end + 1;
        if (j.at("query_type").get<std::string>() != "recent_state") continue;
        auto retrieved = j.at("retrieved_ids").get<std::vector<std::uint64_t>>();
        auto supporting = j.at("supporting_chunk_ids").get<std::vector<std::vector<std::uint64_t>>>();
        ASSERT_GE(supporting.size(), 2u);
        for (const auto& candidate : {supporting.front(), supporting.back()}) {
            bool hit = false;
            for (std::uint64_t id : candidate)
                if (std::find(retrieved.begin(), retrieved.end(), id) != retrieved.end()) hit = true;
            EXPECT_TRUE(hit) << "query: " << j.at("question").get<std::string>();
        }
        ++checked;
    }
    EXPECT_EQ(checked, 20u);

    std::string report = read_file(dir / "report.md");
    for (QueryType t : kAllQueryTypes)
        EXPECT_NE(report.find(std::string(query_type_label(t))), std::string::npos);
}

// Criterion 9: cost model. Exact unit prices, paper-scale totals within
// +-15% under the assumption ledger, crossover in [20, 100], additivity.
TEST(Acceptance, C09CostModel) {
    CriterionBanner banner(9, "economic model");
    PricingTable pricing = PricingTable::defaults();
    EXPECT_DOUBLE_EQ(pricing.lookup("gpt-4o").input_per_million, 2.50);
    EXPECT_DOUBLE_EQ(pricing.lookup("gpt-4o").output_per_million, 10.00);
    EXPECT_DOUBLE_EQ(pricing.lookup("gpt-4o-mini").input_per_million, 0.15);
    EXPECT_DOUBLE_EQ(pricing.lookup("gpt-4o-mini").output_per_million, 0.60);

    CostAssumptions assumptions;
    std::vector<std::uint64_t> grid;
    for (std::uint64_t t = 1; t <= 1000; ++t) grid.push_back(t);
    auto dp = dp_cost_curve(grid, assumptions, pricing);
    auto fc = fc_cost_curve(grid, assumptions, pricing);
    EXPECT_GE(dp.back(), 8.80 * 0.85);
    EXPECT_LE(dp.back(), 8.80 * 1.15);
    EXPECT_GE(fc.back(), 50.00 * 0.85);
    EXPECT_LE(fc.back(), 50.00 * 1.15);
    auto crossover = crossover_point(dp, fc, grid);
    ASSERT_TRUE(crossover.has_value());
    EXPECT_GE(*crossover, 20u);
    EXPECT_LE(*crossover, 100u);

    std::uint64_t rng = 0xadd;
    std::vector<PricedCall> all;
    for (int i = 0; i < 500; ++i)
        all.push_back({i % 2 ? "gpt-4o" : "gpt-4o-mini", bounded(rng, 200000), bounded(rng, 2000)});
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<PricedCall> a, b;
        for (const auto& c : all) (bounded(rng, 2) ? a : b).push_back(c);
        EXPECT_NEAR(run_cost(a, pricing) + run_cost(b, pricing), run_cost(all, pricing), 1e-9);
    }
}

// Criterion 10: determinism. Regenerating a results directory from its
// config snapshot with scripted backends is byte-identical.
TEST(Acceptance, C10DeterministicReplay) {
    CriterionBanner banner(10, "byte-identical replay");
    {
        auto out1 = temp_dir("rep_cap1");
        auto out2 = temp_dir("rep_cap2");
        RunConfig config;
        config.command = "capacity";
        config.scales = {10, 300};
        config.seed = 5;
        config.out_dir = out1.string();
        auto dir = run_command(config);
        auto replayed = cmd_replay(dir / "config.snapshot", out2.string());
        for (const char* file : {"config.snapshot", "records.ldj", "report.md"})
            EXPECT_EQ(read_file(dir / file), read_file(replayed / file)) << file;
    }
    {
        auto out1 = temp_dir("rep_h1");
        auto out2 = temp_dir("rep_h2");
        RunConfig config;
        config.command = "honest120";
        config.total_messages = 2000;
        config.seed = 23;
        config.out_dir = out1.string();
        auto dir = run_command(config);
        auto replayed = cmd_replay(dir / "config.snapshot", out2.string());
        for (const char* file : {"config.snapshot", "records.ldj", "report.md", "retrievals.ldj",
                                 "growth.series", "profiles.ldj"})
            EXPECT_EQ(read_file(dir / file), read_file(replayed / file)) << file;
    }
}
