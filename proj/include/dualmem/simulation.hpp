/*
 * Seeded synthetic workload generators: destructive capacity runs with a
 * single placed fact, realistic multi-act conversation streams, the
 * 120-query six-type evaluation suite, and the fixed baseline scenario.
 *
 * Every generator is a pure function of (spec, seed). Fact assertions ride
 * as "FACT key=value" markers inside natural carrier sentences, and every
 * generated expected answer is re-derived from the raw log by scanning
 * markers; a mismatch aborts generation.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualmem/facts.hpp"
#include "dualmem/message.hpp"
#include "dualmem/tokens.hpp"
#include "dualmem/util.hpp"

namespace dualmem {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Placement { beginning, middle, end };

struct FactSpec {
    std::string key = "probe_fact_00";
    std::string value = "0.137";
    Placement placement = Placement::end;
    std::optional<std::uint64_t> explicit_index;
};

struct ContradictionSchedule {
    std::string key;
    std::vector<std::string> values;                 // at least 2
    std::vector<std::uint64_t> injection_indices;    // strictly increasing
};

enum class QueryType {
    recent_state,
    historical_retrieval,
    contradictory,
    temporal_sequence,
    multi_hop,
    long_term,
};

inline constexpr std::array<QueryType, 6> kAllQueryTypes = {
    QueryType::recent_state,      QueryType::historical_retrieval, QueryType::contradictory,
    QueryType::temporal_sequence, QueryType::multi_hop,            QueryType::long_term,
};

inline std::string_view query_type_label(QueryType t) {
    switch (t) {
        case QueryType::recent_state: return "recent_state";
        case QueryType::historical_retrieval: return "historical_retrieval";
        case QueryType::contradictory: return "contradictory";
        case QueryType::temporal_sequence: return "temporal_sequence";
        case QueryType::multi_hop: return "multi_hop";
        case QueryType::long_term: return "long_term";
    }
    return "recent_state";
}

inline QueryType query_type_from_label(std::string_view s) {
    for (QueryType t : kAllQueryTypes)
        if (query_type_label(t) == s) return t;
    throw std::invalid_argument("unknown query type: " + std::string(s));
}

struct QueryCase {
    QueryType type = QueryType::recent_state;
    std::string question;
    std::string expected;
    std::vector<std::uint64_t> supporting_indices;
    std::vector<std::string> keys;
    bool unique_fact = false;
};

enum class ActKind { directive, state_update, experimental_log, noise };

struct ActMix {
    double directive = 0.20;
    double state_update = 0.15;
    double experimental_log = 0.25;
    double noise = 0.40;

    void validate() const {
        double sum = directive + state_update + experimental_log + noise;
        if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
            throw ConfigError("ActMix: proportions must sum to 1");
    }
};

enum class WorkloadKind { capacity, realistic, baseline_scenario };

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::realistic;
    std::uint64_t total_messages = 1000;
    std::uint64_t seed = 0;
    ActMix mix;
    std::vector<std::uint64_t> scales;
    int probes_per_seed = 4;
    int seeds_per_scale = 5;
    std::size_t filler_tokens = 0;  // capacity runs: exact tokens per message (0 = natural)

    void validate() const {
        if (total_messages < 1) throw ConfigError("WorkloadSpec: total_messages must be >= 1");
        mix.validate();
        if (probes_per_seed < 1 || seeds_per_scale < 1)
            throw ConfigError("WorkloadSpec: probes and seeds must be positive");
    }
};

struct LedgerEntry {
    std::string key;
    std::string value;
    std::uint64_t index = 0;  // message index carrying the marker
};

struct UniqueFact {
    std::string key;
    std::string value;
    std::uint64_t index = 0;
};

struct RealisticRun {
    std::vector<Message> messages;
    std::vector<LedgerEntry> ledger;  // assertion order
    std::vector<ContradictionSchedule> schedules;
    std::vector<UniqueFact> long_term_facts;   // first 5% of the log
    std::vector<UniqueFact> historical_facts;  // first third of the log
    std::vector<std::pair<UniqueFact, UniqueFact>> fact_pairs;  // multi-hop joins
    std::vector<QueryCase> probes;
    std::array<std::size_t, 4> act_message_counts{};  // indexed by ActKind
    double mean_tokens_per_message = 0.0;
};

namespace corpus {

// Carrier pools are length-calibrated so the realistic stream averages
// 13-14 tokens/message under the ceil(chars/4) counter.
inline constexpr const char* kNoiseUser[] = {
    "Thanks, that version looks good to me for this round.",
    "Quick ping to check you saw the note from earlier today.",
    "No rush on this one, whenever you next have a free slot.",
    "Sounds reasonable to me, let us keep that plan in place.",
    "Taking a short break here, back at the bench very soon.",
    "Appreciate the detailed rundown from earlier this week.",
    "Nothing new to report on my side at the moment, thanks.",
    "That summary matches my own reading of the data so far.",
};

inline constexpr const char* kNoiseAgent[] = {
    "Noted, standing by for whatever the next step will be.",
    "Understood, nothing further is needed from me right now.",
    "Happy to help whenever the next batch of work arrives.",
    "Acknowledged, I will keep the working session open here.",
    "Sounds good, the current state is saved and resumable.",
    "All clear on this end, awaiting the next analysis task.",
};

inline constexpr const char* kLogUser[] = {
    "Uploading the next batch of raw count files right now.",
    "Pushed the revised analysis notebook to the shared drive.",
    "Started the alignment job on the cluster a minute ago.",
    "Exported the intermediate tables for offline review.",
    "Staged the quality control report under the run folder.",
    "Queued the normalization pass on the new sample sheet.",
};

inline constexpr const char* kLogAgent[] = {
    "File uploaded successfully; checksums verified cleanly.",
    "Job accepted; the queue position was logged for audit.",
    "Artifacts archived under the current run folder today.",
    "Transfer complete; no integrity warnings were raised.",
    "Stage finished cleanly; outputs registered downstream.",
};

inline constexpr const char* kDirectiveUser[] = {
    "Please rerun the clustering step with current settings.",
    "Use the standard normalization recipe for this pass.",
    "Keep the plotting style consistent with earlier figures.",
    "Hold the remaining samples until the review call closes.",
    "Route the differential results through usual filters.",
};

inline constexpr const char* kStateUser[] = {
    "We are moving into the validation phase of the study.",
    "The cohort review wrapped up earlier than planned today.",
    "The collaboration call moved the schedule up one week.",
    "Analysis focus shifts to the secondary endpoints next.",
};

inline constexpr const char* kAckAgent[] = {
    "Will do; applying that to the active pipeline shortly.",
    "Confirmed; the workflow now reflects that exact choice.",
    "Done; the configuration change is live for future runs.",
    "Recorded; downstream steps will pick it up on their own.",
};

// Fact carriers mention the key in prose and once in the marker.
inline constexpr const char* kFactDirectiveUser[] = {
    "Pin %s now: FACT %s=%s; keep it fixed.",
    "Set %s for this run: FACT %s=%s; please.",
    "Lock %s as agreed: FACT %s=%s; hold it.",
};

inline constexpr const char* kFactStateUser[] = {
    "Change of %s: FACT %s=%s; replaces the old value.",
    "Revised %s: FACT %s=%s; use this from now on.",
    "New %s decision: FACT %s=%s; prior value retired.",
};

inline constexpr const char* kFactAckAgent[] = {
    "Confirmed, %s is now %s.",
    "Recorded, %s set to %s.",
    "Done, %s holds at %s.",
};

inline constexpr const char* kCapacityFiller[] = {
    "Routine check on the instrument calibration came back clean.",
    "Reviewed the overnight queue, nothing unusual in the logs.",
    "The shared folder sync finished without any conflicts today.",
    "Rebalanced the compute allocation across the pending jobs.",
    "Archived the stale scratch files to free up working space.",
    "Walked through the run sheet again, all entries accounted for.",
    "The weekly backup completed and the manifest checks out fine.",
    "Confirmed the reagent inventory covers the next two batches.",
};

inline constexpr const char* kKeyBases[] = {
    "p_threshold", "fdr_cutoff",  "log2fc_cutoff", "batch_size",  "min_counts",
    "cluster_count", "resolution_param", "sample_filter", "gene_panel", "norm_method",
    "seed_value",  "perplexity",  "learning_rate", "dropout_rate", "kmer_length",
    "window_span", "quality_floor", "depth_target", "alpha_level", "beta_margin",
};

inline constexpr const char* kPadWords[] = {
    "assay", "panel", "notes", "reads", "stats", "batch", "probe", "locus", "trial", "suite",
};

}  // namespace corpus

namespace detail {

template <std::size_t N>
inline const char* pick(const char* const (&pool)[N], std::uint64_t& rng) {
    return pool[bounded(rng, N)];
}

inline std::string format_carrier(const char* tmpl, const std::string& a, const std::string& b,
                                  const std::string& c = {}) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), tmpl, a.c_str(), b.c_str(), c.c_str());
    return std::string(buf);
}

// Pads to exactly `tokens * 4` characters with no whitespace runs, so the
// heuristic counter reports exactly `tokens`.
inline std::string exact_token_text(std::string base, std::size_t tokens, std::uint64_t& rng) {
    const std::size_t target = tokens * 4;
    if (base.size() > target)
        throw GenerationError("exact_token_text: carrier longer than requested size");
    while (base.size() < target) {
        base += ' ';
        base += corpus::kPadWords[bounded(rng, std::size(corpus::kPadWords))];
    }
    base.resize(target);
    if (base.back() == ' ') base.back() = 'x';
    return base;
}

// Distinct fixed-width values ("0.417") drawn without replacement; equal
// lengths keep expected answers free of substring collisions.
class ValueDeck {
public:
    explicit ValueDeck(std::uint64_t& rng) {
        codes_.resize(1000);
        for (std::size_t i = 0; i < codes_.size(); ++i) codes_[i] = static_cast<int>(i);
        for (std::size_t i = codes_.size(); i > 1; --i)
            std::swap(codes_[i - 1], codes_[bounded(rng, i)]);
    }

    std::string next() {
        if (next_ >= codes_.size()) throw GenerationError("ValueDeck exhausted");
        char buf[8];
        std::snprintf(buf, sizeof(buf), "0.%03d", codes_[next_++]);
        return std::string(buf);
    }

private:
    std::vector<int> codes_;
    std::size_t next_ = 0;
};

struct PlannedAssertion {
    std::uint64_t exchange = 0;
    std::string key;
    std::string value;
    bool is_update = false;  // updates render as state_update, first assertions as directive
};

// Claims a free exchange slot in [lo, hi), probing forward deterministically.
inline std::uint64_t claim_slot(std::set<std::uint64_t>& used, std::uint64_t lo, std::uint64_t hi,
                                std::uint64_t& rng) {
    if (hi <= lo) hi = lo + 1;
    std::uint64_t span = hi - lo;
    std::uint64_t p = bounded(rng, span);
    for (std::uint64_t step = 0; step < span; ++step) {
        std::uint64_t cand = lo + (p + step) % span;
        if (used.insert(cand).second) return cand;
    }
    throw GenerationError("generate_realistic_run: no free exchange slot in band");
}

// Fixed-width ordinals keep keys free of prefix collisions.
inline std::string make_key(std::size_t ordinal, std::uint64_t& rng) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%03zu",
                  corpus::kKeyBases[bounded(rng, std::size(corpus::kKeyBases))], ordinal);
    return std::string(buf);
}

}  // namespace detail

// Placement bands: beginning = first 5% of indices, middle = 45-55%,
// end = last 5%.
inline std::uint64_t resolve_placement_index(const FactSpec& fact, std::uint64_t total,
                                             std::uint64_t& rng) {
    if (fact.explicit_index) {
        if (*fact.explicit_index >= total) throw GenerationError("explicit fact index out of range");
        return *fact.explicit_index;
    }
    auto band = [&](std::uint64_t lo, std::uint64_t hi) {
        if (hi > total) hi = total;
        if (hi <= lo) hi = lo + 1;
        if (lo >= total) lo = total - 1;
        if (hi <= lo) hi = lo + 1;
        return lo + bounded(rng, hi - lo);
    };
    switch (fact.placement) {
        case Placement::beginning: return band(0, std::max<std::uint64_t>(1, total / 20));
        case Placement::middle: return band(total * 45 / 100, std::max<std::uint64_t>(total * 55 / 100, total * 45 / 100 + 1));
        case Placement::end: return band(total - std::max<std::uint64_t>(1, total / 20), total);
    }
    return total - 1;
}

// T filler messages with the fact's carrier at the resolved placement.
// filler_tokens > 0 pads every message to that exact token count.
inline std::vector<Message> generate_capacity_run(std::uint64_t total_messages, const FactSpec& fact,
                                                  std::uint64_t seed, const TokenCounter& counter,
                                                  std::size_t filler_tokens = 0) {
    if (total_messages < 1) throw ConfigError("generate_capacity_run: need at least one message");
    std::uint64_t rng = seed ^ 0xcafe0000ull;
    std::uint64_t fact_at = resolve_placement_index(fact, total_messages, rng);

    std::vector<Message> out;
    out.reserve(total_messages);
    for (std::uint64_t i = 0; i < total_messages; ++i) {
        std::string text;
        if (i == fact_at) {
            text = "Note for the record: " + render_fact_marker(fact.key, fact.value) +
                   "; retain this detail.";
        } else {
            text = detail::pick(corpus::kCapacityFiller, rng);
        }
        if (filler_tokens > 0) text = detail::exact_token_text(std::move(text), filler_tokens, rng);
        out.push_back(make_message(i % 2 == 0 ? Role::user : Role::agent, std::move(text), i, counter));
    }

    // Self-check: the marker must appear exactly once, at the placed index.
    std::size_t hits = 0;
    for (const auto& m : out)
        for (const auto& f : scan_facts(m.text))
            if (f.key == fact.key) {
                ++hits;
                if (m.index != fact_at || f.value != fact.value)
                    throw GenerationError("capacity fact self-check failed");
            }
    if (hits != 1) throw GenerationError("capacity fact marker count != 1");
    return out;
}

namespace detail {

inline std::string join_values(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += values[i];
    }
    return out;
}

// Recomputes the expected answer for a case from a scanned ledger; the
// generation-time self-check compares this against the stored expectation.
inline std::string derive_expected(const QueryCase& c, const std::vector<LedgerEntry>& ledger) {
    auto values_of = [&](const std::string& key) {
        std::vector<std::string> vals;
        for (const auto& e : ledger)
            if (e.key == key) vals.push_back(e.value);
        return vals;
    };
    switch (c.type) {
        case QueryType::recent_state:
        case QueryType::contradictory: {
            auto v = values_of(c.keys.at(0));
            return v.empty() ? std::string() : v.back();
        }
        case QueryType::historical_retrieval:
        case QueryType::long_term: {
            auto v = values_of(c.keys.at(0));
            return v.empty() ? std::string() : v.front();
        }
        case QueryType::temporal_sequence:
            return join_values(values_of(c.keys.at(0)));
        case QueryType::multi_hop: {
            auto a = values_of(c.keys.at(0));
            auto b = values_of(c.keys.at(1));
            if (a.empty() || b.empty()) return {};
            return a.back() + "; " + b.back();
        }
    }
    return {};
}

}  // namespace detail

inline QueryCase make_query_case(QueryType type, const ContradictionSchedule& sched) {
    QueryCase c;
    c.type = type;
    c.keys = {sched.key};
    c.supporting_indices = sched.injection_indices;
    switch (type) {
        case QueryType::recent_state:
            c.question = "What is the current value of " + sched.key + "?";
            c.expected = sched.values.back();
            break;
        case QueryType::contradictory:
            c.question = "The setting " + sched.key + " changed several times; what is it now?";
            c.expected = sched.values.back();
            break;
        case QueryType::temporal_sequence:
            c.question = "List every value " + sched.key + " has taken so far, in order.";
            c.expected = detail::join_values(sched.values);
            break;
        default:
            throw std::invalid_argument("make_query_case: schedule-backed type expected");
    }
    return c;
}

inline QueryCase make_query_case(QueryType type, const UniqueFact& fact) {
    QueryCase c;
    c.type = type;
    c.keys = {fact.key};
    c.supporting_indices = {fact.index};
    c.expected = fact.value;
    c.unique_fact = true;
    switch (type) {
        case QueryType::historical_retrieval:
            c.question = "What was the initial value of " + fact.key + " when we first configured it?";
            break;
        case QueryType::long_term:
            c.question = "Back at the very start we fixed " + fact.key + "; what was it?";
            break;
        default:
            throw std::invalid_argument("make_query_case: unique-fact type expected");
    }
    return c;
}

inline QueryCase make_query_case(const std::pair<UniqueFact, UniqueFact>& pair) {
    QueryCase c;
    c.type = QueryType::multi_hop;
    c.keys = {pair.first.key, pair.second.key};
    c.supporting_indices = {pair.first.index, pair.second.index};
    c.question = "Combine the records: what are the current values of " + pair.first.key + " and " +
                 pair.second.key + "?";
    c.expected = pair.first.value + "; " + pair.second.value;
    return c;
}

inline RealisticRun generate_realistic_run(const WorkloadSpec& spec, const TokenCounter& counter) {
    spec.validate();
    const std::uint64_t total = spec.total_messages;
    if (total < 24) throw ConfigError("generate_realistic_run: needs at least 24 messages");
    const std::uint64_t exchanges = (total + 1) / 2;
    std::uint64_t rng = spec.seed ^ 0x5ea11575ull;

    RealisticRun run;
    detail::ValueDeck deck(rng);
    std::set<std::uint64_t> used;
    std::vector<detail::PlannedAssertion> plan;
    std::size_t key_ordinal = 0;

    const std::size_t n_contra = std::clamp<std::size_t>(exchanges / 50, std::size_t{1}, std::size_t{24});
    const std::size_t pool_each = std::clamp<std::size_t>(exchanges / 48, std::size_t{1}, std::size_t{24});
    const std::size_t schedule_k = exchanges >= 12 ? 3 : 2;

    // Long-term uniques live in the first 5% of exchanges, historical
    // uniques in the first third, multi-hop pair members span early/late.
    for (std::size_t i = 0; i < pool_each; ++i) {
        UniqueFact f{detail::make_key(key_ordinal++, rng), deck.next(), 0};
        std::uint64_t slot = detail::claim_slot(used, 0, std::max<std::uint64_t>(1, exchanges / 20), rng);
        f.index = slot * 2;
        plan.push_back({slot, f.key, f.value, false});
        run.long_term_facts.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < pool_each; ++i) {
        UniqueFact f{detail::make_key(key_ordinal++, rng), deck.next(), 0};
        std::uint64_t slot =
            detail::claim_slot(used, exchanges / 20, std::max<std::uint64_t>(exchanges / 3, exchanges / 20 + 1), rng);
        f.index = slot * 2;
        plan.push_back({slot, f.key, f.value, false});
        run.historical_facts.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < pool_each; ++i) {
        UniqueFact a{detail::make_key(key_ordinal++, rng), deck.next(), 0};
        UniqueFact b{detail::make_key(key_ordinal++, rng), deck.next(), 0};
        std::uint64_t sa = detail::claim_slot(used, 0, std::max<std::uint64_t>(1, exchanges / 3), rng);
        std::uint64_t sb =
            detail::claim_slot(used, exchanges / 3, std::max<std::uint64_t>(exchanges * 4 / 5, exchanges / 3 + 1), rng);
        a.index = sa * 2;
        b.index = sb * 2;
        plan.push_back({sa, a.key, a.value, false});
        plan.push_back({sb, b.key, b.value, false});
        run.fact_pairs.emplace_back(std::move(a), std::move(b));
    }
    for (std::size_t s = 0; s < n_contra; ++s) {
        ContradictionSchedule sched;
        sched.key = detail::make_key(key_ordinal++, rng);
        for (std::size_t k = 0; k < schedule_k; ++k) {
            std::uint64_t center = exchanges * (k + 1) / (schedule_k + 1);
            std::uint64_t half = std::max<std::uint64_t>(1, exchanges / (2 * (schedule_k + 1)));
            std::uint64_t lo = center > half ? center - half : 0;
            std::uint64_t slot = detail::claim_slot(used, lo, center + half, rng);
            sched.values.push_back(deck.next());
            sched.injection_indices.push_back(slot * 2);
            plan.push_back({slot, sched.key, sched.values.back(), k > 0});
        }
        run.schedules.push_back(std::move(sched));
    }

    // Acts: forced fact exchanges consume their category's quota; the rest
    // is a depletion draw against the remaining targets.
    std::map<std::uint64_t, const detail::PlannedAssertion*> by_slot;
    for (const auto& p : plan) by_slot[p.exchange] = &p;

    std::array<std::int64_t, 4> target{};
    target[0] = static_cast<std::int64_t>(spec.mix.directive * static_cast<double>(exchanges) + 0.5);
    target[1] = static_cast<std::int64_t>(spec.mix.state_update * static_cast<double>(exchanges) + 0.5);
    target[2] = static_cast<std::int64_t>(spec.mix.experimental_log * static_cast<double>(exchanges) + 0.5);
    target[3] = static_cast<std::int64_t>(exchanges) - target[0] - target[1] - target[2];
    for (const auto& p : plan) --target[p.is_update ? 1 : 0];

    std::vector<ActKind> free_acts;
    free_acts.reserve(exchanges);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::int64_t i = 0; i < target[a]; ++i) free_acts.push_back(static_cast<ActKind>(a));
    while (free_acts.size() < exchanges - plan.size()) free_acts.push_back(ActKind::noise);
    free_acts.resize(exchanges - plan.size());
    for (std::size_t i = free_acts.size(); i > 1; --i)
        std::swap(free_acts[i - 1], free_acts[bounded(rng, i)]);

    // Render exchanges: user at even indices, agent at odd.
    run.messages.reserve(total);
    std::size_t free_cursor = 0;
    std::size_t token_sum = 0;
    for (std::uint64_t e = 0; e < exchanges; ++e) {
        std::string user_text, agent_text;
        ActKind act;
        auto it = by_slot.find(e);
        if (it != by_slot.end()) {
            const auto& p = *it->second;
            act = p.is_update ? ActKind::state_update : ActKind::directive;
            const char* tmpl = p.is_update ? detail::pick(corpus::kFactStateUser, rng)
                                           : detail::pick(corpus::kFactDirectiveUser, rng);
            user_text = detail::format_carrier(tmpl, p.key, p.key, p.value);
            agent_text = detail::format_carrier(detail::pick(corpus::kFactAckAgent, rng), p.key, p.value);
        } else {
            act = free_acts[free_cursor++];
            switch (act) {
                case ActKind::directive:
                    user_text = detail::pick(corpus::kDirectiveUser, rng);
                    agent_text = detail::pick(corpus::kAckAgent, rng);
                    break;
                case ActKind::state_update:
                    user_text = detail::pick(corpus::kStateUser, rng);
                    agent_text = detail::pick(corpus::kAckAgent, rng);
                    break;
                case ActKind::experimental_log:
                    user_text = detail::pick(corpus::kLogUser, rng);
                    agent_text = detail::pick(corpus::kLogAgent, rng);
                    break;
                case ActKind::noise:
                    user_text = detail::pick(corpus::kNoiseUser, rng);
                    agent_text = detail::pick(corpus::kNoiseAgent, rng);
                    break;
            }
        }
        std::uint64_t ui = e * 2;
        run.messages.push_back(make_message(Role::user, std::move(user_text), ui, counter));
        run.act_message_counts[static_cast<std::size_t>(act)]++;
        token_sum += run.messages.back().token_count;
        if (ui + 1 < total) {
            run.messages.push_back(make_message(Role::agent, std::move(agent_text), ui + 1, counter));
            run.act_message_counts[static_cast<std::size_t>(act)]++;
            token_sum += run.messages.back().token_count;
        }
    }
    run.mean_tokens_per_message = static_cast<double>(token_sum) / static_cast<double>(total);

    // Ledger in message order.
    std::sort(plan.begin(), plan.end(),
              [](const auto& a, const auto& b) { return a.exchange < b.exchange; });
    for (const auto& p : plan) run.ledger.push_back({p.key, p.value, p.exchange * 2});

    // Answerability self-check: rescan the raw log and compare.
    std::vector<LedgerEntry> scanned;
    for (const auto& m : run.messages) {
        if (m.role != Role::user) continue;  // agent acks carry no markers
        for (const auto& f : scan_facts(m.text)) scanned.push_back({f.key, f.value, m.index});
    }
    if (scanned.size() != run.ledger.size())
        throw GenerationError("realistic run self-check: ledger size mismatch");
    for (std::size_t i = 0; i < scanned.size(); ++i) {
        if (scanned[i].key != run.ledger[i].key || scanned[i].value != run.ledger[i].value ||
            scanned[i].index != run.ledger[i].index)
            throw GenerationError("realistic run self-check: ledger entry mismatch");
    }

    // Default probes: one per challenge family, cycling over the pools.
    const std::array<QueryType, 4> probe_types = {QueryType::recent_state,
                                                  QueryType::historical_retrieval,
                                                  QueryType::contradictory, QueryType::multi_hop};
    for (int i = 0; i < spec.probes_per_seed; ++i) {
        QueryType t = probe_types[static_cast<std::size_t>(i) % probe_types.size()];
        std::size_t pick_i = static_cast<std::size_t>(i) / probe_types.size();
        QueryCase c;
        switch (t) {
            case QueryType::recent_state:
            case QueryType::contradictory:
                c = make_query_case(t, run.schedules[pick_i % run.schedules.size()]);
                break;
            case QueryType::historical_retrieval:
                c = make_query_case(t, run.historical_facts[pick_i % run.historical_facts.size()]);
                break;
            default:
                c = make_query_case(run.fact_pairs[pick_i % run.fact_pairs.size()]);
                break;
        }
        if (detail::derive_expected(c, scanned) != c.expected)
            throw GenerationError("probe answerability self-check failed");
        run.probes.push_back(std::move(c));
    }
    return run;
}

// Growth-law workload: one unique fact per `messages_per_fact` block, with
// the marker sized so the consolidated profile line costs exactly
// `fact_tokens` heuristic tokens. With W = messages_per_fact and a matching
// consolidation cadence, profile growth is affine by construction.
inline std::vector<Message> generate_growth_run(std::uint64_t total_messages,
                                                std::uint64_t seed, const TokenCounter& counter,
                                                std::size_t fact_tokens = 30,
                                                std::uint64_t messages_per_fact = 10) {
    std::uint64_t rng = seed ^ 0x9e0e7411ull;
    const std::size_t marker_chars = fact_tokens * 4 - 1;  // profile line + newline = 4 * tokens
    std::vector<Message> out;
    out.reserve(total_messages);
    for (std::uint64_t i = 0; i < total_messages; ++i) {
        std::string text;
        if (i % messages_per_fact == 0) {
            char key[32];
            std::snprintf(key, sizeof(key), "growth_fact_%06llu",
                          static_cast<unsigned long long>(i / messages_per_fact));
            std::string marker = "FACT ";
            marker += key;
            marker += '=';
            if (marker.size() + 1 > marker_chars)
                throw GenerationError("generate_growth_run: fact_tokens too small for key");
            while (marker.size() < marker_chars)
                marker += static_cast<char>('a' + bounded(rng, 26));
            text = "Log entry: " + marker + "; recorded.";
        } else {
            text = detail::pick(corpus::kCapacityFiller, rng);
        }
        out.push_back(make_message(i % 2 == 0 ? Role::user : Role::agent, std::move(text), i, counter));
    }
    return out;
}

// Exactly per_type cases for each of the six challenge types, verified
// answerable against the raw log.
inline std::vector<QueryCase> generate_query_suite(const RealisticRun& run, std::size_t per_type = 20) {
    if (run.schedules.size() < per_type || run.historical_facts.size() < per_type ||
        run.long_term_facts.size() < per_type || run.fact_pairs.size() < per_type) {
        throw ConfigError(
            "generate_query_suite: log too short to support all six query types at the requested "
            "count; use a longer run (>= 2000 messages for 20 cases per type)");
    }
    std::vector<QueryCase> suite;
    suite.reserve(per_type * kAllQueryTypes.size());
    for (QueryType t : kAllQueryTypes) {
        for (std::size_t i = 0; i < per_type; ++i) {
            switch (t) {
                case QueryType::recent_state:
                case QueryType::contradictory:
                case QueryType::temporal_sequence:
                    suite.push_back(make_query_case(t, run.schedules[i]));
                    break;
                case QueryType::historical_retrieval:
                    suite.push_back(make_query_case(t, run.historical_facts[i]));
                    break;
                case QueryType::long_term:
                    suite.push_back(make_query_case(t, run.long_term_facts[i]));
                    break;
                case QueryType::multi_hop:
                    suite.push_back(make_query_case(run.fact_pairs[i]));
                    break;
            }
            if (detail::derive_expected(suite.back(), run.ledger) != suite.back().expected)
                throw GenerationError("query suite answerability self-check failed");
        }
    }
    return suite;
}

}  // namespace dualmem
