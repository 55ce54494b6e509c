#include <gtest/gtest.h>

#include <deque>
#include <vector>

#include "dualmem/episodic.hpp"
#include "dualmem/util.hpp"

using namespace dualmem;

namespace {

Message quick_message(std::uint64_t index, Role role = Role::user) {
    TokenCounter counter;
    return make_message(role, "m" + std::to_string(index), index, counter);
}

}  // namespace

TEST(EpisodicBuffer, FillExactlyToCapacity) {
    EpisodicBuffer buf(10);
    for (std::uint64_t i = 0; i < 10; ++i) buf.append(quick_message(i));
    auto window = buf.window();
    ASSERT_EQ(window.size(), 10u);
    for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(window[i].index, i);
}

TEST(EpisodicBuffer, FifoEvictionKeepsLastW) {
    EpisodicBuffer buf(10);
    for (std::uint64_t i = 0; i < 15; ++i) buf.append(quick_message(i));
    auto window = buf.window();
    ASSERT_EQ(window.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(window[i].index, i + 5);
}

TEST(EpisodicBuffer, DegenerateCapacityOne) {
    EpisodicBuffer buf(1);
    for (std::uint64_t i = 0; i < 3; ++i) buf.append(quick_message(i));
    auto window = buf.window();
    ASSERT_EQ(window.size(), 1u);
    EXPECT_EQ(window[0].index, 2u);
}

TEST(EpisodicBuffer, EmptyWindow) {
    EpisodicBuffer buf(10);
    EXPECT_TRUE(buf.window().empty());
}

TEST(EpisodicBuffer, UnderCapacityKeepsAllInOrder) {
    EpisodicBuffer buf(10);
    for (std::uint64_t i = 0; i < 3; ++i) buf.append(quick_message(i));
    auto window = buf.window();
    ASSERT_EQ(window.size(), 3u);
    for (std::uint64_t i = 0; i < 3; ++i) EXPECT_EQ(window[i].index, i);
}

TEST(EpisodicBuffer, RejectsOutOfSequenceAppend) {
    EpisodicBuffer buf(10);
    buf.append(quick_message(0));
    EXPECT_THROW(buf.append(quick_message(2)), std::invalid_argument);
    EXPECT_THROW(buf.append(quick_message(0)), std::invalid_argument);
    buf.append(quick_message(1));
    EXPECT_EQ(buf.size(), 2u);
}

TEST(EpisodicBuffer, RejectsZeroCapacity) {
    EXPECT_THROW(EpisodicBuffer(0), std::invalid_argument);
}

TEST(EpisodicBuffer, SnapshotsAreImmuneToLaterAppends) {
    EpisodicBuffer buf(3);
    for (std::uint64_t i = 0; i < 3; ++i) buf.append(quick_message(i));
    auto snapshot = buf.window();
    buf.append(quick_message(3));
    ASSERT_EQ(snapshot.size(), 3u);
    EXPECT_EQ(snapshot[0].index, 0u);
    EXPECT_EQ(buf.window()[0].index, 1u);
}

TEST(EpisodicBuffer, TenThousandAppendsKeepExactSuffix) {
    EpisodicBuffer buf(10);
    for (std::uint64_t i = 0; i < 10000; ++i) buf.append(quick_message(i));
    auto window = buf.window();
    ASSERT_EQ(window.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(window[i].index, 9990 + i);
    EXPECT_EQ(buf.total_appended(), 10000u);
}

TEST(EpisodicBuffer, SystemMessagesAdvanceSequenceButStayOut) {
    TokenCounter counter;
    EpisodicBuffer buf(10);
    buf.append(quick_message(0));
    buf.append(make_message(Role::system, "system prompt", 1, counter));
    buf.append(quick_message(2, Role::agent));
    auto window = buf.window();
    ASSERT_EQ(window.size(), 2u);
    EXPECT_EQ(window[0].index, 0u);
    EXPECT_EQ(window[1].index, 2u);
    EXPECT_EQ(buf.total_appended(), 2u);
    EXPECT_EQ(buf.next_index(), 3u);
}

// Window law against a brute-force replay oracle, random T and W.
TEST(EpisodicBuffer, WindowEqualsSuffixOracle) {
    std::uint64_t rng = 4242;
    const std::size_t kChoices[] = {1, 10, 50};
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t w = kChoices[bounded(rng, 3)];
        std::uint64_t t = 1 + bounded(rng, 5000);
        EpisodicBuffer buf(w);
        std::deque<std::uint64_t> oracle;
        for (std::uint64_t i = 0; i < t; ++i) {
            buf.append(quick_message(i));
            oracle.push_back(i);
            if (oracle.size() > w) oracle.pop_front();
        }
        auto window = buf.window();
        ASSERT_EQ(window.size(), oracle.size());
        for (std::size_t i = 0; i < window.size(); ++i) EXPECT_EQ(window[i].index, oracle[i]);
    }
}

TEST(EpisodicBuffer, TokenFootprintIsBoundedByCapacity) {
    TokenCounter counter;
    EpisodicBuffer buf(10);
    std::uint64_t rng = 7;
    std::size_t max_tokens = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        std::string text(1 + bounded(rng, 300), 'z');
        Message m = make_message(Role::user, text, i, counter);
        max_tokens = std::max(max_tokens, m.token_count);
        buf.append(m);
        std::size_t total = 0;
        for (const auto& e : buf.window()) total += e.token_count;
        EXPECT_LE(total, buf.capacity() * max_tokens);
    }
}
