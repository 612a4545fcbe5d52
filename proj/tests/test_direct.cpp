#include <gtest/gtest.h>

#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "sponsored/direct.hpp"
#include "sponsored/generators.hpp"

using namespace sponsored;

TEST(Direct, RunningShoesTruthful) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> v{50, 30};
    const auto out = run_direct(inst, v);
    EXPECT_EQ(inst.questions[out.chosen_question].id, "terr");
    EXPECT_EQ(out.expected_welfare, 24);
    EXPECT_EQ(out.expected_value, (std::vector<Rational>{15, 9}));
    EXPECT_EQ(out.expected_payment, (std::vector<Rational>{0, 0}));
    EXPECT_EQ(out.expected_utility, (std::vector<Rational>{15, 9}));
    ASSERT_EQ(out.per_signal.size(), 2u);
    EXPECT_EQ(out.per_signal[0].winner, std::optional<std::size_t>(0));
    EXPECT_EQ(out.per_signal[0].winner_effective_value, 30);
    EXPECT_EQ(out.per_signal[1].winner, std::optional<std::size_t>(1));
    EXPECT_EQ(out.per_signal[1].winner_effective_value, 18);
}

TEST(Direct, RunningShoesShadedBidMatchesOracle) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> bids{20, 30};
    const auto out = run_direct(inst, bids);
    const auto ref = oracle::vcg(inst, bids);
    EXPECT_EQ(out.expected_welfare, 15);
    EXPECT_EQ(out.chosen_question, ref.outcome.question);
    EXPECT_EQ(out.expected_welfare, ref.welfare);
    EXPECT_EQ(out.expected_payment, ref.payments);
}

TEST(Direct, PoaInstanceChoosesRevealingQuestion) {
    const auto inst = gen_poa_instance(3, Rational(1, 9));
    const std::vector<Rational> v(3, Rational(1));
    const auto out = run_direct(inst, v);
    EXPECT_EQ(inst.questions[out.chosen_question].id, "q1");
    EXPECT_EQ(out.expected_welfare, 1);
}

TEST(Direct, SingleAdvertiserPaysNothing) {
    Instance inst;
    inst.states = {"only"};
    inst.prior = {1};
    inst.questions = {{"q", {"s"}, {{1}}}};
    inst.advertisers = {{"solo", 7, {Rational(1, 2)}}};
    const std::vector<Rational> v{7};
    const auto out = run_direct(inst, v);
    EXPECT_EQ(out.expected_payment[0], 0);
    EXPECT_EQ(out.expected_welfare, Rational(7, 2));
}

TEST(Direct, AllZeroEffectiveValuesLeaveItemUnallocated) {
    auto inst = gen_running_shoes();
    const std::vector<Rational> zero{0, 0};
    const auto out = run_direct(inst, zero);
    for (const auto& a : out.per_signal) EXPECT_FALSE(a.winner.has_value());
    EXPECT_EQ(out.expected_welfare, 0);
    EXPECT_EQ(out.expected_payment, (std::vector<Rational>{0, 0}));
}

TEST(Direct, TiePoliciesChooseAmongEqualQuestionsAndBidders) {
    Instance inst;
    inst.states = {"t"};
    inst.prior = {1};
    inst.questions = {{"first", {"s"}, {{1}}}, {"second", {"s"}, {{1}}}};
    inst.advertisers = {{"x", 1, {1}}, {"y", 1, {1}}};
    const std::vector<Rational> bids{1, 1};
    EXPECT_EQ(select_question(inst, bids), 0u);
    TieBreaking ties{TiePolicy({1, 0}), TiePolicy({1, 0})};
    EXPECT_EQ(select_question(inst, bids, ties), 1u);
    EXPECT_EQ(allocate(inst, bids, "first", "s", ties), std::optional<std::size_t>(1));
    EXPECT_EQ(allocate(inst, bids, "first", "s"), std::optional<std::size_t>(0));
    const auto out = run_direct(inst, bids, ties);
    EXPECT_EQ(out.expected_payment, (std::vector<Rational>{0, 1}));
}

TEST(Direct, ErrorsOnBadInput) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> one{1};
    EXPECT_THROW(run_direct(inst, one), ArityError);
    const std::vector<Rational> v{50, 30};
    EXPECT_THROW(run_direct(inst, v, TieBreaking{TiePolicy({0, 1, 2}), {}}), ParameterError);
    EXPECT_THROW(welfare_without(inst, v, 5), LookupError);
}

// Welfare, question choice, winners and payments against full enumeration of
// outcomes with Clarke-pivot payments.
TEST(Direct, MatchesEnumerationOracleOnCorpus) {
    oracle::RandomInstances bidgen(99);
    for (const auto& [name, inst] : corpus::full()) {
        std::vector<std::vector<Rational>> profiles{inst.base_values()};
        std::vector<Rational> random_bids;
        for (std::size_t i = 0; i < inst.advertisers.size(); ++i)
            random_bids.push_back(Rational(static_cast<long>(bidgen.pick(0, 12)), 2));
        profiles.push_back(random_bids);
        if (inst.advertisers.size() > 6) profiles.resize(1);  // enumeration is exponential in signals
        for (const auto& bids : profiles) {
            if (inst.questions[0].signals.size() > 6) break;
            const auto out = run_direct(inst, bids);
            const auto ref = oracle::vcg(inst, bids);
            ASSERT_EQ(out.chosen_question, ref.outcome.question) << name;
            EXPECT_EQ(out.expected_welfare, ref.welfare) << name;
            EXPECT_EQ(out.expected_payment, ref.payments) << name;
            for (const auto& a : out.per_signal) EXPECT_EQ(a.winner, ref.outcome.winners[a.signal]) << name;
        }
    }
}

TEST(Direct, DecompositionMatchesPaymentsOnCorpus) {
    for (const auto& [name, inst] : corpus::full()) {
        const auto bids = inst.base_values();
        const auto out = run_direct(inst, bids);
        const auto parts = decompose_payment(inst, bids);
        for (std::size_t i = 0; i < bids.size(); ++i) {
            EXPECT_EQ(parts[i].total, out.expected_payment[i]) << name;
            EXPECT_EQ(parts[i].stage1_externality + parts[i].expected_second_price, parts[i].total) << name;
            EXPECT_GE(parts[i].stage1_externality, 0) << name;
        }
    }
}

TEST(Direct, DecompositionOnRunningShoesWithShadedBid) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> bids{20, 30};
    const auto parts = decompose_payment(inst, bids);
    const auto out = run_direct(inst, bids);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(parts[i].total, out.expected_payment[i]);
}

TEST(Sampling, SameSeedSameTrajectory) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> v{50, 30};
    EXPECT_EQ(sample_trajectory(inst, v, {}, 42), sample_trajectory(inst, v, {}, 42));
    const auto batch = sample_trajectories(inst, v, {}, 42, 5);
    EXPECT_EQ(batch.front(), sample_trajectory(inst, v, {}, 42));
    EXPECT_EQ(batch[3], sample_trajectory(inst, v, {}, 45));
}

TEST(Sampling, SignalFollowsStateAndFrequenciesMatchPrior) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> v{50, 30};
    std::vector<int> counts(4, 0);
    const auto batch = sample_trajectories(inst, v, {}, 1, 4000);
    for (const auto& t : batch) {
        ++counts[t.state];
        // terr reveals the terrain coordinate deterministically
        EXPECT_EQ(t.signal, t.state >= 2 ? 0u : 1u);
        EXPECT_EQ(t.winner, std::optional<std::size_t>(t.signal == 0 ? 0 : 1));
    }
    for (int c : counts) EXPECT_NEAR(c / 4000.0, 0.25, 0.03);
}
