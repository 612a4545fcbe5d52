#include <gtest/gtest.h>

#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "sponsored/analysis.hpp"
#include "sponsored/generators.hpp"
#include "sponsored/modular.hpp"

using namespace sponsored;

namespace {

StrategyProfile worked_example_profile(const Instance& inst) {
    const std::vector<Rational> v{50, 30};
    auto profile = uniform_stage2_profile(BeliefTable(inst), v);
    profile[0].stage1 = {21, 20};
    profile[1].stage1 = {9, 12};
    return profile;
}

// R_i(ℓ) from the joint distribution: the winner's value minus the best
// competing effective value, with ties going to the lower index.
Rational stage2_value_oracle(const Instance& inst, const std::vector<Rational>& v, std::size_t q, std::size_t i) {
    Rational total;
    for (std::size_t s = 0; s < inst.questions[q].signals.size(); ++s) {
        const Rational mine = v[i] * oracle::joint_conversion(inst, q, s, i);
        Rational rival;
        bool beaten = false;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j == i) continue;
            const Rational theirs = v[j] * oracle::joint_conversion(inst, q, s, j);
            rival = max(rival, theirs);
            if (theirs > mine || (theirs == mine && j < i)) beaten = true;
        }
        if (!beaten && mine.is_positive()) total += mine - rival;
    }
    return total;
}

}  // namespace

TEST(Modular, WorkedExampleUnderStage1Vcg) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> v{50, 30};
    const auto out = run_modular(inst, worked_example_profile(inst), {Stage1Variant::vcg}, v);
    EXPECT_EQ(inst.questions[out.chosen_question].id, "tgt");
    EXPECT_EQ(out.stage1_totals, (std::vector<Rational>{30, 32}));
    EXPECT_EQ(out.stage1_payments, (std::vector<Rational>{0, 1}));
    ASSERT_EQ(out.per_signal.size(), 2u);
    EXPECT_EQ(out.per_signal[0].winner, std::optional<std::size_t>(0));
    EXPECT_EQ(out.per_signal[0].stage2_payment, 0);
    EXPECT_EQ(out.per_signal[1].winner, std::optional<std::size_t>(1));
    EXPECT_EQ(out.per_signal[1].stage2_payment, 5);
    EXPECT_EQ(out.expected_welfare, Rational(81, 4));
    EXPECT_EQ(out.expected_utility, (std::vector<Rational>{Rational(45, 4), Rational(17, 4)}));
}

TEST(Modular, Stage2AuctionIsSecondPriceOnEffectiveBids) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> v{50, 30};
    const auto r = stage2_auction(inst, v, "terr", "no-click");
    EXPECT_EQ(r.winner, std::optional<std::size_t>(1));
    EXPECT_EQ(r.payment, 0);
    const auto t = stage2_auction(inst, v, "tgt", "no-click");
    EXPECT_EQ(t.winner, std::optional<std::size_t>(1));
    EXPECT_EQ(t.payment, 5);
}

TEST(Modular, Stage1Rules) {
    const BidMatrix bids{{3, 1}, {0, 4}, {3, 0}};
    const auto vcg = stage1_vcg(bids);
    EXPECT_EQ(vcg.chosen, 0u);
    EXPECT_EQ(vcg.totals, (std::vector<Rational>{6, 5}));
    EXPECT_EQ(vcg.payments, (std::vector<Rational>{1, 0, 2}));
    const auto fp = stage1_first_price(bids);
    EXPECT_EQ(fp.payments, (std::vector<Rational>{3, 0, 0}));
    const auto ap = stage1_all_pay(bids);
    EXPECT_EQ(ap.payments, (std::vector<Rational>{3, 0, 3}));

    const BidMatrix tied{{1, 0}, {1, 2}};
    EXPECT_EQ(stage1_vcg(tied).chosen, 0u);
    EXPECT_EQ(stage1_vcg(tied, TiePolicy({1, 0})).chosen, 1u);
    // equal top bids on the chosen question: the advertiser tie policy picks the payer
    const auto fpt = stage1_first_price(tied, {}, TiePolicy({1, 0}));
    EXPECT_EQ(fpt.payments, (std::vector<Rational>{0, 1}));

    EXPECT_THROW(stage1_vcg(BidMatrix{{1, 2}, {1}}), ArityError);
    EXPECT_THROW(stage1_vcg(BidMatrix{{1, -2}}), ParameterError);
    EXPECT_THROW(stage1_vcg(BidMatrix{}), ArityError);
}

TEST(Modular, PrescribedProfileOnRunningShoes) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> v{50, 30};
    const auto p = prescribed_equilibrium(inst, v);
    EXPECT_EQ(p[0].stage1, (std::vector<Rational>{15, Rational(45, 4)}));
    EXPECT_EQ(p[1].stage1, (std::vector<Rational>{9, Rational(21, 4)}));
    const auto out = run_modular(inst, p, {}, v);
    EXPECT_EQ(inst.questions[out.chosen_question].id, "terr");
    EXPECT_EQ(out.stage1_totals, (std::vector<Rational>{24, Rational(33, 2)}));
    EXPECT_EQ(out.expected_welfare, 24);
}

TEST(Modular, Stage2ValuesMatchOracleOnCorpus) {
    for (const auto& [name, inst] : corpus::full(60)) {
        const auto v = inst.base_values();
        const BeliefTable beliefs(inst);
        const auto p = uniform_stage2_profile(beliefs, v);
        for (std::size_t q = 0; q < inst.questions.size(); ++q)
            for (std::size_t i = 0; i < v.size(); ++i)
                EXPECT_EQ(stage2_expected_utility(beliefs, v, p, q, i), stage2_value_oracle(inst, v, q, i)) << name;
    }
}

TEST(Modular, UtilitiesUseTrueValuesNotBids) {
    const auto inst = gen_running_shoes();
    const std::vector<Rational> v{50, 30};
    auto p = worked_example_profile(inst);
    for (auto& row : p[0].stage2)
        for (auto& b : row) b = 200;  // advertiser 1 overbids in stage 2
    const auto out = run_modular(inst, p, {}, v);
    // it now also wins no-click, worth 50/10 to it, and pays 12 there
    EXPECT_EQ(out.per_signal[1].winner, std::optional<std::size_t>(0));
    EXPECT_EQ(out.per_signal[1].stage2_payment, 12);
    EXPECT_EQ(out.expected_utility[0], Rational(45, 4) + Rational(3, 4) * (5 - 12));
    EXPECT_EQ(out.expected_welfare, 15);
}

TEST(Modular, ProfileShapeChecks) {
    const auto inst = gen_running_shoes();
    const BeliefTable beliefs(inst);
    const std::vector<Rational> v{50, 30};
    auto p = worked_example_profile(inst);
    EXPECT_TRUE(check_profile(beliefs, p).empty());
    p[0].stage2[1].pop_back();
    p[1].stage1[0] = -1;
    EXPECT_EQ(check_profile(beliefs, p).size(), 2u);
    EXPECT_THROW(run_modular(inst, p, {}, v), ParameterError);
    p.pop_back();
    EXPECT_EQ(check_profile(beliefs, p).size(), 1u);
}

TEST(Proxy, TruthfulReportsChooseB) {
    const auto inst = gen_proxy_counterexample();
    ASSERT_TRUE(validate(inst).empty());
    const std::vector<Rational> v{10, 10, 10};
    const auto out = run_proxy(inst, v, v);
    EXPECT_EQ(inst.questions[out.chosen_question].id, "B");
    EXPECT_EQ(out.stage1_totals, (std::vector<Rational>{7, 8}));
    EXPECT_EQ(out.expected_utility[1], 0);
    const auto r = prescribed_equilibrium(inst, v);
    EXPECT_EQ(r[0].stage1, (std::vector<Rational>{3, 8}));
    EXPECT_EQ(r[1].stage1, (std::vector<Rational>{4, 0}));
    EXPECT_EQ(r[2].stage1, (std::vector<Rational>{0, 0}));
}

TEST(Proxy, InflatedReportFlipsTheQuestion) {
    const auto inst = gen_proxy_counterexample();
    const std::vector<Rational> v{10, 10, 10}, reports{10, 20, 10};
    const auto out = run_proxy(inst, reports, v);
    EXPECT_EQ(inst.questions[out.chosen_question].id, "A");
    EXPECT_EQ(out.stage1_totals, (std::vector<Rational>{14, 11}));
    EXPECT_EQ(out.stage1_payments[1], 3);
    EXPECT_EQ(out.expected_utility[1], 1);
}

TEST(Proxy, PerSignalRatesAreAsDocumented) {
    const auto inst = gen_proxy_counterexample();
    const std::vector<std::vector<Rational>> a = {
        {Rational(6, 5), 0, 0}, {0, Rational(8, 5), 0}, {Rational(8, 5), 0, Rational(8, 5)},
        {Rational(6, 5), Rational(6, 5), Rational(2, 5)}};
    const std::vector<std::vector<Rational>> b = {
        {Rational(3, 2), Rational(3, 5), 0}, {Rational(3, 2), 0, 0}, {0, Rational(3, 2), Rational(3, 2)}};
    for (std::size_t s = 0; s < 4; ++s) {
        EXPECT_EQ(marginal_signal(inst, 0, s), Rational(1, 4));
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(posterior_conversion(inst, 0, s, i), a[s][i]);
    }
    for (std::size_t s = 0; s < 3; ++s) {
        EXPECT_EQ(marginal_signal(inst, 1, s), Rational(1, 3));
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(posterior_conversion(inst, 1, s, i), b[s][i]);
    }
}

TEST(Robustness, FirstPriceAndAllPayOutcomes) {
    const auto inst = gen_poa_instance(3, Rational(1, 9));
    const std::vector<Rational> v(3, Rational(1));
    const auto p = robustness_profiles(3, Rational(1, 9));
    const auto ties = favor_question(inst, "q2");
    const auto fp = run_modular(inst, p, {Stage1Variant::first_price}, v, ties);
    EXPECT_EQ(inst.questions[fp.chosen_question].id, "q2");
    EXPECT_EQ(fp.stage1_payments, (std::vector<Rational>{Rational(1, 9), 0, 0}));
    const auto ap = run_modular(inst, p, {Stage1Variant::all_pay}, v, ties);
    EXPECT_EQ(inst.questions[ap.chosen_question].id, "q2");
    EXPECT_EQ(ap.stage1_payments, (std::vector<Rational>{Rational(1, 9), 0, 0}));
    EXPECT_EQ(fp.expected_utility[0], Rational(5, 27));
}

TEST(Robustness, ProfilePreconditions) {
    EXPECT_THROW(robustness_profiles(3, Rational(1, 2)), ParameterError);
    EXPECT_THROW(robustness_profiles(3, Rational(1, 5)), ParameterError);
    EXPECT_THROW(robustness_profiles(2, Rational(1, 100)), ParameterError);
    EXPECT_NO_THROW(robustness_profiles(3, Rational(1, 6)));
}
