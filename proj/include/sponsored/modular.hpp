#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sponsored/direct.hpp"
#include "sponsored/model.hpp"
#include "sponsored/ties.hpp"

namespace sponsored {

// Two-stage mechanisms: an auction over questions, then a per-signal
// second-price auction on effective bids. Analysed as a one-shot normal-form
// game, so a strategy fixes every contingent bid up front.

enum class Stage1Variant { vcg, first_price, all_pay };

inline std::string_view to_string(Stage1Variant v) {
    switch (v) {
        case Stage1Variant::vcg: return "vcg";
        case Stage1Variant::first_price: return "first-price";
        case Stage1Variant::all_pay: return "all-pay";
    }
    return "?";
}

struct Stage1Rule {
    Stage1Variant variant = Stage1Variant::vcg;
};

/// stage1[ℓ] is the bid for question ℓ; stage2[ℓ][σ] the item bid after (ℓ,σ).
struct AdvertiserStrategy {
    std::vector<Rational> stage1;
    std::vector<std::vector<Rational>> stage2;

    friend bool operator==(const AdvertiserStrategy&, const AdvertiserStrategy&) = default;
};

using StrategyProfile = std::vector<AdvertiserStrategy>;

/// Rows are advertisers, columns questions.
using BidMatrix = std::vector<std::vector<Rational>>;

struct Stage1Result {
    std::size_t chosen = 0;
    std::vector<Rational> payments;
    std::vector<Rational> totals;  // sum of bids per question
};

struct Stage2Result {
    std::optional<std::size_t> winner;
    Rational payment;
};

struct ModularSignalOutcome {
    std::size_t signal = 0;
    Rational probability;
    std::optional<std::size_t> winner;
    Rational stage2_payment;
};

struct ModularOutcome {
    std::size_t chosen_question = 0;
    std::vector<Rational> stage1_totals;
    std::vector<Rational> stage1_payments;
    std::vector<ModularSignalOutcome> per_signal;  // positive-measure signals of the chosen question
    std::vector<Rational> expected_utility;        // against true values
    Rational expected_welfare;                     // against true values

    const ModularSignalOutcome* outcome_for(std::size_t signal) const {
        for (const auto& s : per_signal)
            if (s.signal == signal) return &s;
        return nullptr;
    }
};

/// Shape and sign problems of `profile` for `beliefs`; empty when usable.
inline std::vector<std::string> check_profile(const BeliefTable& beliefs, const StrategyProfile& profile) {
    std::vector<std::string> issues;
    if (profile.size() != beliefs.advertiser_count()) {
        issues.push_back("profile has " + std::to_string(profile.size()) + " strategies for " +
                         std::to_string(beliefs.advertiser_count()) + " advertisers");
        return issues;
    }
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& s = profile[i];
        const std::string who = "advertiser " + std::to_string(i);
        if (s.stage1.size() != beliefs.question_count())
            issues.push_back(who + ": stage-1 bids cover " + std::to_string(s.stage1.size()) + " of " +
                             std::to_string(beliefs.question_count()) + " questions");
        for (const auto& b : s.stage1)
            if (b.is_negative()) issues.push_back(who + ": negative stage-1 bid " + b.str());
        if (s.stage2.size() != beliefs.question_count()) {
            issues.push_back(who + ": stage-2 table covers " + std::to_string(s.stage2.size()) + " of " +
                             std::to_string(beliefs.question_count()) + " questions");
            continue;
        }
        for (std::size_t q = 0; q < s.stage2.size(); ++q) {
            if (s.stage2[q].size() != beliefs.signal_count(q))
                issues.push_back(who + ": stage-2 row for question " + std::to_string(q) + " has " +
                                 std::to_string(s.stage2[q].size()) + " of " +
                                 std::to_string(beliefs.signal_count(q)) + " signals");
            for (const auto& b : s.stage2[q])
                if (b.is_negative()) issues.push_back(who + ": negative stage-2 bid " + b.str());
        }
    }
    return issues;
}

namespace detail {

inline void require_profile(const BeliefTable& beliefs, const StrategyProfile& profile) {
    const auto issues = check_profile(beliefs, profile);
    if (!issues.empty()) throw ParameterError("malformed strategy profile: " + issues.front());
}

inline std::vector<Rational> stage2_bids_at(const StrategyProfile& profile, std::size_t question, std::size_t signal) {
    std::vector<Rational> bids;
    bids.reserve(profile.size());
    for (const auto& s : profile) bids.push_back(s.stage2[question][signal]);
    return bids;
}

inline Stage2Result second_price(const SignalBelief& sig, std::span<const Rational> bids, const TiePolicy& ties) {
    const auto values = effective_values(sig, bids);
    Stage2Result r{ties.positive_argmax(values), {}};
    if (r.winner) r.payment = max_excluding(values, r.winner);
    return r;
}

inline std::vector<Rational> column_totals(const BidMatrix& bids, std::size_t questions) {
    std::vector<Rational> totals(questions);
    for (const auto& row : bids) {
        if (row.size() != questions) throw ArityError("stage-1 bid rows must cover every question");
        for (std::size_t q = 0; q < questions; ++q) {
            if (row[q].is_negative()) throw ParameterError("negative stage-1 bid " + row[q].str());
            totals[q] += row[q];
        }
    }
    return totals;
}

inline std::size_t matrix_width(const BidMatrix& bids) {
    if (bids.empty() || bids.front().empty()) throw ArityError("stage-1 bids need at least one advertiser and question");
    return bids.front().size();
}

}  // namespace detail

/// Second-price auction on effective bids at one (question, signal).
inline Stage2Result stage2_auction(const BeliefTable& beliefs, std::span<const Rational> bids, std::size_t question,
                                   std::size_t signal, const TieBreaking& ties = {}) {
    detail::check_bids(bids, beliefs.advertiser_count());
    ties.advertisers.check(beliefs.advertiser_count());
    return detail::second_price(beliefs.signal(question, signal), bids, ties.advertisers);
}

inline Stage2Result stage2_auction(const Instance& instance, std::span<const Rational> bids,
                                   std::string_view question, std::string_view signal, const TieBreaking& ties = {}) {
    const auto q = instance.question_index(question);
    return stage2_auction(BeliefTable(instance), bids, q, instance.signal_index(q, signal), ties);
}

/// Expected quasilinear stage-2 payoff of `advertiser` if `question` is shown
/// and everyone bids per `profile` in stage 2. With truthful stage-2 bids this
/// is the advertiser's value for the question, R_i(ℓ; v).
inline Rational stage2_expected_utility(const BeliefTable& beliefs, std::span<const Rational> true_values,
                                        const StrategyProfile& profile, std::size_t question, std::size_t advertiser,
                                        const TieBreaking& ties = {}) {
    detail::check_bids(true_values, beliefs.advertiser_count());
    Rational total;
    for (const auto& sig : beliefs.signals(question)) {
        const auto bids = detail::stage2_bids_at(profile, question, sig.signal);
        const auto r = detail::second_price(sig, bids, ties.advertisers);
        if (r.winner && *r.winner == advertiser)
            total += sig.marginal * (true_values[advertiser] * sig.conversion[advertiser] - r.payment);
    }
    return total;
}

/// Profile in which every advertiser bids `bids[i]` at every (ℓ,σ) and zero in stage 1.
inline StrategyProfile uniform_stage2_profile(const BeliefTable& beliefs, std::span<const Rational> bids) {
    detail::check_bids(bids, beliefs.advertiser_count());
    StrategyProfile profile(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) {
        profile[i].stage1.assign(beliefs.question_count(), Rational{});
        for (std::size_t q = 0; q < beliefs.question_count(); ++q)
            profile[i].stage2.emplace_back(beliefs.signal_count(q), bids[i]);
    }
    return profile;
}

/// VCG over questions: pick the largest bid total, charge each advertiser its
/// externality on the others' totals.
inline Stage1Result stage1_vcg(const BidMatrix& bids, const TiePolicy& question_ties = {}) {
    const std::size_t k = detail::matrix_width(bids);
    question_ties.check(k);
    Stage1Result r;
    r.totals = detail::column_totals(bids, k);
    r.chosen = question_ties.argmax(r.totals);
    for (const auto& row : bids) {
        Rational best_without;
        for (std::size_t q = 0; q < k; ++q) best_without = max(best_without, r.totals[q] - row[q]);
        r.payments.push_back(best_without - (r.totals[r.chosen] - row[r.chosen]));
    }
    return r;
}

/// Largest bid total wins; only the single highest bidder on the chosen
/// question pays, and it pays its bid.
inline Stage1Result stage1_first_price(const BidMatrix& bids, const TiePolicy& question_ties = {},
                                       const TiePolicy& advertiser_ties = {}) {
    const std::size_t k = detail::matrix_width(bids);
    question_ties.check(k);
    advertiser_ties.check(bids.size());
    Stage1Result r;
    r.totals = detail::column_totals(bids, k);
    r.chosen = question_ties.argmax(r.totals);
    std::vector<Rational> on_chosen;
    for (const auto& row : bids) on_chosen.push_back(row[r.chosen]);
    const auto payer = advertiser_ties.argmax(on_chosen);
    r.payments.assign(bids.size(), Rational{});
    r.payments[payer] = on_chosen[payer];
    return r;
}

/// Largest bid total wins; every advertiser pays its bid on the chosen question.
inline Stage1Result stage1_all_pay(const BidMatrix& bids, const TiePolicy& question_ties = {}) {
    const std::size_t k = detail::matrix_width(bids);
    question_ties.check(k);
    Stage1Result r;
    r.totals = detail::column_totals(bids, k);
    r.chosen = question_ties.argmax(r.totals);
    for (const auto& row : bids) r.payments.push_back(row[r.chosen]);
    return r;
}

inline Stage1Result run_stage1(const BidMatrix& bids, Stage1Rule rule, const TieBreaking& ties) {
    switch (rule.variant) {
        case Stage1Variant::vcg: return stage1_vcg(bids, ties.questions);
        case Stage1Variant::first_price: return stage1_first_price(bids, ties.questions, ties.advertisers);
        case Stage1Variant::all_pay: return stage1_all_pay(bids, ties.questions);
    }
    throw ParameterError("unknown stage-1 rule");
}

inline ModularOutcome run_modular(const BeliefTable& beliefs, const StrategyProfile& profile, Stage1Rule rule,
                                  std::span<const Rational> true_values, const TieBreaking& ties = {}) {
    detail::require_profile(beliefs, profile);
    detail::check_bids(true_values, beliefs.advertiser_count());
    detail::check_ties(ties, beliefs.question_count(), beliefs.advertiser_count());

    BidMatrix stage1;
    stage1.reserve(profile.size());
    for (const auto& s : profile) stage1.push_back(s.stage1);
    const auto first = run_stage1(stage1, rule, ties);

    ModularOutcome out;
    out.chosen_question = first.chosen;
    out.stage1_totals = first.totals;
    out.stage1_payments = first.payments;
    out.expected_utility.reserve(profile.size());
    for (const auto& p : first.payments) out.expected_utility.push_back(-p);

    for (const auto& sig : beliefs.signals(first.chosen)) {
        const auto bids = detail::stage2_bids_at(profile, first.chosen, sig.signal);
        const auto r = detail::second_price(sig, bids, ties.advertisers);
        if (r.winner) {
            const auto w = *r.winner;
            const Rational value = true_values[w] * sig.conversion[w];
            out.expected_utility[w] += sig.marginal * (value - r.payment);
            out.expected_welfare += sig.marginal * value;
        }
        out.per_signal.push_back({sig.signal, sig.marginal, r.winner, r.payment});
    }
    return out;
}

inline ModularOutcome run_modular(const Instance& instance, const StrategyProfile& profile, Stage1Rule rule,
                                  std::span<const Rational> true_values, const TieBreaking& ties = {}) {
    return run_modular(BeliefTable(instance), profile, rule, true_values, ties);
}

/// Truthful stage-2 bids everywhere and stage-1 bid R_i(ℓ; v) on every question.
inline StrategyProfile prescribed_equilibrium(const BeliefTable& beliefs, std::span<const Rational> true_values,
                                              const TieBreaking& ties = {}) {
    auto profile = uniform_stage2_profile(beliefs, true_values);
    for (std::size_t i = 0; i < profile.size(); ++i)
        for (std::size_t q = 0; q < beliefs.question_count(); ++q)
            profile[i].stage1[q] = stage2_expected_utility(beliefs, true_values, profile, q, i, ties);
    return profile;
}

inline StrategyProfile prescribed_equilibrium(const Instance& instance, std::span<const Rational> true_values,
                                              const TieBreaking& ties = {}) {
    return prescribed_equilibrium(BeliefTable(instance), true_values, ties);
}

/// The platform computes stage-1 bids R_i(ℓ; reported) for the advertisers,
/// runs stage-1 VCG, and then stage 2 on the reported values. Utilities and
/// welfare are evaluated against `true_values`.
inline ModularOutcome run_proxy(const BeliefTable& beliefs, std::span<const Rational> reported,
                                std::span<const Rational> true_values, const TieBreaking& ties = {}) {
    const auto profile = prescribed_equilibrium(beliefs, reported, ties);
    return run_modular(beliefs, profile, Stage1Rule{Stage1Variant::vcg}, true_values, ties);
}

inline ModularOutcome run_proxy(const Instance& instance, std::span<const Rational> reported,
                                std::span<const Rational> true_values, const TieBreaking& ties = {}) {
    return run_proxy(BeliefTable(instance), reported, true_values, ties);
}

}  // namespace sponsored
