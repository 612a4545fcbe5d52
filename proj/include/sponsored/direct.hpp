#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sponsored/model.hpp"
#include "sponsored/ties.hpp"

namespace sponsored {

// End-to-end mechanism: one round of base-value bids chooses the question,
// the signal-contingent winner and the VCG payments.

struct DirectAllocation {
    std::size_t signal = 0;
    Rational probability;
    std::optional<std::size_t> winner;
    Rational winner_effective_value;
    Rational second_price;
};

struct DirectOutcome {
    std::size_t chosen_question = 0;
    std::vector<DirectAllocation> per_signal;  // positive-measure signals only
    Rational expected_welfare;
    std::vector<Rational> expected_payment;
    std::vector<Rational> expected_delivered_conversion;
    std::vector<Rational> expected_value;    // base value times delivered conversion
    std::vector<Rational> expected_utility;  // expected_value - expected_payment

    const DirectAllocation* allocation_for(std::size_t signal) const {
        for (const auto& a : per_signal)
            if (a.signal == signal) return &a;
        return nullptr;
    }
};

/// VCG payment of one advertiser split into the part caused by the question
/// choice and the expected second price it pays when it wins.
struct PaymentShare {
    Rational stage1_externality;
    Rational expected_second_price;
    Rational total;
};

using PaymentDecomposition = std::vector<PaymentShare>;

namespace detail {

inline std::vector<Rational> effective_values(const SignalBelief& sig, std::span<const Rational> bids) {
    std::vector<Rational> out;
    out.reserve(bids.size());
    for (std::size_t j = 0; j < bids.size(); ++j) out.push_back(bids[j] * sig.conversion[j]);
    return out;
}

inline Rational max_excluding(std::span<const Rational> values, std::optional<std::size_t> excluded) {
    Rational best;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (!excluded || j != *excluded) best = max(best, values[j]);
    return best;
}

/// SW_{-i}(ℓ) := E_{σ∼S_ℓ}[max_{j≠i} b_j α_j(ℓ,σ)].
inline Rational welfare_of_others(const BeliefTable& beliefs, std::span<const Rational> bids, std::size_t question,
                                  std::size_t excluded) {
    Rational total;
    for (const auto& sig : beliefs.signals(question)) {
        Rational best;
        for (std::size_t j = 0; j < bids.size(); ++j)
            if (j != excluded) best = max(best, bids[j] * sig.conversion[j]);
        total += sig.marginal * best;
    }
    return total;
}

inline void check_ties(const TieBreaking& ties, std::size_t questions, std::size_t advertisers) {
    ties.questions.check(questions);
    ties.advertisers.check(advertisers);
}

}  // namespace detail

inline std::size_t select_question(const BeliefTable& beliefs, std::span<const Rational> bids,
                                   const TieBreaking& ties = {}) {
    detail::check_bids(bids, beliefs.advertiser_count());
    detail::check_ties(ties, beliefs.question_count(), beliefs.advertiser_count());
    std::vector<Rational> welfare;
    welfare.reserve(beliefs.question_count());
    for (std::size_t q = 0; q < beliefs.question_count(); ++q)
        welfare.push_back(expected_question_welfare(beliefs, bids, q));
    return ties.questions.argmax(welfare);
}

inline std::size_t select_question(const Instance& instance, std::span<const Rational> bids,
                                   const TieBreaking& ties = {}) {
    return select_question(BeliefTable(instance), bids, ties);
}

/// Highest effective bidder at (question, signal); no winner when every
/// effective value is zero.
inline std::optional<std::size_t> allocate(const BeliefTable& beliefs, std::span<const Rational> bids,
                                           std::size_t question, std::size_t signal, const TieBreaking& ties = {}) {
    detail::check_bids(bids, beliefs.advertiser_count());
    ties.advertisers.check(beliefs.advertiser_count());
    const auto values = detail::effective_values(beliefs.signal(question, signal), bids);
    return ties.advertisers.positive_argmax(values);
}

inline std::optional<std::size_t> allocate(const Instance& instance, std::span<const Rational> bids,
                                           std::string_view question, std::string_view signal,
                                           const TieBreaking& ties = {}) {
    const auto q = instance.question_index(question);
    return allocate(BeliefTable(instance), bids, q, instance.signal_index(q, signal), ties);
}

/// W_{-i}: best expected welfare achievable without advertiser `excluded`.
inline Rational welfare_without(const BeliefTable& beliefs, std::span<const Rational> bids, std::size_t excluded) {
    detail::check_bids(bids, beliefs.advertiser_count());
    if (excluded >= beliefs.advertiser_count())
        throw LookupError("advertiser index " + std::to_string(excluded) + " out of range");
    Rational best;
    for (std::size_t q = 0; q < beliefs.question_count(); ++q)
        best = max(best, detail::welfare_of_others(beliefs, bids, q, excluded));
    return best;
}

inline Rational welfare_without(const Instance& instance, std::span<const Rational> bids, std::size_t excluded) {
    return welfare_without(BeliefTable(instance), bids, excluded);
}

inline DirectOutcome run_direct(const BeliefTable& beliefs, std::span<const Rational> bids,
                                const TieBreaking& ties = {}) {
    const std::size_t n = beliefs.advertiser_count();
    DirectOutcome out;
    out.chosen_question = select_question(beliefs, bids, ties);
    out.expected_delivered_conversion.assign(n, Rational{});

    for (const auto& sig : beliefs.signals(out.chosen_question)) {
        const auto values = detail::effective_values(sig, bids);
        DirectAllocation alloc{sig.signal, sig.marginal, ties.advertisers.positive_argmax(values), {}, {}};
        if (alloc.winner) {
            alloc.winner_effective_value = values[*alloc.winner];
            alloc.second_price = detail::max_excluding(values, alloc.winner);
            out.expected_delivered_conversion[*alloc.winner] += sig.marginal * sig.conversion[*alloc.winner];
        }
        out.expected_welfare += sig.marginal * alloc.winner_effective_value;
        out.per_signal.push_back(std::move(alloc));
    }

    const auto& values = beliefs.base_values();
    for (std::size_t i = 0; i < n; ++i) {
        // reported welfare of everyone except i at the chosen outcome
        Rational others;
        for (const auto& alloc : out.per_signal)
            if (alloc.winner && *alloc.winner != i) others += alloc.probability * alloc.winner_effective_value;
        out.expected_payment.push_back(welfare_without(beliefs, bids, i) - others);
        out.expected_value.push_back(values[i] * out.expected_delivered_conversion[i]);
        out.expected_utility.push_back(out.expected_value[i] - out.expected_payment[i]);
    }
    return out;
}

inline DirectOutcome run_direct(const Instance& instance, std::span<const Rational> bids,
                                const TieBreaking& ties = {}) {
    return run_direct(BeliefTable(instance), bids, ties);
}

inline PaymentDecomposition decompose_payment(const BeliefTable& beliefs, std::span<const Rational> bids,
                                              const TieBreaking& ties = {}) {
    const std::size_t n = beliefs.advertiser_count();
    const std::size_t chosen = select_question(beliefs, bids, ties);
    PaymentDecomposition out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational best_without;
        for (std::size_t q = 0; q < beliefs.question_count(); ++q)
            best_without = max(best_without, detail::welfare_of_others(beliefs, bids, q, i));
        PaymentShare share;
        share.stage1_externality = best_without - detail::welfare_of_others(beliefs, bids, chosen, i);
        for (const auto& sig : beliefs.signals(chosen)) {
            const auto values = detail::effective_values(sig, bids);
            const auto winner = ties.advertisers.positive_argmax(values);
            if (winner && *winner == i) share.expected_second_price += sig.marginal * detail::max_excluding(values, i);
        }
        share.total = share.stage1_externality + share.expected_second_price;
        out.push_back(std::move(share));
    }
    return out;
}

inline PaymentDecomposition decompose_payment(const Instance& instance, std::span<const Rational> bids,
                                              const TieBreaking& ties = {}) {
    return decompose_payment(BeliefTable(instance), bids, ties);
}

/// One realized run of the mechanism's timing: nature's state, the chosen
/// question, the drawn signal, and the resulting winner.
struct Trajectory {
    std::size_t state = 0;
    std::size_t question = 0;
    std::size_t signal = 0;
    std::optional<std::size_t> winner;
    Rational second_price;                   // what the winner is charged in second-price terms
    std::vector<Rational> expected_payment;  // interim VCG payments of the outcome

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

namespace detail {

/// Uniform draw in [0,1) on a 2^-53 grid, exact as a rational.
inline Rational unit_draw(std::mt19937_64& rng) {
    const auto bits = static_cast<long>(rng() >> 11);
    return Rational(mpq_class(mpz_class(bits), mpz_class(1) << 53));
}

inline std::size_t draw_index(std::mt19937_64& rng, std::span<const Rational> probabilities) {
    const Rational u = unit_draw(rng);
    Rational cumulative;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (probabilities[i].is_positive()) last_positive = i;
        cumulative += probabilities[i];
        if (u < cumulative) return i;
    }
    return last_positive;
}

inline Trajectory draw_trajectory(const Instance& instance, const DirectOutcome& outcome, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Trajectory t;
    t.state = draw_index(rng, instance.prior);
    t.question = outcome.chosen_question;
    const auto& question = instance.questions[t.question];
    std::vector<Rational> column;
    column.reserve(question.signals.size());
    for (const auto& row : question.conditional) column.push_back(row[t.state]);
    t.signal = draw_index(rng, column);
    if (const auto* alloc = outcome.allocation_for(t.signal)) {
        t.winner = alloc->winner;
        t.second_price = alloc->second_price;
    }
    t.expected_payment = outcome.expected_payment;
    return t;
}

}  // namespace detail

/// Simulates the timing of the direct mechanism with a seeded generator;
/// identical seeds give identical trajectories.
inline Trajectory sample_trajectory(const Instance& instance, std::span<const Rational> bids,
                                    const TieBreaking& ties, std::uint64_t seed) {
    return detail::draw_trajectory(instance, run_direct(instance, bids, ties), seed);
}

/// Trajectories for seeds first_seed, first_seed+1, ... sharing one outcome.
inline std::vector<Trajectory> sample_trajectories(const Instance& instance, std::span<const Rational> bids,
                                                   const TieBreaking& ties, std::uint64_t first_seed,
                                                   std::size_t count) {
    const auto outcome = run_direct(instance, bids, ties);
    std::vector<Trajectory> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(detail::draw_trajectory(instance, outcome, first_seed + k));
    return out;
}

}  // namespace sponsored
