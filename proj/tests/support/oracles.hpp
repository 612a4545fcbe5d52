#pragma once

// Reference computations for the tests. Nothing here calls into the library's
// mechanism code; values are recomputed from the joint distribution of
// (state, signal) by plain enumeration.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sponsored/model.hpp"
#include "sponsored/rational.hpp"

namespace oracle {

using sponsored::Instance;
using sponsored::Rational;

/// Pr[σ] under question q.
inline Rational signal_mass(const Instance& inst, std::size_t q, std::size_t s) {
    Rational total;
    for (std::size_t t = 0; t < inst.states.size(); ++t) total += inst.prior[t] * inst.questions[q].conditional[s][t];
    return total;
}

/// Pr[σ and advertiser j converts] under question q.
inline Rational joint_conversion(const Instance& inst, std::size_t q, std::size_t s, std::size_t j) {
    Rational total;
    for (std::size_t t = 0; t < inst.states.size(); ++t)
        total += inst.prior[t] * inst.questions[q].conditional[s][t] * inst.advertisers[j].conversion[t];
    return total;
}

/// A complete outcome: a question and, per signal, a winner (or nobody).
struct Outcome {
    std::size_t question = 0;
    std::vector<std::optional<std::size_t>> winners;
};

/// Reported welfare of `outcome` counting only advertisers other than `skip`.
inline Rational welfare(const Instance& inst, const std::vector<Rational>& bids, const Outcome& outcome,
                        std::optional<std::size_t> skip = std::nullopt) {
    Rational total;
    for (std::size_t s = 0; s < outcome.winners.size(); ++s) {
        const auto& w = outcome.winners[s];
        if (w && (!skip || *w != *skip)) total += bids[*w] * joint_conversion(inst, outcome.question, s, *w);
    }
    return total;
}

/// Welfare-maximising outcome found by enumerating every question and every
/// assignment of signals to {nobody, advertiser 0, ..., n-1}, optionally with
/// one advertiser removed. The first maximiser in enumeration order wins, which
/// mirrors index-order tie-breaking.
inline Outcome best_outcome(const Instance& inst, const std::vector<Rational>& bids,
                            std::optional<std::size_t> removed = std::nullopt) {
    const std::size_t n = inst.advertisers.size();
    std::optional<Outcome> best;
    Rational best_welfare;
    for (std::size_t q = 0; q < inst.questions.size(); ++q) {
        const std::size_t k = inst.questions[q].signals.size();
        std::vector<std::size_t> code(k, 0);  // 0 = nobody, j+1 = advertiser j
        while (true) {
            Outcome o{q, std::vector<std::optional<std::size_t>>(k)};
            bool allowed = true;
            for (std::size_t s = 0; s < k; ++s) {
                if (code[s] == 0) continue;
                o.winners[s] = code[s] - 1;
                if (removed && code[s] - 1 == *removed) allowed = false;
            }
            if (allowed) {
                const Rational w = welfare(inst, bids, o);
                if (!best || w > best_welfare) {
                    best = o;
                    best_welfare = w;
                }
            }
            // odometer, first signal most significant
            std::size_t pos = k;
            while (pos > 0) {
                --pos;
                if (++code[pos] <= n) break;
                code[pos] = 0;
                if (pos == 0) {
                    pos = k + 1;
                    break;
                }
            }
            if (pos == k + 1 || k == 0) break;
        }
    }
    return *best;
}

/// Clarke-pivot payments and the chosen outcome, computed by enumeration.
struct VcgResult {
    Outcome outcome;
    Rational welfare;
    std::vector<Rational> payments;
};

inline VcgResult vcg(const Instance& inst, const std::vector<Rational>& bids) {
    VcgResult r;
    r.outcome = best_outcome(inst, bids);
    r.welfare = welfare(inst, bids, r.outcome);
    for (std::size_t i = 0; i < inst.advertisers.size(); ++i) {
        const auto without = best_outcome(inst, bids, i);
        r.payments.push_back(welfare(inst, bids, without) - welfare(inst, bids, r.outcome, i));
    }
    return r;
}

/// Seeded random instances with small rational parameters: up to 4 states,
/// 3 questions, 4 advertisers and 3 signals per question. Some states get
/// zero prior mass and some signals are impossible, so zero-measure signals
/// show up regularly.
class RandomInstances {
public:
    explicit RandomInstances(std::uint64_t seed) : rng_(seed) {}

    Instance next() {
        Instance inst;
        const std::size_t states = pick(1, 4), questions = pick(1, 3), advertisers = pick(1, 4);
        for (std::size_t t = 0; t < states; ++t) inst.states.push_back("s" + std::to_string(t));

        std::vector<long> weights(states);
        long sum = 0;
        for (auto& w : weights) sum += (w = static_cast<long>(pick(0, 3)));
        if (sum == 0) sum += (weights[0] = 1);
        for (auto w : weights) inst.prior.emplace_back(w, sum);

        for (std::size_t q = 0; q < questions; ++q) {
            sponsored::Question question{"q" + std::to_string(q), {}, {}};
            const std::size_t signals = pick(1, 3);
            for (std::size_t s = 0; s < signals; ++s) question.signals.push_back("x" + std::to_string(s));
            question.conditional.assign(signals, std::vector<Rational>(states));
            const bool dead_signal = signals > 1 && pick(0, 4) == 0;
            for (std::size_t t = 0; t < states; ++t) {
                std::vector<long> col(signals);
                long total = 0;
                for (std::size_t s = 0; s < signals; ++s) {
                    col[s] = dead_signal && s + 1 == signals ? 0 : static_cast<long>(pick(0, 2));
                    total += col[s];
                }
                if (total == 0) total += (col[0] = 1);
                for (std::size_t s = 0; s < signals; ++s) question.conditional[s][t] = Rational(col[s], total);
            }
            inst.questions.push_back(std::move(question));
        }

        static const Rational rates[] = {0, Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(2, 3),
                                         Rational(3, 4), 1};
        static const Rational values[] = {1, 2, 3, Rational(7, 2), 5, 10};
        for (std::size_t i = 0; i < advertisers; ++i) {
            sponsored::Advertiser adv{"a" + std::to_string(i), values[pick(0, 5)], {}};
            for (std::size_t t = 0; t < states; ++t) adv.conversion.push_back(rates[pick(0, 6)]);
            inst.advertisers.push_back(std::move(adv));
        }
        return inst;
    }

    std::size_t pick(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng_() % (hi - lo + 1)); }

private:
    std::mt19937_64 rng_;
};

}  // namespace oracle
