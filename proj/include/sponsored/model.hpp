#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sponsored/errors.hpp"
#include "sponsored/rational.hpp"

namespace sponsored {

/// A question the platform can show, together with its signal channel.
/// `conditional[s][t]` is the probability of signal `s` in state `t`.
struct Question {
    std::string id;
    std::vector<std::string> signals;
    std::vector<std::vector<Rational>> conditional;

    friend bool operator==(const Question&, const Question&) = default;
};

/// An advertiser's base value and per-state conversion rate.
struct Advertiser {
    std::string id;
    Rational base_value;
    std::vector<Rational> conversion;

    friend bool operator==(const Advertiser&, const Advertiser&) = default;
};

/// Full description of a game: finite state space with a public prior, the
/// available questions, and the advertisers. Every per-state vector is indexed
/// in the order of `states`; all tie-breaking defaults refer to the order of
/// `questions` and `advertisers`.
struct Instance {
    std::vector<std::string> states;
    std::vector<Rational> prior;
    std::vector<Question> questions;
    std::vector<Advertiser> advertisers;

    std::size_t state_count() const { return states.size(); }
    std::size_t question_count() const { return questions.size(); }
    std::size_t advertiser_count() const { return advertisers.size(); }

    std::size_t question_index(std::string_view label) const {
        for (std::size_t i = 0; i < questions.size(); ++i)
            if (questions[i].id == label) return i;
        throw LookupError("unknown question '" + std::string(label) + "'");
    }

    std::size_t signal_index(std::size_t question, std::string_view label) const {
        const auto& signals = questions.at(question).signals;
        for (std::size_t s = 0; s < signals.size(); ++s)
            if (signals[s] == label) return s;
        throw LookupError("unknown signal '" + std::string(label) + "' for question '" +
                          questions[question].id + "'");
    }

    std::size_t advertiser_index(std::string_view label) const {
        for (std::size_t i = 0; i < advertisers.size(); ++i)
            if (advertisers[i].id == label) return i;
        throw LookupError("unknown advertiser '" + std::string(label) + "'");
    }

    std::vector<Rational> base_values() const {
        std::vector<Rational> values;
        values.reserve(advertisers.size());
        for (const auto& a : advertisers) values.push_back(a.base_value);
        return values;
    }

    friend bool operator==(const Instance&, const Instance&) = default;
};

/// Belief over states after observing `signal` in response to `question`.
struct BeliefState {
    std::string question;
    std::string signal;
    Rational marginal;
    std::vector<Rational> posterior;
};

/// One invariant violation, located by a path such as "questions[1].conditional[*][2]".
struct Violation {
    std::string path;
    std::string message;
};

namespace detail {

template <class Labels>
void check_unique(const Labels& labels, const std::string& path, std::vector<Violation>& out) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!seen.insert(labels[i]).second)
            out.push_back({path + "[" + std::to_string(i) + "]", "duplicate label '" + labels[i] + "'"});
}

inline void check_bids(std::span<const Rational> bids, std::size_t advertisers) {
    if (bids.size() != advertisers)
        throw ArityError("expected " + std::to_string(advertisers) + " bids, got " + std::to_string(bids.size()));
    for (const auto& b : bids)
        if (b.is_negative()) throw ParameterError("negative bid " + b.str());
}

}  // namespace detail

/// Every violated invariant of `instance`; empty iff the instance is valid.
inline std::vector<Violation> validate(const Instance& instance) {
    std::vector<Violation> out;
    const std::size_t n_states = instance.states.size();

    if (instance.states.empty()) out.push_back({"states", "at least one state required"});
    if (instance.questions.empty()) out.push_back({"questions", "at least one question required"});
    if (instance.advertisers.empty()) out.push_back({"advertisers", "at least one advertiser required"});
    detail::check_unique(instance.states, "states", out);

    if (instance.prior.size() != n_states) {
        out.push_back({"prior", "has " + std::to_string(instance.prior.size()) + " entries for " +
                                    std::to_string(n_states) + " states"});
    } else {
        Rational total;
        for (std::size_t t = 0; t < n_states; ++t) {
            if (instance.prior[t].is_negative())
                out.push_back({"prior[" + std::to_string(t) + "]", "negative probability " + instance.prior[t].str()});
            total += instance.prior[t];
        }
        if (total != 1) out.push_back({"prior", "sums to " + total.str() + ", expected 1"});
    }

    std::vector<std::string> question_ids;
    for (std::size_t q = 0; q < instance.questions.size(); ++q) {
        const auto& question = instance.questions[q];
        const std::string path = "questions[" + std::to_string(q) + "]";
        question_ids.push_back(question.id);
        if (question.signals.empty()) out.push_back({path + ".signals", "at least one signal required"});
        detail::check_unique(question.signals, path + ".signals", out);
        if (question.conditional.size() != question.signals.size()) {
            out.push_back({path + ".conditional", "has " + std::to_string(question.conditional.size()) +
                                                      " rows for " + std::to_string(question.signals.size()) +
                                                      " signals"});
            continue;
        }
        bool shaped = true;
        for (std::size_t s = 0; s < question.conditional.size(); ++s) {
            const auto& row = question.conditional[s];
            const std::string row_path = path + ".conditional[" + std::to_string(s) + "]";
            if (row.size() != n_states) {
                out.push_back({row_path, "has " + std::to_string(row.size()) + " entries for " +
                                             std::to_string(n_states) + " states"});
                shaped = false;
                continue;
            }
            for (std::size_t t = 0; t < n_states; ++t)
                if (row[t].is_negative())
                    out.push_back({row_path + "[" + std::to_string(t) + "]", "negative probability " + row[t].str()});
        }
        if (!shaped) continue;
        for (std::size_t t = 0; t < n_states; ++t) {
            Rational total;
            for (const auto& row : question.conditional) total += row[t];
            if (total != 1)
                out.push_back({path + ".conditional[*][" + std::to_string(t) + "]",
                               "signal probabilities for state '" + instance.states[t] + "' sum to " + total.str()});
        }
    }
    detail::check_unique(question_ids, "questions.id", out);

    std::vector<std::string> advertiser_ids;
    for (std::size_t i = 0; i < instance.advertisers.size(); ++i) {
        const auto& adv = instance.advertisers[i];
        const std::string path = "advertisers[" + std::to_string(i) + "]";
        advertiser_ids.push_back(adv.id);
        if (adv.base_value.is_negative())
            out.push_back({path + ".base_value", "negative base value " + adv.base_value.str()});
        if (adv.conversion.size() != n_states) {
            out.push_back({path + ".conversion", "has " + std::to_string(adv.conversion.size()) +
                                                     " entries for " + std::to_string(n_states) + " states"});
            continue;
        }
        for (std::size_t t = 0; t < n_states; ++t)
            if (adv.conversion[t].is_negative())
                out.push_back({path + ".conversion[" + std::to_string(t) + "]",
                               "negative conversion rate " + adv.conversion[t].str()});
    }
    detail::check_unique(advertiser_ids, "advertisers.id", out);
    return out;
}

inline Rational marginal_signal(const Instance& instance, std::size_t question, std::size_t signal) {
    const auto& row = instance.questions.at(question).conditional.at(signal);
    Rational total;
    for (std::size_t t = 0; t < instance.states.size(); ++t) total += row[t] * instance.prior[t];
    return total;
}

inline Rational marginal_signal(const Instance& instance, std::string_view question, std::string_view signal) {
    const auto q = instance.question_index(question);
    return marginal_signal(instance, q, instance.signal_index(q, signal));
}

inline BeliefState posterior(const Instance& instance, std::size_t question, std::size_t signal) {
    const auto& q = instance.questions.at(question);
    BeliefState belief{q.id, q.signals.at(signal), marginal_signal(instance, question, signal), {}};
    if (!belief.marginal.is_positive())
        throw ZeroMeasureSignal("signal '" + belief.signal + "' of question '" + belief.question +
                                "' has probability zero");
    belief.posterior.reserve(instance.states.size());
    for (std::size_t t = 0; t < instance.states.size(); ++t)
        belief.posterior.push_back(instance.prior[t] * q.conditional[signal][t] / belief.marginal);
    return belief;
}

inline BeliefState posterior(const Instance& instance, std::string_view question, std::string_view signal) {
    const auto q = instance.question_index(question);
    return posterior(instance, q, instance.signal_index(q, signal));
}

inline Rational posterior_conversion(const Instance& instance, std::size_t question, std::size_t signal,
                                     std::size_t advertiser) {
    if (advertiser >= instance.advertisers.size())
        throw LookupError("advertiser index " + std::to_string(advertiser) + " out of range");
    const auto belief = posterior(instance, question, signal);
    const auto& rates = instance.advertisers[advertiser].conversion;
    Rational total;
    for (std::size_t t = 0; t < belief.posterior.size(); ++t) total += rates[t] * belief.posterior[t];
    return total;
}

inline Rational posterior_conversion(const Instance& instance, std::string_view question, std::string_view signal,
                                     std::size_t advertiser) {
    const auto q = instance.question_index(question);
    return posterior_conversion(instance, q, instance.signal_index(q, signal), advertiser);
}

inline Rational effective_value(const Instance& instance, std::span<const Rational> bids, std::string_view question,
                                std::string_view signal, std::size_t advertiser) {
    detail::check_bids(bids, instance.advertisers.size());
    return bids[advertiser] * posterior_conversion(instance, question, signal, advertiser);
}

/// Posterior quantities of one positive-measure signal.
struct SignalBelief {
    std::size_t signal = 0;
    Rational marginal;
    std::vector<Rational> conversion;  // per advertiser
};

/// Bid-independent posterior data for every question, computed once per
/// instance. Zero-measure signals are omitted.
class BeliefTable {
public:
    explicit BeliefTable(const Instance& instance) : base_values_(instance.base_values()) {
        questions_.resize(instance.questions.size());
        for (std::size_t q = 0; q < instance.questions.size(); ++q) {
            const auto& question = instance.questions[q];
            signal_counts_.push_back(question.signals.size());
            for (std::size_t s = 0; s < question.signals.size(); ++s) {
                Rational marginal = marginal_signal(instance, q, s);
                if (!marginal.is_positive()) continue;
                SignalBelief belief{s, marginal, {}};
                belief.conversion.reserve(instance.advertisers.size());
                for (const auto& adv : instance.advertisers) {
                    Rational weighted;
                    for (std::size_t t = 0; t < instance.states.size(); ++t)
                        weighted += adv.conversion[t] * instance.prior[t] * question.conditional[s][t];
                    belief.conversion.push_back(weighted / marginal);
                }
                questions_[q].push_back(std::move(belief));
            }
        }
    }

    std::size_t question_count() const { return questions_.size(); }
    std::size_t advertiser_count() const { return base_values_.size(); }
    const std::vector<Rational>& base_values() const { return base_values_; }

    /// All signals of `question`, including zero-measure ones.
    std::size_t signal_count(std::size_t question) const { return signal_counts_.at(question); }

    /// Positive-measure signals of `question`, in signal order.
    std::span<const SignalBelief> signals(std::size_t question) const { return questions_.at(question); }

    const SignalBelief& signal(std::size_t question, std::size_t signal) const {
        for (const auto& b : questions_.at(question))
            if (b.signal == signal) return b;
        throw ZeroMeasureSignal("signal index " + std::to_string(signal) + " of question index " +
                                std::to_string(question) + " has probability zero");
    }

private:
    std::vector<Rational> base_values_;
    std::vector<std::size_t> signal_counts_;
    std::vector<std::vector<SignalBelief>> questions_;
};

/// E_{σ∼S_ℓ}[max_j b_j·α_j(ℓ,σ)] for the given question.
inline Rational expected_question_welfare(const BeliefTable& beliefs, std::span<const Rational> bids,
                                          std::size_t question) {
    detail::check_bids(bids, beliefs.advertiser_count());
    Rational total;
    for (const auto& sig : beliefs.signals(question)) {
        Rational best;
        for (std::size_t j = 0; j < bids.size(); ++j) best = max(best, bids[j] * sig.conversion[j]);
        total += sig.marginal * best;
    }
    return total;
}

inline Rational expected_question_welfare(const Instance& instance, std::span<const Rational> bids,
                                          std::string_view question) {
    return expected_question_welfare(BeliefTable(instance), bids, instance.question_index(question));
}

}  // namespace sponsored
