#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sponsored/direct.hpp"
#include "sponsored/model.hpp"
#include "sponsored/modular.hpp"
#include "sponsored/ties.hpp"

namespace sponsored {

/// Welfare of the best question under `values`, computed straight from the
/// joint distribution of (state, signal) rather than through posteriors.
/// Kept deliberately separate from expected_question_welfare so the two can
/// check each other.
inline Rational brute_force_optimal(const Instance& instance, std::span<const Rational> values) {
    detail::check_bids(values, instance.advertisers.size());
    Rational best;
    for (const auto& question : instance.questions) {
        Rational welfare;
        for (const auto& row : question.conditional) {
            // Pr[σ and j converts] · v_j, maximised over the candidate winner j
            Rational best_joint;
            for (std::size_t j = 0; j < instance.advertisers.size(); ++j) {
                Rational joint;
                for (std::size_t t = 0; t < instance.states.size(); ++t)
                    joint += instance.prior[t] * row[t] * instance.advertisers[j].conversion[t];
                best_joint = max(best_joint, values[j] * joint);
            }
            welfare += best_joint;
        }
        best = max(best, welfare);
    }
    return best;
}

/// Bid levels per advertiser, used for direct-mechanism bids and proxy reports.
using BidGrid = std::vector<std::vector<Rational>>;

/// Finite set of unilateral deviations for the two-stage game.
struct DeviationClass {
    /// stage1[i][ℓ]: levels advertiser i may bid on question ℓ; every
    /// combination across questions is tried.
    std::vector<std::vector<std::vector<Rational>>> stage1;
    /// stage2[i]: levels advertiser i may bid at any single (ℓ,σ) cell.
    std::vector<std::vector<Rational>> stage2;
    /// Under stage-1 VCG, also bid just enough on one question to force it.
    bool includes_force_question = true;
};

struct DeviationRecord {
    Rational gain;  // best utility gain over the profile, never below 0
    std::string description = "(none)";
};

struct EquilibriumReport {
    std::vector<DeviationRecord> advertisers;
    Rational epsilon;
    bool deviation_found = false;
    /// True when the searched class is known to contain a best response, so
    /// "no deviation found" is an exact equilibrium certificate rather than a
    /// statement about the grid only.
    bool exhaustive = false;

    std::string verdict() const { return deviation_found ? "deviation-found" : "no-profitable-deviation-found"; }

    Rational best_gain() const {
        Rational best;
        for (const auto& a : advertisers) best = max(best, a.gain);
        return best;
    }
};

struct PoAReport {
    Rational optimal_welfare;
    Rational equilibrium_welfare;
    std::optional<Rational> ratio;  // empty when the equilibrium welfare is 0 (infinite ratio)

    bool infinite() const { return !ratio.has_value(); }
};

namespace detail {

/// Sorted, duplicate-free copy of `levels` with 0 added.
inline std::vector<Rational> normalize_levels(std::vector<Rational> levels) {
    levels.push_back(Rational{});
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
}

/// Visits every combination picking one entry from each list; stops early
/// when `visit` returns false.
inline void for_each_combination(const std::vector<std::vector<Rational>>& choices,
                                 const std::function<bool(const std::vector<Rational>&)>& visit) {
    for (const auto& c : choices)
        if (c.empty()) return;
    std::vector<std::size_t> pos(choices.size(), 0);
    std::vector<Rational> current;
    for (const auto& c : choices) current.push_back(c.front());
    while (true) {
        if (!visit(current)) return;
        std::size_t k = 0;
        for (; k < choices.size(); ++k) {
            if (++pos[k] < choices[k].size()) {
                current[k] = choices[k][pos[k]];
                break;
            }
            pos[k] = 0;
            current[k] = choices[k].front();
        }
        if (k == choices.size()) return;
    }
}

inline std::string format_vector(std::span<const Rational> values) {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + values[i].str();
    return out + ")";
}

/// Interim utility of advertiser i under the direct mechanism, computing only
/// i's VCG payment.
inline Rational direct_utility(const BeliefTable& beliefs, std::span<const Rational> bids, std::size_t i,
                               const Rational& true_value, const TieBreaking& ties) {
    const auto chosen = select_question(beliefs, bids, ties);
    Rational value, others;
    for (const auto& sig : beliefs.signals(chosen)) {
        const auto values = effective_values(sig, bids);
        const auto winner = ties.advertisers.positive_argmax(values);
        if (!winner) continue;
        if (*winner == i)
            value += sig.marginal * true_value * sig.conversion[i];
        else
            others += sig.marginal * values[*winner];
    }
    return value - (welfare_without(beliefs, bids, i) - others);
}

inline void record(DeviationRecord& rec, const Rational& gain, const std::function<std::string()>& describe) {
    if (gain > rec.gain) {
        rec.gain = gain;
        rec.description = describe();
    }
}

inline void finish(EquilibriumReport& report) {
    report.deviation_found = false;
    for (const auto& a : report.advertisers)
        if (a.gain > report.epsilon) report.deviation_found = true;
}

}  // namespace detail

/// Search limits for verify_direct_dsic.
struct DirectSearchOptions {
    /// Above this many opponent profiles per advertiser, a fixed-seed subset is
    /// used instead: all-truthful, one opponent varied at a time, all opponents
    /// on a common level, then pseudo-random fill. The report is then marked
    /// non-exhaustive.
    std::size_t max_opponent_profiles = 1024;
    std::uint64_t seed = 0;
};

/// For each advertiser, each opponent profile from the grid and each
/// deviation from its own grid, compares against bidding its true base value.
inline EquilibriumReport verify_direct_dsic(const Instance& instance, const BidGrid& grid, const Rational& epsilon = {},
                                            const TieBreaking& ties = {}, DirectSearchOptions options = {}) {
    const BeliefTable beliefs(instance);
    const std::size_t n = instance.advertisers.size();
    if (grid.size() != n) throw ArityError("bid grid needs one level set per advertiser");
    detail::check_ties(ties, beliefs.question_count(), n);
    const auto truth = instance.base_values();

    std::vector<std::vector<Rational>> levels;
    for (std::size_t i = 0; i < n; ++i) {
        auto l = grid[i];
        l.push_back(truth[i]);
        levels.push_back(detail::normalize_levels(std::move(l)));
    }

    EquilibriumReport report;
    report.epsilon = epsilon;
    report.advertisers.resize(n);
    report.exhaustive = false;  // grid search never certifies the continuum

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::vector<Rational>> opponent_levels;
        for (std::size_t j = 0; j < n; ++j) opponent_levels.push_back(j == i ? std::vector<Rational>{truth[i]} : levels[j]);

        auto check = [&](const std::vector<Rational>& bids) {
            const Rational base = detail::direct_utility(beliefs, bids, i, truth[i], ties);
            auto deviated = bids;
            for (const auto& level : levels[i]) {
                if (level == truth[i]) continue;
                deviated[i] = level;
                const Rational gain = detail::direct_utility(beliefs, deviated, i, truth[i], ties) - base;
                detail::record(report.advertisers[i], gain, [&] {
                    return "bid " + level.str() + " instead of " + truth[i].str() + " against bids " +
                           detail::format_vector(bids);
                });
            }
            return true;
        };

        double total = 1;
        for (const auto& l : opponent_levels) total *= static_cast<double>(l.size());
        if (total <= static_cast<double>(options.max_opponent_profiles)) {
            detail::for_each_combination(opponent_levels, check);
            continue;
        }

        // Structured subset followed by seeded random opponent profiles.
        std::size_t budget = options.max_opponent_profiles;
        auto spend = [&](const std::vector<Rational>& bids) {
            if (budget == 0) return;
            --budget;
            check(bids);
        };
        spend(truth);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (const auto& level : levels[j]) {
                auto bids = truth;
                bids[j] = level;
                if (level != truth[j]) spend(bids);
            }
        }
        std::vector<Rational> common_levels;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) common_levels.insert(common_levels.end(), levels[j].begin(), levels[j].end());
        for (const auto& level : detail::normalize_levels(common_levels)) {
            auto bids = std::vector<Rational>(n, level);
            bids[i] = truth[i];
            spend(bids);
        }
        std::mt19937_64 rng(options.seed + i);
        while (budget > 0) {
            auto bids = truth;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) bids[j] = levels[j][rng() % levels[j].size()];
            spend(bids);
        }
    }
    detail::finish(report);
    return report;
}

/// Grid with {0, v/2, v, 2v} for every advertiser.
inline BidGrid value_scaled_grid(std::span<const Rational> values) {
    BidGrid grid;
    for (const auto& v : values) grid.push_back({Rational{}, v / 2, v, v * 2});
    return grid;
}

/// Default deviations around `profile`: stage-2 levels {0, v/2, v, 2v}; stage-1
/// levels built from 0, every advertiser's R values, every stage-1 bid in the
/// profile, the midpoints between consecutive such values, and each value
/// plus η (a quarter of the smallest gap).
inline DeviationClass default_deviation_class(const Instance& instance, const StrategyProfile& profile,
                                              std::span<const Rational> true_values, const TieBreaking& ties = {}) {
    const BeliefTable beliefs(instance);
    detail::require_profile(beliefs, profile);
    detail::check_bids(true_values, beliefs.advertiser_count());
    const std::size_t n = beliefs.advertiser_count(), k = beliefs.question_count();

    const auto truthful = prescribed_equilibrium(beliefs, true_values, ties);
    std::vector<Rational> anchors;
    for (std::size_t i = 0; i < n; ++i) {
        anchors.insert(anchors.end(), truthful[i].stage1.begin(), truthful[i].stage1.end());
        anchors.insert(anchors.end(), profile[i].stage1.begin(), profile[i].stage1.end());
    }
    anchors = detail::normalize_levels(std::move(anchors));

    Rational eta(1);
    for (std::size_t a = 1; a < anchors.size(); ++a)
        eta = a == 1 ? anchors[a] - anchors[a - 1] : min(eta, anchors[a] - anchors[a - 1]);
    eta = eta / 4;

    std::vector<Rational> levels = anchors;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        levels.push_back(anchors[a] + eta);
        if (a + 1 < anchors.size()) levels.push_back((anchors[a] + anchors[a + 1]) / 2);
    }
    levels = detail::normalize_levels(std::move(levels));

    DeviationClass dc;
    dc.stage1.assign(n, std::vector<std::vector<Rational>>(k, levels));
    dc.stage2 = value_scaled_grid(true_values);
    return dc;
}

/// Searches unilateral deviations from `profile`: (a) one stage-2 cell moved
/// to a grid level, (b) every stage-1 bid vector from the grid, (c) under
/// stage-1 VCG with includes_force_question, for each question the bid that
/// forces it with zero elsewhere. Utilities are against `true_values`.
inline EquilibriumReport verify_modular_nash(const Instance& instance, const StrategyProfile& profile, Stage1Rule rule,
                                             std::span<const Rational> true_values, const DeviationClass& deviations,
                                             const Rational& epsilon = {}, const TieBreaking& ties = {}) {
    const BeliefTable beliefs(instance);
    detail::require_profile(beliefs, profile);
    const std::size_t n = beliefs.advertiser_count(), k = beliefs.question_count();
    if (deviations.stage1.size() != n || deviations.stage2.size() != n)
        throw ArityError("deviation class needs one entry per advertiser");

    const auto base = run_modular(beliefs, profile, rule, true_values, ties);
    EquilibriumReport report;
    report.epsilon = epsilon;
    report.advertisers.resize(n);
    const bool pivotal = rule.variant == Stage1Variant::vcg && deviations.includes_force_question;
    // For stage-1 VCG the stage-1 bids matter only through the question they
    // induce, so the forcing bids cover every stage-1 best response.
    report.exhaustive = pivotal;

    for (std::size_t i = 0; i < n; ++i) {
        auto& rec = report.advertisers[i];
        const Rational u0 = base.expected_utility[i];
        auto trial = profile;
        auto utility = [&] { return run_modular(beliefs, trial, rule, true_values, ties).expected_utility[i]; };

        // (a) single stage-2 cells
        const auto levels2 = detail::normalize_levels(deviations.stage2[i]);
        for (std::size_t q = 0; q < k; ++q) {
            for (const auto& sig : beliefs.signals(q)) {
                const Rational original = profile[i].stage2[q][sig.signal];
                for (const auto& level : levels2) {
                    if (level == original) continue;
                    trial[i].stage2[q][sig.signal] = level;
                    detail::record(rec, utility() - u0, [&] {
                        return "stage-2 bid " + level.str() + " at (" + instance.questions[q].id + ", " +
                               instance.questions[q].signals[sig.signal] + ")";
                    });
                }
                trial[i].stage2[q][sig.signal] = original;
            }
        }

        // (b) stage-1 grid
        if (deviations.stage1[i].size() != k) throw ArityError("stage-1 deviation levels must cover every question");
        std::vector<std::vector<Rational>> levels1;
        for (const auto& l : deviations.stage1[i]) levels1.push_back(detail::normalize_levels(l));
        detail::for_each_combination(levels1, [&](const std::vector<Rational>& bids) {
            if (bids == profile[i].stage1) return true;
            trial[i].stage1 = bids;
            detail::record(rec, utility() - u0, [&] { return "stage-1 bids " + detail::format_vector(bids); });
            return true;
        });
        trial[i].stage1 = profile[i].stage1;

        // (c) forcing bids
        if (pivotal) {
            std::vector<Rational> others(k);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i)
                    for (std::size_t q = 0; q < k; ++q) others[q] += profile[j].stage1[q];
            const Rational top = *std::max_element(others.begin(), others.end());
            for (std::size_t q = 0; q < k; ++q) {
                std::vector<Rational> bids(k);
                bids[q] = top - others[q] + 1;
                trial[i].stage1 = bids;
                detail::record(rec, utility() - u0, [&] {
                    return "force question " + instance.questions[q].id + " with stage-1 bid " + bids[q].str();
                });
            }
            trial[i].stage1 = profile[i].stage1;
        }
    }
    detail::finish(report);
    return report;
}

/// Unilateral misreports under the proxy mechanism: advertiser i reports each
/// level of reports[i] while everyone else reports truthfully.
inline EquilibriumReport verify_proxy_truthful(const Instance& instance, std::span<const Rational> true_values,
                                               const BidGrid& reports, const Rational& epsilon = {},
                                               const TieBreaking& ties = {}) {
    const BeliefTable beliefs(instance);
    const std::size_t n = beliefs.advertiser_count();
    detail::check_bids(true_values, n);
    if (reports.size() != n) throw ArityError("report grid needs one level set per advertiser");

    const std::vector<Rational> truth(true_values.begin(), true_values.end());
    const auto base = run_proxy(beliefs, truth, truth, ties);
    EquilibriumReport report;
    report.epsilon = epsilon;
    report.advertisers.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& level : detail::normalize_levels(reports[i])) {
            if (level == truth[i]) continue;
            auto reported = truth;
            reported[i] = level;
            const Rational gain = run_proxy(beliefs, reported, truth, ties).expected_utility[i] - base.expected_utility[i];
            detail::record(report.advertisers[i], gain, [&] {
                return "report " + level.str() + " instead of " + truth[i].str();
            });
        }
    }
    detail::finish(report);
    return report;
}

inline PoAReport poa(const Instance& instance, const StrategyProfile& profile, Stage1Rule rule,
                     std::span<const Rational> true_values, const TieBreaking& ties = {}) {
    PoAReport r;
    r.optimal_welfare = brute_force_optimal(instance, true_values);
    r.equilibrium_welfare = run_modular(instance, profile, rule, true_values, ties).expected_welfare;
    if (r.equilibrium_welfare.is_positive()) r.ratio = r.optimal_welfare / r.equilibrium_welfare;
    return r;
}

/// Stage-1 levels {0, δ/m, δ/m+η, δ, δ+η} with η = δ/(4m) on both questions
/// and stage-2 levels {0, 1/2, 1, 2}, for checking robustness_profiles.
inline DeviationClass robustness_deviation_class(int m, const Rational& delta) {
    const Rational low = delta / m, eta = delta / (4 * m);
    const std::vector<Rational> levels = {Rational{}, low, low + eta, delta, delta + eta};
    DeviationClass dc;
    dc.stage1.assign(static_cast<std::size_t>(m), std::vector<std::vector<Rational>>(2, levels));
    dc.stage2.assign(static_cast<std::size_t>(m), {Rational{}, Rational(1, 2), Rational(1), Rational(2)});
    dc.includes_force_question = false;
    return dc;
}

/// Ties resolved in favour of the named question, everything else in instance order.
inline TieBreaking favor_question(const Instance& instance, const std::string& question) {
    std::vector<std::string> ids;
    for (const auto& q : instance.questions) ids.push_back(q.id);
    return TieBreaking{TiePolicy::from_labels(ids, {question}), {}};
}

}  // namespace sponsored
