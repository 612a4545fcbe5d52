#pragma once

#include <string>
#include <vector>

#include "sponsored/model.hpp"
#include "sponsored/modular.hpp"

namespace sponsored {

/// Two shoe advertisers, four runner types (terrain, experience) with a
/// uniform prior, and two deterministic click/no-click questions: "terr"
/// reveals the terrain, "tgt" reveals whether the runner is an experienced
/// trail runner.
inline Instance gen_running_shoes() {
    Instance inst;
    inst.states = {"(0,0)", "(0,1)", "(1,0)", "(1,1)"};
    inst.prior.assign(4, Rational(1, 4));
    inst.questions.push_back({"terr", {"click", "no-click"}, {{0, 0, 1, 1}, {1, 1, 0, 0}}});
    inst.questions.push_back({"tgt", {"click", "no-click"}, {{0, 0, 0, 1}, {1, 1, 1, 0}}});
    inst.advertisers.push_back({"1", Rational(50), {0, 0, Rational(3, 10), Rational(9, 10)}});
    inst.advertisers.push_back({"2", Rational(30), {Rational(8, 10), Rational(4, 10), 0, 0}});
    return inst;
}

/// Price-of-anarchy family: m equally likely states, a fully revealing
/// question "q1" and an uninformative question "q2", and m unit-value
/// advertisers. Advertiser t converts fully in state t and at rate 1-delta in
/// state t+1 (cyclically); in state 3 advertiser 1 replaces advertiser 2 as
/// that runner-up.
inline Instance gen_poa_instance(int m, const Rational& delta) {
    if (m < 3) throw ParameterError("m must be at least 3, got " + std::to_string(m));
    if (!delta.is_positive() || delta >= 1) throw ParameterError("delta must lie in (0,1), got " + delta.str());
    const auto n = static_cast<std::size_t>(m);

    Instance inst;
    for (std::size_t t = 0; t < n; ++t) inst.states.push_back("t" + std::to_string(t + 1));
    inst.prior.assign(n, Rational(1, m));

    Question revealing{"q1", inst.states, {}};
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<Rational> row(n);
        row[s] = 1;
        revealing.conditional.push_back(std::move(row));
    }
    inst.questions.push_back(std::move(revealing));
    inst.questions.push_back({"q2", {"any"}, {std::vector<Rational>(n, Rational(1))}});

    const Rational runner_up = Rational(1) - delta;
    for (std::size_t i = 0; i < n; ++i)
        inst.advertisers.push_back({std::to_string(i + 1), Rational(1), std::vector<Rational>(n)});
    for (std::size_t t = 0; t < n; ++t) {
        inst.advertisers[t].conversion[t] = 1;
        inst.advertisers[(t + n - 1) % n].conversion[t] = runner_up;
    }
    inst.advertisers[0].conversion[2] = runner_up;
    inst.advertisers[1].conversion[2] = 0;
    return inst;
}

/// Instance on which the proxy two-stage mechanism is manipulable: three
/// advertisers with base value 10 and questions "A" (four equally likely
/// signals) and "B" (three equally likely signals).
///
/// Per-signal posterior conversion rates (advertisers 1, 2, 3):
///   A: a1 (6/5, 0, 0)   a2 (0, 8/5, 0)   a3 (8/5, 0, 8/5)   a4 (6/5, 6/5, 2/5)
///   B: b1 (3/2, 3/5, 0) b2 (3/2, 0, 0)   b3 (0, 3/2, 3/2)
/// States are the 12 pairs (a, b) with a uniform prior; "A" reveals the first
/// coordinate and "B" the second. Rates are α_i(a,b) = α_i(A,a)·α_i(B,b)/E[α_i],
/// which reproduces both tables exactly because each advertiser's mean rate is
/// the same under both questions (1, 7/10 and 1/2).
inline Instance gen_proxy_counterexample() {
    const Rational f65(6, 5), f85(8, 5), f25(2, 5), f32(3, 2), f35(3, 5);
    const std::vector<std::vector<Rational>> rates_a = {
        {f65, 0, 0}, {0, f85, 0}, {f85, 0, f85}, {f65, f65, f25}};
    const std::vector<std::vector<Rational>> rates_b = {{f32, f35, 0}, {f32, 0, 0}, {0, f32, f32}};
    const std::vector<Rational> means = {1, Rational(7, 10), Rational(1, 2)};
    const std::size_t na = rates_a.size(), nb = rates_b.size();

    Instance inst;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b)
            inst.states.push_back("a" + std::to_string(a + 1) + "b" + std::to_string(b + 1));
    inst.prior.assign(na * nb, Rational(1, static_cast<long>(na * nb)));

    Question qa{"A", {}, {}};
    for (std::size_t a = 0; a < na; ++a) {
        qa.signals.push_back("a" + std::to_string(a + 1));
        std::vector<Rational> row(na * nb);
        for (std::size_t b = 0; b < nb; ++b) row[a * nb + b] = 1;
        qa.conditional.push_back(std::move(row));
    }
    Question qb{"B", {}, {}};
    for (std::size_t b = 0; b < nb; ++b) {
        qb.signals.push_back("b" + std::to_string(b + 1));
        std::vector<Rational> row(na * nb);
        for (std::size_t a = 0; a < na; ++a) row[a * nb + b] = 1;
        qb.conditional.push_back(std::move(row));
    }
    inst.questions = {std::move(qa), std::move(qb)};

    for (std::size_t i = 0; i < means.size(); ++i) {
        Advertiser adv{std::to_string(i + 1), Rational(10), {}};
        for (std::size_t a = 0; a < na; ++a)
            for (std::size_t b = 0; b < nb; ++b) adv.conversion.push_back(rates_a[a][i] * rates_b[b][i] / means[i]);
        inst.advertisers.push_back(std::move(adv));
    }
    return inst;
}

/// Stage-1 bids for the first-price / all-pay variants on gen_poa_instance(m, delta):
/// advertiser 1 bids delta on "q2" and nothing on "q1"; everyone else bids
/// delta/m on "q1" and nothing on "q2". Stage-2 bids are truthful.
inline StrategyProfile robustness_profiles(int m, const Rational& delta) {
    if (m < 3) throw ParameterError("m must be at least 3, got " + std::to_string(m));
    if (!delta.is_positive() || delta >= Rational(1, m + 2))
        throw ParameterError("delta must lie in (0, 1/(m+2)), got " + delta.str());
    const auto n = static_cast<std::size_t>(m);
    StrategyProfile profile(n);
    for (std::size_t i = 0; i < n; ++i) {
        profile[i].stage1 = i == 0 ? std::vector<Rational>{0, delta} : std::vector<Rational>{delta / m, 0};
        profile[i].stage2 = {std::vector<Rational>(n, Rational(1)), {Rational(1)}};
    }
    return profile;
}

}  // namespace sponsored
