#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sponsored/analysis.hpp"
#include "sponsored/direct.hpp"
#include "sponsored/generators.hpp"
#include "sponsored/io.hpp"
#include "sponsored/model.hpp"
#include "sponsored/modular.hpp"
#include "sponsored/report.hpp"

namespace sponsored::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;  // invalid instance, deviation found, bad parameters
inline constexpr int kUsage = 2;     // bad flags, unreadable or malformed input

namespace detail {

inline std::vector<Rational> parse_rationals(const std::vector<std::string>& texts) {
    std::vector<Rational> out;
    for (const auto& t : texts) out.push_back(Rational::parse(t));
    return out;
}

inline std::vector<Rational> parse_grid(const std::vector<std::string>& texts, const std::string& flag) {
    if (texts.empty()) throw ParseError(flag + ": empty grid");
    auto levels = parse_rationals(texts);
    for (const auto& l : levels)
        if (l.is_negative()) throw ParseError(flag + ": negative level " + l.str());
    return levels;
}

/// Resolves --ties labels. "q:<id>" and "a:<id>" pick the list explicitly;
/// a bare label must name exactly one question or advertiser.
inline TieBreaking resolve_ties(const Instance& instance, const std::vector<std::string>& tokens) {
    std::vector<std::string> qids, aids, qorder, aorder;
    for (const auto& q : instance.questions) qids.push_back(q.id);
    for (const auto& a : instance.advertisers) aids.push_back(a.id);
    auto has = [](const std::vector<std::string>& ids, const std::string& s) {
        return std::find(ids.begin(), ids.end(), s) != ids.end();
    };
    for (const auto& token : tokens) {
        if (token.rfind("q:", 0) == 0) {
            qorder.push_back(token.substr(2));
        } else if (token.rfind("a:", 0) == 0) {
            aorder.push_back(token.substr(2));
        } else if (has(qids, token) && has(aids, token)) {
            throw ParseError("tie label '" + token + "' names both a question and an advertiser; prefix it with q: or a:");
        } else if (has(qids, token)) {
            qorder.push_back(token);
        } else if (has(aids, token)) {
            aorder.push_back(token);
        } else {
            throw ParseError("tie label '" + token + "' matches no question or advertiser");
        }
    }
    try {
        return {TiePolicy::from_labels(qids, qorder), TiePolicy::from_labels(aids, aorder)};
    } catch (const Error& e) {
        throw ParseError(std::string("--ties: ") + e.what());
    }
}

inline Cell winner_cell(const Instance& instance, const std::optional<std::size_t>& winner) {
    return winner ? Cell{instance.advertisers[*winner].id} : Cell{std::string("-")};
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace detail

inline Report direct_report(const Instance& instance, const std::vector<Rational>& bids, const TieBreaking& ties) {
    const BeliefTable beliefs(instance);
    const auto outcome = run_direct(beliefs, bids, ties);
    const auto shares = decompose_payment(beliefs, bids, ties);
    const auto& question = instance.questions[outcome.chosen_question];

    Report r{"direct", {}};
    r.section("outcome", {"chosen_question", "expected_welfare"})
        .add({question.id, outcome.expected_welfare});
    auto& qs = r.section("questions", {"question", "expected_welfare"});
    for (std::size_t q = 0; q < instance.questions.size(); ++q)
        qs.add({instance.questions[q].id, expected_question_welfare(beliefs, bids, q)});
    auto& sigs = r.section("signals", {"signal", "probability", "winner", "winner_effective_value", "second_price"});
    for (const auto& a : outcome.per_signal)
        sigs.add({question.signals[a.signal], a.probability, detail::winner_cell(instance, a.winner),
                  a.winner_effective_value, a.second_price});
    auto& advs = r.section("advertisers", {"advertiser", "bid", "delivered_conversion", "expected_value", "payment",
                                           "stage1_externality", "expected_second_price", "utility"});
    for (std::size_t i = 0; i < instance.advertisers.size(); ++i)
        advs.add({instance.advertisers[i].id, bids[i], outcome.expected_delivered_conversion[i],
                  outcome.expected_value[i], outcome.expected_payment[i], shares[i].stage1_externality,
                  shares[i].expected_second_price, outcome.expected_utility[i]});
    return r;
}

inline Report modular_report(const Instance& instance, const StrategyProfile& profile, Stage1Rule rule,
                             const std::vector<Rational>& true_values, const TieBreaking& ties,
                             const ModularOutcome& outcome) {
    const auto& question = instance.questions[outcome.chosen_question];
    Report r{"modular", {}};
    r.section("outcome", {"rule", "chosen_question", "expected_welfare"})
        .add({std::string(to_string(rule.variant)), question.id, outcome.expected_welfare});
    auto& totals = r.section("stage1", {"question", "total"});
    for (std::size_t q = 0; q < instance.questions.size(); ++q)
        totals.add({instance.questions[q].id, outcome.stage1_totals[q]});
    auto& bids = r.section("stage1_bids", {"advertiser", "question", "bid"});
    for (std::size_t i = 0; i < profile.size(); ++i)
        for (std::size_t q = 0; q < instance.questions.size(); ++q)
            bids.add({instance.advertisers[i].id, instance.questions[q].id, profile[i].stage1[q]});
    auto& sigs = r.section("signals", {"signal", "probability", "winner", "stage2_payment"});
    for (const auto& s : outcome.per_signal)
        sigs.add({question.signals[s.signal], s.probability, detail::winner_cell(instance, s.winner), s.stage2_payment});
    auto& advs = r.section("advertisers", {"advertiser", "true_value", "stage1_payment", "utility"});
    for (std::size_t i = 0; i < instance.advertisers.size(); ++i)
        advs.add({instance.advertisers[i].id, true_values[i], outcome.stage1_payments[i], outcome.expected_utility[i]});
    (void)ties;
    return r;
}

inline Report equilibrium_report(const Instance& instance, const std::string& mechanism,
                                 const EquilibriumReport& rep) {
    Report r{"equilibrium", {}};
    r.section("verdict", {"mechanism", "verdict", "epsilon", "best_gain", "exhaustive"})
        .add({mechanism, rep.verdict(), rep.epsilon, rep.best_gain(), detail::yes_no(rep.exhaustive)});
    auto& advs = r.section("advertisers", {"advertiser", "best_gain", "best_deviation"});
    for (std::size_t i = 0; i < rep.advertisers.size(); ++i)
        advs.add({instance.advertisers[i].id, rep.advertisers[i].gain, rep.advertisers[i].description});
    return r;
}

namespace detail {

struct Globals {
    std::vector<std::string> ties;
    std::string format;
    int precision = 6;
    std::uint64_t seed = 0;
};

struct Context {
    const Globals& globals;
    std::ostream& out;
    std::ostream& err;
    bool interactive;

    void emit(const Report& report) const {
        const auto format = globals.format.empty() ? (interactive ? Format::table : Format::structured)
                                                   : parse_format(globals.format);
        render(report, format, out, globals.precision);
    }
};

inline Instance load_valid(const std::string& path) {
    auto instance = load_instance(path);
    const auto violations = validate(instance);
    if (!violations.empty())
        throw ParameterError("invalid instance: " + violations.front().path + ": " + violations.front().message);
    return instance;
}

inline Stage1Rule parse_rule(const std::string& name) {
    if (name == "vcg") return {Stage1Variant::vcg};
    if (name == "first-price") return {Stage1Variant::first_price};
    if (name == "all-pay") return {Stage1Variant::all_pay};
    throw ParseError("unknown stage-1 rule '" + name + "'");
}

inline std::vector<Rational> bids_or_truthful(const Instance& instance, const std::vector<std::string>& bids) {
    return bids.empty() ? instance.base_values() : parse_rationals(bids);
}

struct ProfileOptions {
    std::string profile_path;
    bool prescribed = false;
    std::vector<std::string> values;
};

/// Builds the strategy profile from --profile or --prescribed; reports missing
/// cells on `err` and returns nothing when the profile is incomplete.
inline std::optional<StrategyProfile> load_profile(const Instance& instance, const ProfileOptions& opts,
                                                   const std::vector<Rational>& true_values, const TieBreaking& ties,
                                                   std::ostream& err) {
    if (opts.profile_path.empty()) return prescribed_equilibrium(instance, true_values, ties);
    auto doc = parse_profile(read_file(opts.profile_path), instance);
    if (!doc.missing.empty()) {
        err << "incomplete profile, missing " << doc.missing.size() << " bid(s):\n";
        for (const auto& m : doc.missing) err << "  " << m << "\n";
        return std::nullopt;
    }
    const auto issues = check_profile(BeliefTable(instance), doc.profile);
    if (!issues.empty()) throw ParameterError("malformed strategy profile: " + issues.front());
    return doc.profile;
}

}  // namespace detail

/// Runs the command line `args` (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool interactive = false) {
    CLI::App app{"Exact analysis of sponsored-suggestion auctions", "sponsored"};
    app.require_subcommand(1);
    app.fallthrough();

    detail::Globals g;
    app.add_option("--ties", g.ties, "tie-breaking priority labels, most preferred first (q:<id> / a:<id>)")
        ->delimiter(',');
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"table", "structured", "csv"}));
    app.add_option("--precision", g.precision, "significant digits of decimal columns")->check(CLI::Range(1, 60));
    app.add_option("--seed", g.seed, "seed for sampled trajectories");

    std::string path;
    std::vector<std::string> bids;

    auto* validate_cmd = app.add_subcommand("validate", "check an instance document");
    validate_cmd->add_option("instance", path)->required();

    auto* direct_cmd = app.add_subcommand("run-direct", "run the end-to-end VCG mechanism");
    direct_cmd->add_option("instance", path)->required();
    auto* bids_opt = direct_cmd->add_option("--bids", bids, "base-value bids in advertiser order");
    direct_cmd->add_flag("--truthful", "bid the base values (default)")->excludes(bids_opt);

    detail::ProfileOptions popts;
    std::string rule_name = "vcg";
    std::vector<std::string> proxy_reports;
    auto* modular_cmd = app.add_subcommand("run-modular", "run a two-stage mechanism");
    modular_cmd->add_option("instance", path)->required();
    auto* m_profile = modular_cmd->add_option("--profile", popts.profile_path, "strategy profile document");
    auto* m_prescribed =
        modular_cmd->add_flag("--prescribed", popts.prescribed, "stage-1 bids R_i, truthful stage-2 bids (default)");
    auto* m_proxy = modular_cmd->add_option("--proxy", proxy_reports, "run the proxy variant on these value reports");
    m_profile->excludes(m_prescribed)->excludes(m_proxy);
    m_prescribed->excludes(m_proxy);
    modular_cmd->add_option("--rule", rule_name)->check(CLI::IsMember({"vcg", "first-price", "all-pay"}));
    modular_cmd->add_option("--values", popts.values, "true base values (default: the instance's)");

    std::string family = "poa", delta_text = "auto";
    int m_from = 3, m_to = 10;
    auto* sweep_cmd = app.add_subcommand("poa-sweep", "price of anarchy over the m-advertiser family");
    sweep_cmd->add_option("--family", family)->check(CLI::IsMember({"poa"}));
    sweep_cmd->add_option("--m-from", m_from);
    sweep_cmd->add_option("--m-to", m_to);
    sweep_cmd->add_option("--delta", delta_text, "rational in (0,1), or auto for 1/m^2");
    sweep_cmd->add_option("--rule", rule_name)->check(CLI::IsMember({"vcg", "first-price", "all-pay"}));

    std::string mechanism = "direct", epsilon_text = "0";
    std::vector<std::string> grid, stage1_grid, stage2_grid;
    bool no_force = false;
    auto* verify_cmd = app.add_subcommand("verify", "search for profitable unilateral deviations");
    verify_cmd->add_option("instance", path)->required();
    verify_cmd->add_option("--mechanism", mechanism)->check(CLI::IsMember({"direct", "modular", "proxy"}));
    auto* v_profile = verify_cmd->add_option("--profile", popts.profile_path, "strategy profile document (modular)");
    verify_cmd->add_flag("--prescribed", popts.prescribed, "verify the prescribed profile (modular default)")
        ->excludes(v_profile);
    verify_cmd->add_option("--rule", rule_name)->check(CLI::IsMember({"vcg", "first-price", "all-pay"}));
    verify_cmd->add_option("--values", popts.values, "true base values (default: the instance's)");
    verify_cmd->add_option("--grid", grid, "bid or report levels for every advertiser (direct, proxy)")->delimiter(',');
    verify_cmd->add_option("--stage1-grid", stage1_grid, "stage-1 levels for every question (modular)")
        ->delimiter(',');
    verify_cmd->add_option("--stage2-grid", stage2_grid, "stage-2 levels for every cell (modular)")->delimiter(',');
    verify_cmd->add_flag("--no-force", no_force, "skip the question-forcing stage-1 deviations");
    verify_cmd->add_option("--epsilon", epsilon_text);

    std::string gen_family, out_path;
    int gen_m = 3;
    std::string gen_delta = "1/9";
    auto* gen_cmd = app.add_subcommand("gen", "write a generated instance document");
    gen_cmd->add_option("--family", gen_family, "running-shoes, poa or proxy (alias prop1)")
        ->required()
        ->check(CLI::IsMember({"running-shoes", "poa", "proxy", "prop1"}));
    gen_cmd->add_option("--m", gen_m);
    gen_cmd->add_option("--delta", gen_delta);
    gen_cmd->add_option("--out", out_path, "output file (default: standard output)");

    std::size_t count = 1;
    auto* sample_cmd = app.add_subcommand("sample", "draw trajectories of the direct mechanism");
    sample_cmd->add_option("instance", path)->required();
    auto* s_bids = sample_cmd->add_option("--bids", bids, "base-value bids in advertiser order");
    sample_cmd->add_flag("--truthful", "bid the base values (default)")->excludes(s_bids);
    sample_cmd->add_option("--count", count, "number of trajectories (seeds seed, seed+1, ...)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    const detail::Context ctx{g, out, err, interactive};
    try {
        if (!g.format.empty()) parse_format(g.format);

        if (validate_cmd->parsed()) {
            const auto instance = load_instance(path);
            const auto violations = validate(instance);
            Report r{"validation", {}};
            r.section("summary", {"valid", "states", "questions", "advertisers"})
                .add({detail::yes_no(violations.empty()), static_cast<long long>(instance.states.size()),
                      static_cast<long long>(instance.questions.size()),
                      static_cast<long long>(instance.advertisers.size())});
            auto& v = r.section("violations", {"path", "message"});
            for (const auto& violation : violations) v.add({violation.path, violation.message});
            ctx.emit(r);
            return violations.empty() ? kOk : kNegative;
        }

        if (direct_cmd->parsed()) {
            const auto instance = detail::load_valid(path);
            const auto ties = detail::resolve_ties(instance, g.ties);
            ctx.emit(direct_report(instance, detail::bids_or_truthful(instance, bids), ties));
            return kOk;
        }

        if (modular_cmd->parsed()) {
            const auto instance = detail::load_valid(path);
            const auto ties = detail::resolve_ties(instance, g.ties);
            const auto truth = detail::bids_or_truthful(instance, popts.values);
            if (!proxy_reports.empty()) {
                const auto reports = detail::parse_rationals(proxy_reports);
                const auto profile = prescribed_equilibrium(instance, reports, ties);
                const auto outcome = run_proxy(instance, reports, truth, ties);
                ctx.emit(modular_report(instance, profile, {Stage1Variant::vcg}, truth, ties, outcome));
                return kOk;
            }
            const auto rule = detail::parse_rule(rule_name);
            const auto profile = detail::load_profile(instance, popts, truth, ties, err);
            if (!profile) return kNegative;
            const auto outcome = run_modular(instance, *profile, rule, truth, ties);
            ctx.emit(modular_report(instance, *profile, rule, truth, ties, outcome));
            return kOk;
        }

        if (sweep_cmd->parsed()) {
            if (m_to < m_from) throw ParameterError("--m-to must not be below --m-from");
            if (m_from < 3) throw ParameterError("m must be at least 3, got " + std::to_string(m_from));
            const auto rule = detail::parse_rule(rule_name);
            const bool automatic = delta_text == "auto";
            const auto fixed = automatic ? Rational{} : Rational::parse(delta_text);
            Report r{"poa-sweep", {}};
            auto& rows = r.section("sweep", {"m", "delta", "chosen_question", "optimal_welfare",
                                             "equilibrium_welfare", "ratio"});
            for (int m = m_from; m <= m_to; ++m) {
                const Rational delta = automatic ? Rational(1, static_cast<long>(m) * m) : fixed;
                const auto instance = gen_poa_instance(m, delta);
                const std::vector<Rational> truth(static_cast<std::size_t>(m), Rational(1));
                TieBreaking ties;
                StrategyProfile profile;
                if (rule.variant == Stage1Variant::vcg) {
                    ties = detail::resolve_ties(instance, g.ties);
                    profile = prescribed_equilibrium(instance, truth, ties);
                } else {
                    ties = g.ties.empty() ? favor_question(instance, "q2") : detail::resolve_ties(instance, g.ties);
                    profile = robustness_profiles(m, delta);
                }
                const auto report = poa(instance, profile, rule, truth, ties);
                const auto chosen = run_modular(instance, profile, rule, truth, ties).chosen_question;
                rows.add({static_cast<long long>(m), delta, instance.questions[chosen].id, report.optimal_welfare,
                          report.equilibrium_welfare,
                          report.ratio ? Cell{*report.ratio} : Cell{std::string("inf")}});
            }
            ctx.emit(r);
            return kOk;
        }

        if (verify_cmd->parsed()) {
            const auto instance = detail::load_valid(path);
            const auto ties = detail::resolve_ties(instance, g.ties);
            const auto epsilon = Rational::parse(epsilon_text);
            if (epsilon.is_negative()) throw ParseError("--epsilon must be non-negative");
            const auto truth = detail::bids_or_truthful(instance, popts.values);
            const std::size_t n = instance.advertisers.size();
            EquilibriumReport rep;
            if (mechanism == "direct" || mechanism == "proxy") {
                const BidGrid levels = grid.empty() ? value_scaled_grid(truth)
                                                    : BidGrid(n, detail::parse_grid(grid, "--grid"));
                rep = mechanism == "direct" ? verify_direct_dsic(instance, levels, epsilon, ties)
                                            : verify_proxy_truthful(instance, truth, levels, epsilon, ties);
            } else {
                const auto rule = detail::parse_rule(rule_name);
                const auto profile = detail::load_profile(instance, popts, truth, ties, err);
                if (!profile) return kNegative;
                auto dc = default_deviation_class(instance, *profile, truth, ties);
                if (!stage1_grid.empty())
                    dc.stage1.assign(n, std::vector<std::vector<Rational>>(instance.questions.size(),
                                                                            detail::parse_grid(stage1_grid, "--stage1-grid")));
                if (!stage2_grid.empty()) dc.stage2.assign(n, detail::parse_grid(stage2_grid, "--stage2-grid"));
                dc.includes_force_question = !no_force;
                rep = verify_modular_nash(instance, *profile, rule, truth, dc, epsilon, ties);
            }
            ctx.emit(equilibrium_report(instance, mechanism, rep));
            return rep.deviation_found ? kNegative : kOk;
        }

        if (gen_cmd->parsed()) {
            Instance instance;
            if (gen_family == "running-shoes")
                instance = gen_running_shoes();
            else if (gen_family == "poa")
                instance = gen_poa_instance(gen_m, Rational::parse(gen_delta));
            else
                instance = gen_proxy_counterexample();
            const auto text = emit_instance(instance);
            if (out_path.empty())
                out << text;
            else
                write_file(out_path, text);
            return kOk;
        }

        if (sample_cmd->parsed()) {
            const auto instance = detail::load_valid(path);
            const auto ties = detail::resolve_ties(instance, g.ties);
            const auto values = detail::bids_or_truthful(instance, bids);
            const auto trajectories = sample_trajectories(instance, values, ties, g.seed, count);
            Report r{"sample", {}};
            auto& rows = r.section("trajectories", {"seed", "state", "question", "signal", "winner", "second_price"});
            for (std::size_t k = 0; k < trajectories.size(); ++k) {
                const auto& t = trajectories[k];
                const auto& q = instance.questions[t.question];
                rows.add({static_cast<long long>(g.seed + k), instance.states[t.state], q.id, q.signals[t.signal],
                          detail::winner_cell(instance, t.winner), t.second_price});
            }
            auto& pay = r.section("payments", {"advertiser", "expected_payment"});
            if (!trajectories.empty())
                for (std::size_t i = 0; i < instance.advertisers.size(); ++i)
                    pay.add({instance.advertisers[i].id, trajectories.front().expected_payment[i]});
            ctx.emit(r);
            return kOk;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kNegative;
    }
    return kUsage;
}

}  // namespace sponsored::cli
