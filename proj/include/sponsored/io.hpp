#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sponsored/errors.hpp"
#include "sponsored/model.hpp"
#include "sponsored/modular.hpp"

namespace sponsored {

// JSON documents for instances and strategy profiles. Rationals are written
// as canonical "p/q" strings; on input integers and [p, q] pairs are also
// accepted. Floating-point numbers are refused since they are not exact.

inline constexpr int kSchemaVersion = 1;

namespace detail {

using Json = nlohmann::ordered_json;

inline Rational rational_from_json(const Json& node, const std::string& path) {
    try {
        if (node.is_string()) return Rational::parse(node.get<std::string>());
        if (node.is_number_integer()) return Rational(node.get<long long>());
        if (node.is_array() && node.size() == 2 && node[0].is_number_integer() && node[1].is_number_integer())
            return Rational(node[0].get<long>(), node[1].get<long>());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ParameterError& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (node.is_number_float()) throw ParseError(path + ": floating-point number; write it as a string such as \"0.3\"");
    throw ParseError(path + ": expected a rational, got " + std::string(node.type_name()));
}

inline const Json& member(const Json& object, const char* key, const std::string& path) {
    if (!object.is_object()) throw ParseError(path + ": expected an object");
    const auto it = object.find(key);
    if (it == object.end()) throw ParseError(path + ": missing field '" + key + "'");
    return *it;
}

inline const Json& array_member(const Json& object, const char* key, const std::string& path) {
    const auto& node = member(object, key, path);
    if (!node.is_array()) throw ParseError(path + "." + key + ": expected an array");
    return node;
}

inline std::vector<std::string> strings_from_json(const Json& node, const std::string& path) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_string()) throw ParseError(path + "[" + std::to_string(i) + "]: expected a string");
        out.push_back(node[i].get<std::string>());
    }
    return out;
}

inline std::vector<Rational> rationals_from_json(const Json& node, const std::string& path) {
    if (!node.is_array()) throw ParseError(path + ": expected an array");
    std::vector<Rational> out;
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(rational_from_json(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Json rationals_to_json(const std::vector<Rational>& values) {
    Json out = Json::array();
    for (const auto& v : values) out.push_back(v.str());
    return out;
}

inline Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

inline void check_schema(const Json& doc) {
    const auto& version = member(doc, "schema_version", "$");
    if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion)
        throw ParseError("$.schema_version: unsupported version " + version.dump());
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

/// Parses an instance document. Only the document structure is checked here;
/// run validate() on the result for the probabilistic constraints.
inline Instance parse_instance(std::string_view text) {
    const auto doc = detail::parse_json(text);
    detail::check_schema(doc);
    Instance inst;
    inst.states = detail::strings_from_json(detail::array_member(doc, "states", "$"), "$.states");
    inst.prior = detail::rationals_from_json(detail::member(doc, "prior", "$"), "$.prior");

    const auto& questions = detail::array_member(doc, "questions", "$");
    for (std::size_t q = 0; q < questions.size(); ++q) {
        const std::string path = "$.questions[" + std::to_string(q) + "]";
        const auto& node = questions[q];
        Question question;
        const auto& id = detail::member(node, "id", path);
        if (!id.is_string()) throw ParseError(path + ".id: expected a string");
        question.id = id.get<std::string>();
        question.signals = detail::strings_from_json(detail::array_member(node, "signals", path), path + ".signals");
        const auto& rows = detail::array_member(node, "conditional", path);
        for (std::size_t s = 0; s < rows.size(); ++s)
            question.conditional.push_back(
                detail::rationals_from_json(rows[s], path + ".conditional[" + std::to_string(s) + "]"));
        inst.questions.push_back(std::move(question));
    }

    const auto& advertisers = detail::array_member(doc, "advertisers", "$");
    for (std::size_t i = 0; i < advertisers.size(); ++i) {
        const std::string path = "$.advertisers[" + std::to_string(i) + "]";
        const auto& node = advertisers[i];
        Advertiser adv;
        const auto& id = detail::member(node, "id", path);
        if (!id.is_string()) throw ParseError(path + ".id: expected a string");
        adv.id = id.get<std::string>();
        adv.base_value = detail::rational_from_json(detail::member(node, "base_value", path), path + ".base_value");
        adv.conversion = detail::rationals_from_json(detail::member(node, "conversion", path), path + ".conversion");
        inst.advertisers.push_back(std::move(adv));
    }
    return inst;
}

inline std::string emit_instance(const Instance& instance) {
    detail::Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["states"] = instance.states;
    doc["prior"] = detail::rationals_to_json(instance.prior);
    doc["questions"] = detail::Json::array();
    for (const auto& q : instance.questions) {
        detail::Json node;
        node["id"] = q.id;
        node["signals"] = q.signals;
        node["conditional"] = detail::Json::array();
        for (const auto& row : q.conditional) node["conditional"].push_back(detail::rationals_to_json(row));
        doc["questions"].push_back(std::move(node));
    }
    doc["advertisers"] = detail::Json::array();
    for (const auto& a : instance.advertisers) {
        detail::Json node;
        node["id"] = a.id;
        node["base_value"] = a.base_value.str();
        node["conversion"] = detail::rationals_to_json(a.conversion);
        doc["advertisers"].push_back(std::move(node));
    }
    return doc.dump(2) + "\n";
}

inline Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

/// A parsed profile; cells absent from the document are left at 0 and listed
/// in `missing`.
struct ProfileDocument {
    StrategyProfile profile;
    std::vector<std::string> missing;
};

/// Profile layout:
///   {"schema_version": 1, "advertisers": {"<id>": {
///       "stage1": {"<question>": "<bid>", ...},
///       "stage2": {"<question>": {"<signal>": "<bid>", ...}, ...}}, ...}}
inline ProfileDocument parse_profile(std::string_view text, const Instance& instance) {
    const auto doc = detail::parse_json(text);
    detail::check_schema(doc);
    const auto& advertisers = detail::member(doc, "advertisers", "$");
    if (!advertisers.is_object()) throw ParseError("$.advertisers: expected an object keyed by advertiser id");
    for (const auto& [key, _] : advertisers.items())
        try {
            instance.advertiser_index(key);
        } catch (const LookupError& e) {
            throw ParseError(std::string("$.advertisers: ") + e.what());
        }

    ProfileDocument out;
    out.profile.resize(instance.advertisers.size());
    for (std::size_t i = 0; i < instance.advertisers.size(); ++i) {
        const auto& adv = instance.advertisers[i];
        auto& strategy = out.profile[i];
        strategy.stage1.assign(instance.questions.size(), Rational{});
        strategy.stage2.clear();
        for (const auto& q : instance.questions) strategy.stage2.emplace_back(q.signals.size(), Rational{});

        const auto it = advertisers.find(adv.id);
        const detail::Json empty = detail::Json::object();
        const auto& node = it == advertisers.end() ? empty : *it;
        const std::string path = "$.advertisers." + adv.id;
        const auto s1 = node.find("stage1");
        const auto s2 = node.find("stage2");

        for (std::size_t q = 0; q < instance.questions.size(); ++q) {
            const auto& question = instance.questions[q];
            if (s1 != node.end() && s1->contains(question.id))
                strategy.stage1[q] = detail::rational_from_json((*s1)[question.id], path + ".stage1." + question.id);
            else
                out.missing.push_back("advertiser " + adv.id + ": stage-1 bid for question " + question.id);

            const detail::Json* row = nullptr;
            if (s2 != node.end() && s2->contains(question.id)) row = &(*s2)[question.id];
            for (std::size_t s = 0; s < question.signals.size(); ++s) {
                const auto& signal = question.signals[s];
                if (row && row->is_object() && row->contains(signal))
                    strategy.stage2[q][s] =
                        detail::rational_from_json((*row)[signal], path + ".stage2." + question.id + "." + signal);
                else
                    out.missing.push_back("advertiser " + adv.id + ": stage-2 bid at (" + question.id + ", " +
                                          signal + ")");
            }
        }
    }
    return out;
}

inline std::string emit_profile(const StrategyProfile& profile, const Instance& instance) {
    detail::Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["advertisers"] = detail::Json::object();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        detail::Json node;
        node["stage1"] = detail::Json::object();
        node["stage2"] = detail::Json::object();
        for (std::size_t q = 0; q < instance.questions.size(); ++q) {
            const auto& question = instance.questions[q];
            node["stage1"][question.id] = profile[i].stage1[q].str();
            detail::Json row = detail::Json::object();
            for (std::size_t s = 0; s < question.signals.size(); ++s)
                row[question.signals[s]] = profile[i].stage2[q][s].str();
            node["stage2"][question.id] = std::move(row);
        }
        doc["advertisers"][instance.advertisers[i].id] = std::move(node);
    }
    return doc.dump(2) + "\n";
}

}  // namespace sponsored
