#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sponsored/errors.hpp"
#include "sponsored/rational.hpp"

namespace sponsored {

// Tabular reports. Every rational column is shown exactly and followed by a
// decimal rendering at the chosen precision.

enum class Format { table, structured, csv };

inline Format parse_format(std::string_view name) {
    if (name == "table") return Format::table;
    if (name == "structured") return Format::structured;
    if (name == "csv") return Format::csv;
    throw ParseError("unknown format '" + std::string(name) + "'");
}

using Cell = std::variant<std::string, Rational, long long>;

struct Section {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    Section& add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw ArityError("report row width does not match section '" + name + "'");
        rows.push_back(std::move(row));
        return *this;
    }
};

struct Report {
    std::string kind;
    std::vector<Section> sections;

    Section& section(std::string name, std::vector<std::string> columns) {
        sections.push_back({std::move(name), std::move(columns), {}});
        return sections.back();
    }
};

namespace detail {

inline bool rational_column(const Section& s, std::size_t c) {
    return std::any_of(s.rows.begin(), s.rows.end(),
                       [c](const auto& row) { return std::holds_alternative<Rational>(row[c]); });
}

/// Header and string rows with a decimal column after every rational column.
inline std::vector<std::vector<std::string>> flatten(const Section& s, int precision) {
    std::vector<std::vector<std::string>> out(1);
    std::vector<bool> is_rational;
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
        is_rational.push_back(rational_column(s, c));
        out[0].push_back(s.columns[c]);
        if (is_rational[c]) out[0].push_back(s.columns[c] + "_decimal");
    }
    for (const auto& row : s.rows) {
        std::vector<std::string> line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (const auto* r = std::get_if<Rational>(&row[c])) {
                line.push_back(r->str());
                line.push_back(r->decimal(precision));
                continue;
            }
            if (const auto* i = std::get_if<long long>(&row[c]))
                line.push_back(std::to_string(*i));
            else
                line.push_back(std::get<std::string>(row[c]));
            if (is_rational[c]) line.emplace_back("");
        }
        out.push_back(std::move(line));
    }
    return out;
}

inline std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace detail

inline void render_table(const Report& report, std::ostream& out, int precision) {
    bool first = true;
    for (const auto& section : report.sections) {
        if (!first) out << "\n";
        first = false;
        out << "[" << section.name << "]\n";
        const auto lines = detail::flatten(section, precision);
        std::vector<std::size_t> width(lines[0].size(), 0);
        for (const auto& line : lines)
            for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
        for (const auto& line : lines) {
            std::string text;
            for (std::size_t c = 0; c < line.size(); ++c) {
                text += line[c];
                if (c + 1 < line.size()) text += std::string(width[c] - line[c].size() + 2, ' ');
            }
            text.erase(text.find_last_not_of(' ') + 1);
            out << text << "\n";
        }
    }
}

inline void render_csv(const Report& report, std::ostream& out, int precision) {
    for (const auto& section : report.sections) {
        const auto lines = detail::flatten(section, precision);
        bool header = true;
        for (const auto& line : lines) {
            out << (header ? "section" : detail::csv_field(section.name));
            header = false;
            for (const auto& field : line) out << "," << detail::csv_field(field);
            out << "\n";
        }
    }
}

inline void render_structured(const Report& report, std::ostream& out, int precision) {
    using Json = nlohmann::ordered_json;
    Json doc;
    doc["schema_version"] = 1;
    doc["kind"] = report.kind;
    doc["precision"] = precision;
    Json sections = Json::object();
    for (const auto& section : report.sections) {
        Json rows = Json::array();
        for (const auto& row : section.rows) {
            Json record = Json::object();
            for (std::size_t c = 0; c < row.size(); ++c) {
                const auto& key = section.columns[c];
                if (const auto* r = std::get_if<Rational>(&row[c]))
                    record[key] = Json{{"value", r->str()}, {"decimal", r->decimal(precision)}};
                else if (const auto* i = std::get_if<long long>(&row[c]))
                    record[key] = *i;
                else
                    record[key] = std::get<std::string>(row[c]);
            }
            rows.push_back(std::move(record));
        }
        sections[section.name] = std::move(rows);
    }
    doc["sections"] = std::move(sections);
    out << doc.dump(2) << "\n";
}

inline void render(const Report& report, Format format, std::ostream& out, int precision = 6) {
    switch (format) {
        case Format::table: render_table(report, out, precision); return;
        case Format::structured: render_structured(report, out, precision); return;
        case Format::csv: render_csv(report, out, precision); return;
    }
}

}  // namespace sponsored
