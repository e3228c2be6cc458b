// SPDX-License-Identifier: Apache-2.0
//
// nfmm - localization error bounds under near-field / wideband channel model mismatch
// Copyright (C) 2026 the nfmm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfmm/contour.hpp"

namespace nfmm
{

/// Deterministic float formatting for data files: 17 significant digits
/// round-trip IEEE doubles exactly.
inline std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// A flat table with a fixed column order; cells are pre-formatted so CSV
/// output is byte-deterministic.
struct OutputTable
{
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells)
    {
        if (cells.size() != columns.size())
            throw std::logic_error("row width does not match table schema");
        rows.push_back(std::move(cells));
    }
};

inline std::string to_csv(const OutputTable& t)
{
    if (t.rows.empty()) throw std::runtime_error("refusing to export an empty record set");
    std::ostringstream os;
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            os << row[c] << (c + 1 < row.size() ? "," : "\n");
    return os.str();
}

inline OutputTable parse_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    OutputTable t;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) out.push_back(cell);
        return out;
    };
    if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
    t.columns = split(line);
    while (std::getline(is, line))
    {
        if (line.empty()) continue;
        t.add_row(split(line));
    }
    return t;
}

/// JSON mirror of the CSV schema: an array of row objects. Numeric-looking
/// cells are emitted as JSON numbers, the rest as strings.
inline std::string to_json(const OutputTable& t)
{
    if (t.rows.empty()) throw std::runtime_error("refusing to export an empty record set");
    auto is_number = [](const std::string& s) {
        if (s.empty()) return false;
        char* end = nullptr;
        std::strtod(s.c_str(), &end);
        return end == s.c_str() + s.size();
    };
    std::ostringstream os;
    os << "[\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        os << "  {";
        for (std::size_t c = 0; c < t.columns.size(); ++c)
        {
            const std::string& cell = t.rows[r][c];
            os << '"' << t.columns[c] << "\": ";
            if (is_number(cell))
                os << cell;
            else
                os << '"' << cell << '"';
            if (c + 1 < t.columns.size()) os << ", ";
        }
        os << '}' << (r + 1 < t.rows.size() ? "," : "") << '\n';
    }
    os << "]\n";
    return os.str();
}

enum class ExportFormat
{
    csv,
    json
};

inline ExportFormat parse_export_format(const std::string& s)
{
    if (s == "csv") return ExportFormat::csv;
    if (s == "json") return ExportFormat::json;
    throw std::invalid_argument("unknown export format: " + s);
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Writes a table as CSV or JSON; the extension is appended to `stem`.
inline std::string export_table(const OutputTable& t, const std::string& stem, ExportFormat fmt)
{
    const std::string path = stem + (fmt == ExportFormat::csv ? ".csv" : ".json");
    write_file(path, fmt == ExportFormat::csv ? to_csv(t) : to_json(t));
    return path;
}

/// Contours as "px,py" vertex lines, one blank-line-separated block per
/// polyline.
inline std::string contours_to_text(const std::vector<Polyline>& lines)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < lines.size(); ++i)
    {
        if (i) os << '\n';
        for (const auto& v : lines[i])
            os << fmt_double(v.x()) << ',' << fmt_double(v.y()) << '\n';
    }
    return os.str();
}

} // namespace nfmm
