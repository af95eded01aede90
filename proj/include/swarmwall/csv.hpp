#pragma once

// Minimal CSV: comma-separated numeric tables with one header line.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "swarmwall/errors.hpp"

namespace swarmwall {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw CsvParseError("csv: missing column '" + name + "'");
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError("cannot open csv: " + path);
    CsvTable table;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (lineno == 1) {
            table.header = fields;
            continue;
        }
        if (fields.size() != table.header.size())
            throw CsvParseError(path + ": row " + std::to_string(lineno) + " has " +
                                std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(table.header.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(f, &used));
                if (used != f.size()) throw std::invalid_argument(f);
            } catch (const std::exception&) {
                throw CsvParseError(path + ": row " + std::to_string(lineno) +
                                    ": non-numeric field '" + f + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw CsvParseError(path + ": empty csv");
    return table;
}

// %.9g keeps doubles byte-stable across identical runs without dumping
// full precision.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace swarmwall
