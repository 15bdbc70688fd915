// CSV export/import of per-state tables and figure data. Reals print with 12
// significant digits through a fixed snprintf path, so identical inputs
// always produce byte-identical files.
#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "powalloc/problem.hpp"
#include "powalloc/tables.hpp"

namespace powalloc {

inline std::string format_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

template <class T, class Format>
void write_table_csv(std::ostream& out, const ProblemSpec& spec, const StateGrid<T>& table,
                     const char* value_column, Format format) {
    if (table.num_energy_levels() != spec.num_energy_levels() ||
        table.num_channels() != spec.num_channels())
        throw std::invalid_argument("table shape does not match the problem spec");
    out << "energy,channel_index,channel_value," << value_column << "\n";
    for (int e = 0; e < table.num_energy_levels(); ++e)
        for (int h = 1; h <= table.num_channels(); ++h)
            out << e << ',' << h << ',' << format_real(spec.channel_value(h)) << ','
                << format(table.at(e, h)) << "\n";
}

template <class T, class Parse>
StateGrid<T> read_table_csv(std::istream& in, const ProblemSpec& spec,
                            const char* value_column, Parse parse) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expected_header =
        std::string("energy,channel_index,channel_value,") + value_column;
    if (line != expected_header)
        throw std::invalid_argument("csv: unexpected header '" + line + "', expected '" +
                                    expected_header + "'");

    StateGrid<T> table(spec.num_energy_levels(), spec.num_channels());
    StateGrid<int> seen(spec.num_energy_levels(), spec.num_channels(), 0);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 4)
            throw std::invalid_argument("csv row " + std::to_string(row) +
                                        ": expected 4 fields, got " +
                                        std::to_string(fields.size()));
        int energy = 0;
        int channel = 0;
        try {
            energy = std::stoi(fields[0]);
            channel = std::stoi(fields[1]);
        } catch (const std::exception&) {
            throw std::invalid_argument("csv row " + std::to_string(row) +
                                        ": unparseable state indices");
        }
        if (energy < 0 || energy >= spec.num_energy_levels() || channel < 1 ||
            channel > spec.num_channels())
            throw std::invalid_argument("csv row " + std::to_string(row) + ": state (energy=" +
                                        fields[0] + ", channel_index=" + fields[1] +
                                        ") inconsistent with the problem dimensions");
        table.at(energy, channel) = parse(fields[3], row);
        seen.at(energy, channel) = 1;
    }
    for (int e = 0; e < spec.num_energy_levels(); ++e)
        for (int h = 1; h <= spec.num_channels(); ++h)
            if (!seen.at(e, h))
                throw std::invalid_argument("csv: missing row for state (energy=" +
                                            std::to_string(e) + ", channel_index=" +
                                            std::to_string(h) + ")");
    return table;
}

} // namespace detail

inline void write_value_table_csv(std::ostream& out, const ProblemSpec& spec,
                                  const ValueTable& values) {
    detail::write_table_csv<double>(out, spec, values, "value",
                                    [](double v) { return format_real(v); });
}

inline void write_policy_table_csv(std::ostream& out, const ProblemSpec& spec,
                                   const PolicyTable& policy) {
    detail::write_table_csv<int>(out, spec, policy, "power",
                                 [](int v) { return std::to_string(v); });
}

inline ValueTable read_value_table_csv(std::istream& in, const ProblemSpec& spec) {
    return detail::read_table_csv<double>(in, spec, "value",
                                          [](const std::string& s, std::size_t row) {
                                              try {
                                                  return std::stod(s);
                                              } catch (const std::exception&) {
                                                  throw std::invalid_argument(
                                                      "csv row " + std::to_string(row) +
                                                      ": unparseable value '" + s + "'");
                                              }
                                          });
}

inline PolicyTable read_policy_table_csv(std::istream& in, const ProblemSpec& spec) {
    return detail::read_table_csv<int>(in, spec, "power",
                                       [](const std::string& s, std::size_t row) {
                                           try {
                                               return std::stoi(s);
                                           } catch (const std::exception&) {
                                               throw std::invalid_argument(
                                                   "csv row " + std::to_string(row) +
                                                   ": unparseable power '" + s + "'");
                                           }
                                       });
}

// Figure data: one (x, labeled series, value) triple per row.
struct FigureSeries {
    std::string label;
    std::vector<double> values;  // indexed by energy 0..capacity
};

inline void write_figure_csv(std::ostream& out, const std::vector<FigureSeries>& series) {
    out << "energy,series,value\n";
    for (const FigureSeries& s : series)
        for (std::size_t e = 0; e < s.values.size(); ++e)
            out << e << ',' << s.label << ',' << format_real(s.values[e]) << "\n";
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace powalloc
