#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardrods/ensemble.hpp"
#include "hardrods/experiment_config.hpp"
#include "hardrods/stats.hpp"

namespace hardrods {

// Shortest round-trip decimal rendering; artifacts must be byte-reproducible,
// so all floating-point output funnels through here.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct CsvTable {
    std::string name; // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }
};

// CSV artifact with the resolved config and seed echoed in '#' comment lines.
inline void write_csv(const std::filesystem::path& dir, const CsvTable& table,
                      const json& resolved_config, std::uint64_t master_seed) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / (table.name + ".csv"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot open CSV output " + table.name);
    out << "# master_seed=" << master_seed << "\n";
    out << "# config=" << resolved_config.dump() << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << table.header[i] << (i + 1 < table.header.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

inline json verdict_to_json(const Verdict& v) {
    return json{{"test_id", v.test_id},
                {"statistic", v.statistic},
                {"target", v.target},
                {"stderr_or_ci", v.stderr_or_ci},
                {"z_or_chi2", v.z_or_chi2},
                {"pass", v.pass}};
}

// Verdict summary artifact: one JSON document per command.
inline void write_verdicts(const std::filesystem::path& dir, const std::string& command,
                           const std::vector<Verdict>& verdicts, const json& resolved_config,
                           std::uint64_t master_seed) {
    std::filesystem::create_directories(dir);
    json doc;
    doc["command"] = command;
    doc["master_seed"] = master_seed;
    doc["config"] = resolved_config;
    json arr = json::array();
    bool all = true;
    for (const auto& v : verdicts) {
        arr.push_back(verdict_to_json(v));
        all = all && v.pass;
    }
    doc["verdicts"] = arr;
    doc["all_pass"] = all;
    std::ofstream out(dir / (command + "_verdicts.json"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot open verdict output for " + command);
    out << doc.dump(2) << "\n";
}

// Debug dump of a configuration, one "x,v,r" row per point.
inline void write_config_dump(const std::filesystem::path& dir, const std::string& name,
                              const std::vector<RodPoint>& pts, const json& resolved_config,
                              std::uint64_t master_seed) {
    CsvTable t;
    t.name = name;
    t.header = {"x", "v", "r"};
    for (const auto& p : pts)
        t.add_row({format_double(p.x), format_double(p.v), format_double(p.r)});
    write_csv(dir, t, resolved_config, master_seed);
}

} // namespace hardrods
