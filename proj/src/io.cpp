#include "schwinger/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace schwinger {

json params_echo(const LatticeParams& p) {
    return json{{"L", p.L},        {"W", p.W},     {"a", p.a},
                {"am", p.am()},    {"aq", p.aq()}, {"theta", p.theta},
                {"max_states", p.max_states}};
}

json params_echo(const RydbergParams& p) {
    return json{{"V", p.V},       {"Vprime", p.Vprime}, {"Omega", p.Omega},
                {"Delta", p.Delta}, {"h", p.h},         {"hprime", p.hprime},
                {"mu", p.mu},     {"shell_cutoff", p.shell_cutoff}};
}

json params_echo(const DiracParams& p) {
    return json{{"L", p.L}, {"a", p.a}, {"am", p.a * p.m}, {"aT", p.a * p.T}};
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open output file: " + tmp.string());
        out << content;
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += header[i];
        out += (i + 1 < header.size()) ? "," : "\n";
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += format_g17(row[i]);
            out += (i + 1 < row.size()) ? "," : "\n";
        }
    }
    return out;
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("SCHWINGER_OUTPUT_DIR");
    if (!dir || !*dir) return path;
    return std::string(dir) + "/" + path;
}

}  // namespace schwinger
