#include "sdt/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sdt/errors.hpp"

namespace sdt {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    errno = 0;
    char* tail = nullptr;
    const double v = std::strtod(cell.c_str(), &tail);
    if (tail == cell.c_str() || *tail != '\0' || errno == ERANGE || !std::isfinite(v))
        return false;
    out = v;
    return true;
}

}  // namespace

Sample ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file: " + path);
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string cell = trim(line);
        if (cell.empty()) continue;
        double v = 0.0;
        if (!parse_double(cell, v)) {
            if (row == 1 && values.empty()) continue;  // header row
            throw IoError(path + ": row " + std::to_string(row) + ": unparseable cell \"" +
                          cell + "\"");
        }
        values.push_back(v);
    }
    if (values.empty()) throw IoError(path + ": no numeric rows");
    return make_sample(values);
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string convention_flags() {
    return "contamination=hampel-sqrtn,power-cross-cov=zero,table-fit=weighted-score";
}

std::string metadata_header(const std::string& config_text, std::uint64_t seed) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(config_text)));
    std::ostringstream out;
    out << "# sdt " << kToolVersion << " config=" << hex << " seed=" << seed
        << " conventions=" << convention_flags();
    return out.str();
}

std::string render_csv(const std::string& header_line, const CsvTable& table) {
    std::ostringstream out;
    if (!header_line.empty()) out << header_line << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << '\n';
    for (const auto& r : table.rows) {
        if (r.size() != table.columns.size())
            throw InvalidArgumentError("csv row width does not match the column count");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << ',';
            out << r[i];
        }
        out << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace sdt
