#include "bpwa/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bpwa/error.hpp"

namespace bpwa {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string fmt(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw InputError("line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

CsvTable read_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    CsvTable t;
    std::string line;
    bool first = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        if (first) {
            first = false;
            t.header = cells;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size()) throw std::invalid_argument(c);
            } catch (const std::exception&) {
                throw InputError(path + ":" + std::to_string(lineno) + ": not a number: " + c);
            }
        }
        if (row.size() != t.header.size())
            throw InputError(path + ":" + std::to_string(lineno) + ": column count mismatch");
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw InputError(path + ": empty CSV");
    return t;
}

}  // namespace bpwa
