#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bpwa {

// Shortest round-trip-stable text for CSV output (%.10g).
std::string fmt(double v);

std::map<std::string, std::string> parse_key_values(const std::string& text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a(const std::string& data);
std::string hex64(std::uint64_t v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace bpwa
