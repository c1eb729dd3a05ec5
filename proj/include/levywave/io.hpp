#ifndef LEVYWAVE_IO_HPP
#define LEVYWAVE_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace levywave {

// Shortest round-trip decimal representation, stable across runs.
std::string format_double(double v);

// FNV-1a of a canonical text; embedded in every output file.
std::string config_hash(const std::string& canonical_text);

struct CsvTable {
    std::vector<std::string> comments;  // emitted as "# ..." lines
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string csv_to_string(const CsvTable& table);

// Refuses to overwrite unless `force`; creates parent directories.
void write_text_file(const std::string& path, const std::string& content,
                     bool force);

std::string read_text_file(const std::string& path);

} // namespace levywave

#endif
