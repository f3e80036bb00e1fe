#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace forge {

// Canonical number formatting used by serializers and reports.
// Integral values print without a decimal point; everything else uses
// shortest %g with enough digits for the values this project produces.
std::string format_number(double v);

// Decimal formatting that round-trips any finite double (%.17g).
std::string format_full(double v);

// Exact round-trip formatting (hexfloat) for model files.
std::string format_exact(double v);
std::optional<double> parse_exact(const std::string& s);

std::string trim(const std::string& s);
std::vector<std::string> split_ws(const std::string& s);
std::vector<std::string> split_lines(const std::string& text);

std::optional<long long> parse_int(const std::string& s);
std::optional<double> parse_double(const std::string& s);

// Whole-file IO. Throws IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Number of worker threads: FORGE_THREADS if set, else hardware count.
int thread_count();

// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
// the partition over threads never affects outputs.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace forge
