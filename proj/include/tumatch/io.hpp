#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "tumatch/types.hpp"

namespace tumatch {

inline constexpr const char* kToolName = "tumatch";
inline constexpr const char* kToolVersion = "0.1.0";

// Locale-independent decimal formatting with 17 significant digits; the
// empty string encodes an absent (NaN) value.
std::string format_double(double v);

std::string format_u64(std::uint64_t v);

// FNV-1a over bytes; used for config hashes in metadata sidecars.
std::uint64_t fnv1a64(std::string_view s);

// RFC-4180 CSV: CRLF line endings, fields quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
};

// "<csv_path>.meta.json" with the tool version, seed and config hash.
void write_meta_sidecar(const std::string& csv_path, const std::string& canonical_config,
                        std::uint64_t seed);

// Reads matching patterns from a CSV with header x,y,mass. Type indices are
// 1-based; y = 0 marks single-men rows and x = 0 single-women rows.
MatchingPatterns read_patterns_csv(const std::string& path);

void write_patterns_csv(const std::string& path, const MatchingPatterns& mu);

}  // namespace tumatch
