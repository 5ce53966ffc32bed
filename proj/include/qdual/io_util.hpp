// Result persistence: deterministic CSV serialization, SHA-256 parameter
// hashing, and an append-only on-disk cache of computed traces.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdual/types.hpp"

namespace qdual {

// Shortest round-trip decimal form of a double ("%.17g").
std::string format_g17(double x);

// RFC-4180 quoting: fields containing commas, quotes, or newlines are quoted
// with embedded quotes doubled.
std::string csv_escape(const std::string& field);

// Write a CSV file with a header row; every row must match the header width.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Minimal reader for the CSV dialect written above (quoted fields supported).
std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path);

// Hex SHA-256 digest of a byte string (self-contained implementation).
std::string sha256_hex(const std::string& data);

// Append-only cache of complex traces under `dir`, one JSON-lines file per
// parameter hash.  Keys must be canonical serializations covering every
// physical and numerical parameter; a store that disagrees with an existing
// entry throws (replay must be exact).
class TraceCache {
 public:
  explicit TraceCache(std::filesystem::path dir);

  std::optional<cplx> lookup(const std::string& params_key,
                             const std::string& label) const;
  void store(const std::string& params_key, const std::string& label,
             cplx value);

 private:
  std::filesystem::path file_for(const std::string& params_key) const;
  std::filesystem::path dir_;
};

}  // namespace qdual
