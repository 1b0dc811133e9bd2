#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qhl {

// Writes numeric CSV with '.' decimal separator and 17 significant digits,
// so values round-trip bit-exactly.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

// FNV-1a 64-bit digest, used for output checksums and config digests.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

}  // namespace qhl
