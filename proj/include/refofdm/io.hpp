/**
 * @file io.hpp
 * @brief CSV, IQ, bit-file and manifest writers.
 */
#ifndef REFOFDM_IO_HPP
#define REFOFDM_IO_HPP

#include <string>

#include "refofdm/types.hpp"

namespace refofdm {

/// I/O failure carrying the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

using CsvRow = std::vector<std::string>;

/// Fixed 12-significant-digit formatting used in every report.
std::string fmt(double v);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_csv(const std::string& path, const CsvRow& header, const std::vector<CsvRow>& rows);

/// Interleaved float64 little-endian I/Q plus `<path>.json` sidecar.
void write_iq(const std::string& path, const ComplexSignal& s);
ComplexSignal read_iq(const std::string& path);

/// One bit per byte, values 0 or 1.
void write_bits(const std::string& path, const bits_t& bits);
bits_t read_bits(const std::string& path);

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

/// manifest.json with a SHA-256 per listed file (names relative to dir).
std::string write_manifest(const std::string& dir, const std::vector<std::string>& files,
                           const std::string& provenance_json);

}  // namespace refofdm

#endif
