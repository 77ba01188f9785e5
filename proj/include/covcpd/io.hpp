#pragma once

#include <filesystem>
#include <string>

#include "covcpd/cusum.hpp"

namespace covcpd {

/// CSV: one observation per row, comma separated, no header.
ObservationMatrix load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const std::filesystem::path& path, const ObservationMatrix& x);

/// Binary: 8-byte magic "covcpd01", little-endian int64 n, int64 p, then
/// n*p little-endian float64 values in row-major order.
ObservationMatrix load_matrix_binary(const std::filesystem::path& path);
void save_matrix_binary(const std::filesystem::path& path, const ObservationMatrix& x);

/// Dispatch on extension: ".bin" is binary, anything else CSV.
ObservationMatrix load_matrix(const std::filesystem::path& path);

/// JSON round trip for ground-truth models:
/// {"n": ..., "change_points": [...], "sigmas": [[row-major dense], ...]}.
std::string segment_model_to_json(const SegmentModel& model);
SegmentModel segment_model_from_json(const std::string& text);

}  // namespace covcpd
