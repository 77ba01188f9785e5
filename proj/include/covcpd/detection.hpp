#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "covcpd/linalg.hpp"

namespace covcpd {

/// One detected change point with its diagnostics.
struct DetectionRecord {
    std::int64_t location = 0;      // estimated change point
    double stat = 0.0;              // statistic value at detection (> tau)
    std::int64_t seg_lo = 0;        // recursion interval (s, e) at detection
    std::int64_t seg_hi = 0;
    std::int64_t gen_lo = 0;        // interval the argmax was taken over
    std::int64_t gen_hi = 0;
    std::int64_t interval_index = -1;  // m* for interval-based detection
    std::optional<UnitVector> shadow;  // projection direction, when one exists
};

/// Sorted estimated change points plus per-point diagnostics.
struct DetectionResult {
    std::vector<std::int64_t> change_points;  // strictly increasing
    std::vector<DetectionRecord> records;     // same order as change_points
    std::vector<std::string> warnings;
    /// Every parameter that was resolved from a default, echoed so a run
    /// is reproducible from its output alone.
    std::vector<std::pair<std::string, double>> params_used;
};

}  // namespace covcpd
