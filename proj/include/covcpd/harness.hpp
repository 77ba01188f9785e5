#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "covcpd/datagen.hpp"
#include "covcpd/wbsip.hpp"

namespace covcpd {

enum class Algo { bsop, wbsip, oracle };

Algo algo_from_string(const std::string& s);
const char* to_string(Algo a);
NoiseFamily noise_from_string(const std::string& s);

/// Parameter overrides shared by the sweep commands. oracle_params derives
/// tau, delta and max_interval_len from the generating model (the
/// admissible-range midpoints); explicit values win over both modes.
struct SweepOverrides {
    std::optional<double> tau;
    std::optional<std::int64_t> delta;
    double margin_scale = 1.0;
    std::optional<std::int64_t> max_interval_len;
    bool oracle_params = false;
};

/// One Monte Carlo trial outcome; maps 1:1 onto a sweep CSV row.
struct TrialRow {
    std::int64_t n = 0;
    std::int64_t p = 0;
    std::int64_t delta = 0;  // minimal spacing of the generating model
    double kappa = 0.0;
    double sigma2 = 0.0;
    std::int64_t m = 0;  // candidate interval count
    std::int64_t trial = 0;
    std::uint64_t seed = 0;  // per-trial seed; sufficient for replay
    std::int64_t k_true = 0;
    std::int64_t k_est = 0;
    std::optional<std::int64_t> matched_error;
    std::int64_t hausdorff = 0;
    double normalized_error = 0.0;
    double runtime_ms = 0.0;
    std::string error;  // empty on success
};

/// Ground-truth-informed parameters for the split-sample detector, all on
/// the half-length scale.
struct OracleWbsipParams {
    double tau = 0.0;
    std::int64_t delta = 0;
    std::int64_t max_interval_len = 0;
};

OracleWbsipParams oracle_wbsip_params(const SegmentModel& model);

/// Ground-truth-informed threshold for the full-sample detector.
double oracle_bsop_tau(const SegmentModel& model);

struct RateCell {
    std::int64_t n = 500;
    int p = 5;
    std::int64_t delta = 166;  // change points at delta, 2*delta, ...
    double kappa = 1.0;
    double sigma2 = 1.0;
    std::int64_t m = 300;
};

/// Equispaced alternating-covariance model for a rate cell: changes every
/// `delta` (K = floor(n/delta) - 1), covariances alternating sigma2*I and
/// (sigma2+kappa)*I.
SegmentModel make_rate_model(const RateCell& cell);

/// Optional per-trial artifacts for diagnostics and replay dumps.
struct TrialArtifacts {
    std::optional<ObservationMatrix> data;  // generated series, original scale
    DetectionResult detection;              // raw detector output
    std::vector<std::int64_t> estimate;     // original-scale change points
};

TrialRow run_rate_trial(const RateCell& cell, std::int64_t trial,
                        std::uint64_t trial_seed, Algo algo, NoiseFamily noise,
                        const SweepOverrides& ov, TrialArtifacts* artifacts = nullptr);

struct RateSweepConfig {
    std::vector<std::int64_t> n_grid{500};
    std::vector<std::int64_t> p_grid{5};
    /// Explicit spacings; when empty, floor(n/(k_changes+1)) per n.
    std::vector<std::int64_t> delta_grid{};
    std::vector<double> kappa_grid{1.0};
    std::vector<double> sigma2_grid{1.0};
    std::vector<std::int64_t> m_grid{300};
    std::int64_t k_changes = 2;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    Algo algo = Algo::wbsip;
    NoiseFamily noise = NoiseFamily::gaussian;
    SweepOverrides ov;
};

std::vector<TrialRow> run_rate_sweep(const RateSweepConfig& config);

struct PhaseCell {
    std::int64_t n = 900;
    int p = 5;
    double r = 1.0;  // signal ratio delta*kappa^2 / (sigma2^2 * p)
    double sigma2 = 1.0;
    std::int64_t m = 300;
};

/// Single-change spiked instance realizing signal ratio r at spacing
/// floor(n/3): kappa = sigma2 * sqrt(r*p/delta). Alternating trials place
/// the change early / late.
TrialRow run_phase_trial(const PhaseCell& cell, std::int64_t trial,
                         std::uint64_t trial_seed, Algo algo, const SweepOverrides& ov,
                         TrialArtifacts* artifacts = nullptr);

struct PhaseSweepConfig {
    std::int64_t n = 900;
    std::vector<std::int64_t> p_grid{5};
    std::vector<double> r_grid{1.0};
    double sigma2 = 1.0;
    std::int64_t m = 300;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    Algo algo = Algo::wbsip;
    SweepOverrides ov;
};

std::vector<TrialRow> run_phase_sweep(const PhaseSweepConfig& config);

struct CoverageConfig {
    std::int64_t n = 600;
    std::int64_t delta = 150;
    std::int64_t k_changes = 3;
    std::vector<std::int64_t> m_grid{50};
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
};

struct CoverageRow {
    std::int64_t n = 0, delta = 0, k = 0, m = 0, trials = 0;
    std::uint64_t seed = 0;
    double frequency = 0.0;
    double bound = 0.0;
};

/// Empirical frequency of the event that every change point is flanked by
/// some drawn interval at distance between delta/2 and 3*delta/4 on each
/// side, versus the closed-form lower bound.
std::vector<CoverageRow> run_interval_coverage(const CoverageConfig& config);

/// 1 - exp(log(n/delta) - m*delta^2/(16*n^2))
double coverage_bound(std::int64_t n, std::int64_t delta, std::int64_t m);

bool covers_all_changes(const IntervalSet& intervals,
                        const std::vector<std::int64_t>& cps, std::int64_t delta);

/// Column order: n,p,delta,kappa,sigma2,M,trial,seed,k_true,k_est,
/// matched_error,hausdorff,runtime_ms,error
void write_rate_csv(std::ostream& out, const std::vector<TrialRow>& rows);
/// Same with normalized_error inserted after hausdorff.
void write_phase_csv(std::ostream& out, const std::vector<TrialRow>& rows);
void write_coverage_csv(std::ostream& out, const std::vector<CoverageRow>& rows);

}  // namespace covcpd
