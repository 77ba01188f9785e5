#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "covcpd/bsop.hpp"
#include "covcpd/errors.hpp"
#include "covcpd/eval.hpp"
#include "covcpd/harness.hpp"
#include "covcpd/io.hpp"
#include "covcpd/wbsip.hpp"

namespace {

using covcpd::Algo;
using nlohmann::json;

void apply_thread_override() {
#ifdef _OPENMP
    if (const char* env = std::getenv("COVCPD_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) omp_set_num_threads(t);
    }
#endif
}

std::ostream& open_output(std::ofstream& file, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") return std::cout;
    file.open(out_path);
    if (!file) throw covcpd::IoError("cannot open " + out_path + " for writing");
    return file;
}

json detection_json(const covcpd::DetectionResult& res,
                    const std::vector<std::int64_t>& reported_cps,
                    const std::string& algo, const std::string& index_scale) {
    json j;
    j["algorithm"] = algo;
    j["change_points"] = reported_cps;
    j["index_scale_of_diagnostics"] = index_scale;
    json diags = json::array();
    for (const auto& r : res.records) {
        json d;
        d["location"] = r.location;
        d["stat"] = r.stat;
        d["interval"] = {r.seg_lo, r.seg_hi};
        d["generating_interval"] = {r.gen_lo, r.gen_hi};
        if (r.interval_index >= 0) d["m"] = r.interval_index;
        if (r.shadow && !r.shadow->is_zero()) d["shadow"] = r.shadow->coords();
        diags.push_back(std::move(d));
    }
    j["diagnostics"] = std::move(diags);
    json params = json::object();
    for (const auto& [k, v] : res.params_used) params[k] = v;
    j["params_used"] = std::move(params);
    j["warnings"] = res.warnings;
    return j;
}

json rows_json(const std::vector<covcpd::TrialRow>& rows, bool with_normalized) {
    json arr = json::array();
    for (const auto& r : rows) {
        json j;
        j["n"] = r.n;
        j["p"] = r.p;
        j["delta"] = r.delta;
        j["kappa"] = r.kappa;
        j["sigma2"] = r.sigma2;
        j["M"] = r.m;
        j["trial"] = r.trial;
        j["seed"] = r.seed;
        j["k_true"] = r.k_true;
        j["k_est"] = r.k_est;
        if (r.matched_error) j["matched_error"] = *r.matched_error;
        j["hausdorff"] = r.hausdorff;
        if (with_normalized) j["normalized_error"] = r.normalized_error;
        j["runtime_ms"] = r.runtime_ms;
        if (!r.error.empty()) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr;
}

struct CommonOpts {
    std::optional<double> tau;
    std::optional<std::int64_t> delta;
    double margin_scale = 1.0;
    std::optional<std::int64_t> max_interval_len;
    std::int64_t intervals = 300;
    std::uint64_t seed = 0;
    std::int64_t trials = 1;
    std::string out;
    std::string format = "csv";
    std::string algo = "wbsip";
    bool oracle_params = false;
};

void add_override_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--tau", o.tau, "Detection threshold");
    cmd->add_option("--delta", o.delta, "Exclusion margin around interval endpoints");
    cmd->add_option("--margin-scale", o.margin_scale,
                    "Multiplier on the boundary margin");
    cmd->add_option("--max-interval-len", o.max_interval_len,
                    "Maximum candidate interval length");
    cmd->add_option("--intervals", o.intervals, "Number of candidate intervals M");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--out", o.out, "Output path ('-' for stdout)");
}

covcpd::SweepOverrides to_overrides(const CommonOpts& o) {
    covcpd::SweepOverrides ov;
    ov.tau = o.tau;
    ov.delta = o.delta;
    ov.margin_scale = o.margin_scale;
    ov.max_interval_len = o.max_interval_len;
    ov.oracle_params = o.oracle_params;
    return ov;
}

int run_detect(const std::string& data_path, const CommonOpts& o, bool center) {
    covcpd::ObservationMatrix x = covcpd::load_matrix(data_path);
    if (center) x = x.centered();

    covcpd::DetectionResult res;
    std::vector<std::int64_t> reported;
    std::string scale = "original";
    if (o.algo == "bsop") {
        covcpd::BsopParams params;
        params.tau = o.tau;
        params.margin_scale = o.margin_scale;
        res = covcpd::bsop_detect(x, params);
        reported = res.change_points;
    } else if (o.algo == "wbsip") {
        const covcpd::SplitSeries sp = covcpd::split_series(x);
        covcpd::WbsipParams params;
        params.tau = o.tau;
        params.delta = o.delta;
        params.margin_scale = o.margin_scale;
        params.max_interval_len = o.max_interval_len;
        const covcpd::IntervalSet intervals = covcpd::draw_intervals(
            sp.x.n(), o.intervals, o.seed, o.max_interval_len);
        res = covcpd::wbsip_detect(sp.x, sp.w, intervals, params);
        reported = covcpd::to_original_scale(res.change_points);
        scale = "split-half";
        res.params_used.emplace_back("intervals", static_cast<double>(o.intervals));
        res.params_used.emplace_back("interval_seed", static_cast<double>(o.seed));
    } else {
        throw covcpd::ContractError("detect: --algo must be bsop or wbsip");
    }

    std::ofstream file;
    std::ostream& out = open_output(file, o.out);
    out << detection_json(res, reported, o.algo, scale).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_override();

    CLI::App app{"Covariance change point detection and experiment harness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Declarative config file (INI/TOML sections)");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // detect
    auto* detect = app.add_subcommand("detect", "Detect change points in a data file");
    std::string data_path;
    bool center = false;
    CommonOpts dopt;
    dopt.algo = "wbsip";
    detect->add_option("data", data_path, "Input matrix (.csv or .bin)")->required();
    detect->add_option("--algo", dopt.algo, "bsop or wbsip")
        ->check(CLI::IsMember({"bsop", "wbsip"}));
    detect->add_flag("--center", center, "Subtract the global sample mean first");
    add_override_flags(detect, dopt);

    // rate-sweep
    auto* rate = app.add_subcommand("rate-sweep", "Monte Carlo localization-error sweep");
    covcpd::RateSweepConfig rate_cfg;
    CommonOpts ropt;
    std::string rate_noise = "gaussian";
    rate->add_option("--grid-n", rate_cfg.n_grid, "Series lengths");
    rate->add_option("--grid-p", rate_cfg.p_grid, "Dimensions");
    rate->add_option("--grid-delta", rate_cfg.delta_grid,
                     "Change point spacings (default: n/(k+1))");
    rate->add_option("--grid-kappa", rate_cfg.kappa_grid, "Jump sizes");
    rate->add_option("--grid-sigma2", rate_cfg.sigma2_grid, "Base variances");
    rate->add_option("--grid-intervals", rate_cfg.m_grid, "Interval counts M");
    rate->add_option("--k-changes", rate_cfg.k_changes,
                     "Number of equispaced changes when --grid-delta is not given");
    rate->add_option("--trials", rate_cfg.trials, "Trials per grid cell");
    rate->add_option("--algo", ropt.algo, "bsop, wbsip or oracle")
        ->check(CLI::IsMember({"bsop", "wbsip", "oracle"}));
    rate->add_option("--noise", rate_noise, "gaussian or rademacher")
        ->check(CLI::IsMember({"gaussian", "rademacher"}));
    rate->add_flag("--oracle-params", ropt.oracle_params,
                   "Derive tau/delta/max-interval-len from the generating model");
    rate->add_option("--format", ropt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    add_override_flags(rate, ropt);

    // phase-sweep
    auto* phase = app.add_subcommand("phase-sweep", "Signal-ratio phase transition sweep");
    covcpd::PhaseSweepConfig phase_cfg;
    CommonOpts popt;
    phase->add_option("--n", phase_cfg.n, "Series length");
    phase->add_option("--grid-p", phase_cfg.p_grid, "Dimensions");
    phase->add_option("--grid-r", phase_cfg.r_grid, "Signal ratios delta*kappa^2/(sigma2^2*p)");
    phase->add_option("--sigma2", phase_cfg.sigma2, "Base variance");
    phase->add_option("--trials", phase_cfg.trials, "Trials per grid cell");
    phase->add_option("--algo", popt.algo, "bsop, wbsip or oracle")
        ->check(CLI::IsMember({"bsop", "wbsip", "oracle"}));
    phase->add_flag("--oracle-params", popt.oracle_params,
                    "Derive tau/delta/max-interval-len from the generating model");
    phase->add_option("--format", popt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    add_override_flags(phase, popt);

    // interval-coverage
    auto* cover = app.add_subcommand("interval-coverage",
                                     "Flanking-coverage frequency vs closed-form bound");
    covcpd::CoverageConfig cover_cfg;
    std::string cover_out;
    cover->add_option("--n", cover_cfg.n, "Series length");
    cover->add_option("--spacing", cover_cfg.delta, "Change point spacing");
    cover->add_option("--k-changes", cover_cfg.k_changes, "Number of changes");
    cover->add_option("--grid-m", cover_cfg.m_grid, "Interval counts to test");
    cover->add_option("--trials", cover_cfg.trials, "Monte Carlo draws per cell");
    cover->add_option("--seed", cover_cfg.seed, "Master seed");
    cover->add_option("--out", cover_out, "Output path ('-' for stdout)");

    // replay
    auto* replay = app.add_subcommand("replay", "Re-run one sweep trial from its CSV row");
    std::string replay_scenario = "rate";
    covcpd::RateCell replay_rate;
    covcpd::PhaseCell replay_phase;
    double replay_r = 0.0;
    std::int64_t replay_n = 0, replay_p = 0, replay_spacing = 0, replay_trial = 0;
    double replay_kappa = 0.0, replay_sigma2 = 1.0;
    CommonOpts yopt;
    std::string replay_noise = "gaussian";
    replay->add_option("--scenario", replay_scenario, "rate or phase")
        ->check(CLI::IsMember({"rate", "phase"}))
        ->required();
    replay->add_option("--n", replay_n, "Row n")->required();
    replay->add_option("--p", replay_p, "Row p")->required();
    replay->add_option("--spacing", replay_spacing, "Row delta (model spacing)");
    replay->add_option("--kappa", replay_kappa, "Row kappa");
    replay->add_option("--r", replay_r, "Row signal ratio (phase)");
    replay->add_option("--sigma2", replay_sigma2, "Row sigma2");
    replay->add_option("--trial", replay_trial, "Row trial index");
    replay->add_option("--algo", yopt.algo, "bsop, wbsip or oracle")
        ->check(CLI::IsMember({"bsop", "wbsip", "oracle"}));
    replay->add_option("--noise", replay_noise, "gaussian or rademacher");
    replay->add_flag("--oracle-params", yopt.oracle_params,
                     "Derive tau/delta/max-interval-len from the generating model");
    replay->add_option("--format", yopt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    std::string dump_data, dump_json;
    replay->add_option("--dump-data", dump_data, "Also write the trial's series (.csv/.bin)");
    replay->add_option("--dump-json", dump_json, "Also write the raw detection JSON");
    add_override_flags(replay, yopt);

    try {
        app.parse(argc, argv);

        if (detect->parsed()) return run_detect(data_path, dopt, center);

        if (rate->parsed()) {
            rate_cfg.seed = ropt.seed;
            rate_cfg.algo = covcpd::algo_from_string(ropt.algo);
            rate_cfg.noise = covcpd::noise_from_string(rate_noise);
            rate_cfg.ov = to_overrides(ropt);
            if (rate->count("--intervals")) rate_cfg.m_grid = {ropt.intervals};
            const auto rows = covcpd::run_rate_sweep(rate_cfg);
            std::ofstream file;
            std::ostream& out = open_output(file, ropt.out);
            if (ropt.format == "json")
                out << rows_json(rows, false).dump(2) << '\n';
            else
                covcpd::write_rate_csv(out, rows);
            return 0;
        }

        if (phase->parsed()) {
            phase_cfg.seed = popt.seed;
            phase_cfg.m = popt.intervals;
            phase_cfg.algo = covcpd::algo_from_string(popt.algo);
            phase_cfg.ov = to_overrides(popt);
            const auto rows = covcpd::run_phase_sweep(phase_cfg);
            std::ofstream file;
            std::ostream& out = open_output(file, popt.out);
            if (popt.format == "json")
                out << rows_json(rows, true).dump(2) << '\n';
            else
                covcpd::write_phase_csv(out, rows);
            return 0;
        }

        if (cover->parsed()) {
            const auto rows = covcpd::run_interval_coverage(cover_cfg);
            std::ofstream file;
            std::ostream& out = open_output(file, cover_out);
            covcpd::write_coverage_csv(out, rows);
            return 0;
        }

        if (replay->parsed()) {
            covcpd::TrialRow row;
            covcpd::TrialArtifacts artifacts;
            covcpd::TrialArtifacts* art =
                (dump_data.empty() && dump_json.empty()) ? nullptr : &artifacts;
            const Algo algo = covcpd::algo_from_string(yopt.algo);
            if (replay_scenario == "rate") {
                replay_rate = {replay_n, static_cast<int>(replay_p), replay_spacing,
                               replay_kappa, replay_sigma2, yopt.intervals};
                row = covcpd::run_rate_trial(replay_rate, replay_trial, yopt.seed, algo,
                                             covcpd::noise_from_string(replay_noise),
                                             to_overrides(yopt), art);
            } else {
                double r = replay_r;
                if (r == 0.0 && replay_spacing > 0)
                    // recover the ratio from the row's delta/kappa/sigma2
                    r = static_cast<double>(replay_spacing) * replay_kappa * replay_kappa /
                        (replay_sigma2 * replay_sigma2 * static_cast<double>(replay_p));
                replay_phase = {replay_n, static_cast<int>(replay_p), r, replay_sigma2,
                                yopt.intervals};
                row = covcpd::run_phase_trial(replay_phase, replay_trial, yopt.seed, algo,
                                              to_overrides(yopt), art);
            }
            if (!dump_data.empty() && artifacts.data) {
                if (dump_data.size() > 4 && dump_data.substr(dump_data.size() - 4) == ".bin")
                    covcpd::save_matrix_binary(dump_data, *artifacts.data);
                else
                    covcpd::save_matrix_csv(dump_data, *artifacts.data);
            }
            if (!dump_json.empty()) {
                std::ofstream jf(dump_json);
                jf << detection_json(artifacts.detection, artifacts.estimate, yopt.algo,
                                     yopt.algo == "wbsip" ? "split-half" : "original")
                          .dump(2)
                   << '\n';
            }
            std::ofstream file;
            std::ostream& out = open_output(file, yopt.out);
            const std::vector<covcpd::TrialRow> rows{row};
            if (yopt.format == "json")
                out << rows_json(rows, replay_scenario == "phase").dump(2) << '\n';
            else if (replay_scenario == "phase")
                covcpd::write_phase_csv(out, rows);
            else
                covcpd::write_rate_csv(out, rows);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const covcpd::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
