#include "covcpd/bsop.hpp"

#include <algorithm>
#include <cmath>

#include "covcpd/errors.hpp"
#include "covcpd/scan.hpp"

namespace covcpd {

namespace {

struct BsopRun {
    const OuterPrefix& pre;
    std::int64_t margin;
    double tau;
    const EigOptions& eig;
    std::vector<DetectionRecord> records;

    void recurse(std::int64_t s, std::int64_t e) {
        if (e - s <= 2 * margin + 1) return;
        const ArgmaxResult r = opnorm_scan(pre, s, e, s + margin, e - margin, eig);
        if (r.b < 0 || r.a <= tau) return;
        const OpNormResult ev = op_norm_eig(cov_cusum(pre, s, e, r.b), eig);
        records.push_back({r.b, r.a, s, e, s + margin, e - margin, -1, ev.v});
        recurse(s, r.b - 1);
        recurse(r.b, e);
    }
};

}  // namespace

DetectionResult bsop_detect(const ObservationMatrix& x, const BsopParams& params) {
    require(!params.tau || *params.tau > 0.0, "bsop_detect: tau must be positive");
    require(params.margin_scale > 0.0, "bsop_detect: margin_scale must be positive");

    const std::int64_t n = x.n();
    const int p = x.p();
    const double ln_n = std::log(static_cast<double>(n));
    const std::int64_t margin =
        static_cast<std::int64_t>(std::ceil(params.margin_scale * p * ln_n));

    DetectionResult out;
    out.params_used.emplace_back("margin", static_cast<double>(margin));
    if (params.margin_scale != 1.0)
        out.params_used.emplace_back("margin_scale", params.margin_scale);

    OuterPrefix pre(x);

    double tau;
    if (params.tau) {
        tau = *params.tau;
    } else {
        SymMat pooled(p);
        auto total = pre.at(n);
        auto dst = pooled.packed();
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] = total[k] / static_cast<double>(n);
        const double sigma_hat2 = op_norm(pooled, params.eig);
        tau = params.tau_scale * sigma_hat2 * std::sqrt(p * ln_n);
        out.params_used.emplace_back("tau_auto", tau);
        out.params_used.emplace_back("sigma_hat2", sigma_hat2);
    }

    if (n <= 2 * margin + 1) {
        out.warnings.push_back("interval shorter than twice the boundary margin");
        return out;
    }

    BsopRun run{pre, margin, tau, params.eig, {}};
    run.recurse(0, n);

    std::sort(run.records.begin(), run.records.end(),
              [](const DetectionRecord& a, const DetectionRecord& b) {
                  return a.location < b.location;
              });
    for (const DetectionRecord& r : run.records) {
        if (!out.change_points.empty() && out.change_points.back() == r.location) continue;
        out.change_points.push_back(r.location);
        out.records.push_back(r);
    }
    return out;
}

}  // namespace covcpd
