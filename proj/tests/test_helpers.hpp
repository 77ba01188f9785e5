#pragma once

// Shared test fixtures: an independent cyclic-Jacobi eigensolver used as
// the brute-force oracle for the eigencomputation path, random model
// generators, and a deterministic population-surrogate series whose
// block outer-product sums reproduce diagonal covariances exactly.

#include <algorithm>
#include <cmath>
#include <vector>

#include "covcpd/cusum.hpp"
#include "covcpd/linalg.hpp"
#include "covcpd/rng.hpp"

namespace testutil {

// Cyclic Jacobi sweeps; returns eigenvalues sorted ascending. Independent
// of the library's eigensolver path.
inline std::vector<double> jacobi_eigenvalues(const covcpd::SymMat& s) {
    const int p = s.dim();
    std::vector<std::vector<double>> a(p, std::vector<double>(p));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a[i][j] = s(i, j);

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                if (a[i][j] == 0.0) continue;
                const double theta = (a[j][j] - a[i][i]) / (2.0 * a[i][j]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < p; ++k) {
                    const double aik = a[i][k], ajk = a[j][k];
                    a[i][k] = c * aik - sn * ajk;
                    a[j][k] = sn * aik + c * ajk;
                }
                for (int k = 0; k < p; ++k) {
                    const double aki = a[k][i], akj = a[k][j];
                    a[k][i] = c * aki - sn * akj;
                    a[k][j] = sn * aki + c * akj;
                }
            }
        }
    }
    std::vector<double> ev(p);
    for (int i = 0; i < p; ++i) ev[static_cast<std::size_t>(i)] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline double jacobi_op_norm(const covcpd::SymMat& s) {
    const auto ev = jacobi_eigenvalues(s);
    return std::max(std::fabs(ev.front()), std::fabs(ev.back()));
}

inline covcpd::SymMat random_symmetric(covcpd::Rng& rng, int p, double scale = 1.0) {
    covcpd::SymMat s(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) s.set(i, j, scale * rng.normal());
    return s;
}

// G^T G / p + eps I: exactly PSD.
inline covcpd::SymMat random_psd(covcpd::Rng& rng, int p, double scale = 1.0) {
    std::vector<std::vector<double>> g(p, std::vector<double>(p));
    for (auto& row : g)
        for (double& v : row) v = rng.normal();
    covcpd::SymMat s(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            double dot = 0.0;
            for (int k = 0; k < p; ++k) dot += g[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                                               g[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            s.set(i, j, scale * dot / p);
        }
    s.axpy(0.05 * scale, covcpd::SymMat::identity(p));
    return s;
}

inline covcpd::SegmentModel random_model(covcpd::Rng& rng, std::int64_t n, int p,
                                         int k_max) {
    const std::int64_t k =
        1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(k_max)));
    const std::int64_t spacing = n / (k + 1);
    std::vector<std::int64_t> cps;
    for (std::int64_t j = 1; j <= k; ++j) {
        const std::int64_t jitter =
            rng.uniform_int(-spacing / 4, spacing / 4);
        cps.push_back(j * spacing + jitter);
    }
    std::vector<covcpd::SymMat> sigmas;
    for (std::int64_t j = 0; j <= k; ++j) sigmas.push_back(random_psd(rng, p));
    return covcpd::SegmentModel(n, std::move(cps), std::move(sigmas));
}

// Deterministic rows cycling sqrt(p * d_j) e_j so every aligned block of p
// rows has outer-product sum equal to (block length) * diag(d). Segment
// boundaries must be multiples of p for the reproduction to be exact.
inline covcpd::ObservationMatrix population_surrogate(
    std::int64_t n, const std::vector<std::vector<double>>& diag_per_segment,
    const std::vector<std::int64_t>& cps) {
    const int p = static_cast<int>(diag_per_segment.front().size());
    covcpd::ObservationMatrix x = covcpd::ObservationMatrix::zeros(n, p);
    for (std::int64_t i = 0; i < n; ++i) {
        std::size_t seg = 0;
        while (seg < cps.size() && i + 1 > cps[seg]) ++seg;
        const int coord = static_cast<int>(i % p);
        x.row(i)[static_cast<std::size_t>(coord)] =
            std::sqrt(p * diag_per_segment[seg][static_cast<std::size_t>(coord)]);
    }
    return x;
}

inline bool approx(double a, double b, double rel, double abs_tol = 0.0) {
    return std::fabs(a - b) <= std::max(abs_tol, rel * std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace testutil
