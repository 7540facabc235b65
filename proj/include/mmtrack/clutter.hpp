// SPDX-License-Identifier: Apache-2.0
//
// Least-squares clutter cancellation: removes from the surveillance window
// its projection onto M_c delayed copies of the reference.

#ifndef MMTRACK_CLUTTER_HPP
#define MMTRACK_CLUTTER_HPP

#include "core.hpp"

#include <Eigen/Dense>

#include <span>

namespace mmtrack {

struct ClutterConfig {
    std::size_t num_taps = 16;
    // Diagonal loading relative to the mean reference energy per tap.
    double regularization = 1e-8;

    void validate() const
    {
        if (num_taps < 1) throw ConfigError("clutter num_taps must be >= 1");
        if (!(regularization >= 0.0)) throw ConfigError("clutter regularization must be >= 0");
    }

    void validate_for_window(std::size_t window_len) const
    {
        validate();
        if (num_taps * 100 > window_len)
            throw ConfigError("clutter num_taps must be <= window length / 100 (taps " + std::to_string(num_taps) +
                              ", window " + std::to_string(window_len) + ")");
    }
};

namespace detail {

// Solves the tapped LS problem for the window ys against reference samples
// ref[-history .. N-1] (ref_begin points at ref[0]). Samples before -history
// are treated as zero.
inline std::vector<cplx> cancel_window(std::span<const cplx> ys, const cplx* ref_begin, std::size_t history,
                                       const ClutterConfig& cfg)
{
    const std::size_t n = ys.size();
    const std::size_t m = cfg.num_taps;
    const auto x = [&](long long i) -> cplx {
        if (i < -static_cast<long long>(history)) return {};
        return ref_begin[i];
    };

    // R[a][b] = sum_n x*[n-a] x[n-b]; first row directly, the rest by the
    // shift recurrence R[a+1][b+1] = R[a][b] + x*[-a-1] x[-b-1] - x*[N-1-a] x[N-1-b].
    Eigen::MatrixXcd normal(m, m);
    for (std::size_t b = 0; b < m; ++b) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(x(static_cast<long long>(i))) * x(static_cast<long long>(i) - static_cast<long long>(b));
        normal(0, static_cast<Eigen::Index>(b)) = acc;
    }
    const auto ll = [](std::size_t v) { return static_cast<long long>(v); };
    for (std::size_t a = 0; a + 1 < m; ++a) {
        for (std::size_t b = a; b + 1 < m; ++b) {
            normal(ll(a + 1), ll(b + 1)) = normal(ll(a), ll(b)) + std::conj(x(-ll(a) - 1)) * x(-ll(b) - 1) -
                                           std::conj(x(ll(n) - 1 - ll(a))) * x(ll(n) - 1 - ll(b));
        }
    }
    for (std::size_t a = 0; a < m; ++a) {
        normal(ll(a), ll(a)) = normal(ll(a), ll(a)).real();
        for (std::size_t b = 0; b < a; ++b) normal(ll(a), ll(b)) = std::conj(normal(ll(b), ll(a)));
    }

    Eigen::VectorXcd rhs(m);
    for (std::size_t a = 0; a < m; ++a) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(x(ll(i) - ll(a))) * ys[i];
        rhs(ll(a)) = acc;
    }

    const double mean_energy = normal.diagonal().real().mean();
    if (cfg.regularization > 0.0) {
        normal.diagonal().array() += cfg.regularization * std::max(mean_energy, std::numeric_limits<double>::min());
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(normal, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (!(hi > 0.0) || lo <= 1e-12 * hi)
            throw IllConditionedError("clutter normal matrix is singular or ill-conditioned; use regularization > 0");
    }

    const Eigen::VectorXcd coef = normal.ldlt().solve(rhs);

    std::vector<cplx> out(ys.begin(), ys.end());
    for (std::size_t a = 0; a < m; ++a) {
        const cplx c = coef(ll(a));
        if (c == cplx{}) continue;
        for (std::size_t i = 0; i < n; ++i) out[i] -= c * x(ll(i) - ll(a));
    }
    return out;
}

} // namespace detail

// y_s - Y_r c_hat with Y_r's columns y_r delayed by 0..M_c-1 samples (zero
// filled at the start of the window).
inline std::vector<cplx> ls_clutter_cancel(std::span<const cplx> ys, std::span<const cplx> yr, const ClutterConfig& cfg)
{
    if (ys.size() != yr.size()) throw ContractError("surveillance and reference windows differ in length");
    cfg.validate();
    if (ys.size() <= cfg.num_taps) throw ContractError("window must be longer than num_taps");
    cfg.validate_for_window(ys.size());
    return detail::cancel_window(ys, yr.data(), 0, cfg);
}

// Variant for a window inside a longer reference stream: delayed columns pull
// up to num_taps-1 samples of history from before the window.
inline std::vector<cplx> ls_clutter_cancel_in_stream(std::span<const cplx> ys, std::span<const cplx> yr_stream,
                                                     std::size_t window_start, const ClutterConfig& cfg)
{
    if (window_start + ys.size() > yr_stream.size()) throw ContractError("window runs past the reference stream");
    cfg.validate_for_window(ys.size());
    const std::size_t history = std::min(window_start, cfg.num_taps);
    return detail::cancel_window(ys, yr_stream.data() + window_start, history, cfg);
}

} // namespace mmtrack

#endif
