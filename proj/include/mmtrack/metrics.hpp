// SPDX-License-Identifier: Apache-2.0
//
// Trajectory error statistics and Welch power spectral density.

#ifndef MMTRACK_METRICS_HPP
#define MMTRACK_METRICS_HPP

#include "channel_sim.hpp"
#include "core.hpp"
#include "fft.hpp"
#include "tracker.hpp"

#include <algorithm>

namespace mmtrack {

struct CdfPoint {
    double error_m;
    double fraction;
};

struct ErrorStats {
    std::vector<double> per_point_errors_m;
    double median_m = 0.0;
    double p90_m = 0.0;
    std::vector<CdfPoint> cdf;
};

// Quantile of an ascending sequence, linear between order statistics.
inline double quantile_sorted(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) throw ContractError("quantile of an empty sequence");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline ErrorStats error_stats_from(std::vector<double> errors)
{
    if (errors.empty()) throw ContractError("no errors to summarize");
    ErrorStats st;
    st.per_point_errors_m = errors;
    std::sort(errors.begin(), errors.end());
    st.median_m = quantile_sorted(errors, 0.5);
    st.p90_m = quantile_sorted(errors, 0.9);
    const auto n = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) st.cdf.push_back({errors[i], static_cast<double>(i + 1) / n});
    return st;
}

// Index of the truth sample nearest to t, or npos when farther than tol.
inline std::size_t nearest_index(const std::vector<double>& times, double t, double tol)
{
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t best = std::string::npos;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == times.begin() ? it : std::prev(it)}) {
        if (cand == times.end()) continue;
        const double d = std::abs(*cand - t);
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::size_t>(cand - times.begin());
        }
    }
    return best_d <= tol ? best : std::string::npos;
}

// Aligns est's first point onto the matching truth point, then measures the
// per-instance Euclidean error.
inline ErrorStats trajectory_error(const Trajectory& est, const TargetTrack& truth)
{
    if (est.size() == 0 || truth.size() == 0) throw ContractError("trajectory_error needs non-empty inputs");
    if (est.sensing_times_s.size() != est.points_m.size()) throw ContractError("trajectory times and points differ in length");
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < truth.size(); ++k) step = std::min(step, truth.times_s[k] - truth.times_s[k - 1]);
    const double tol = std::isfinite(step) ? 0.5 * step + 1e-9 : 1e-9;

    std::vector<std::size_t> match(est.size());
    for (std::size_t k = 0; k < est.size(); ++k) {
        match[k] = nearest_index(truth.times_s, est.sensing_times_s[k], tol);
        if (match[k] == std::string::npos)
            throw ContractError("estimate time " + std::to_string(est.sensing_times_s[k]) + " s has no truth sample within half a step");
    }
    const Vec2 shift = truth.positions_m[match[0]] - est.points_m[0];
    std::vector<double> errors(est.size());
    for (std::size_t k = 0; k < est.size(); ++k) errors[k] = distance(est.points_m[k] + shift, truth.positions_m[match[k]]);
    return error_stats_from(std::move(errors));
}

enum class PsdWindow { hann, rectangular };

struct PsdEstimate {
    std::vector<double> freq_hz;      // ascending, -fs/2 .. fs/2
    std::vector<double> density;      // linear, power per Hz
    std::vector<double> power_dbhz;

    double bin_width_hz() const { return freq_hz.size() > 1 ? freq_hz[1] - freq_hz[0] : 0.0; }

    double integrated_power() const
    {
        double s = 0.0;
        for (double d : density) s += d;
        return s * bin_width_hz();
    }

    // Mean linear density over |f| <= half_band_hz.
    double mean_density(double half_band_hz) const
    {
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < freq_hz.size(); ++i)
            if (std::abs(freq_hz[i]) <= half_band_hz) {
                s += density[i];
                ++n;
            }
        if (n == 0) throw ContractError("band narrower than one PSD bin");
        return s / static_cast<double>(n);
    }
};

// Averaged periodogram (Welch) over nfft-long tapered segments.
inline PsdEstimate psd(const BasebandBuffer& buf, std::size_t nfft, double overlap_frac = 0.5,
                       PsdWindow window = PsdWindow::hann)
{
    if (nfft < 2 || nfft > buf.size()) throw ContractError("psd: nfft must be in [2, buffer length]");
    if (!(overlap_frac >= 0.0 && overlap_frac <= 0.9)) throw ContractError("psd: overlap_frac must lie in [0, 0.9]");
    const double fs = buf.sample_rate_hz;

    std::vector<double> w(nfft, 1.0);
    if (window == PsdWindow::hann)
        for (std::size_t n = 0; n < nfft; ++n) w[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(nfft)));
    double wss = 0.0;
    for (double v : w) wss += v * v;

    const std::size_t step = std::max<std::size_t>(1, nfft - static_cast<std::size_t>(std::llround(overlap_frac * static_cast<double>(nfft))));
    const std::size_t segments = (buf.size() - nfft) / step + 1;

    FftPlan fft(nfft, FftDirection::forward);
    std::vector<double> acc(nfft, 0.0);
    for (std::size_t s = 0; s < segments; ++s) {
        auto b = fft.buffer();
        for (std::size_t n = 0; n < nfft; ++n) b[n] = buf.samples[s * step + n] * w[n];
        fft.execute();
        for (std::size_t n = 0; n < nfft; ++n) acc[n] += std::norm(b[n]);
    }

    PsdEstimate out;
    const double norm = 1.0 / (static_cast<double>(segments) * fs * wss);
    const auto half = static_cast<long long>(nfft / 2);
    for (long long i = 0; i < static_cast<long long>(nfft); ++i) {
        const long long k = i - half;  // fftshift
        const auto bin = static_cast<std::size_t>((k + static_cast<long long>(nfft)) % static_cast<long long>(nfft));
        out.freq_hz.push_back(static_cast<double>(k) * fs / static_cast<double>(nfft));
        out.density.push_back(acc[bin] * norm);
        out.power_dbhz.push_back(to_db(std::max(acc[bin] * norm, 1e-300)));
    }
    return out;
}

} // namespace mmtrack

#endif
