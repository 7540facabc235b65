// SPDX-License-Identifier: Apache-2.0
//
// Oracles and generators shared by the unit tests and the acceptance binary.

#ifndef MMTRACK_TESTS_SUPPORT_HPP
#define MMTRACK_TESTS_SUPPORT_HPP

#include <mmtrack/mmtrack.hpp>

#include <random>

namespace mmtrack::testing {

inline std::vector<cplx> complex_gaussian(std::size_t n, double power, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * power));
    std::vector<cplx> out(n);
    for (auto& v : out) v = {g(rng), g(rng)};
    return out;
}

// Literal evaluation of one CAF row:
//   R(f) = max_tau | sum_n ys[n] conj(yr[start + n - tau]) exp(+j 2 pi f n Ts) |
// in long double, straight from the definition.
inline std::vector<double> direct_caf_row(const std::vector<cplx>& ys, const std::vector<cplx>& yr_stream,
                                          std::size_t start, const SensingConfig& cfg)
{
    const auto bins = cfg.doppler_bins_hz();
    std::vector<double> out(bins.size(), 0.0);
    const long double ts = 1.0L / static_cast<long double>(cfg.sample_rate_hz);
    const long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
    for (std::size_t tau = 0; tau <= cfg.delay_search_samples; ++tau) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            long double re = 0.0L, im = 0.0L;
            for (std::size_t n = 0; n < ys.size(); ++n) {
                const long long idx = static_cast<long long>(start + n) - static_cast<long long>(tau);
                if (idx < 0) continue;
                const cplx z = ys[n] * std::conj(yr_stream[static_cast<std::size_t>(idx)]);
                // Reduce the phase argument exactly before the trig call.
                const long double cycles = static_cast<long double>(bins[b]) * static_cast<long double>(n) * ts;
                const long double ph = two_pi * (cycles - std::floor(cycles));
                const long double c = std::cos(ph), s = std::sin(ph);
                re += z.real() * c - z.imag() * s;
                im += z.real() * s + z.imag() * c;
            }
            out[b] = std::max(out[b], static_cast<double>(std::hypot(re, im)));
        }
    }
    return out;
}

// Per-bin relative error with a floor tied to the row peak, so bins sitting
// in an exact null do not divide by zero.
inline double max_relative_bin_error(const std::vector<double>& got, const std::vector<double>& want)
{
    double peak = 0.0;
    for (double v : want) peak = std::max(peak, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        const double denom = std::max(want[i], 1e-9 * peak);
        if (denom > 0.0) worst = std::max(worst, std::abs(got[i] - want[i]) / denom);
    }
    return worst;
}

// Small sensing configuration for Monte Carlo work: 10 kHz, 0.1 s windows,
// +-100 Hz at 10 Hz (21 bins), gamma 3, W 25.
inline SensingConfig small_sensing()
{
    auto cfg = SensingConfig::for_rate(10e3);
    cfg.doppler_max_hz = 100.0;
    return cfg;
}

// Fraction of noise-only CAF rows on which the detector reports a Doppler.
// Each trial correlates fresh surveillance noise against a fresh OFDM
// reference window, exactly as the pipeline would on an empty scene.
inline double caf_false_alarm_rate(std::uint64_t seed, std::size_t trials, const SensingConfig& cfg = small_sensing())
{
    CafEngine engine(cfg);
    TransmitConfig tx;
    tx.sample_rate_hz = cfg.sample_rate_hz;
    tx.bandwidth_hz = 0.5 * cfg.sample_rate_hz;
    tx.duration_s = static_cast<double>(cfg.window_len_samples) / cfg.sample_rate_hz;
    tx.frame = {64, 16, 80, 320};
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        tx.rng_seed = mix_seed(seed, 2 * t);
        const auto ref = gen_transmit_signal(tx);
        const auto sur = complex_gaussian(cfg.window_len_samples, 1.0, mix_seed(seed, 2 * t + 1));
        const auto row = engine.row(sur, ref.samples, 0);
        if (detect_doppler(row.magnitudes, cfg)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

// Same statistic on idealized rows of independent Rayleigh magnitudes.
inline double rayleigh_false_alarm_rate(std::uint64_t seed, std::size_t trials, const SensingConfig& cfg = small_sensing())
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> row(cfg.num_bins());
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (auto& r : row) r = std::hypot(g(rng), g(rng));
        if (detect_doppler(row, cfg)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

} // namespace mmtrack::testing

#endif
