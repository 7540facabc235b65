// SPDX-License-Identifier: Apache-2.0
//
// Transmit-side baseband synthesis: a frame of training symbols followed by an
// OFDM payload of random QPSK, tiled to the requested duration.

#ifndef MMTRACK_WAVEFORM_HPP
#define MMTRACK_WAVEFORM_HPP

#include "core.hpp"
#include "fft.hpp"

#include <random>

namespace mmtrack {

struct FrameLayout {
    std::size_t fft_size = 512;
    std::size_t cp_len = 64;
    std::size_t training_len = 576;  // samples, whole number of (fft_size + cp_len) symbols
    std::size_t payload_len = 4608;  // samples, whole number of (fft_size + cp_len) symbols

    std::size_t symbol_len() const { return fft_size + cp_len; }
    std::size_t frame_len() const { return training_len + payload_len; }
};

struct TransmitConfig {
    double sample_rate_hz = 10e6;
    double duration_s = 1.0;
    double bandwidth_hz = 5e6;
    FrameLayout frame;
    std::uint64_t rng_seed = 1;

    std::size_t num_samples() const
    {
        return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
    }

    void validate() const
    {
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
            throw ConfigError("sample_rate_hz must be positive");
        if (!(duration_s > 0.0) || !std::isfinite(duration_s))
            throw ConfigError("duration_s must be positive");
        if (num_samples() < 1) throw ConfigError("duration_s * sample_rate_hz must be at least one sample");
        if (!(bandwidth_hz > 0.0) || bandwidth_hz > sample_rate_hz)
            throw ConfigError("bandwidth_hz must be in (0, sample_rate_hz]");
        if (frame.fft_size < 4 || frame.cp_len >= frame.fft_size)
            throw ConfigError("fft_size must be >= 4 and cp_len < fft_size");
        if (frame.training_len == 0 || frame.payload_len == 0)
            throw ConfigError("training_len and payload_len must be positive");
        if (frame.training_len % frame.symbol_len() != 0 || frame.payload_len % frame.symbol_len() != 0)
            throw ConfigError("training_len and payload_len must be multiples of fft_size + cp_len");
        if (active_subcarriers().empty()) throw ConfigError("bandwidth too narrow for a single subcarrier");
    }

    // Signed subcarrier indices that fall strictly inside the occupied band,
    // DC excluded. A one-bin guard at each edge keeps the sinc skirts inside
    // +-bandwidth/2.
    std::vector<int> active_subcarriers() const
    {
        const double spacing = sample_rate_hz / static_cast<double>(frame.fft_size);
        const int edge = static_cast<int>(std::floor(0.5 * bandwidth_hz / spacing)) - 1;
        const int nyq = static_cast<int>(frame.fft_size / 2) - 1;
        const int k_max = std::min(edge, nyq);
        std::vector<int> ks;
        for (int k = -k_max; k <= k_max; ++k)
            if (k != 0) ks.push_back(k);
        return ks;
    }
};

namespace detail {

// Emits one cyclic-prefixed symbol. Symbol edges get a raised-cosine taper
// of taper.size() samples that overlaps the next symbol (windowed
// overlap-add), which keeps the rectangular-pulse sinc skirts out of band.
// `tail` carries the faded cyclic suffix into the next call.
inline void ofdm_symbol(FftPlan& ifft, const std::vector<int>& active, std::size_t cp_len,
                        const std::vector<double>& taper, auto&& draw_symbol, std::vector<cplx>& tail,
                        std::vector<cplx>& out)
{
    auto buf = ifft.buffer();
    std::fill(buf.begin(), buf.end(), cplx{});
    const auto n = static_cast<int>(ifft.size());
    for (int k : active) buf[static_cast<std::size_t>((k + n) % n)] = draw_symbol();
    ifft.execute();

    const std::size_t first = out.size();
    out.insert(out.end(), buf.end() - static_cast<std::ptrdiff_t>(cp_len), buf.end());
    out.insert(out.end(), buf.begin(), buf.end());
    const std::size_t l = taper.size();
    for (std::size_t i = 0; i < l; ++i) out[first + i] = out[first + i] * taper[i] + tail[i];
    for (std::size_t i = 0; i < l; ++i) tail[i] = buf[i] * taper[l - 1 - i];
}

} // namespace detail

// Builds s(t): [training | payload] frames tiled over duration_s, last frame
// truncated, scaled to unit average power.
inline BasebandBuffer gen_transmit_signal(const TransmitConfig& cfg)
{
    cfg.validate();
    const std::size_t total = cfg.num_samples();
    const auto active = cfg.active_subcarriers();
    const auto& fr = cfg.frame;

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_int_distribution<int> qpsk(0, 3);

    // Training: constant-modulus, pseudo-random phase on every active bin.
    auto training_draw = [&] { return std::polar(1.0, phase(rng)); };
    auto payload_draw = [&] {
        static constexpr double a = 0.70710678118654752440;
        switch (qpsk(rng)) {
        case 0: return cplx{a, a};
        case 1: return cplx{-a, a};
        case 2: return cplx{-a, -a};
        default: return cplx{a, -a};
        }
    };

    FftPlan ifft(fr.fft_size, FftDirection::backward);
    std::vector<double> taper(fr.cp_len / 2);
    for (std::size_t i = 0; i < taper.size(); ++i) {
        const double v = std::sin(0.5 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(taper.size()));
        taper[i] = v * v;
    }
    std::vector<cplx> tail(taper.size());
    std::vector<cplx> samples;
    samples.reserve(total + fr.frame_len());
    while (samples.size() < total) {
        for (std::size_t i = 0; i < fr.training_len / fr.symbol_len(); ++i)
            detail::ofdm_symbol(ifft, active, fr.cp_len, taper, training_draw, tail, samples);
        for (std::size_t i = 0; i < fr.payload_len / fr.symbol_len(); ++i)
            detail::ofdm_symbol(ifft, active, fr.cp_len, taper, payload_draw, tail, samples);
    }
    samples.resize(total);

    const double p = average_power(samples);
    if (!(p > 0.0)) throw ConfigError("generated transmit signal has zero power");
    const double scale = 1.0 / std::sqrt(p);
    for (auto& v : samples) v *= scale;

    return BasebandBuffer{std::move(samples), cfg.sample_rate_hz, 0.0};
}

// Complex exponential test stimulus, samples[n] = exp(j 2 pi f n / fs).
inline BasebandBuffer gen_test_tone(double fs, double duration_s, double freq_hz)
{
    if (!(fs > 0.0) || !(duration_s > 0.0)) throw ConfigError("tone needs positive rate and duration");
    if (std::abs(freq_hz) >= 0.5 * fs) throw ConfigError("tone frequency aliases: |freq| must be < fs/2");
    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    if (n < 1) throw ConfigError("tone duration shorter than one sample");
    BasebandBuffer out{std::vector<cplx>(n), fs, 0.0};
    const double w = 2.0 * kPi * freq_hz / fs;
    for (std::size_t i = 0; i < n; ++i) {
        const double ph = std::fmod(w * static_cast<double>(i), 2.0 * kPi);
        out.samples[i] = std::polar(1.0, ph);
    }
    return out;
}

} // namespace mmtrack

#endif
