// SPDX-License-Identifier: Apache-2.0
//
// Sliding-window cross-ambiguity function, adaptive-threshold Doppler
// detection and per-receiver Doppler tracks.

#ifndef MMTRACK_CAF_HPP
#define MMTRACK_CAF_HPP

#include "clutter.hpp"
#include "core.hpp"
#include "fft.hpp"

#include <optional>
#include <span>

namespace mmtrack {

struct DetectorConfig {
    double gamma = 3.0;
    std::size_t half_train_cells = 25;  // W
};

struct SensingConfig {
    double sample_rate_hz = 10e6;
    std::size_t window_len_samples = 1'000'000;  // N_w
    std::size_t hop_samples = 100'000;           // N_0
    double doppler_max_hz = 100.0;
    std::size_t doppler_oversample = 1;
    std::size_t delay_search_samples = 0;  // tau in 0..delay_search_samples
    DetectorConfig detector;

    // N_w Ts = 0.1 s and N_0 Ts = 0.01 s at any rate.
    static SensingConfig for_rate(double fs)
    {
        SensingConfig c;
        c.sample_rate_hz = fs;
        c.window_len_samples = static_cast<std::size_t>(std::llround(0.1 * fs));
        c.hop_samples = static_cast<std::size_t>(std::llround(0.01 * fs));
        return c;
    }

    double sample_period() const { return 1.0 / sample_rate_hz; }
    double hop_s() const { return static_cast<double>(hop_samples) / sample_rate_hz; }
    // Delta f = 1 / (Ts N_w).
    double resolution_hz() const { return sample_rate_hz / static_cast<double>(window_len_samples); }
    double grid_step_hz() const { return resolution_hz() / static_cast<double>(doppler_oversample); }
    std::size_t fft_len() const { return window_len_samples * doppler_oversample; }
    int max_bin() const { return static_cast<int>(std::floor(doppler_max_hz / grid_step_hz() + 1e-9)); }
    std::size_t num_bins() const { return static_cast<std::size_t>(2 * max_bin() + 1); }

    std::vector<double> doppler_bins_hz() const
    {
        std::vector<double> bins;
        for (int q = -max_bin(); q <= max_bin(); ++q) bins.push_back(q * grid_step_hz());
        return bins;
    }

    void validate() const
    {
        if (!(sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be positive");
        if (window_len_samples < 1 || hop_samples < 1) throw ConfigError("window and hop must be positive");
        if (hop_samples > window_len_samples) throw ConfigError("hop_samples must not exceed window_len_samples");
        if (doppler_oversample < 1) throw ConfigError("doppler_oversample must be >= 1");
        if (!(doppler_max_hz >= resolution_hz() * (1.0 - 1e-12)))
            throw ConfigError("doppler_max_hz must be at least the Doppler resolution " + std::to_string(resolution_hz()) + " Hz");
        if (!(doppler_max_hz < 0.5 * sample_rate_hz)) throw ConfigError("doppler_max_hz must be below fs/2");
        if (!(detector.gamma > 1.0)) throw ConfigError("detector gamma must be > 1");
        if (detector.half_train_cells < 1) throw ConfigError("detector half_train_cells must be >= 1");
    }
};

struct CafRow {
    std::vector<double> magnitudes;
    std::size_t best_delay_samples = 0;
};

// |R(k, f_d)| over (sensing instance, Doppler bin), row-major.
struct CafMap {
    std::vector<double> sensing_times_s;
    std::vector<double> doppler_bins_hz;
    std::vector<double> magnitudes;
    std::vector<std::size_t> best_delay_samples;

    std::size_t rows() const { return sensing_times_s.size(); }
    std::size_t cols() const { return doppler_bins_hz.size(); }
    std::span<const double> row(std::size_t k) const { return {magnitudes.data() + k * cols(), cols()}; }
};

struct DopplerTrack {
    std::vector<double> sensing_times_s;
    std::vector<std::optional<double>> doppler_hz;

    std::size_t size() const { return sensing_times_s.size(); }
};

// Evaluates one CAF row. The Doppler sum is taken as a zero-padded DFT of
// z[n] = ys[n] conj(yr[n - tau]) of length os N_w, which samples
//   sum_n z[n] exp(+j 2 pi f n Ts)
// exactly at every grid frequency f = q Delta f / os. With the surveillance
// echo modelled as s(t) exp(-j 2 pi f_d t), the peak sits at f = f_d.
class CafEngine {
public:
    explicit CafEngine(const SensingConfig& cfg) : cfg_(cfg), plan_((cfg.validate(), cfg.fft_len()), FftDirection::backward) {}

    const SensingConfig& config() const { return cfg_; }

    // ys: N_w surveillance samples (already clutter-cancelled). yr_stream:
    // reference stream; window_start is the index in yr_stream aligned with
    // ys[0]. Reference samples before the stream start read as zero.
    CafRow row(std::span<const cplx> ys, std::span<const cplx> yr_stream, std::size_t window_start)
    {
        const std::size_t nw = cfg_.window_len_samples;
        if (ys.size() != nw) throw ContractError("CAF window must hold exactly window_len_samples samples");
        if (window_start + nw > yr_stream.size()) throw ContractError("reference stream too short for the CAF window");

        const int qmax = cfg_.max_bin();
        const std::size_t nbins = cfg_.num_bins();
        const auto len = static_cast<long long>(plan_.size());
        CafRow out{std::vector<double>(nbins, 0.0), 0};
        double best_peak = -1.0;

        std::vector<double> mags(nbins);
        for (std::size_t tau = 0; tau <= cfg_.delay_search_samples; ++tau) {
            auto buf = plan_.buffer();
            std::fill(buf.begin(), buf.end(), cplx{});
            for (std::size_t n = 0; n < nw; ++n) {
                const long long idx = static_cast<long long>(window_start + n) - static_cast<long long>(tau);
                if (idx < 0) continue;
                buf[n] = ys[n] * std::conj(yr_stream[static_cast<std::size_t>(idx)]);
            }
            plan_.execute();
            double peak = 0.0;
            for (int q = -qmax; q <= qmax; ++q) {
                const auto bin = static_cast<std::size_t>(((q % len) + len) % len);
                const double mag = std::abs(buf[bin]);
                mags[static_cast<std::size_t>(q + qmax)] = mag;
                peak = std::max(peak, mag);
            }
            for (std::size_t b = 0; b < nbins; ++b) out.magnitudes[b] = std::max(out.magnitudes[b], mags[b]);
            if (peak > best_peak) {
                best_peak = peak;
                out.best_delay_samples = tau;
            }
        }
        return out;
    }

private:
    SensingConfig cfg_;
    FftPlan plan_;
};

// Convenience wrapper over CafEngine for a single window at sensing index k
// (offset k N_0 into both streams).
inline CafRow compute_caf_window(std::span<const cplx> ys_hat_stream, std::span<const cplx> yr_stream,
                                 const SensingConfig& cfg, std::size_t k)
{
    const std::size_t start = k * cfg.hop_samples;
    if (start + cfg.window_len_samples > ys_hat_stream.size() || start + cfg.window_len_samples > yr_stream.size())
        throw ContractError("end of stream: not enough samples for window " + std::to_string(k));
    CafEngine engine(cfg);
    return engine.row(ys_hat_stream.subspan(start, cfg.window_len_samples), yr_stream, start);
}

inline std::size_t num_sensing_instances(std::size_t length, const SensingConfig& cfg)
{
    if (length < cfg.window_len_samples) return 0;
    return (length - cfg.window_len_samples) / cfg.hop_samples + 1;
}

// Full spectrogram for one receiver. When clutter is given, each CIT window of
// the surveillance stream is cancelled against the reference before the CAF.
// Rows are stamped at their window centres.
inline CafMap caf_spectrogram(const BasebandBuffer& ys, const BasebandBuffer& yr, const SensingConfig& cfg,
                              const std::optional<ClutterConfig>& clutter)
{
    cfg.validate();
    if (ys.size() != yr.size()) throw ContractError("surveillance and reference buffers differ in length");
    if (std::abs(ys.sample_rate_hz - cfg.sample_rate_hz) > 1e-9 * cfg.sample_rate_hz ||
        std::abs(yr.sample_rate_hz - cfg.sample_rate_hz) > 1e-9 * cfg.sample_rate_hz)
        throw ContractError("buffer sample rate does not match the sensing configuration");
    if (std::abs(ys.epoch_s - yr.epoch_s) > 0.5 / cfg.sample_rate_hz)
        throw ContractError("surveillance and reference buffers have different epochs");
    const std::size_t rows = num_sensing_instances(ys.size(), cfg);
    if (rows == 0) throw ContractError("buffer shorter than one CAF window");
    if (clutter) clutter->validate_for_window(cfg.window_len_samples);

    CafMap map;
    map.doppler_bins_hz = cfg.doppler_bins_hz();
    map.magnitudes.reserve(rows * map.doppler_bins_hz.size());
    CafEngine engine(cfg);
    const std::span<const cplx> ref(yr.samples);
    const std::span<const cplx> sur(ys.samples);
    const double ts = cfg.sample_period();
    for (std::size_t k = 0; k < rows; ++k) {
        const std::size_t start = k * cfg.hop_samples;
        auto window = sur.subspan(start, cfg.window_len_samples);
        CafRow r;
        if (clutter) {
            const auto cleaned = ls_clutter_cancel_in_stream(window, ref, start, *clutter);
            r = engine.row(cleaned, ref, start);
        } else {
            r = engine.row(window, ref, start);
        }
        map.sensing_times_s.push_back(ys.epoch_s + (static_cast<double>(start) + 0.5 * static_cast<double>(cfg.window_len_samples)) * ts);
        map.magnitudes.insert(map.magnitudes.end(), r.magnitudes.begin(), r.magnitudes.end());
        map.best_delay_samples.push_back(r.best_delay_samples);
    }
    return map;
}

// Adaptive threshold: beta(j) = gamma / |cells| * sum of R over the training
// cells j + p*stride, p = -W..W (cell under test included), truncated at the
// row edges and renormalized by the cells actually present. Returns the
// strongest bin with R >= beta.
inline std::optional<std::size_t> detect_bin(std::span<const double> row, const DetectorConfig& det, std::size_t stride = 1)
{
    if (row.empty()) return std::nullopt;
    const auto n = static_cast<long long>(row.size());
    const auto w = static_cast<long long>(det.half_train_cells);
    const auto st = static_cast<long long>(stride);
    std::optional<std::size_t> best;
    for (long long j = 0; j < n; ++j) {
        double sum = 0.0;
        long long cells = 0;
        for (long long p = -w; p <= w; ++p) {
            const long long i = j + p * st;
            if (i < 0 || i >= n) continue;
            sum += row[static_cast<std::size_t>(i)];
            ++cells;
        }
        const double beta = det.gamma * sum / static_cast<double>(cells);
        const double r = row[static_cast<std::size_t>(j)];
        if (r >= beta && r > 0.0 && (!best || r > row[*best])) best = static_cast<std::size_t>(j);
    }
    return best;
}

inline std::optional<double> detect_doppler(std::span<const double> row, const SensingConfig& cfg)
{
    if (row.size() != cfg.num_bins()) throw ContractError("CAF row length does not match the Doppler grid");
    const auto bin = detect_bin(row, cfg.detector, cfg.doppler_oversample);
    if (!bin) return std::nullopt;
    return (static_cast<double>(*bin) - cfg.max_bin()) * cfg.grid_step_hz();
}

inline DopplerTrack detect_track(const CafMap& map, const SensingConfig& cfg)
{
    DopplerTrack t;
    t.sensing_times_s = map.sensing_times_s;
    t.doppler_hz.reserve(map.rows());
    for (std::size_t k = 0; k < map.rows(); ++k) t.doppler_hz.push_back(detect_doppler(map.row(k), cfg));
    return t;
}

} // namespace mmtrack

#endif
