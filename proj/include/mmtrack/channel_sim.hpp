// SPDX-License-Identifier: Apache-2.0
//
// Forward channel model: reference and surveillance receptions at two
// receivers for a point target moving in the plane.

#ifndef MMTRACK_CHANNEL_SIM_HPP
#define MMTRACK_CHANNEL_SIM_HPP

#include "core.hpp"

#include <array>
#include <random>

namespace mmtrack {

// Scene layout. Receiver 1 sits at the origin by construction; in NLoS
// scenes tx_pos is the mirror-image (virtual) transmitter.
struct Geometry {
    Vec2 tx_pos{2.5, 0.0};
    Vec2 rx2_pos{1.0, 0.0};
    double fc_hz = 60e9;
    double c_mps = kSpeedOfLight;

    static constexpr Vec2 rx1_pos{0.0, 0.0};

    Vec2 rx_pos(ReceiverId rx) const { return rx == ReceiverId::rx1 ? rx1_pos : rx2_pos; }
    double tx_distance() const { return tx_pos.x; }
    double wavelength() const { return c_mps / fc_hz; }

    void validate() const
    {
        if (!(fc_hz > 0.0) || !(c_mps > 0.0)) throw ConfigError("fc_hz and c_mps must be positive");
        if (rx2_pos == rx1_pos) throw ConfigError("rx2 must not coincide with rx1");
        if (tx_pos == rx1_pos || tx_pos == rx2_pos) throw ConfigError("tx must not coincide with a receiver");
        if (tx_pos.y != 0.0) throw ConfigError("tx must lie on the x-axis at (d, 0)");
    }
};

struct PathSpec {
    cplx gain{1.0, 0.0};
    double delay_s = 0.0;
};

// Ground-truth target positions sampled once per sensing interval.
struct TargetTrack {
    std::vector<double> times_s;
    std::vector<Vec2> positions_m;

    std::size_t size() const { return times_s.size(); }

    void validate(double max_speed_mps = 1.0) const
    {
        if (times_s.empty()) throw ContractError("target track is empty");
        if (times_s.size() != positions_m.size()) throw ContractError("track times and positions differ in length");
        for (std::size_t k = 0; k < size(); ++k) {
            if (!std::isfinite(times_s[k]) || !std::isfinite(positions_m[k].x) || !std::isfinite(positions_m[k].y))
                throw ContractError("track contains non-finite values");
            if (k > 0) {
                const double dt = times_s[k] - times_s[k - 1];
                if (!(dt > 0.0)) throw ContractError("track times must be strictly increasing");
                if (distance(positions_m[k], positions_m[k - 1]) > max_speed_mps * dt * (1.0 + 1e-9))
                    throw ContractError("track implies a speed above " + std::to_string(max_speed_mps) + " m/s");
            }
        }
    }
};

struct ReceiverChannels {
    PathSpec reference;
    std::vector<PathSpec> static_paths;
    cplx target_gain{0.1, 0.0};
    double reference_noise_power = 0.0;
    double surveillance_noise_power = 0.0;

    // Total surveillance path power relative to the reference path, in dB.
    double surveillance_relative_gain_db() const
    {
        double p = std::norm(target_gain);
        for (const auto& sp : static_paths) p += std::norm(sp.gain);
        return to_db(p / std::norm(reference.gain));
    }
};

struct ChannelScene {
    Geometry geometry;
    std::array<ReceiverChannels, 2> receivers;
    double rx2_sync_offset_s = 0.0;
    std::uint64_t rng_seed = 1;

    const ReceiverChannels& channels(ReceiverId rx) const { return receivers[static_cast<std::size_t>(index_of(rx))]; }

    double sync_offset(ReceiverId rx) const { return rx == ReceiverId::rx2 ? rx2_sync_offset_s : 0.0; }

    void validate() const
    {
        geometry.validate();
        if (!(std::abs(rx2_sync_offset_s) <= 0.01)) throw ConfigError("rx2_sync_offset_s must lie in [-0.01, 0.01] s");
        for (const auto& r : receivers) {
            if (!(r.reference_noise_power >= 0.0) || !(r.surveillance_noise_power >= 0.0))
                throw ConfigError("noise powers must be non-negative");
            auto finite = [](cplx g) { return std::isfinite(g.real()) && std::isfinite(g.imag()); };
            if (!finite(r.reference.gain) || !finite(r.target_gain)) throw ConfigError("path gains must be finite");
            for (const auto& sp : r.static_paths)
                if (!finite(sp.gain) || !(sp.delay_s >= 0.0)) throw ConfigError("static paths need finite gain and delay >= 0");
            if (!(r.reference.delay_s >= 0.0)) throw ConfigError("reference delay must be >= 0");
        }
    }
};

struct BistaticSample {
    double range_m = 0.0;
    double doppler_hz = 0.0;
};

inline double bistatic_range(Vec2 p, const Geometry& geom, ReceiverId rx)
{
    return distance(p, geom.tx_pos) + distance(p, geom.rx_pos(rx));
}

// Bistatic range and Doppler per track instant. Doppler is -(fc/c) dR/dt with
// dR/dt from central differences (one-sided at the ends).
inline std::vector<BistaticSample> bistatic_truth(const TargetTrack& track, const Geometry& geom, ReceiverId rx)
{
    if (track.size() == 0) throw ContractError("bistatic_truth needs a non-empty track");
    if (track.times_s.size() != track.positions_m.size()) throw ContractError("track times and positions differ in length");
    const Vec2 rxp = geom.rx_pos(rx);
    std::vector<BistaticSample> out(track.size());
    for (std::size_t k = 0; k < track.size(); ++k) {
        const Vec2 p = track.positions_m[k];
        if (p == geom.tx_pos || p == rxp) throw DegenerateGeometryError("target coincides with a node");
        out[k].range_m = bistatic_range(p, geom, rx);
    }
    const std::size_t n = track.size();
    if (n < 2) return out;
    const double scale = -geom.fc_hz / geom.c_mps;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k == 0 ? 0 : k - 1;
        const std::size_t hi = k + 1 == n ? n - 1 : k + 1;
        const double dr = out[hi].range_m - out[lo].range_m;
        const double dt = track.times_s[hi] - track.times_s[lo];
        out[k].doppler_hz = scale * dr / dt;
    }
    return out;
}

namespace detail {

inline std::size_t delay_in_samples(double delay_s, double fs, std::size_t len)
{
    const auto d = std::llround(delay_s * fs);
    if (d < 0 || static_cast<std::size_t>(d) >= len)
        throw ConfigError("path delay of " + std::to_string(delay_s) + " s exceeds the buffer length");
    return static_cast<std::size_t>(d);
}

// Whole-sample time shift applied to a receiver's buffers.
inline long long sync_shift_samples(const ChannelScene& scene, ReceiverId rx, double fs)
{
    return std::llround(scene.sync_offset(rx) * fs);
}

inline void add_noise(std::vector<cplx>& y, double power, std::uint64_t seed)
{
    if (power <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * power));
    for (auto& v : y) v += cplx{g(rng), g(rng)};
}

// s sampled at buffer-local index n of a receiver whose clock leads by shift
// samples, delayed by d samples; zero outside the transmit buffer.
inline cplx tx_sample(const BasebandBuffer& s, long long n, long long shift, long long d)
{
    const long long idx = n + shift - d;
    if (idx < 0 || idx >= static_cast<long long>(s.size())) return {};
    return s.samples[static_cast<std::size_t>(idx)];
}

inline std::uint64_t noise_stream(ReceiverId rx, ChannelRole role)
{
    return static_cast<std::uint64_t>(2 * index_of(rx) + (role == ChannelRole::surveillance ? 1 : 0));
}

// Linear interpolation over a strictly increasing grid, clamped at the ends.
class Interpolator {
public:
    Interpolator(const std::vector<double>& t, std::vector<double> v) : t_(t), v_(std::move(v)) {}

    // Queries must be non-decreasing for the cursor to stay valid.
    double operator()(double t)
    {
        if (t <= t_.front()) return v_.front();
        if (t >= t_.back()) return v_.back();
        while (cursor_ + 1 < t_.size() && t_[cursor_ + 1] < t) ++cursor_;
        const double a = (t - t_[cursor_]) / (t_[cursor_ + 1] - t_[cursor_]);
        return v_[cursor_] + a * (v_[cursor_ + 1] - v_[cursor_]);
    }

private:
    const std::vector<double>& t_;
    std::vector<double> v_;
    std::size_t cursor_ = 0;
};

} // namespace detail

// Reference channel of one receiver: y = h s(t - tau) + n.
inline BasebandBuffer simulate_reference(const ChannelScene& scene, const BasebandBuffer& s, ReceiverId rx)
{
    if (s.size() == 0) throw ContractError("empty transmit buffer");
    const auto& ch = scene.channels(rx);
    const double fs = s.sample_rate_hz;
    const auto d = static_cast<long long>(detail::delay_in_samples(ch.reference.delay_s, fs, s.size()));
    const long long shift = detail::sync_shift_samples(scene, rx, fs);

    BasebandBuffer y{std::vector<cplx>(s.size()), fs, s.epoch_s + static_cast<double>(shift) / fs};
    for (std::size_t n = 0; n < s.size(); ++n)
        y.samples[n] = ch.reference.gain * detail::tx_sample(s, static_cast<long long>(n), shift, d);
    detail::add_noise(y.samples, ch.reference_noise_power,
                      mix_seed(scene.rng_seed, detail::noise_stream(rx, ChannelRole::reference)));
    return y;
}

// Surveillance channel of one receiver: moving-target echo plus static
// clutter plus noise. The echo phase accumulates -2 pi f_d(t) Ts per sample,
// with f_d linearly interpolated between track instants.
inline BasebandBuffer simulate_surveillance(const ChannelScene& scene, const BasebandBuffer& s,
                                            const TargetTrack& track, ReceiverId rx)
{
    if (s.size() == 0) throw ContractError("empty transmit buffer");
    track.validate();
    const auto& ch = scene.channels(rx);
    const auto& geom = scene.geometry;
    const double fs = s.sample_rate_hz;
    const double ts = 1.0 / fs;
    const long long shift = detail::sync_shift_samples(scene, rx, fs);
    const std::size_t len = s.size();

    BasebandBuffer y{std::vector<cplx>(len), fs, s.epoch_s + static_cast<double>(shift) / fs};

    for (const auto& sp : ch.static_paths) {
        const auto d = static_cast<long long>(detail::delay_in_samples(sp.delay_s, fs, len));
        for (std::size_t n = 0; n < len; ++n)
            y.samples[n] += sp.gain * detail::tx_sample(s, static_cast<long long>(n), shift, d);
    }

    if (ch.target_gain != cplx{}) {
        const auto truth = bistatic_truth(track, geom, rx);
        std::vector<double> dop(truth.size()), rng_m(truth.size());
        for (std::size_t k = 0; k < truth.size(); ++k) {
            dop[k] = truth[k].doppler_hz;
            rng_m[k] = truth[k].range_m;
        }
        detail::Interpolator doppler_at(track.times_s, std::move(dop));
        detail::Interpolator range_at(track.times_s, std::move(rng_m));

        const double t0 = y.epoch_s;
        long double phase = -2.0L * kPi * doppler_at(t0) * t0;
        for (std::size_t n = 0; n < len; ++n) {
            const double t = t0 + static_cast<double>(n) * ts;
            const double fd = doppler_at(t);
            const auto d = std::llround(range_at(t) / geom.c_mps * fs);
            const cplx rot = std::polar(1.0, static_cast<double>(std::fmod(phase, 2.0L * kPi)));
            y.samples[n] += ch.target_gain * detail::tx_sample(s, static_cast<long long>(n), shift, d) * rot;
            phase -= 2.0L * kPi * fd * ts;
        }
    }

    detail::add_noise(y.samples, ch.surveillance_noise_power,
                      mix_seed(scene.rng_seed, detail::noise_stream(rx, ChannelRole::surveillance)));
    return y;
}

} // namespace mmtrack

#endif
