// SPDX-License-Identifier: Apache-2.0
//
// Pipeline stages over on-disk artifacts: simulate -> detect -> track ->
// evaluate. Each stage reads only files written by earlier stages.

#ifndef MMTRACK_PIPELINE_HPP
#define MMTRACK_PIPELINE_HPP

#include "caf.hpp"
#include "channel_sim.hpp"
#include "csv_io.hpp"
#include "iq_io.hpp"
#include "metrics.hpp"
#include "scenario.hpp"
#include "strokes.hpp"
#include "tracker.hpp"
#include "waveform.hpp"

#include <filesystem>

namespace mmtrack {

namespace fs = std::filesystem;

namespace artifacts {

inline std::string iq_name(ReceiverId rx, ChannelRole role) { return to_string(rx) + "_" + to_string(role) + ".iq"; }
inline std::string caf_name(ReceiverId rx) { return to_string(rx) + "_caf.csv"; }
inline std::string doppler_name(ReceiverId rx) { return to_string(rx) + "_doppler.csv"; }
inline const char* truth_name() { return "truth.csv"; }

// "" for a zero AoA error, otherwise e.g. "_aoa10deg".
inline std::string aoa_suffix(double aoa_error_deg)
{
    if (aoa_error_deg == 0.0) return "";
    return "_aoa" + detail::fmt_num(aoa_error_deg) + "deg";
}

inline std::string trajectory_name(double aoa_error_deg) { return "trajectory" + aoa_suffix(aoa_error_deg) + ".csv"; }
inline std::string stats_name(double aoa_error_deg) { return "error_stats" + aoa_suffix(aoa_error_deg) + ".json"; }
inline std::string cdf_name(double aoa_error_deg) { return "cdf" + aoa_suffix(aoa_error_deg) + ".csv"; }

} // namespace artifacts

inline void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

inline void require_file(const fs::path& p, const std::string& stage)
{
    if (!fs::exists(p)) throw IoError(stage + ": missing input artifact " + p.string());
}

constexpr std::array<ReceiverId, 2> kReceivers{ReceiverId::rx1, ReceiverId::rx2};

// Writes four IQ files (+ sidecars) and truth.csv.
inline TargetTrack simulate_stage(const Scenario& sc, const fs::path& out_dir)
{
    sc.validate();
    ensure_dir(out_dir);
    const TargetTrack truth = gen_stroke(sc.stroke);

    TransmitConfig tx = sc.transmit;
    tx.duration_s = truth.times_s.back();
    const BasebandBuffer s = gen_transmit_signal(tx);

    for (auto rx : kReceivers) {
        const auto& ch = sc.scene.channels(rx);
        IqMetadata meta;
        meta.fc_hz = sc.scene.geometry.fc_hz;
        meta.extra["receiver"] = to_string(rx);

        meta.role = ChannelRole::reference;
        meta.extra["noise_power"] = ch.reference_noise_power;
        write_iq(out_dir / artifacts::iq_name(rx, meta.role), simulate_reference(sc.scene, s, rx), meta);

        meta.role = ChannelRole::surveillance;
        meta.extra["noise_power"] = ch.surveillance_noise_power;
        meta.extra["relative_gain_db"] = ch.surveillance_relative_gain_db();
        write_iq(out_dir / artifacts::iq_name(rx, meta.role), simulate_surveillance(sc.scene, s, truth, rx), meta);
    }
    write_track_csv(out_dir / artifacts::truth_name(), truth);
    return truth;
}

// CAF spectrogram and Doppler track per receiver.
inline std::array<DopplerTrack, 2> detect_stage(const Scenario& sc, const fs::path& in_dir, const fs::path& out_dir)
{
    ensure_dir(out_dir);
    std::array<DopplerTrack, 2> tracks;
    for (auto rx : kReceivers) {
        const auto ref_path = in_dir / artifacts::iq_name(rx, ChannelRole::reference);
        const auto sur_path = in_dir / artifacts::iq_name(rx, ChannelRole::surveillance);
        require_file(ref_path, "detect");
        require_file(sur_path, "detect");
        const auto ref = read_iq(ref_path);
        const auto sur = read_iq(sur_path);
        if (ref.meta.role != ChannelRole::reference || sur.meta.role != ChannelRole::surveillance)
            throw ParseError("detect: sidecar 'role' does not match the file name for " + to_string(rx));

        Scenario local = sc;
        if (std::abs(ref.meta.sample_rate_hz - sc.sensing.sample_rate_hz) > 1e-9 * ref.meta.sample_rate_hz)
            local.set_sample_rate(ref.meta.sample_rate_hz);
        local.sensing.validate();

        const CafMap map = caf_spectrogram(sur.buffer, ref.buffer, local.sensing, local.clutter);
        auto& track = tracks[static_cast<std::size_t>(index_of(rx))];
        track = detect_track(map, local.sensing);
        write_caf_csv(out_dir / artifacts::caf_name(rx), map);
        write_doppler_csv(out_dir / artifacts::doppler_name(rx), track);
    }
    return tracks;
}

// Initial AoAs: explicit in the scenario, or read off the ground truth at the
// first fused sensing instance (standing in for the beam search).
inline InitialObservation initial_observation_for(const Scenario& sc, const fs::path& in_dir, double first_time_s)
{
    if (sc.initial) return *sc.initial;
    const auto truth_path = in_dir / artifacts::truth_name();
    require_file(truth_path, "track");
    const auto truth = read_track_csv(truth_path);
    const auto k = nearest_index(truth.times_s, first_time_s, std::numeric_limits<double>::infinity());
    const auto ang = angles_from_position(truth.positions_m[k], sc.scene.geometry);
    return {ang.aoa_rx1, ang.aoa_rx2, 0.0};
}

inline Trajectory track_stage(const Scenario& sc, const fs::path& in_dir, const fs::path& out_dir, double aoa_error_deg)
{
    ensure_dir(out_dir);
    const auto p1 = in_dir / artifacts::doppler_name(ReceiverId::rx1);
    const auto p2 = in_dir / artifacts::doppler_name(ReceiverId::rx2);
    require_file(p1, "track");
    require_file(p2, "track");
    const auto pairs = align_tracks(read_doppler_csv(p1), read_doppler_csv(p2));
    InitialObservation obs = initial_observation_for(sc, in_dir, pairs.front().time_s);
    obs.aoa_error_rad = deg2rad(aoa_error_deg);
    const auto tr = track_trajectory(pairs, obs, sc.scene.geometry, sc.tracker);
    write_trajectory_csv(out_dir / artifacts::trajectory_name(aoa_error_deg), tr);
    return tr;
}

inline ErrorStats evaluate_stage(const fs::path& in_dir, const fs::path& out_dir, double aoa_error_deg)
{
    ensure_dir(out_dir);
    const auto tp = in_dir / artifacts::trajectory_name(aoa_error_deg);
    const auto gp = in_dir / artifacts::truth_name();
    require_file(tp, "evaluate");
    require_file(gp, "evaluate");
    const auto st = trajectory_error(read_trajectory_csv(tp), read_track_csv(gp));
    write_json_file(out_dir / artifacts::stats_name(aoa_error_deg), to_json(st));
    write_cdf_csv(out_dir / artifacts::cdf_name(aoa_error_deg), st);
    return st;
}

inline ErrorStats pipeline_stage(const Scenario& sc, const fs::path& out_dir, double aoa_error_deg)
{
    simulate_stage(sc, out_dir);
    detect_stage(sc, out_dir, out_dir);
    track_stage(sc, out_dir, out_dir, aoa_error_deg);
    return evaluate_stage(out_dir, out_dir, aoa_error_deg);
}

} // namespace mmtrack

#endif
