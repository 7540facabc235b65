// SPDX-License-Identifier: Apache-2.0
//
// Scenario: everything needed to simulate and reconstruct one run. Read from
// JSON; built-in "los" and "nlos" presets mirror scenarios/*.json.

#ifndef MMTRACK_SCENARIO_HPP
#define MMTRACK_SCENARIO_HPP

#include "caf.hpp"
#include "channel_sim.hpp"
#include "clutter.hpp"
#include "csv_io.hpp"
#include "strokes.hpp"
#include "tracker.hpp"
#include "waveform.hpp"

#include <filesystem>

namespace mmtrack {

struct Scenario {
    std::string name = "los";
    ChannelScene scene;
    TransmitConfig transmit;  // duration_s is filled from the stroke length
    StrokeSpec stroke;
    SensingConfig sensing;
    std::optional<ClutterConfig> clutter = ClutterConfig{};
    TrackerConfig tracker;
    // Explicit initial AoAs; when absent they are taken from the ground-truth
    // position at the first sensing instance.
    std::optional<InitialObservation> initial;

    std::uint64_t seed() const { return scene.rng_seed; }

    void set_seed(std::uint64_t s)
    {
        scene.rng_seed = s;
        transmit.rng_seed = mix_seed(s, 100);
    }

    void set_sample_rate(double fs)
    {
        const auto keep = sensing;
        // Occupied band keeps its fraction of the sample rate.
        transmit.bandwidth_hz *= fs / transmit.sample_rate_hz;
        transmit.sample_rate_hz = fs;
        sensing = SensingConfig::for_rate(fs);
        sensing.doppler_max_hz = keep.doppler_max_hz;
        sensing.doppler_oversample = keep.doppler_oversample;
        sensing.delay_search_samples = keep.delay_search_samples;
        sensing.detector = keep.detector;
    }

    void validate() const
    {
        scene.validate();
        stroke.validate();
        sensing.validate();
        if (clutter) clutter->validate_for_window(sensing.window_len_samples);
        if (std::abs(sensing.sample_rate_hz - transmit.sample_rate_hz) > 1e-9 * transmit.sample_rate_hz)
            throw ConfigError("sensing and transmit sample rates differ");
    }
};

namespace scenario_detail {

inline cplx gain_from_json(const nlohmann::json& j, const std::string& what)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError("field '" + what + "' must be a number or [re, im]");
}

inline nlohmann::json gain_to_json(cplx g) { return {g.real(), g.imag()}; }

inline PathSpec path_from_json(const nlohmann::json& j, const std::string& what)
{
    if (!j.is_object()) throw ParseError("field '" + what + "' must be an object");
    PathSpec p;
    if (j.contains("gain")) p.gain = gain_from_json(j.at("gain"), what + ".gain");
    if (j.contains("delay_s")) p.delay_s = j.at("delay_s").get<double>();
    return p;
}

inline nlohmann::json path_to_json(const PathSpec& p) { return {{"gain", gain_to_json(p.gain)}, {"delay_s", p.delay_s}}; }

// Noise may be given as absolute power or as SNR relative to the channel's
// (unit transmit power) signal power.
inline double noise_from_json(const nlohmann::json& j, const std::string& power_key, const std::string& snr_key,
                              double signal_power, double fallback)
{
    if (j.contains(power_key)) return j.at(power_key).get<double>();
    if (j.contains(snr_key)) return signal_power / from_db(j.at(snr_key).get<double>());
    return fallback;
}

inline ReceiverChannels receiver_from_json(const nlohmann::json& j, const std::string& what)
{
    if (!j.is_object()) throw ParseError("field '" + what + "' must be an object");
    ReceiverChannels r;
    if (j.contains("reference")) r.reference = path_from_json(j.at("reference"), what + ".reference");
    if (j.contains("static_paths")) {
        for (const auto& p : j.at("static_paths")) r.static_paths.push_back(path_from_json(p, what + ".static_paths[]"));
    }
    if (j.contains("target_gain")) r.target_gain = gain_from_json(j.at("target_gain"), what + ".target_gain");
    double sur_power = std::norm(r.target_gain);
    for (const auto& sp : r.static_paths) sur_power += std::norm(sp.gain);
    r.reference_noise_power = noise_from_json(j, "reference_noise_power", "reference_snr_db", std::norm(r.reference.gain), 0.0);
    r.surveillance_noise_power = noise_from_json(j, "surveillance_noise_power", "surveillance_snr_db", sur_power, 0.0);
    return r;
}

inline nlohmann::json receiver_to_json(const ReceiverChannels& r)
{
    nlohmann::json j;
    j["reference"] = path_to_json(r.reference);
    j["static_paths"] = nlohmann::json::array();
    for (const auto& sp : r.static_paths) j["static_paths"].push_back(path_to_json(sp));
    j["target_gain"] = gain_to_json(r.target_gain);
    j["reference_noise_power"] = r.reference_noise_power;
    j["surveillance_noise_power"] = r.surveillance_noise_power;
    return j;
}

} // namespace scenario_detail

// Default LoS desk scene: tx 2.5 m from rx1, rx2 1 m from rx1, 60 GHz, fs
// reduced to 1 MHz, surveillance SNR 20 dB, digit "3" at 0.1 m/s.
inline Scenario los_scenario()
{
    Scenario sc;
    sc.name = "los";
    sc.scene.geometry = Geometry{};
    sc.transmit.sample_rate_hz = 1e6;
    sc.transmit.bandwidth_hz = 0.5e6;
    for (int i = 0; i < 2; ++i) {
        auto& r = sc.scene.receivers[static_cast<std::size_t>(i)];
        r.reference = {{1.0, 0.0}, 0.0};
        r.static_paths = {{std::polar(0.3, 0.4 + i), 0.0}, {std::polar(0.2, -1.1 + i), 1e-6}};
        r.target_gain = std::polar(0.1, 0.7 * (i + 1));
        r.reference_noise_power = std::norm(r.reference.gain) / from_db(30.0);
        double sur = std::norm(r.target_gain);
        for (const auto& sp : r.static_paths) sur += std::norm(sp.gain);
        r.surveillance_noise_power = sur / from_db(20.0);
    }
    sc.stroke = StrokeSpec{};
    sc.stroke.shape = StrokeShape::digit3;
    sc.stroke.lead_s = 0.15;
    sc.set_sample_rate(1e6);
    sc.set_seed(1);
    return sc;
}

// NLoS: same (virtual) geometry, every surveillance path about 20 dB below the
// reference path, star stroke.
inline Scenario nlos_scenario()
{
    Scenario sc = los_scenario();
    sc.name = "nlos";
    for (int i = 0; i < 2; ++i) {
        auto& r = sc.scene.receivers[static_cast<std::size_t>(i)];
        r.static_paths = {{std::polar(0.07, 0.4 + i), 0.0}, {std::polar(0.04, -1.1 + i), 1e-6}};
        r.target_gain = std::polar(0.06, 0.7 * (i + 1));
        r.reference_noise_power = 1e-4;
        r.surveillance_noise_power = 1e-4;
    }
    sc.stroke.shape = StrokeShape::star;
    return sc;
}

inline nlohmann::json to_json(const Scenario& sc)
{
    using namespace scenario_detail;
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["name"] = sc.name;
    j["seed"] = sc.seed();
    const auto& g = sc.scene.geometry;
    j["geometry"] = {{"tx_m", {g.tx_pos.x, g.tx_pos.y}}, {"rx2_m", {g.rx2_pos.x, g.rx2_pos.y}}, {"fc_hz", g.fc_hz}, {"c_mps", g.c_mps}};
    const auto& t = sc.transmit;
    j["transmit"] = {{"sample_rate_hz", t.sample_rate_hz}, {"bandwidth_hz", t.bandwidth_hz}, {"fft_size", t.frame.fft_size},
                     {"cp_len", t.frame.cp_len}, {"training_len", t.frame.training_len}, {"payload_len", t.frame.payload_len}};
    j["receivers"] = {receiver_to_json(sc.scene.receivers[0]), receiver_to_json(sc.scene.receivers[1])};
    j["rx2_sync_offset_s"] = sc.scene.rx2_sync_offset_s;
    j["stroke"] = to_json(sc.stroke);
    j["stroke"].erase("format_version");
    const auto& s = sc.sensing;
    j["sensing"] = {{"window_s", static_cast<double>(s.window_len_samples) / s.sample_rate_hz},
                    {"hop_s", static_cast<double>(s.hop_samples) / s.sample_rate_hz},
                    {"doppler_max_hz", s.doppler_max_hz},
                    {"doppler_oversample", s.doppler_oversample},
                    {"delay_search_samples", s.delay_search_samples},
                    {"gamma", s.detector.gamma},
                    {"half_train_cells", s.detector.half_train_cells}};
    j["clutter"] = {{"enabled", sc.clutter.has_value()},
                    {"num_taps", sc.clutter ? sc.clutter->num_taps : ClutterConfig{}.num_taps},
                    {"regularization", sc.clutter ? sc.clutter->regularization : ClutterConfig{}.regularization}};
    j["tracker"] = {{"max_speed_mps", sc.tracker.max_speed_mps}, {"median_window", sc.tracker.median_window}};
    if (sc.initial)
        j["initial_observation"] = {{"aoa_rx1_deg", rad2deg(sc.initial->aoa_rx1_rad)},
                                    {"aoa_rx2_deg", rad2deg(sc.initial->aoa_rx2_rad)}};
    return j;
}

// Keys absent from the JSON keep the LoS preset values.
inline Scenario scenario_from_json(const nlohmann::json& j)
{
    using namespace scenario_detail;
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");
    if (j.contains("format_version") && j.at("format_version") != kFormatVersion)
        throw ParseError("scenario: unsupported format_version");
    Scenario sc = los_scenario();
    try {
        if (j.contains("name")) sc.name = j.at("name").get<std::string>();
        if (j.contains("geometry")) {
            const auto& g = j.at("geometry");
            if (g.contains("tx_m")) sc.scene.geometry.tx_pos = vec2_from_json(g.at("tx_m"), "geometry.tx_m");
            if (g.contains("d_m")) sc.scene.geometry.tx_pos = {g.at("d_m").get<double>(), 0.0};
            if (g.contains("rx2_m")) sc.scene.geometry.rx2_pos = vec2_from_json(g.at("rx2_m"), "geometry.rx2_m");
            if (g.contains("fc_hz")) sc.scene.geometry.fc_hz = g.at("fc_hz").get<double>();
            if (g.contains("c_mps")) sc.scene.geometry.c_mps = g.at("c_mps").get<double>();
        }
        if (j.contains("transmit")) {
            const auto& t = j.at("transmit");
            if (t.contains("sample_rate_hz")) sc.set_sample_rate(t.at("sample_rate_hz").get<double>());
            if (t.contains("bandwidth_hz")) sc.transmit.bandwidth_hz = t.at("bandwidth_hz").get<double>();
            if (t.contains("fft_size")) sc.transmit.frame.fft_size = t.at("fft_size").get<std::size_t>();
            if (t.contains("cp_len")) sc.transmit.frame.cp_len = t.at("cp_len").get<std::size_t>();
            if (t.contains("training_len")) sc.transmit.frame.training_len = t.at("training_len").get<std::size_t>();
            if (t.contains("payload_len")) sc.transmit.frame.payload_len = t.at("payload_len").get<std::size_t>();
        }
        if (j.contains("receivers")) {
            const auto& rs = j.at("receivers");
            if (rs.is_object()) {
                sc.scene.receivers[0] = sc.scene.receivers[1] = receiver_from_json(rs, "receivers");
            } else if (rs.is_array() && (rs.size() == 1 || rs.size() == 2)) {
                sc.scene.receivers[0] = receiver_from_json(rs[0], "receivers[0]");
                sc.scene.receivers[1] = receiver_from_json(rs[rs.size() - 1], "receivers[1]");
            } else {
                throw ParseError("field 'receivers' must be an object or an array of one or two objects");
            }
        }
        if (j.contains("rx2_sync_offset_s")) sc.scene.rx2_sync_offset_s = j.at("rx2_sync_offset_s").get<double>();
        if (j.contains("stroke")) sc.stroke = stroke_from_json(j.at("stroke"), sc.stroke);
        if (j.contains("sensing")) {
            const auto& s = j.at("sensing");
            const double fs = sc.sensing.sample_rate_hz;
            if (s.contains("window_s")) sc.sensing.window_len_samples = static_cast<std::size_t>(std::llround(s.at("window_s").get<double>() * fs));
            if (s.contains("hop_s")) sc.sensing.hop_samples = static_cast<std::size_t>(std::llround(s.at("hop_s").get<double>() * fs));
            if (s.contains("doppler_max_hz")) sc.sensing.doppler_max_hz = s.at("doppler_max_hz").get<double>();
            if (s.contains("doppler_oversample")) sc.sensing.doppler_oversample = s.at("doppler_oversample").get<std::size_t>();
            if (s.contains("delay_search_samples")) sc.sensing.delay_search_samples = s.at("delay_search_samples").get<std::size_t>();
            if (s.contains("gamma")) sc.sensing.detector.gamma = s.at("gamma").get<double>();
            if (s.contains("half_train_cells")) sc.sensing.detector.half_train_cells = s.at("half_train_cells").get<std::size_t>();
        }
        if (j.contains("clutter")) {
            const auto& c = j.at("clutter");
            ClutterConfig cc;
            if (c.contains("num_taps")) cc.num_taps = c.at("num_taps").get<std::size_t>();
            if (c.contains("regularization")) cc.regularization = c.at("regularization").get<double>();
            sc.clutter = c.value("enabled", true) ? std::optional<ClutterConfig>(cc) : std::nullopt;
        }
        if (j.contains("tracker")) {
            const auto& t = j.at("tracker");
            if (t.contains("max_speed_mps")) sc.tracker.max_speed_mps = t.at("max_speed_mps").get<double>();
            if (t.contains("median_window")) sc.tracker.median_window = t.at("median_window").get<std::size_t>();
        }
        if (j.contains("initial_observation")) {
            const auto& o = j.at("initial_observation");
            InitialObservation obs;
            obs.aoa_rx1_rad = deg2rad(o.at("aoa_rx1_deg").get<double>());
            obs.aoa_rx2_rad = deg2rad(o.at("aoa_rx2_deg").get<double>());
            sc.initial = obs;
        }
        if (j.contains("seed")) sc.set_seed(j.at("seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    return sc;
}

// "los" / "nlos" select a preset; anything else is a JSON file path.
inline Scenario load_scenario(const std::string& name_or_path)
{
    if (name_or_path == "los") return los_scenario();
    if (name_or_path == "nlos") return nlos_scenario();
    return scenario_from_json(read_json_file(name_or_path));
}

} // namespace mmtrack

#endif
