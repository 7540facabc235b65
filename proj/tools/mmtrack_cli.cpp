// SPDX-License-Identifier: Apache-2.0
//
// mmtrack command line: simulate | detect | track | evaluate | pipeline.
// Exit codes: 0 success, 1 contract/config error, 2 IO/parse error.

#include <mmtrack/mmtrack.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

struct Options {
    std::string scenario = "los";
    std::string stroke;
    std::optional<std::uint64_t> seed;
    std::string out = "mmtrack_out";
    std::string in;
    std::optional<double> gamma;
    std::optional<std::size_t> train_cells;
    std::optional<std::size_t> clutter_taps;
    std::optional<double> doppler_max;
    std::optional<double> fs;
    double aoa_error_deg = 0.0;
};

mmtrack::Scenario build_scenario(const Options& o)
{
    auto sc = mmtrack::load_scenario(o.scenario);
    if (!o.stroke.empty()) {
        if (o.stroke == "digit3" || o.stroke == "star" || o.stroke == "line") {
            sc.stroke.shape = mmtrack::parse_stroke_shape(o.stroke);
        } else {
            sc.stroke = mmtrack::stroke_from_json(mmtrack::read_json_file(o.stroke), sc.stroke);
        }
    }
    if (o.fs) sc.set_sample_rate(*o.fs);
    if (o.seed) sc.set_seed(*o.seed);
    if (o.gamma) sc.sensing.detector.gamma = *o.gamma;
    if (o.train_cells) sc.sensing.detector.half_train_cells = *o.train_cells;
    if (o.doppler_max) sc.sensing.doppler_max_hz = *o.doppler_max;
    if (o.clutter_taps) {
        if (*o.clutter_taps == 0) {
            sc.clutter.reset();
        } else {
            if (!sc.clutter) sc.clutter = mmtrack::ClutterConfig{};
            sc.clutter->num_taps = *o.clutter_taps;
        }
    }
    sc.validate();
    return sc;
}

void print_stats(const mmtrack::ErrorStats& st)
{
    std::printf("points: %zu\nmedian_error_mm: %.3f\np90_error_mm: %.3f\n", st.per_point_errors_m.size(), st.median_m * 1e3,
                st.p90_m * 1e3);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Passive bistatic mmWave handwriting tracking toolkit"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", o.scenario, "Scenario JSON file, or the preset name 'los' / 'nlos'");
        sub->add_option("--seed", o.seed, "Seed for every random draw");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--in", o.in, "Input directory (defaults to --out)");
        sub->add_option("--fs", o.fs, "Sample rate override in Hz");
        sub->add_option("--stroke", o.stroke, "digit3 | star | line | stroke JSON file");
    };
    auto add_detect = [&](CLI::App* sub) {
        sub->add_option("--gamma", o.gamma, "Detector threshold scale (> 1)");
        sub->add_option("--train-cells", o.train_cells, "Detector half training-window length W");
        sub->add_option("--clutter-taps", o.clutter_taps, "LS clutter taps (0 disables cancellation)");
        sub->add_option("--doppler-max", o.doppler_max, "Doppler grid half extent in Hz");
    };
    auto add_aoa = [&](CLI::App* sub) {
        sub->add_option("--aoa-error-deg", o.aoa_error_deg, "Error added to both initial AoAs, degrees");
    };

    auto* sim = app.add_subcommand("simulate", "Synthesize reference/surveillance IQ and the ground-truth track");
    add_common(sim);
    auto* det = app.add_subcommand("detect", "Clutter cancellation, CAF spectrograms and Doppler tracks");
    add_common(det);
    add_detect(det);
    auto* trk = app.add_subcommand("track", "Fuse Doppler tracks into a trajectory");
    add_common(trk);
    add_aoa(trk);
    auto* ev = app.add_subcommand("evaluate", "Trajectory error statistics against the ground truth");
    add_common(ev);
    add_aoa(ev);
    auto* pipe = app.add_subcommand("pipeline", "simulate -> detect -> track -> evaluate");
    add_common(pipe);
    add_detect(pipe);
    add_aoa(pipe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const std::filesystem::path out = o.out;
        const std::filesystem::path in = o.in.empty() ? out : std::filesystem::path(o.in);
        const auto sc = build_scenario(o);
        if (sim->parsed()) {
            mmtrack::simulate_stage(sc, out);
        } else if (det->parsed()) {
            mmtrack::detect_stage(sc, in, out);
        } else if (trk->parsed()) {
            mmtrack::track_stage(sc, in, out, o.aoa_error_deg);
        } else if (ev->parsed()) {
            print_stats(mmtrack::evaluate_stage(in, out, o.aoa_error_deg));
        } else if (pipe->parsed()) {
            print_stats(mmtrack::pipeline_stage(sc, out, o.aoa_error_deg));
        }
    } catch (const mmtrack::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const mmtrack::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const mmtrack::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
