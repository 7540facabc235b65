// SPDX-License-Identifier: Apache-2.0
//
// Acceptance report: one PASS/FAIL line per criterion. It exits 0 once every
// check has run, so a FAIL line is a finding rather than a broken build. Pass
// --strict to turn any FAIL into exit status 1.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>

using namespace mmtrack;
using namespace mmtrack::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Run {
    TargetTrack truth;
    std::array<DopplerTrack, 2> tracks;
    Trajectory trajectory;
    ErrorStats stats;
    double seconds = 0.0;
    fs::path dir;
};

Run run_pipeline(const Scenario& sc, const std::string& tag, double aoa_error_deg = 0.0)
{
    Run r;
    r.dir = fs::temp_directory_path() / ("mmtrack_acceptance_" + tag);
    fs::remove_all(r.dir);
    const auto t0 = std::chrono::steady_clock::now();
    r.truth = simulate_stage(sc, r.dir);
    r.tracks = detect_stage(sc, r.dir, r.dir);
    r.trajectory = track_stage(sc, r.dir, r.dir, aoa_error_deg);
    r.stats = evaluate_stage(r.dir, r.dir, aoa_error_deg);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

Scenario with_stroke(Scenario sc, StrokeShape shape)
{
    sc.stroke.shape = shape;
    return sc;
}

// ---- 1: LoS round trip ---------------------------------------------------------

Outcome criterion1(const Run& los)
{
    const double p90 = los.stats.p90_m * 1e3, med = los.stats.median_m * 1e3;
    return {p90 <= 6.0 && med <= 2.0 && los.seconds <= 120.0,
            fmt("LoS digit-3: p90 %.2f mm (<= 6), median %.2f mm (<= 2), runtime %.1f s (<= 120)", p90, med, los.seconds)};
}

// ---- 2: NLoS star and PSD gap ---------------------------------------------------

Outcome criterion2(const Run& nlos)
{
    const auto ref = read_iq(nlos.dir / "rx1_reference.iq").buffer;
    const auto sur = read_iq(nlos.dir / "rx1_surveillance.iq").buffer;
    const auto pr = psd(ref, 4096), ps = psd(sur, 4096);
    const double half_band = 0.5 * nlos_scenario().transmit.bandwidth_hz;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < pr.freq_hz.size(); ++i)
        if (std::abs(pr.freq_hz[i]) <= 0.9 * half_band) gaps.push_back(pr.power_dbhz[i] - ps.power_dbhz[i]);
    std::sort(gaps.begin(), gaps.end());
    const double gap = gaps[gaps.size() / 2];
    const double p90 = nlos.stats.p90_m * 1e3;
    return {p90 <= 7.0 && std::abs(gap - 20.0) <= 2.0,
            fmt("NLoS star: p90 %.2f mm (<= 7), median %.2f mm; in-band PSD gap %.2f dB (20 +- 2)", p90,
                nlos.stats.median_m * 1e3, gap)};
}

// ---- 3: initial AoA error ---------------------------------------------------------

Outcome criterion3(const Run& aoa)
{
    const double p90 = aoa.stats.p90_m * 1e3, med = aoa.stats.median_m * 1e3;
    // Proxy for "visually identifiable": once the best-fit translation is
    // removed, the RMS shape residual stays under 10% of the stroke size.
    Vec2 mean{};
    std::vector<Vec2> d;
    for (std::size_t k = 0; k < aoa.trajectory.size(); ++k) {
        const auto i = nearest_index(aoa.truth.times_s, aoa.trajectory.sensing_times_s[k], 1e-6);
        d.push_back(aoa.trajectory.points_m[k] - aoa.truth.positions_m[i]);
        mean = mean + d.back();
    }
    mean = (1.0 / static_cast<double>(d.size())) * mean;
    double ss = 0.0;
    for (const auto& v : d) ss += std::pow(distance(v, mean), 2);
    const double shape_rms = std::sqrt(ss / static_cast<double>(d.size())) * 1e3;
    const double limit_shape = 0.1 * nlos_scenario().stroke.scale_m * 1e3;
    return {p90 <= 1.5 * 11.5 && med <= 1.5 * 4.5 && shape_rms <= limit_shape,
            fmt("NLoS digit-3, 10 deg AoA error: p90 %.2f mm (<= 17.25), median %.2f mm (<= 6.75), "
                "shape RMS after translation %.2f mm (<= %.1f)",
                p90, med, shape_rms, limit_shape)};
}

// ---- 4: CAF oracle ------------------------------------------------------------------

Outcome criterion4()
{
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> fd(-100.0, 100.0), snr_db(-10.0, 20.0);
    std::uniform_int_distribution<int> os(1, 4), tau(0, 4), start(0, 200);
    double worst = 0.0;
    for (int c = 0; c < 200; ++c) {
        auto cfg = small_sensing();
        cfg.doppler_oversample = static_cast<std::size_t>(os(rng));
        cfg.delay_search_samples = static_cast<std::size_t>(tau(rng));
        const auto s0 = static_cast<std::size_t>(start(rng));
        const double f = fd(rng);
        const auto d = static_cast<std::size_t>(tau(rng));
        const auto yr = complex_gaussian(s0 + cfg.window_len_samples, 1.0, 5000 + c);
        std::vector<cplx> ys(cfg.window_len_samples);
        const auto noise = complex_gaussian(ys.size(), std::pow(10.0, -snr_db(rng) / 10.0), 9000 + c);
        for (std::size_t n = 0; n < ys.size(); ++n) {
            const long long src = static_cast<long long>(s0 + n) - static_cast<long long>(d);
            const cplx x = src >= 0 ? yr[static_cast<std::size_t>(src)] : cplx{};
            ys[n] = x * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(n) / cfg.sample_rate_hz) + noise[n];
        }
        CafEngine engine(cfg);
        worst = std::max(worst, max_relative_bin_error(engine.row(ys, yr, s0).magnitudes, direct_caf_row(ys, yr, s0, cfg)));
    }
    return {worst < 1e-6, fmt("200 random cases: max relative bin error %.3g (< 1e-6)", worst)};
}

// ---- 5: velocity inversion ---------------------------------------------------------------

Outcome criterion5()
{
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> ux(-1.0, 3.5), uy(-2.0, 2.0), uv(1e-3, 1.0), uth(-kPi, kPi), u01(0.0, 1.0);
    const Geometry g;
    const VelocitySolverOptions opt;
    double worst = 0.0;
    int flagged = 0, bad_flags = 0;
    for (int i = 0; i < 10'000; ++i) {
        Vec2 p{ux(rng), uy(rng)};
        if (u01(rng) < 0.01) p.y = 0.0;  // seed some baseline cases
        if (distance(p, g.rx1_pos) < 1e-3 || distance(p, g.rx2_pos) < 1e-3 || distance(p, g.tx_pos) < 1e-3) continue;
        const double v = uv(rng), th = uth(rng);
        const auto f = doppler_from_motion(p, v, th, g);
        try {
            const auto est = solve_velocity(f.f1, f.f2, p, g);
            const Vec2 want = v * Vec2{std::cos(th), std::sin(th)};
            const Vec2 got = est.speed * Vec2{std::cos(est.heading), std::sin(est.heading)};
            worst = std::max(worst, distance(got, want) / v);
        } catch (const DegenerateGeometryError&) {
            ++flagged;
            // Recompute the guard quantities independently.
            const auto a = angles_from_position(p, g);
            const double c1 = std::cos(0.5 * (a.aoa_rx1 - a.aod)), c2 = std::cos(0.5 * (a.aoa_rx2 - a.aod));
            const double m1 = 0.5 * (a.aoa_rx1 + a.aod), m2 = 0.5 * (a.aoa_rx2 + a.aod);
            // det of the two Doppler rows relative to their norms = sin(mu2 - mu1).
            const bool on_baseline = std::abs(c1) < opt.baseline_tolerance || std::abs(c2) < opt.baseline_tolerance;
            const bool small_det = std::abs(std::sin(m2 - m1)) < opt.det_tolerance * (1.0 + 1e-6);
            if (!on_baseline && !small_det) ++bad_flags;
        }
    }
    return {worst < 1e-9 && bad_flags == 0,
            fmt("1e4 samples: worst relative round-trip error %.3g (< 1e-9); %d flagged, %d without a small |det|", worst,
                flagged, bad_flags)};
}

// ---- 6: clutter suppression ------------------------------------------------------------------

Outcome criterion6()
{
    Scenario sc = los_scenario();
    auto& ch = sc.scene.receivers[0];
    ch.target_gain = {};
    ch.reference_noise_power = ch.surveillance_noise_power = 0.0;
    TransmitConfig tx = sc.transmit;
    tx.duration_s = 0.5;
    const auto s = gen_transmit_signal(tx);
    TargetTrack still{{0.0, 0.5}, {sc.stroke.center_m, sc.stroke.center_m}};
    const auto ref = simulate_reference(sc.scene, s, ReceiverId::rx1).samples;
    const auto sur = simulate_surveillance(sc.scene, s, still, ReceiverId::rx1).samples;

    const std::size_t nw = sc.sensing.window_len_samples;
    double worst_db = -1e9;
    for (std::size_t start = 0; start + nw <= sur.size(); start += nw) {
        const std::span<const cplx> win(sur.data() + start, nw);
        const auto out = ls_clutter_cancel_in_stream(win, ref, start, *sc.clutter);
        worst_db = std::max(worst_db, to_db(average_power(out) / average_power({win.begin(), win.end()})));
    }

    // 40 Hz echo of the reference riding on the same clutter.
    const double fs = tx.sample_rate_hz;
    auto component = [&](const std::vector<cplx>& y, std::size_t start) {
        cplx acc{};
        for (std::size_t n = 0; n < nw; ++n)
            acc += y[n] * std::conj(ref[start + n]) * std::polar(1.0, 2.0 * kPi * 40.0 * static_cast<double>(start + n) / fs);
        return std::norm(acc);
    };
    double worst_loss = 0.0;
    for (std::size_t start = nw; start + nw <= sur.size(); start += nw) {
        std::vector<cplx> echo(nw), mixed(nw);
        for (std::size_t n = 0; n < nw; ++n) {
            echo[n] = 0.1 * ref[start + n] * std::polar(1.0, -2.0 * kPi * 40.0 * static_cast<double>(start + n) / fs);
            mixed[n] = echo[n] + sur[start + n];
        }
        const auto out = ls_clutter_cancel_in_stream(mixed, ref, start, *sc.clutter);
        worst_loss = std::max(worst_loss, std::abs(to_db(component(out, start) / component(echo, start))));
    }
    return {worst_db <= -60.0 && worst_loss <= 1.0,
            fmt("static-only residual %.1f dB (<= -60); 40 Hz component change %.3f dB (<= 1)", worst_db, worst_loss)};
}

// ---- 7: turning points ---------------------------------------------------------------------------

Outcome criterion7(const Run& los, const StrokeSpec& stroke, const SensingConfig& sensing)
{
    const double resolution_hz = sensing.resolution_hz();
    const double half_window = 0.5 * static_cast<double>(sensing.window_len_samples) / sensing.sample_rate_hz;
    const auto dwells = stroke_dwells(stroke);
    int intervals_ok = 0, off_edge = 0, off_core = 0, missing = 0;
    std::string where;
    for (std::size_t i = 0; i < dwells.size(); ++i) {
        for (std::size_t r = 0; r < 2; ++r) {
            const auto& t = los.tracks[r];
            int hits = 0;
            bool clean = true;
            for (std::size_t k = 0; k < t.size(); ++k) {
                const double tk = t.sensing_times_s[k];
                if (tk < dwells[i].begin_s || tk > dwells[i].end_s) continue;
                if (!t.doppler_hz[k]) {
                    ++missing;
                    continue;
                }
                ++hits;
                if (std::abs(*t.doppler_hz[k]) > resolution_hz + 1e-9) {
                    clean = false;
                    // Core rows integrate only stationary samples.
                    const bool core = tk - half_window >= dwells[i].begin_s && tk + half_window <= dwells[i].end_s;
                    ++(core ? off_core : off_edge);
                }
            }
            if (hits > 0 && clean) {
                ++intervals_ok;
            } else {
                where += fmt(" pause%zu/rx%zu", i + 1, r + 1);
            }
        }
    }
    const int total = static_cast<int>(2 * dwells.size());
    return {intervals_ok == total,
            fmt("%d/%d pause intervals x receivers hold only detections within +-%.0f Hz of 0; off-zero rows: %d whose "
                "window overlaps motion, %d fully inside a pause; %d pause rows without detection;%s",
                intervals_ok, total, resolution_hz, off_edge, off_core, missing, where.empty() ? " none failing" : where.c_str())};
}

// ---- 8: detector --------------------------------------------------------------------------------------

Outcome criterion8(const Run& los)
{
    const auto cfg = small_sensing();
    bool flat_ok = true;
    for (double gamma : {1.0 + 1e-9, 1.01, 1.5, 2.0, 3.0, 5.0, 100.0}) {
        auto c = cfg;
        c.detector.gamma = gamma;
        for (double level : {1e-12, 1.0, 7.5, 1e12})
            flat_ok = flat_ok && !detect_doppler(std::vector<double>(c.num_bins(), level), c).has_value();
    }

    // Scale invariance on the CAF rows of a real run plus random rows.
    auto sc = los_scenario();
    const auto map = read_caf_csv(los.dir / "rx1_caf.csv");
    bool scale_ok = true;
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < map.rows(); ++k) rows.emplace_back(map.row(k).begin(), map.row(k).end());
    for (int i = 0; i < 500; ++i) {
        std::vector<double> row(map.cols());
        for (auto& v : row) v = u(rng) * u(rng);
        row[static_cast<std::size_t>(i) % row.size()] += 5.0 * u(rng);
        rows.push_back(std::move(row));
    }
    for (const auto& row : rows) {
        const auto base = detect_bin(row, sc.sensing.detector);
        for (double alpha : {1e-9, 0.5, 3.0, 1e9}) {
            auto scaled = row;
            for (auto& v : scaled) v *= alpha;
            scale_ok = scale_ok && detect_bin(scaled, sc.sensing.detector) == base;
        }
    }

    constexpr double kFrozen = 0.0140;
    std::string rates;
    bool fa_ok = true;
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        const double r = caf_false_alarm_rate(seed, 10'000);
        fa_ok = fa_ok && std::abs(r - kFrozen) <= 0.2 * kFrozen;
        rates += fmt(" %.4f", r);
    }
    return {flat_ok && scale_ok && fa_ok,
            fmt("flat rows silent: %s; scale invariance over %zu rows: %s; false-alarm rate%s vs frozen %.4f (+-20%%)",
                flat_ok ? "yes" : "no", rows.size(), scale_ok ? "yes" : "no", rates.c_str(), kFrozen)};
}

} // namespace

int main(int argc, char** argv)
{
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    int failures = 0;
    auto report = [&](int n, const Outcome& o) {
        std::printf("criterion %d: %s | %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    };

    try {
        const Scenario los = los_scenario();
        const Run los_run = run_pipeline(los, "los");
        report(1, criterion1(los_run));

        const Run star = run_pipeline(nlos_scenario(), "nlos_star");
        report(2, criterion2(star));

        const Run aoa = run_pipeline(with_stroke(nlos_scenario(), StrokeShape::digit3), "nlos_digit3", 10.0);
        report(3, criterion3(aoa));

        report(4, criterion4());
        report(5, criterion5());
        report(6, criterion6());
        report(7, criterion7(los_run, los.stroke, los.sensing));
        report(8, criterion8(los_run));

        for (const auto* r : {&los_run, &star, &aoa}) fs::remove_all(r->dir);
    } catch (const std::exception& e) {
        std::printf("acceptance run aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d of 8 criteria failed\n", failures);
    return strict && failures > 0 ? 1 : 0;
}
