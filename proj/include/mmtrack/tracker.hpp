// SPDX-License-Identifier: Apache-2.0
//
// Two-receiver Doppler fusion: bistatic angles, Doppler <-> velocity
// mapping, initial triangulation and dead-reckoning.

#ifndef MMTRACK_TRACKER_HPP
#define MMTRACK_TRACKER_HPP

#include "caf.hpp"
#include "channel_sim.hpp"
#include "core.hpp"

#include <algorithm>
#include <optional>

namespace mmtrack {

struct BistaticAngles {
    double aoa_rx1 = 0.0;  // phi_1
    double aoa_rx2 = 0.0;  // phi_2
    double aod = 0.0;      // varphi, at the transmitter
};

// Four-quadrant angles of the target as seen from rx1, rx2 and tx.
inline BistaticAngles angles_from_position(Vec2 p, const Geometry& geom)
{
    if (p == Geometry::rx1_pos || p == geom.rx2_pos || p == geom.tx_pos)
        throw DegenerateGeometryError("target position coincides with a node");
    return {std::atan2(p.y, p.x), std::atan2(p.y - geom.rx2_pos.y, p.x - geom.rx2_pos.x),
            std::atan2(p.y, p.x - geom.tx_pos.x)};
}

inline double doppler_scale(const Geometry& geom) { return -2.0 * geom.fc_hz / geom.c_mps; }

// Row i of the Doppler map f_i = row_i . (v cos theta, v sin theta):
// -(2 fc / c) cos(delta_i) [cos(mu_i), sin(mu_i)], mu = (phi + aod)/2,
// delta = (phi - aod)/2.
inline std::array<double, 2> doppler_row(double aoa, double aod, const Geometry& geom)
{
    const double mu = 0.5 * (aoa + aod);
    const double delta = 0.5 * (aoa - aod);
    const double g = doppler_scale(geom) * std::cos(delta);
    return {g * std::cos(mu), g * std::sin(mu)};
}

struct DopplerPair {
    double f1 = 0.0;
    double f2 = 0.0;
};

inline DopplerPair doppler_from_motion(Vec2 p, double speed, double heading, const Geometry& geom)
{
    if (speed < 0.0) throw ContractError("speed must be non-negative");
    const auto ang = angles_from_position(p, geom);
    auto f = [&](double aoa) {
        return doppler_scale(geom) * speed * std::cos(heading - 0.5 * (aoa + ang.aod)) * std::cos(0.5 * (aoa - ang.aod));
    };
    return {f(ang.aoa_rx1), f(ang.aoa_rx2)};
}

struct Velocity {
    double speed = 0.0;
    double heading = 0.0;
};

struct VelocitySolverOptions {
    double det_tolerance = 1e-10;     // relative to the product of row norms
    double baseline_tolerance = 1e-9; // |cos delta| below this means "on the tx-rx baseline"
};

// Inverts the two-receiver Doppler map at position p. When both Dopplers are
// zero the heading is unobservable and prev_heading is returned with v = 0.
inline Velocity solve_velocity(double f1, double f2, Vec2 p, const Geometry& geom, double prev_heading = 0.0,
                               const VelocitySolverOptions& opt = {})
{
    const auto ang = angles_from_position(p, geom);
    if (std::abs(std::cos(0.5 * (ang.aoa_rx1 - ang.aod))) < opt.baseline_tolerance ||
        std::abs(std::cos(0.5 * (ang.aoa_rx2 - ang.aod))) < opt.baseline_tolerance)
        throw DegenerateGeometryError("target lies on a transmitter-receiver baseline");
    const auto r1 = doppler_row(ang.aoa_rx1, ang.aod, geom);
    const auto r2 = doppler_row(ang.aoa_rx2, ang.aod, geom);
    const double det = r1[0] * r2[1] - r1[1] * r2[0];
    const double scale = std::hypot(r1[0], r1[1]) * std::hypot(r2[0], r2[1]);
    if (!(std::abs(det) >= opt.det_tolerance * scale))
        throw DegenerateGeometryError("bistatic bisectors are parallel; velocity is unobservable");
    if (f1 == 0.0 && f2 == 0.0) return {0.0, prev_heading};
    const double vx = (f1 * r2[1] - f2 * r1[1]) / det;
    const double vy = (r1[0] * f2 - r2[0] * f1) / det;
    return {std::hypot(vx, vy), std::atan2(vy, vx)};
}

struct InitialObservation {
    double aoa_rx1_rad = 0.0;
    double aoa_rx2_rad = 0.0;
    double aoa_error_rad = 0.0;  // added to both angles before triangulating
};

struct Triangulation {
    Vec2 position;
    bool behind_receiver = false;
};

// Intersects the ray from rx1 at phi_1 with the ray from rx2 at phi_2.
inline Triangulation initial_position(const InitialObservation& obs, const Geometry& geom, double tol = 1e-10)
{
    const double a1 = obs.aoa_rx1_rad + obs.aoa_error_rad;
    const double a2 = obs.aoa_rx2_rad + obs.aoa_error_rad;
    const Vec2 d1{std::cos(a1), std::sin(a1)};
    const Vec2 d2{std::cos(a2), std::sin(a2)};
    const Vec2 b = geom.rx2_pos - Geometry::rx1_pos;
    // rx1 + t1 d1 = rx2 + t2 d2  ->  [d1, -d2] [t1; t2] = b
    const double det = d1.x * (-d2.y) - (-d2.x) * d1.y;
    if (std::abs(det) < tol) throw DegenerateGeometryError("initial AoA rays are parallel; no intersection");
    const double t1 = (b.x * (-d2.y) - (-d2.x) * b.y) / det;
    const double t2 = (d1.x * b.y - d1.y * b.x) / det;
    return {Geometry::rx1_pos + t1 * d1, t1 < 0.0 || t2 < 0.0};
}

inline Vec2 step_position(Vec2 p, double speed, double heading, double dt_s)
{
    if (!(dt_s > 0.0)) throw ContractError("dt must be positive");
    return p + speed * dt_s * Vec2{std::cos(heading), std::sin(heading)};
}

struct FusedPair {
    double time_s = 0.0;
    std::optional<double> f1;
    std::optional<double> f2;

    bool complete() const { return f1.has_value() && f2.has_value(); }
};

// Pairs the two tracks on rx1's sensing grid by nearest rx2 timestamp; matches
// farther than half a hop, or with a missing detection on either side, carry
// a missing value.
inline std::vector<FusedPair> align_tracks(const DopplerTrack& t1, const DopplerTrack& t2)
{
    if (t1.size() == 0 || t2.size() == 0) throw ContractError("cannot align an empty Doppler track");
    double hop = std::numeric_limits<double>::infinity();
    for (const auto* t : {&t1, &t2})
        for (std::size_t k = 1; k < t->size(); ++k) hop = std::min(hop, t->sensing_times_s[k] - t->sensing_times_s[k - 1]);
    if (!std::isfinite(hop)) hop = 0.0;
    const double half = 0.5 * hop + 1e-9;

    const double lo = std::max(t1.sensing_times_s.front(), t2.sensing_times_s.front()) - half;
    const double hi = std::min(t1.sensing_times_s.back(), t2.sensing_times_s.back()) + half;
    if (lo > hi) throw ContractError("Doppler tracks do not overlap in time");

    std::vector<FusedPair> out;
    std::size_t j = 0;
    for (std::size_t k = 0; k < t1.size(); ++k) {
        const double t = t1.sensing_times_s[k];
        if (t < lo || t > hi) continue;
        while (j + 1 < t2.size() && std::abs(t2.sensing_times_s[j + 1] - t) < std::abs(t2.sensing_times_s[j] - t)) ++j;
        FusedPair fp{t, t1.doppler_hz[k], std::nullopt};
        if (std::abs(t2.sensing_times_s[j] - t) <= half) fp.f2 = t2.doppler_hz[j];
        out.push_back(fp);
    }
    if (out.empty()) throw ContractError("Doppler tracks do not overlap in time");
    return out;
}

enum class PointFlag { tracked, held, degenerate };

inline std::string to_string(PointFlag f)
{
    switch (f) {
    case PointFlag::tracked: return "tracked";
    case PointFlag::held: return "held";
    default: return "degenerate";
    }
}

inline PointFlag parse_point_flag(const std::string& s)
{
    if (s == "tracked") return PointFlag::tracked;
    if (s == "held") return PointFlag::held;
    if (s == "degenerate") return PointFlag::degenerate;
    throw ParseError("unknown trajectory flag '" + s + "'");
}

// points[k] is the position at sensing_times_s[k]; flags[k] records how the
// Doppler pair at k was used to move on to k+1.
struct Trajectory {
    std::vector<double> sensing_times_s;
    std::vector<Vec2> points_m;
    std::vector<PointFlag> flags;
    bool initial_behind_receiver = false;

    std::size_t size() const { return points_m.size(); }
};

struct TrackerConfig {
    double max_speed_mps = 1.0;
    // Optional moving-median pre-filter on each Doppler sequence (0 = off).
    std::size_t median_window = 0;
    VelocitySolverOptions solver;
};

namespace detail {

inline std::vector<std::optional<double>> moving_median(const std::vector<std::optional<double>>& f, std::size_t window)
{
    if (window < 2) return f;
    const auto half = static_cast<long long>(window / 2);
    std::vector<std::optional<double>> out(f.size());
    std::vector<double> buf;
    for (long long k = 0; k < static_cast<long long>(f.size()); ++k) {
        if (!f[static_cast<std::size_t>(k)]) continue;
        buf.clear();
        for (long long i = k - half; i <= k + half; ++i)
            if (i >= 0 && i < static_cast<long long>(f.size()) && f[static_cast<std::size_t>(i)]) buf.push_back(*f[static_cast<std::size_t>(i)]);
        std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2), buf.end());
        out[static_cast<std::size_t>(k)] = buf[buf.size() / 2];
    }
    return out;
}

} // namespace detail

// Dead-reckons the trajectory from the initial triangulated fix.
inline Trajectory track_trajectory(const std::vector<FusedPair>& pairs, const InitialObservation& obs,
                                   const Geometry& geom, const TrackerConfig& cfg = {})
{
    if (pairs.empty()) throw ContractError("track_trajectory needs at least one Doppler pair");
    const auto init = initial_position(obs, geom);

    std::vector<std::optional<double>> f1(pairs.size()), f2(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        f1[k] = pairs[k].f1;
        f2[k] = pairs[k].f2;
    }
    f1 = detail::moving_median(f1, cfg.median_window);
    f2 = detail::moving_median(f2, cfg.median_window);

    Trajectory tr;
    tr.initial_behind_receiver = init.behind_receiver;
    Vec2 p = init.position;
    double heading = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        tr.sensing_times_s.push_back(pairs[k].time_s);
        tr.points_m.push_back(p);
        PointFlag flag = PointFlag::tracked;
        Velocity v{0.0, heading};
        if (!f1[k] || !f2[k]) {
            flag = PointFlag::held;
        } else {
            try {
                v = solve_velocity(*f1[k], *f2[k], p, geom, heading, cfg.solver);
                if (v.speed > cfg.max_speed_mps) {
                    flag = PointFlag::degenerate;
                    v = {0.0, heading};
                }
            } catch (const DegenerateGeometryError&) {
                flag = PointFlag::degenerate;
                v = {0.0, heading};
            }
        }
        tr.flags.push_back(flag);
        if (k + 1 < pairs.size()) {
            const double dt = pairs[k + 1].time_s - pairs[k].time_s;
            if (flag == PointFlag::tracked && v.speed > 0.0) p = step_position(p, v.speed, v.heading, dt);
        }
        if (flag == PointFlag::tracked && v.speed > 0.0) heading = v.heading;
    }
    return tr;
}

} // namespace mmtrack

#endif
