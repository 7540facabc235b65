// SPDX-License-Identifier: Apache-2.0
//
// Scripted ground-truth pen strokes. Shapes are templates in a unit box,
// traversed at constant speed with dwells at the template corners.

#ifndef MMTRACK_STROKES_HPP
#define MMTRACK_STROKES_HPP

#include "channel_sim.hpp"
#include "core.hpp"

#include <variant>

namespace mmtrack {

enum class StrokeShape { digit3, star, line, polyline };

inline std::string to_string(StrokeShape s)
{
    switch (s) {
    case StrokeShape::digit3: return "digit3";
    case StrokeShape::star: return "star";
    case StrokeShape::line: return "line";
    default: return "polyline";
    }
}

inline StrokeShape parse_stroke_shape(const std::string& s)
{
    if (s == "digit3") return StrokeShape::digit3;
    if (s == "star") return StrokeShape::star;
    if (s == "line") return StrokeShape::line;
    if (s == "polyline") return StrokeShape::polyline;
    throw ConfigError("unknown stroke shape '" + s + "' (expected digit3, star, line or polyline)");
}

struct StrokeSpec {
    StrokeShape shape = StrokeShape::digit3;
    std::vector<Vec2> points;  // polyline vertices in unit-box coordinates
    double scale_m = 0.1;
    double speed_mps = 0.1;
    double pause_s = 0.2;
    Vec2 center_m{0.5, 0.5};
    double step_s = 0.01;
    double lead_s = 0.0;  // stationary dwell before the first and after the last segment

    void validate() const
    {
        if (!(scale_m > 0.01 && scale_m <= 0.5)) throw ConfigError("stroke scale_m must lie in (0.01, 0.5] m");
        if (!(speed_mps > 0.0 && speed_mps <= 1.0)) throw ConfigError("stroke speed_mps must lie in (0, 1] m/s");
        if (!(pause_s >= 0.0)) throw ConfigError("stroke pause_s must be >= 0");
        if (!(lead_s >= 0.0)) throw ConfigError("stroke lead_s must be >= 0");
        if (!(step_s > 0.0)) throw ConfigError("stroke step_s must be positive");
        if (!std::isfinite(center_m.x) || !std::isfinite(center_m.y)) throw ConfigError("stroke center must be finite");
        if (shape == StrokeShape::polyline) {
            if (points.size() < 2) throw ConfigError("polyline stroke needs at least two points");
            for (std::size_t i = 1; i < points.size(); ++i)
                if (points[i] == points[i - 1]) throw ConfigError("polyline stroke has a zero-length segment");
        }
    }
};

namespace stroke_detail {

struct LineSeg {
    Vec2 a, b;
};

struct ArcSeg {
    Vec2 center;
    double radius;
    double start;  // rad
    double sweep;  // rad, negative = clockwise
};

using Segment = std::variant<LineSeg, ArcSeg>;

inline double length(const Segment& s)
{
    if (const auto* l = std::get_if<LineSeg>(&s)) return distance(l->a, l->b);
    const auto& a = std::get<ArcSeg>(s);
    return a.radius * std::abs(a.sweep);
}

inline Vec2 point_at(const Segment& s, double u)  // u in [0, 1]
{
    if (const auto* l = std::get_if<LineSeg>(&s)) return l->a + u * (l->b - l->a);
    const auto& a = std::get<ArcSeg>(s);
    const double ang = a.start + u * a.sweep;
    return a.center + a.radius * Vec2{std::cos(ang), std::sin(ang)};
}

// Flat-topped "3": top bar, upper bowl, lower bowl, bottom bar. The three
// junctions are the pen's turning points.
inline std::vector<Segment> digit3_template()
{
    return {LineSeg{{-0.25, 0.5}, {0.0, 0.5}}, ArcSeg{{0.0, 0.25}, 0.25, kPi / 2, -kPi},
            ArcSeg{{0.0, -0.25}, 0.25, kPi / 2, -kPi}, LineSeg{{0.0, -0.5}, {-0.25, -0.5}}};
}

// Five-point star outline starting and ending at an inner vertex: five outer
// and four inner corners are interior turning points.
inline std::vector<Segment> star_template()
{
    const double ro = 0.5;
    const double ri = ro * std::sin(kPi / 10) / std::sin(7 * kPi / 10);
    auto outer = [&](int i) { return ro * Vec2{std::cos(kPi / 2 + i * 2 * kPi / 5), std::sin(kPi / 2 + i * 2 * kPi / 5)}; };
    auto inner = [&](int i) {
        const double a = kPi / 2 + kPi / 5 + i * 2 * kPi / 5;
        return ri * Vec2{std::cos(a), std::sin(a)};
    };
    std::vector<Vec2> pts{inner(4)};
    for (int i = 0; i < 5; ++i) {
        pts.push_back(outer(i));
        pts.push_back(inner(i));
    }
    std::vector<Segment> segs;
    for (std::size_t i = 1; i < pts.size(); ++i) segs.push_back(LineSeg{pts[i - 1], pts[i]});
    return segs;
}

inline std::vector<Segment> shape_segments(const StrokeSpec& spec)
{
    switch (spec.shape) {
    case StrokeShape::digit3: return digit3_template();
    case StrokeShape::star: return star_template();
    case StrokeShape::line: return {LineSeg{{-0.5, 0.0}, {0.5, 0.0}}};
    default: {
        std::vector<Segment> segs;
        for (std::size_t i = 1; i < spec.points.size(); ++i) segs.push_back(LineSeg{spec.points[i - 1], spec.points[i]});
        return segs;
    }
    }
}

} // namespace stroke_detail

// Number of interior turning points (segment junctions) of a stroke.
inline std::size_t turning_point_count(const StrokeSpec& spec)
{
    return stroke_detail::shape_segments(spec).size() - 1;
}

// One dwell interval per turning point, in stroke time.
struct DwellInterval {
    double begin_s;
    double end_s;
};

namespace stroke_detail {

struct Timeline {
    std::vector<Segment> segs;  // scaled, placed
    std::vector<double> seg_start;  // motion start time of each segment
    double duration = 0.0;
};

inline Timeline build_timeline(const StrokeSpec& spec)
{
    Timeline tl;
    for (auto s : shape_segments(spec)) {
        if (auto* l = std::get_if<LineSeg>(&s)) {
            l->a = spec.center_m + spec.scale_m * l->a;
            l->b = spec.center_m + spec.scale_m * l->b;
        } else {
            auto& a = std::get<ArcSeg>(s);
            a.center = spec.center_m + spec.scale_m * a.center;
            a.radius *= spec.scale_m;
        }
        tl.segs.push_back(s);
    }
    double t = spec.lead_s;
    for (std::size_t i = 0; i < tl.segs.size(); ++i) {
        if (i > 0) t += spec.pause_s;
        tl.seg_start.push_back(t);
        t += length(tl.segs[i]) / spec.speed_mps;
    }
    tl.duration = t + spec.lead_s;
    return tl;
}

inline Vec2 position_at(const Timeline& tl, const StrokeSpec& spec, double t)
{
    for (std::size_t i = tl.segs.size(); i-- > 0;) {
        if (t < tl.seg_start[i]) continue;
        const double travel = length(tl.segs[i]) / spec.speed_mps;
        const double u = std::min(1.0, (t - tl.seg_start[i]) / travel);
        return point_at(tl.segs[i], u);
    }
    return point_at(tl.segs.front(), 0.0);
}

} // namespace stroke_detail

inline double stroke_duration(const StrokeSpec& spec)
{
    spec.validate();
    return stroke_detail::build_timeline(spec).duration;
}

inline std::vector<DwellInterval> stroke_dwells(const StrokeSpec& spec)
{
    spec.validate();
    const auto tl = stroke_detail::build_timeline(spec);
    std::vector<DwellInterval> out;
    for (std::size_t i = 1; i < tl.segs.size(); ++i) out.push_back({tl.seg_start[i] - spec.pause_s, tl.seg_start[i]});
    return out;
}

// Samples the stroke every step_s from t = 0 through the end of the final
// dwell (the last sample lands exactly on the end time).
inline TargetTrack gen_stroke(const StrokeSpec& spec)
{
    spec.validate();
    const auto tl = stroke_detail::build_timeline(spec);
    const auto last = static_cast<std::size_t>(std::ceil(tl.duration / spec.step_s - 1e-9));
    TargetTrack track;
    for (std::size_t j = 0; j <= last; ++j) {
        const double t = std::min(static_cast<double>(j) * spec.step_s, tl.duration);
        track.times_s.push_back(static_cast<double>(j) * spec.step_s);
        track.positions_m.push_back(stroke_detail::position_at(tl, spec, t));
    }
    return track;
}

} // namespace mmtrack

#endif
