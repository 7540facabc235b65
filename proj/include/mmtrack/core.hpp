// SPDX-License-Identifier: Apache-2.0
//
// Basic value types and the error hierarchy shared by every mmtrack module.

#ifndef MMTRACK_CORE_HPP
#define MMTRACK_CORE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmtrack {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

// ---------------------------------------------------------------------------
// Errors. Every failure raised by the library derives from mmtrack::Error so
// callers (the CLI in particular) can map categories onto exit codes.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user configuration (bad rates, aliasing tones, out-of-range knobs).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A caller violated an operation precondition (mismatched lengths, empty input).
class ContractError : public Error {
public:
    using Error::Error;
};

// Target or rays coincide with nodes, parallel bisectors, and similar.
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

// Normal equations too ill-conditioned to solve without regularization.
class IllConditionedError : public Error {
public:
    using Error::Error;
};

// Malformed file content.
class ParseError : public Error {
public:
    using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;

    double norm() const { return std::hypot(x, y); }
    double angle() const { return std::atan2(y, x); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

enum class ReceiverId : int { rx1 = 0, rx2 = 1 };

inline int index_of(ReceiverId rx) { return static_cast<int>(rx); }
inline std::string to_string(ReceiverId rx) { return rx == ReceiverId::rx1 ? "rx1" : "rx2"; }

enum class ChannelRole { reference, surveillance };

inline std::string to_string(ChannelRole r)
{
    return r == ChannelRole::reference ? "reference" : "surveillance";
}

inline ChannelRole parse_role(const std::string& s)
{
    if (s == "reference") return ChannelRole::reference;
    if (s == "surveillance") return ChannelRole::surveillance;
    throw ParseError("unknown channel role '" + s + "'");
}

// Uniformly sampled complex baseband signal. epoch_s is the time of samples[0].
struct BasebandBuffer {
    std::vector<cplx> samples;
    double sample_rate_hz = 1.0;
    double epoch_s = 0.0;

    std::size_t size() const { return samples.size(); }
    double period() const { return 1.0 / sample_rate_hz; }
    double time_of(std::size_t n) const { return epoch_s + static_cast<double>(n) / sample_rate_hz; }
};

inline double average_power(const std::vector<cplx>& x)
{
    if (x.empty()) return 0.0;
    long double acc = 0.0L;
    for (const auto& v : x) acc += std::norm(v);
    return static_cast<double>(acc / static_cast<long double>(x.size()));
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

// SplitMix64 finalizer; used to derive independent per-channel seeds from the
// single user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace mmtrack

#endif
