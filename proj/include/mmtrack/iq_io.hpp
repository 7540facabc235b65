// SPDX-License-Identifier: Apache-2.0
//
// BasebandBuffer files: raw little-endian float32 I/Q pairs plus a JSON
// sidecar at "<path>.json".
//
//   sidecar = { "format_version": 1, "sample_rate_hz", "epoch_s", "role",
//               "fc_hz", "num_samples", ...extra }

#ifndef MMTRACK_IQ_IO_HPP
#define MMTRACK_IQ_IO_HPP

#include "core.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace mmtrack {

inline constexpr int kFormatVersion = 1;

struct IqMetadata {
    double sample_rate_hz = 0.0;
    double epoch_s = 0.0;
    ChannelRole role = ChannelRole::reference;
    double fc_hz = 0.0;
    // Anything else a writer wants to record (receiver id, path gains, ...).
    nlohmann::json extra = nlohmann::json::object();
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& iq)
{
    return std::filesystem::path(iq.string() + ".json");
}

namespace detail {

inline void put_f32_le(char* dst, float v)
{
    auto bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    std::memcpy(dst, &bits, 4);
}

inline float get_f32_le(const char* src)
{
    std::uint32_t bits;
    std::memcpy(&bits, src, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    return std::bit_cast<float>(bits);
}

template <typename T>
T require_field(const nlohmann::json& j, const char* key, const std::string& file)
{
    if (!j.contains(key)) throw ParseError(file + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(file + ": field '" + key + "' has the wrong type");
    }
}

} // namespace detail

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw IoError("failed writing " + path.string());
}

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline void write_iq(const std::filesystem::path& path, const BasebandBuffer& buf, const IqMetadata& meta)
{
    std::vector<char> raw(buf.size() * 8);
    for (std::size_t i = 0; i < buf.size(); ++i) {
        detail::put_f32_le(raw.data() + 8 * i, static_cast<float>(buf.samples[i].real()));
        detail::put_f32_le(raw.data() + 8 * i + 4, static_cast<float>(buf.samples[i].imag()));
    }
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + path.string() + " for writing");
        os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
        if (!os) throw IoError("failed writing " + path.string());
    }
    nlohmann::json side = meta.extra;
    side["format_version"] = kFormatVersion;
    side["sample_rate_hz"] = buf.sample_rate_hz;
    side["epoch_s"] = buf.epoch_s;
    side["role"] = to_string(meta.role);
    side["fc_hz"] = meta.fc_hz;
    side["num_samples"] = buf.size();
    write_json_file(sidecar_path(path), side);
}

struct IqFile {
    BasebandBuffer buffer;
    IqMetadata meta;
};

inline IqFile read_iq(const std::filesystem::path& path)
{
    const auto side_path = sidecar_path(path);
    if (!std::filesystem::exists(path)) throw IoError("missing IQ file " + path.string());
    if (!std::filesystem::exists(side_path)) throw IoError("missing sidecar " + side_path.string());

    const auto side = read_json_file(side_path);
    const auto sname = side_path.string();
    if (!side.is_object()) throw ParseError(sname + ": sidecar must be a JSON object");
    IqFile out;
    out.meta.sample_rate_hz = detail::require_field<double>(side, "sample_rate_hz", sname);
    out.meta.epoch_s = detail::require_field<double>(side, "epoch_s", sname);
    out.meta.fc_hz = detail::require_field<double>(side, "fc_hz", sname);
    out.meta.role = parse_role(detail::require_field<std::string>(side, "role", sname));
    if (!(out.meta.sample_rate_hz > 0.0)) throw ParseError(sname + ": field 'sample_rate_hz' must be positive");
    out.meta.extra = side;

    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (raw.size() % 8 != 0)
        throw ParseError(path.string() + ": truncated sample at byte offset " +
                         std::to_string(raw.size() - raw.size() % 8) + " (file size " +
                         std::to_string(raw.size()) + " is not a multiple of 8)");
    const std::size_t n = raw.size() / 8;
    if (side.contains("num_samples")) {
        const auto expect = detail::require_field<std::size_t>(side, "num_samples", sname);
        if (expect != n)
            throw ParseError(path.string() + ": data ends at byte offset " + std::to_string(raw.size()) +
                             " but sidecar field 'num_samples' expects " + std::to_string(expect * 8) + " bytes");
    }
    if (n == 0) throw ParseError(path.string() + ": no samples");

    out.buffer.sample_rate_hz = out.meta.sample_rate_hz;
    out.buffer.epoch_s = out.meta.epoch_s;
    out.buffer.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const float re = detail::get_f32_le(raw.data() + 8 * i);
        const float im = detail::get_f32_le(raw.data() + 8 * i + 4);
        if (!std::isfinite(re) || !std::isfinite(im))
            throw ParseError(path.string() + ": non-finite sample at byte offset " + std::to_string(8 * i));
        out.buffer.samples[i] = {re, im};
    }
    return out;
}

} // namespace mmtrack

#endif
