#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lspkit/tt/tensor_train.hpp"
#include "lspkit/util/error.hpp"

namespace lspkit {

inline constexpr char kTtMagic[8] = {'L', 'S', 'P', 'K', 'T', 'T', '0', '1'};

namespace detail {

static_assert(std::endian::native == std::endian::little, "container format assumes little-endian hosts");

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& what) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) {
        throw ParseError("truncated tensor-train container while reading " + what);
    }
    return v;
}

} // namespace detail

inline std::filesystem::path sidecar_path(const std::filesystem::path& p) {
    return std::filesystem::path(p.string() + ".json");
}

/// Binary container: magic, d, per-core (r0, n, r1), per-dim grid
/// (lower, upper, count), then all core entries in order.
inline void write_tt(const std::filesystem::path& path, const TensorTrain& tt) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    os.write(kTtMagic, sizeof(kTtMagic));
    const Grid& g = tt.grid();
    detail::put<std::uint64_t>(os, tt.dims());
    for (const Core& c : tt.cores()) {
        detail::put<std::uint64_t>(os, c.r0);
        detail::put<std::uint64_t>(os, c.n);
        detail::put<std::uint64_t>(os, c.r1);
    }
    for (std::size_t k = 0; k < g.dims(); ++k) {
        detail::put<double>(os, g.lower(k));
        detail::put<double>(os, g.upper(k));
        detail::put<std::uint64_t>(os, g.count(k));
    }
    for (const Core& c : tt.cores()) {
        os.write(reinterpret_cast<const char*>(c.data.data()),
                 static_cast<std::streamsize>(c.data.size() * sizeof(double)));
    }
    if (!os) {
        throw Error("failed writing " + path.string());
    }
}

inline TensorTrain read_tt(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ParseError("cannot open " + path.string());
    }
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kTtMagic, sizeof(magic)) != 0) {
        throw ParseError(path.string() + ": not a tensor-train container");
    }
    const auto d = detail::get<std::uint64_t>(is, "dimension count");
    if (d == 0 || d > 4096) {
        throw ParseError(path.string() + ": implausible dimension count");
    }
    std::vector<Core> cores;
    for (std::uint64_t k = 0; k < d; ++k) {
        const auto r0 = detail::get<std::uint64_t>(is, "core shape");
        const auto n = detail::get<std::uint64_t>(is, "core shape");
        const auto r1 = detail::get<std::uint64_t>(is, "core shape");
        if (r0 * n * r1 > (1ULL << 32)) {
            throw ParseError(path.string() + ": implausible core shape");
        }
        cores.emplace_back(r0, n, r1);
    }
    std::vector<double> lo(d), hi(d);
    std::vector<std::size_t> cnt(d);
    for (std::uint64_t k = 0; k < d; ++k) {
        lo[k] = detail::get<double>(is, "grid");
        hi[k] = detail::get<double>(is, "grid");
        cnt[k] = detail::get<std::uint64_t>(is, "grid");
    }
    for (Core& c : cores) {
        is.read(reinterpret_cast<char*>(c.data.data()), static_cast<std::streamsize>(c.data.size() * sizeof(double)));
        if (!is) {
            throw ParseError(path.string() + ": truncated core data");
        }
    }
    try {
        return TensorTrain(std::move(cores), Grid(lo, hi, cnt));
    } catch (const ConfigError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    os << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw ParseError("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Container plus sidecar with eps, max_rank, provenance and extra fields.
inline void save_tt(const std::filesystem::path& path, const TensorTrain& tt, double eps, std::size_t max_rank,
                    const std::string& provenance, const nlohmann::json& extra = nlohmann::json::object()) {
    write_tt(path, tt);
    nlohmann::json meta = extra;
    meta["eps"] = eps;
    meta["max_rank"] = max_rank;
    meta["provenance"] = provenance;
    write_json(sidecar_path(path), meta);
}

} // namespace lspkit
