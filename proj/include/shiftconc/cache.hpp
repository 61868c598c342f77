#pragma once

// On-disk factor table cache.
//
// Layout: magic "SPLF1\0" (6 bytes), limit as u64 little-endian, then
// spf[2..limit] as consecutive u32 little-endian cells.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shiftconc/error.hpp"
#include "shiftconc/sieve.hpp"

namespace shiftconc {

inline constexpr std::array<char, 6> kCacheMagic = {'S', 'P', 'L', 'F', '1', '\0'};
inline constexpr const char* kCacheFileName = "spf_table.splf";
inline constexpr const char* kCacheDirEnv = "SHIFTCONC_CACHE_DIR";

namespace detail {

inline void put_le(std::ostream& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t value = 0;
  for (int i = bytes - 1; i >= 0; --i) value = (value << 8) | p[i];
  return value;
}

}  // namespace detail

inline void save_factor_table(const FactorTable& table, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::invalid_argument, "cannot write cache file " + tmp.string());
    out.write(kCacheMagic.data(), kCacheMagic.size());
    detail::put_le(out, table.limit(), 8);
    const auto cells = table.spf_cells();
    std::vector<char> buf;
    buf.reserve(4 * 65536);
    for (std::uint64_t n = 2; n <= table.limit(); ++n) {
      const std::uint32_t v = cells[n];
      for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
      if (buf.size() >= 4 * 65536) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) fail(ErrorKind::invalid_argument, "short write to cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Throws invalid-argument on a bad magic, a truncated or oversized payload,
// or cells that violate the spf invariants.
inline FactorTable load_factor_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::invalid_argument, "cannot open cache file " + path.string());
  std::array<char, 6> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kCacheMagic) {
    fail(ErrorKind::invalid_argument, "cache file " + path.string() + " has a bad magic");
  }
  std::array<unsigned char, 8> lim{};
  in.read(reinterpret_cast<char*>(lim.data()), 8);
  if (in.gcount() != 8) fail(ErrorKind::invalid_argument, "cache file truncated in header");
  const std::uint64_t limit = detail::get_le(lim.data(), 8);
  if (limit < 2 || limit > kMaxTableLimit) fail(ErrorKind::invalid_argument, "cache file limit out of range");

  const std::uint64_t payload = (limit - 1) * 4;
  std::vector<unsigned char> raw(payload);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(payload));
  if (static_cast<std::uint64_t>(in.gcount()) != payload) {
    fail(ErrorKind::invalid_argument, "cache file " + path.string() + " has a truncated payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    fail(ErrorKind::invalid_argument, "cache file " + path.string() + " has trailing bytes");
  }
  std::vector<std::uint32_t> spf(limit + 1, 0);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    spf[n] = static_cast<std::uint32_t>(detail::get_le(raw.data() + 4 * (n - 2), 4));
  }
  return FactorTable::from_spf(limit, std::move(spf));
}

enum class CacheStatus { built, loaded, rebuilt_corrupt, rebuilt_too_small, uncached };

inline const char* to_string(CacheStatus status) {
  switch (status) {
    case CacheStatus::built: return "built";
    case CacheStatus::loaded: return "loaded";
    case CacheStatus::rebuilt_corrupt: return "rebuilt-corrupt";
    case CacheStatus::rebuilt_too_small: return "rebuilt-too-small";
    case CacheStatus::uncached: return "uncached";
  }
  return "unknown";
}

struct CachedTable {
  FactorTable table;
  CacheStatus status = CacheStatus::uncached;
  std::filesystem::path path;
};

// Resolves the cache directory: explicit argument, then the environment
// override, then none.
inline std::optional<std::filesystem::path> resolve_cache_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return std::filesystem::path(explicit_dir);
  if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

// Loads a cached table covering `limit`, or builds one and writes it back.
// A cached table with a larger limit is reused as is.
inline CachedTable cache_management(const std::optional<std::filesystem::path>& dir, std::uint64_t limit,
                                    const SieveOptions& options = {}, std::ostream* warn = &std::cerr) {
  CachedTable out;
  if (!dir) {
    out.table = FactorTable::build(limit, options);
    out.status = CacheStatus::uncached;
    return out;
  }
  std::filesystem::create_directories(*dir);
  out.path = *dir / kCacheFileName;
  CacheStatus rebuild_status = CacheStatus::built;
  if (std::filesystem::exists(out.path)) {
    try {
      auto cached = load_factor_table(out.path);
      if (cached.limit() >= limit) {
        out.table = std::move(cached);
        out.status = CacheStatus::loaded;
        return out;
      }
      rebuild_status = CacheStatus::rebuilt_too_small;
    } catch (const Error& e) {
      if (warn != nullptr) *warn << "warning: " << e.what() << "; rebuilding factor table cache\n";
      rebuild_status = CacheStatus::rebuilt_corrupt;
    }
  }
  out.table = FactorTable::build(limit, options);
  save_factor_table(out.table, out.path);
  out.status = rebuild_status;
  return out;
}

}  // namespace shiftconc
