#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rifs/errors.hpp"

namespace rifs {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kPrngScheme = "splitmix64-v1";

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(reinterpret_cast<const unsigned char*>(s.data()), s.size());
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw err_bad_file("cannot read " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

/*
 * Every CLI run emits one of these, either as manifest.json next to the
 * requested outputs or on stderr when no output directory was given.  The
 * digests make reruns comparable without byte-diffing large files; the
 * timestamps are informational and excluded from any equality contract.
 */
struct RunManifest {
  std::string command;            // subcommand, e.g. "census brute"
  std::vector<std::string> args;  // argv as invoked
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string started_at, finished_at;

  struct Output {
    std::string path;  // relative to the output directory
    std::uint64_t bytes = 0;
    std::string fnv1a64;  // 16 hex digits
  };
  std::vector<Output> outputs;
  std::map<std::string, std::string> input_hashes;  // label -> fnv1a64 hex of input file

  void add_input(const std::string& label, const std::string& path) {
    input_hashes[label] = hex64(fnv1a64_file(path));
  }

  void add_output(const std::string& dir, const std::string& name) {
    std::string full = dir.empty() ? name : dir + "/" + name;
    std::ifstream in(full, std::ios::binary | std::ios::ate);
    if (!in) throw err_bad_file("cannot stat output " + full);
    auto bytes = static_cast<std::uint64_t>(in.tellg());
    in.close();
    outputs.push_back(Output{name, bytes, hex64(fnv1a64_file(full))});
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool"] = "rifs";
    j["version"] = kToolVersion;
    j["prng"] = kPrngScheme;
    j["command"] = command;
    j["args"] = args;
    j["seed"] = seed;
    j["threads"] = threads;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs)
      j["outputs"].push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a64}});
    j["inputs"] = nlohmann::json::object();
    for (const auto& [label, digest] : input_hashes) j["inputs"][label] = digest;
    return j;
  }

  void write(std::ostream& out) const { out << to_json().dump(2) << "\n"; }

  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw err_bad_file("cannot write " + path);
    write(out);
  }
};

}  // namespace rifs
