#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "semcse/checkpoint.hpp"
#include "semcse/error.hpp"

namespace semcse {

inline constexpr const char* kArtifactVersion = "semcse-0.1.0";

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Record of one command invocation. The config holds every option after
/// defaults are applied, so rerunning from it reproduces the outputs.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::string started_at = utc_timestamp();
  std::string finished_at;

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["artifact_version"] = kArtifactVersion;
    j["checkpoint_format_version"] = kCheckpointVersion;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    return j;
  }

  /// Stamps the finish time and writes the manifest.
  void write(const std::string& path) {
    finished_at = utc_timestamp();
    std::ofstream out(path);
    if (!out) {
      throw Error("cannot write manifest " + path);
    }
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace semcse
