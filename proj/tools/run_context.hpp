#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mvsg::cli {

std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

// Outputs are written to staging files (under MVSG_TMPDIR when set, else next
// to the target) and moved into place by commit(). Anything not committed is
// deleted when the context dies, so a failed run leaves no partial files.
class RunContext {
 public:
  explicit RunContext(std::string command);
  ~RunContext();
  RunContext(const RunContext&) = delete;
  RunContext& operator=(const RunContext&) = delete;

  // Opens a staging stream for `target`; the returned reference stays valid
  // until commit().
  std::ofstream& open(const std::filesystem::path& target);
  void add_input(const std::filesystem::path& path);

  nlohmann::ordered_json& config() { return manifest_["config"]; }
  nlohmann::ordered_json& seeds() { return manifest_["rng_seeds"]; }
  void timing(const std::string& name, double seconds) { manifest_["timings"][name] = seconds; }

  // Closes streams, moves staged files to their targets, then writes the
  // manifest (checksums of inputs and outputs included) at `manifest_path`.
  void commit(const std::filesystem::path& manifest_path);

 private:
  struct Staged {
    std::filesystem::path target;
    std::filesystem::path temp;
    std::ofstream stream;
  };
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  nlohmann::ordered_json manifest_;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::unique_ptr<Staged>> staged_;
  std::vector<std::filesystem::path> committed_;
  bool done_ = false;
};

}  // namespace mvsg::cli
