#include "run_context.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <unistd.h>

#include "mvsg/error.hpp"

namespace mvsg::cli {

namespace fs = std::filesystem;

std::uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "' for checksum");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RunContext::RunContext(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {
  manifest_["format"] = "mvsg-manifest";
  manifest_["version"] = 1;
  manifest_["command"] = command_;
  manifest_["config"] = nlohmann::ordered_json::object();
  manifest_["rng_seeds"] = nlohmann::ordered_json::object();
  manifest_["timings"] = nlohmann::ordered_json::object();
}

RunContext::~RunContext() {
  if (done_) return;
  std::error_code ec;
  for (auto& s : staged_) {
    s->stream.close();
    fs::remove(s->temp, ec);
  }
  for (const auto& p : committed_) fs::remove(p, ec);
}

std::ofstream& RunContext::open(const fs::path& target) {
  auto s = std::make_unique<Staged>();
  s->target = target;
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path dir = target.has_parent_path() ? target.parent_path() : fs::current_path();
  if (const char* tmp = std::getenv("MVSG_TMPDIR"); tmp && *tmp) {
    dir = tmp;
    fs::create_directories(dir);
  }
  std::ostringstream name;
  name << ".mvsg-" << ::getpid() << '-' << staged_.size() << '-' << target.filename().string() << ".part";
  s->temp = dir / name.str();
  s->stream.open(s->temp, std::ios::binary | std::ios::trunc);
  if (!s->stream) throw InputError("cannot write '" + target.string() + "'");
  staged_.push_back(std::move(s));
  return staged_.back()->stream;
}

void RunContext::add_input(const fs::path& path) { inputs_.push_back(path); }

void RunContext::commit(const fs::path& manifest_path) {
  for (auto& s : staged_) {
    s->stream.flush();
    if (!s->stream) throw std::runtime_error("write failed for '" + s->target.string() + "'");
    s->stream.close();
  }
  for (auto& s : staged_) {
    std::error_code ec;
    fs::rename(s->temp, s->target, ec);
    if (ec) {
      // staging dir on another filesystem
      fs::copy_file(s->temp, s->target, fs::copy_options::overwrite_existing);
      fs::remove(s->temp);
    }
    committed_.push_back(s->target);
  }

  auto inputs = nlohmann::ordered_json::array();
  for (const auto& p : inputs_) {
    inputs.push_back({{"path", p.string()}, {"fnv1a64", hex64(fnv1a64_file(p))}});
  }
  auto outputs = nlohmann::ordered_json::array();
  for (const auto& s : staged_) {
    outputs.push_back({{"path", s->target.string()}, {"fnv1a64", hex64(fnv1a64_file(s->target))}});
  }
  manifest_["inputs"] = std::move(inputs);
  manifest_["outputs"] = std::move(outputs);
  manifest_["timings"]["total_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();

  if (manifest_path.has_parent_path()) fs::create_directories(manifest_path.parent_path());
  const fs::path tmp = manifest_path.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << manifest_.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest '" + manifest_path.string() + "'");
  }
  fs::rename(tmp, manifest_path);
  done_ = true;
}

}  // namespace mvsg::cli
