#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "awia/errors.hpp"

namespace awia::io {

// Text sidecar describing a run: config fingerprint, seeds, telemetry, and
// the snapshot index (time -> file). Written atomically so a crash never
// leaves a half-written manifest.
struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string version = "awia 0.1";
  std::uint64_t base_seed = 0;
  long step_count = 0;
  long wall_ms = 0;
  struct Entry {
    double time = 0.0;  // s
    std::string file;
  };
  std::vector<Entry> snapshots;
  std::string checkpoint_file;  // last checkpoint, empty if none
  long checkpoint_step = 0;
};

inline void write_manifest(const std::string& path, const RunManifest& m) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + tmp);
    out.precision(17);
    out << "version = " << m.version << "\n";
    out << "config_hash = " << m.config_hash << "\n";
    out << "base_seed = " << m.base_seed << "\n";
    out << "step_count = " << m.step_count << "\n";
    out << "wall_ms = " << m.wall_ms << "\n";
    if (!m.checkpoint_file.empty()) {
      out << "checkpoint = " << m.checkpoint_step << " " << m.checkpoint_file
          << "\n";
    }
    for (const auto& e : m.snapshots)
      out << "snapshot = " << e.time << " " << e.file << "\n";
    if (!out) throw IoError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

inline RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  RunManifest m;
  m.version.clear();
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::istringstream val(line.substr(eq + 1));
    if (key == "version") {
      std::getline(val, m.version);
      if (!m.version.empty() && m.version.front() == ' ')
        m.version.erase(0, 1);
    } else if (key == "config_hash") {
      val >> m.config_hash;
    } else if (key == "base_seed") {
      val >> m.base_seed;
    } else if (key == "step_count") {
      val >> m.step_count;
    } else if (key == "wall_ms") {
      val >> m.wall_ms;
    } else if (key == "checkpoint") {
      val >> m.checkpoint_step >> m.checkpoint_file;
    } else if (key == "snapshot") {
      RunManifest::Entry e;
      val >> e.time >> e.file;
      if (!val) throw IoError("malformed snapshot entry in " + path);
      m.snapshots.push_back(e);
    }
  }
  if (m.version.empty()) throw IoError("not a run manifest: " + path);
  return m;
}

}  // namespace awia::io
