#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <unistd.h>

#include "tactile/tactile.hpp"

namespace testutil {

inline tactile::Recording make_recording(std::size_t n, double fs, const std::function<double(std::size_t, double)>& f) {
  tactile::Recording rec;
  rec.sample_rate = fs;
  rec.samples.resize(n);
  rec.load_trace.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < tactile::kAxes; ++a) rec.samples[i][a] = f(a, static_cast<double>(i) / fs);
  rec.meta.material = "plastic";
  rec.meta.participant = "P01";
  rec.meta.trial_id = "P01-plastic-60rpm-0.98N";
  return rec;
}

inline std::vector<double> sine(std::size_t n, double freq, double fs, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs + phase);
  return x;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  tactile::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tactile-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& leaf) const { return (path_ / leaf).string(); }

 private:
  std::filesystem::path path_;
};

// Small synthetic corpus shared by protocol-level tests.
inline std::vector<tactile::Recording> small_corpus(std::size_t participants, bool hard = false, std::uint64_t seed = 7) {
  tactile::CorpusPlan plan;
  plan.participants = participants;
  plan.materials = tactile::default_material_bank(hard);
  plan.seed = seed;
  return tactile::recordings_of(tactile::generate_corpus(plan));
}

}  // namespace testutil
