#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "windgame/ingest.hpp"

namespace test_support {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("windgame_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
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
  std::filesystem::path write(const std::string& name, const std::string& body) const {
    const auto file = path_ / name;
    std::ofstream(file, std::ios::binary) << body;
    return file;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path source_dir() { return WINDGAME_SOURCE_DIR; }

inline windgame::Timestamp hour(int h) {
  using namespace std::chrono;
  return sys_days{year{2014} / January / 1} + hours{h};
}

// Correlated wind pairs on a 0.1 m/s lattice with demand loosely tied to wind.
inline windgame::JointSeries correlated_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  windgame::JointSeries out;
  for (std::size_t i = 0; i < n; ++i) {
    const double common = normal(gen);
    const double a = 0.8 * common + 0.6 * normal(gen);
    const double b = 0.8 * common + 0.6 * normal(gen);
    const double w1 = std::round(std::clamp(9.0 + 3.5 * a, 0.0, 29.9) * 10.0) / 10.0;
    const double w2 = std::round(std::clamp(8.0 + 3.0 * b, 0.0, 29.9) * 10.0) / 10.0;
    const double d = std::round(std::clamp(100.0 + 15.0 * normal(gen) - 1.5 * (w1 - 9.0), 1.0, 199.0));
    out.records.push_back({hour(static_cast<int>(i)), w1, w2, d});
  }
  return out;
}

}  // namespace test_support
