#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bciarm/eeg/signal.hpp"

namespace support {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("bciarm-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

// n samples at `rate` Hz with every channel at `value`.
inline std::vector<bciarm::eeg::EegSample> flat_samples(std::size_t n, double rate = bciarm::eeg::kSampleRate,
                                                        double value = 0.0) {
  std::vector<bciarm::eeg::EegSample> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i].t = static_cast<double>(i) / rate;
    s[i].ch.fill(value);
  }
  return s;
}

}  // namespace support
