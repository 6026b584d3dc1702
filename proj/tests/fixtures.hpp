#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "barsample/score.hpp"

namespace barsample::test {

// Wraps measure markup in a minimal MEI document with a two-staff header.
inline std::string mei(const std::string& measures) {
  return R"(<?xml version="1.0"?>
<mei xmlns="http://www.music-encoding.org/ns/mei"><meiHead/><music><body><mdiv><score>
<scoreDef meter.count="3" meter.unit="4" key.sig="2f"><staffGrp>
<staffDef n="1" clef.shape="G" clef.line="2"/><staffDef n="2" clef.shape="F" clef.line="4"/>
</staffGrp></scoreDef><section>)" +
         measures + "</section></score></mdiv></body></music></mei>";
}

inline std::string one_staff_measure(std::int64_t n, const std::string& layer) {
  return "<measure n=\"" + std::to_string(n) + "\"><staff n=\"1\"><layer n=\"1\">" + layer +
         "</layer></staff></measure>";
}

inline MeasureCensus census_of(const std::vector<std::int64_t>& counts, MeasureNumber first = 1) {
  MeasureCensus c;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    c.counts[first + static_cast<MeasureNumber>(i)] = counts[i];
    c.total += counts[i];
  }
  return c;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("barsample-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace barsample::test
