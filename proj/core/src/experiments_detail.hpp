#pragma once

#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mmtree/experiments.hpp"
#include "mmtree/rng.hpp"

namespace mmtree::detail {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions are
/// rethrown (the first one by index order is not guaranteed).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Shortest round-trip decimal form.
std::string fmt(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  std::ostringstream out_;
};

double median(std::vector<double> v);

/// Standard normal for "normal", Student t(dof) for "t<dof>".
struct NoiseLaw {
  bool student = false;
  double dof = 0.0;
  double draw(Stream& s) const { return student ? s.student_t(dof) : s.normal(); }
};
NoiseLaw parse_noise(const std::string& name);

std::vector<std::string> write_ecp(const EcpResult& r, const std::filesystem::path& dir);
std::vector<std::string> write_leaf_size(const LeafSizeResult& r, const std::filesystem::path& dir);
std::vector<std::string> write_sine(const SineResult& r, const std::filesystem::path& dir);
std::vector<std::string> write_asbp(const AsbpResult& r, const std::filesystem::path& dir);
std::vector<std::string> write_denoise(const DenoiseResult& r, const DenoiseConfig& cfg,
                                       const std::filesystem::path& dir);
std::vector<std::string> write_powell(const PowellResult& r, const std::filesystem::path& dir);
std::vector<std::string> write_timeseries(const TimeseriesResult& r, const std::filesystem::path& dir);
std::vector<std::string> write_martingale(const MartingaleResult& r, const std::filesystem::path& dir);

}  // namespace mmtree::detail
