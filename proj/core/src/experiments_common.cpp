#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "experiments_detail.hpp"
#include "mmtree/error.hpp"
#include "mmtree/io.hpp"

namespace mmtree {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EcpConfig, n, replicates, noises, methods, threshold)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LeafSizeConfig, n, sigmas, methods, max_depth, min_leaf,
                                                replicates)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SineConfig, ps, methods, n, max_depth, replicates, sigma,
                                                fit_depths, test_n)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AsbpConfig, n, d, max_depth, methods, replicates, test_n,
                                                forest_trees, bootstrap)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DenoiseConfig, input, phantom_size, sigma, methods, m_try,
                                                n_trees, max_depth, single_trees, bootstrap, write_images)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PowellConfig, ns, ds, methods, max_depth, test_n, sigma)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TimeseriesConfig, input, time_column, value_column, holdout,
                                                downsample, depths, methods, min_leaf)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MartingaleConfig, density, atoms, grid, max_depth, rules)

std::string_view library_version() { return "0.1.0"; }

namespace detail {

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  std::size_t workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

NoiseLaw parse_noise(const std::string& name) {
  if (name == "normal") return {};
  if (name.size() > 1 && name[0] == 't') {
    double dof = 0.0;
    const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), dof);
    if (ec == std::errc() && ptr == name.data() + name.size() && dof > 0.0) return {true, dof};
  }
  throw ConfigError("unknown noise law '" + name + "' (expected normal or t<dof>)");
}

}  // namespace detail

namespace {

using nlohmann::json;

template <typename Config>
Config parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  const json defaults = Config{};
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    return j.get<Config>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& dir, const std::string& name, const json& config,
                    const RunOptions& opt, std::vector<std::string> files,
                    const std::vector<std::string>& warnings) {
  files.push_back("manifest.json");
  json m{{"experiment", name},
         {"seed", opt.seed},
         {"library", "mmtree"},
         {"version", std::string(library_version())},
         {"config", config},
         {"files", files},
         {"warnings", warnings}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

template <typename Config, typename Run, typename Write>
std::vector<std::string> run_with(const std::string& name, const json& j, const RunOptions& opt,
                                  const std::filesystem::path& dir, Run run, Write write) {
  const Config cfg = parse_config<Config>(j);
  const auto result = run(cfg, opt);
  std::filesystem::create_directories(dir);
  auto files = write(result, cfg, dir);
  std::vector<std::string> warnings;
  if constexpr (requires { result.warnings; }) warnings = result.warnings;
  write_manifest(dir, name, json(cfg), opt, files, warnings);
  files.push_back("manifest.json");
  return files;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"ecp",    "leafsize",   "sine",      "asbp",
                                              "denoise", "powell", "timeseries", "martingale"};
  return names;
}

std::vector<std::string> run_experiment(const std::string& name, const std::string& config_json,
                                        const RunOptions& opt, const std::filesystem::path& out_dir) {
  json j;
  try {
    j = config_json.empty() ? json::object() : json::parse(config_json);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  using namespace detail;
  if (name == "ecp") {
    return run_with<EcpConfig>(name, j, opt, out_dir, run_ecp,
                               [](const auto& r, const auto&, const auto& d) { return write_ecp(r, d); });
  }
  if (name == "leafsize") {
    return run_with<LeafSizeConfig>(name, j, opt, out_dir, run_leaf_size, [](const auto& r, const auto&, const auto& d) {
      return write_leaf_size(r, d);
    });
  }
  if (name == "sine") {
    return run_with<SineConfig>(name, j, opt, out_dir, run_sine,
                                [](const auto& r, const auto&, const auto& d) { return write_sine(r, d); });
  }
  if (name == "asbp") {
    return run_with<AsbpConfig>(name, j, opt, out_dir, run_asbp,
                                [](const auto& r, const auto&, const auto& d) { return write_asbp(r, d); });
  }
  if (name == "denoise") {
    return run_with<DenoiseConfig>(name, j, opt, out_dir, run_denoise,
                                   [](const auto& r, const auto& c, const auto& d) { return write_denoise(r, c, d); });
  }
  if (name == "powell") {
    return run_with<PowellConfig>(name, j, opt, out_dir, run_powell,
                                  [](const auto& r, const auto&, const auto& d) { return write_powell(r, d); });
  }
  if (name == "timeseries") {
    return run_with<TimeseriesConfig>(name, j, opt, out_dir, run_timeseries, [](const auto& r, const auto&, const auto& d) {
      return write_timeseries(r, d);
    });
  }
  if (name == "martingale") {
    return run_with<MartingaleConfig>(name, j, opt, out_dir, run_martingale, [](const auto& r, const auto&, const auto& d) {
      return write_martingale(r, d);
    });
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace mmtree
