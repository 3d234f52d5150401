// Per-run bookkeeping for the sbk tool: output directory, manifest, exit codes.
#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <thread>

#include <CLI11.hpp>
#include <boost/version.hpp>

#include <sbk/io.hpp>

namespace tool {

using sbk::io::json;
namespace fs = std::filesystem;

inline constexpr const char* version = "1.0.0";

// exit statuses; library errors use sbk::Error::code() (10..17)
enum Exit : int { ok = 0, usage = 2, malformed = 3, residual = 4 };

// a check performed by the tool itself failed
struct ResidualFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Job {
  std::string command;
  fs::path dir = ".";
  int threads = 1;
  unsigned seed = 1;
  json parameters = json::object();
  json residuals = json::object();
  json conventions = json::object();
  std::vector<std::string> outputs;

  fs::path path(const std::string& name) const { return dir / name; }

  void text(const std::string& name, const std::string& body) {
    sbk::io::write_atomic(path(name), body);
    outputs.push_back(name);
  }
  void write(const std::string& name, const json& j) { text(name, j.dump(1) + "\n"); }

  // record a residual and fail the run when it exceeds its bound
  void check(const std::string& name, double value, double bound) {
    residuals[name] = {{"value", value}, {"bound", bound}};
    if (!(value <= bound))
      throw ResidualFailure(name + " = " + sbk::io::num(value) + " exceeds " + sbk::io::num(bound));
  }

  void manifest(const std::string& status, const std::string& message = "") const {
    json m;
    m["command"] = command;
    m["parameters"] = parameters;
    m["seed"] = seed;
    m["residuals"] = residuals;
    m["conventions"] = conventions;
    m["outputs"] = outputs;
    m["status"] = status;
    if (!message.empty()) m["message"] = message;
    m["versions"] = {
        {"sbk", version},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"cli11", CLI11_VERSION}};
    sbk::io::write_json(path("manifest.json"), m);
  }
};

// runs fn(0..count-1) on up to `threads` workers; results land by index
template <class R>
std::vector<R> parallel_map(std::size_t count, int threads, const std::function<R(std::size_t)>& fn) {
  std::vector<R> out(count);
  std::vector<std::exception_ptr> err(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const std::size_t w = std::min<std::size_t>(count, std::size_t(std::max(1, threads)));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < w; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  // the first failure in index order wins, so the reported error is deterministic
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

inline sbk::Vec2 pair_of(const std::vector<double>& v, const char* what) {
  if (v.size() != 2) throw CLI::ValidationError(what, "expects two comma-separated numbers");
  return {v[0], v[1]};
}

}  // namespace tool
