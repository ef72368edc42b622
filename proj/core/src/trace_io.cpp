#include "rsl/trace_io.hpp"

#include <cstdio>
#include <memory>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace rsl {

namespace {
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "w"));
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}
}  // namespace

void write_trace_csv(const std::string& path, const FlowTrace& trace) {
  FilePtr f = open_or_throw(path);
  std::fprintf(f.get(), "t,lambda,l2_dist,sup_dist,ref_index\n");
  for (const auto& s : trace.samples)
    std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%d\n", s.t, s.lambda,
                 s.l2_dist, s.sup_dist, s.ref_index);
}

void write_invariants_csv(const std::string& path, const FlowTrace& trace) {
  FilePtr f = open_or_throw(path);
  std::fprintf(f.get(), "t,lambda,vol,ricci_l2,scalar_l2\n");
  for (const auto& s : trace.samples)
    std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.lambda,
                 s.vol, s.ricci_l2, s.scalar_l2);
}

std::string trace_summary_json(const FlowTrace& trace, const FlowConfig& cfg) {
  nlohmann::ordered_json j;
  j["flow"] = to_string(cfg.kind);
  j["dt_safety"] = cfg.dt_safety;
  j["t_end"] = cfg.t_end;
  j["reference_updates"] = cfg.reference_updates;
  j["reference_update_period"] = cfg.reference_update_period;
  j["completed"] = trace.completed;
  j["final_time"] = trace.final_time;
  if (!trace.failure_reason.empty()) {
    j["failure_reason"] = trace.failure_reason;
    j["failure_time"] = trace.failure_time;
  }
  j["samples"] = trace.samples.size();
  nlohmann::ordered_json refs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < trace.reference_times.size(); ++i)
    refs.push_back({{"index", i + 1}, {"t", trace.reference_times[i]}});
  j["reference_updates_log"] = refs;
  if (trace.fitted_decay_rate) {
    j["fitted_decay_rate"] = *trace.fitted_decay_rate;
    j["fit_residual"] = trace.fit_residual;
  }
  return j.dump(2);
}

}  // namespace rsl
