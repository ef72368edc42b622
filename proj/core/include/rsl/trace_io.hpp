#pragma once

#include <string>

#include "rsl/flow.hpp"

namespace rsl {

/// trace.csv: t,lambda,l2_dist,sup_dist,ref_index  (%.17g, LF endings;
/// byte-reproducible for identical configs and seeds on the same build)
void write_trace_csv(const std::string& path, const FlowTrace& trace);

/// invariants.csv: t,lambda,vol,ricci_l2,scalar_l2 (diffeomorphism-invariant
/// columns used by run comparison)
void write_invariants_csv(const std::string& path, const FlowTrace& trace);

/// JSON-shaped run summary: completion, failure info, fitted rate, reference
/// update log.
std::string trace_summary_json(const FlowTrace& trace, const FlowConfig& cfg);

}  // namespace rsl
