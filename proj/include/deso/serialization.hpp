#pragma once

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "deso/data_pipeline.hpp"
#include "deso/observer_runtime.hpp"
#include "deso/synthesis.hpp"
#include "deso/validation.hpp"

namespace deso {

using Json = nlohmann::json;

Json mat_to_json(const Mat& M);
Mat mat_from_json(const Json& j, const std::string& name);

/// {"E": [[...]], "A": ..., "B": ..., "C": ..., "F": optional}
Json system_to_json(const DescriptorSystem& sys);
DescriptorSystem system_from_json(const Json& j);

/// {"A0": ..., "B0": ..., "E0": ..., "C0": ..., "F0": ...}
Json lti_to_json(const LtiSystem& lti);
LtiSystem lti_from_json(const Json& j);

Json gains_to_json(const ObserverGains& g);
ObserverGains gains_from_json(const Json& j);

/// Report JSON: feasibility, residuals, radius, K1 norm, named checks, plus
/// the gain matrices when synthesis succeeded.
Json report_to_json(const SynthesisResult& result);

Json summary_to_json(const MonteCarloSummary& summary);

/// Dataset CSV, one time step per row:
/// k,u_0..,eta_0..(when present),y_0..,x_0..; y/x cells empty past k = T.
void write_dataset_csv(std::ostream& os, const DataRecord& rec);
DataRecord read_dataset_csv(std::istream& is);

/// Estimation-run CSV: k, truth columns, estimate columns, error norm and the
/// per-step autonomy residual (empty where undefined).
void write_run_csv(std::ostream& os, const EstimationRun& run, const Mat& x_truth);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace deso
