#pragma once

#include <string>

#include <json.hpp>

#include "stickylab/coupling.hpp"
#include "stickylab/stats.hpp"
#include "stickylab/time_change.hpp"

namespace stickylab {

/// All emitted JSON uses ordered_json with fields inserted in a fixed code
/// order, so serialized reports are byte-stable.
using json = nlohmann::ordered_json;

json to_json(const MCEstimate& e);
json to_json(const KSResult& r);
json to_json(const ExperimentReport& rep);

/// 17 significant digits: round-trips every double exactly.
std::string format_g17(double x);

std::string csv_sample_path(const SamplePath& path);    // header t,x
std::string csv_coupled_path(const CoupledPath& path);  // header t,x,y,z

void write_text_file(const std::string& path, const std::string& content);

/// Writes `<path>.manifest.json` describing how to regenerate `path`.
void write_manifest(const std::string& path, const json& params);

}  // namespace stickylab
