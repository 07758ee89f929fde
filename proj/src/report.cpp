#include "stickylab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stickylab {

json to_json(const MCEstimate& e) {
    json j;
    j["n"] = e.n;
    j["mean"] = e.mean;
    j["variance"] = e.variance;
    j["se"] = e.se;
    j["ci_half_width"] = e.ci_half_width;
    return j;
}

json to_json(const KSResult& r) {
    json j;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["n1"] = r.n1;
    j["n2"] = r.n2;
    return j;
}

json to_json(const ExperimentReport& rep) {
    json j;
    j["trials"] = rep.trials;
    json counts;
    for (const auto& [k, v] : rep.event_counts) counts[k] = v;
    j["event_counts"] = counts;
    json est;
    for (const auto& [k, v] : rep.estimates) est[k] = to_json(v);
    j["estimates"] = est;
    json params;
    for (const auto& [k, v] : rep.parameters) params[k] = v;
    j["parameters"] = params;
    j["notes"] = rep.notes;
    return j;
}

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_sample_path(const SamplePath& path) {
    std::string out = "t,x\n";
    for (std::size_t j = 0; j < path.grid.size(); ++j)
        out += format_g17(path.grid[j]) + "," + format_g17(path.values[j]) + "\n";
    return out;
}

std::string csv_coupled_path(const CoupledPath& path) {
    std::string out = "t,x,y,z\n";
    for (std::size_t j = 0; j < path.grid.size(); ++j)
        out += format_g17(path.grid[j]) + "," + format_g17(path.x_values[j]) + "," +
               format_g17(path.y_values[j]) + "," + format_g17(path.z_values[j]) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("short write: " + path);
}

void write_manifest(const std::string& path, const json& params) {
    write_text_file(path + ".manifest.json", params.dump(2) + "\n");
}

}  // namespace stickylab
