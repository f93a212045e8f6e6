#pragma once

#include "multisync/criteria.hpp"
#include "multisync/sim.hpp"
#include "multisync/system.hpp"
#include "multisync/ximax.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace multisync::io {

using nlohmann::json;

/// All floating-point output is printed with 12 significant digits; these
/// helpers round through that representation so emitted JSON matches.
std::string format12(double v);
double round12(double v);

json load_json_file(const std::filesystem::path& path);

RealMatrix matrix_from_json(const json& j, const std::string& what);
json matrix_to_json(const RealMatrix& m);

/// Graph JSON: {"n": int, "weights": [[...]]} or {"n": int, "laplacian": [[...]]}.
WeightedDigraph digraph_from_json(const json& j);
LaplacianMatrix laplacian_from_json(const json& j);

/// System JSON: layers as "graphs" (file paths, resolved against base_dir)
/// or inline "laplacians"; "D" inner couplings; "dynamics" descriptor;
/// optional "c", "V", "P", "xi".
struct SystemSpec {
    MultiNetworkSystem system;
    NodeDynamics dynamics;
    std::optional<double> xi;
};
SystemSpec system_from_json(const json& j, const std::filesystem::path& base_dir);

json verdict_to_json(const SyncVerdict& v);
json ximax_to_json(const XiMaxResult& r);
json report_to_json(const SyncReport& r);
json certificate_to_json(const FeasibilityCertificate& c);

/// Trace CSV rows: t,node,component,value ('.' decimal, 12 significant digits).
std::string trace_to_csv(const TrajectoryTrace& trace);

/// Region CSV rows: re,im,phi (plus re2,im2 columns when a second layer is present).
std::string region_to_csv(const StabilityRegion& region, bool two_layers);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace multisync::io
