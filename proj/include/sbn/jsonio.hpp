#pragma once

#include <string>

#include <json.hpp>

#include "sbn/construct.hpp"
#include "sbn/experiment.hpp"
#include "sbn/net.hpp"

// JSON interchange. Networks: {"d": d, "layers": [{"W": [[...]], "b": [...]}]}.
// Kernels: {"d": d, "s": s, "rows": [[...]]}. Serialization uses %.17g for
// doubles so emitted files round-trip exactly and runs are byte-identical.

namespace sbn {

using json = nlohmann::ordered_json;

json to_json(const Network& net);
json to_json(const Kernel& k);
json to_json(const ArchPlan& p);
json to_json(const ValidationReport& r);
json to_json(const std::vector<ExperimentRow>& rows);

Network network_from_json(const json& j);
Kernel kernel_from_json(const json& j);

// 2-space indented text with %.17g doubles and a trailing newline.
std::string dump_json17(const json& j);

json load_json_file(const std::string& path);       // throws std::runtime_error
void save_json_file(const std::string& path, const json& j);

} // namespace sbn
