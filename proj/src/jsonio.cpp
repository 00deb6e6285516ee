#include "sbn/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbn {

json to_json(const Network& net) {
    json out;
    out["d"] = net.d;
    out["layers"] = json::array();
    for (const auto& L : net.layers) {
        json jl;
        jl["W"] = L.W;
        jl["b"] = L.b;
        out["layers"].push_back(std::move(jl));
    }
    return out;
}

json to_json(const Kernel& k) {
    json out;
    out["d"] = k.d;
    out["s"] = k.s;
    out["rows"] = k.rows;
    return out;
}

json to_json(const ArchPlan& p) {
    json out;
    out["d"] = p.d;
    out["s"] = p.s;
    out["j"] = p.j;
    if (p.b > 0) {
        out["b"] = p.b;
        out["depth_overlaid"] = p.depth_overlaid;
    }
    out["depth_simplified"] = p.depth_simplified;
    out["width"] = p.width;
    out["unit_count"] = p.unit_count;
    out["trainable_params"] = p.trainable_params;
    out["full_params"] = p.full_params;
    out["shallow_fixed_width"] = p.shallow_fixed_width;
    out["shallow_trainable_width"] = p.shallow_trainable_width;
    return out;
}

json to_json(const ValidationReport& r) {
    json out;
    out["ok"] = r.ok;
    out["rules"] = json::array();
    for (const auto& rule : r.rules) {
        json jr;
        jr["id"] = rule.id;
        jr["flagged"] = rule.flagged;
        if (rule.flagged) jr["detail"] = rule.detail;
        out["rules"].push_back(std::move(jr));
    }
    return out;
}

json to_json(const std::vector<ExperimentRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json jr;
        jr["eps"] = r.eps;
        jr["alpha"] = r.alpha;
        jr["bound"] = r.bound;
        jr["e_avg"] = r.e_avg;
        jr["e_max"] = r.e_max;
        jr["mode"] = r.mode;
        jr["trials"] = r.trials;
        jr["samples_per_input"] = r.samples_per_input;
        out.push_back(std::move(jr));
    }
    return out;
}

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error("malformed input: " + what);
}

std::vector<double> number_row(const json& j, const std::string& what) {
    require(j.is_array(), what + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        require(v.is_number(), what + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

Network network_from_json(const json& j) {
    require(j.is_object() && j.contains("d") && j.contains("layers"), "network needs d and layers");
    require(j["d"].is_number_integer(), "network d must be an integer");
    Network net;
    net.d = j["d"].get<int>();
    require(j["layers"].is_array() && !j["layers"].empty(), "network needs at least one layer");
    for (const auto& jl : j["layers"]) {
        require(jl.is_object() && jl.contains("W") && jl.contains("b"), "layer needs W and b");
        Layer L;
        require(jl["W"].is_array(), "layer W must be an array");
        for (const auto& row : jl["W"]) L.W.push_back(number_row(row, "layer W row"));
        L.b = number_row(jl["b"], "layer b");
        net.layers.push_back(std::move(L));
    }
    check_network(net);
    return net;
}

Kernel kernel_from_json(const json& j) {
    require(j.is_object() && j.contains("d") && j.contains("s") && j.contains("rows"),
            "kernel needs d, s and rows");
    require(j["d"].is_number_integer() && j["s"].is_number_integer(),
            "kernel d and s must be integers");
    Kernel k;
    k.d = j["d"].get<int>();
    k.s = j["s"].get<int>();
    require(j["rows"].is_array(), "kernel rows must be an array");
    for (const auto& row : j["rows"]) k.rows.push_back(number_row(row, "kernel row"));
    check_kernel(k);
    return k;
}

namespace {

void dump_rec(const json& j, std::string& out, int indent) {
    const std::string pad(indent, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            out += pad + "  \"" + it.key() + "\": ";
            dump_rec(it.value(), out, indent + 2);
            if (i + 1 < j.size()) out += ",";
            out += "\n";
        }
        out += pad + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // keep rows of scalars on one line
        bool flat = true;
        for (const auto& v : j)
            if (v.is_structured()) flat = false;
        out += "[";
        if (!flat) out += "\n";
        std::size_t i = 0;
        for (const auto& v : j) {
            if (!flat) out += pad + "  ";
            dump_rec(v, out, indent + 2);
            if (i + 1 < j.size()) out += flat ? ", " : ",";
            if (!flat) out += "\n";
            ++i;
        }
        if (!flat) out += pad;
        out += "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (std::isfinite(v)) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
        } else {
            out += "null";
        }
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

} // namespace

std::string dump_json17(const json& j) {
    std::string out;
    dump_rec(j, out, 0);
    out += "\n";
    return out;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << dump_json17(j);
    if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace sbn
