#include "quaymaint/weights_io.hpp"

#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>

namespace quaymaint::nn {

using nlohmann::json;

std::string weights_to_json(std::span<const Parameter* const> params) {
    json j;
    j["format"] = "quaymaint-weights";
    j["version"] = 1;
    j["parameters"] = json::array();
    for (const Parameter* p : params) {
        j["parameters"].push_back(
            {{"name", p->name}, {"shape", p->value.shape}, {"values", p->value.v}});
    }
    return j.dump();
}

void weights_from_json(const std::string& text, std::span<Parameter* const> params) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("weights file: ") + e.what());
    }
    if (j.value("format", "") != "quaymaint-weights" || j.value("version", 0) != 1) {
        throw std::invalid_argument("weights file: unsupported format or version");
    }
    std::map<std::string, const json*> by_name;
    for (const auto& entry : j.at("parameters")) {
        by_name[entry.at("name").get<std::string>()] = &entry;
    }
    for (Parameter* p : params) {
        const auto it = by_name.find(p->name);
        if (it == by_name.end()) {
            throw std::invalid_argument("weights file: missing parameter '" + p->name + "'");
        }
        const json& entry = *it->second;
        const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
        if (shape != p->value.shape) {
            throw std::invalid_argument("weights file: shape mismatch for '" + p->name + "'");
        }
        const auto values = entry.at("values").get<std::vector<double>>();
        if (values.size() != p->value.size()) {
            throw std::invalid_argument("weights file: value count mismatch for '" + p->name + "'");
        }
        p->value.v = values;
    }
}

void save_weights(const std::string& path, std::span<const Parameter* const> params) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write weights file '" + path + "'");
    out << weights_to_json(params) << "\n";
}

void load_weights(const std::string& path, std::span<Parameter* const> params) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open weights file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    weights_from_json(buf.str(), params);
}

} // namespace quaymaint::nn
