#include "quaymaint/env_config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace quaymaint {

namespace {

using nlohmann::json;

Matrix5 matrix5(std::initializer_list<double> values) {
    Matrix5 m;
    std::size_t i = 0;
    for (double v : values) m.a[i++] = v;
    return m;
}

// Appendix entry (2,4) is printed as 0.01, which makes the row sum 1.009;
// 0.001 restores stochasticity (see the repository notes on data provenance).
const Matrix5 kSimpleStart = matrix5({
    0.97, 0.015, 0.01, 0.004, 0.001,
    0, 0.98, 0.012, 0.005, 0.003,
    0, 0, 0.981, 0.018, 0.001,
    0, 0, 0, 0.985, 0.015,
    0, 0, 0, 0, 1,
});
const Matrix5 kSimpleEnd = matrix5({
    0.9, 0.05, 0.03, 0.015, 0.005,
    0, 0.91, 0.06, 0.02, 0.01,
    0, 0, 0.92, 0.06, 0.02,
    0, 0, 0, 0.93, 0.07,
    0, 0, 0, 0, 1,
});

const Matrix5 kPoleStart = matrix5({
    0.983, 0.0089, 0.0055, 0.0025, 0.0001,
    0, 0.9836, 0.0084, 0.0054, 0.0026,
    0, 0, 0.9862, 0.0084, 0.0054,
    0, 0, 0, 0.9917, 0.0083,
    0, 0, 0, 0, 1,
});
const Matrix5 kPoleEnd = matrix5({
    0.9713, 0.0148, 0.0093, 0.0045, 0.0001,
    0, 0.9719, 0.0142, 0.0093, 0.0046,
    0, 0, 0.9753, 0.0153, 0.0094,
    0, 0, 0, 0.9858, 0.0142,
    0, 0, 0, 0, 1,
});

const Matrix5 kKespStart = matrix5({
    0.9748, 0.013, 0.0081, 0.004, 0.0001,
    0, 0.9754, 0.0124, 0.0081, 0.0041,
    0, 0, 0.9793, 0.0125, 0.0082,
    0, 0, 0, 0.9876, 0.0124,
    0, 0, 0, 0, 1,
});
const Matrix5 kKespEnd = matrix5({
    0.9534, 0.0237, 0.0153, 0.0075, 0.0001,
    0, 0.954, 0.0231, 0.0152, 0.0077,
    0, 0, 0.9613, 0.0233, 0.0154,
    0, 0, 0, 0.9767, 0.0233,
    0, 0, 0, 0, 1,
});

const Matrix5 kFloorStart = matrix5({
    0.9848, 0.008, 0.0049, 0.0022, 0.0001,
    0, 0.9854, 0.0074, 0.0048, 0.0024,
    0, 0, 0.9876, 0.0075, 0.0049,
    0, 0, 0, 0.9926, 0.0074,
    0, 0, 0, 0, 1,
});
const Matrix5 kFloorEnd = kKespStart;

void add_components(EnvironmentConfig& c, int count, const std::string& group, double repair,
                    double replace) {
    for (int i = 0; i < count; ++i) {
        ComponentSpec s;
        s.index = static_cast<int>(c.components.size());
        s.group_id = group;
        s.cost_nothing = 0.0;
        s.cost_repair = repair;
        s.cost_replace = replace;
        c.components.push_back(std::move(s));
    }
}

void fill_uniform_belief(EnvironmentConfig& c) {
    c.initial_belief.assign(c.components.size() * kNumHealthStates, 1.0 / kNumHealthStates);
}

EnvironmentConfig preset_simple() {
    EnvironmentConfig c;
    c.name = "simple";
    c.horizon = 50;
    c.global_inspect_cost = 0.02;
    c.degradation_models.push_back({"component", kSimpleStart, kSimpleEnd, 50});
    add_components(c, 8, "component", 0.0125, 0.03125);
    for (int i = 0; i < 8; ++i) {
        c.dependency_groups.push_back({"component", {i}, {0.0, 0.05}});
    }
    c.start_health.assign(8, 0);
    fill_uniform_belief(c);
    return c;
}

EnvironmentConfig preset_quay() {
    EnvironmentConfig c;
    c.name = "quay";
    c.horizon = 50;
    c.global_inspect_cost = 0.02;
    c.degradation_models.push_back({"pole", kPoleStart, kPoleEnd, 50});
    c.degradation_models.push_back({"kesp", kKespStart, kKespEnd, 50});
    c.degradation_models.push_back({"floor", kFloorStart, kFloorEnd, 50});
    add_components(c, 9, "pole", 0.011, 0.044);
    add_components(c, 3, "kesp", 0.003, 0.013);
    add_components(c, 1, "floor", 0.028, 0.113);
    const std::vector<double> pole_f{0.0, 0.01, 0.1, 0.4};
    const std::vector<double> kesp_f{0.0, 0.03, 0.33};
    c.dependency_groups.push_back({"pole", {0, 1, 2}, pole_f});
    c.dependency_groups.push_back({"pole", {3, 4, 5}, pole_f});
    c.dependency_groups.push_back({"pole", {6, 7, 8}, pole_f});
    c.dependency_groups.push_back({"kesp", {9, 10}, kesp_f});
    c.dependency_groups.push_back({"kesp", {10, 11}, kesp_f});
    c.dependency_groups.push_back({"floor", {12}, {0.0, 0.05}});
    c.start_health = {4, 4, 3, 4, 3, 3, 4, 3, 4, 3, 4, 3, 3};
    fill_uniform_belief(c);
    return c;
}

EnvironmentConfig preset_quay_large() {
    EnvironmentConfig c;
    c.name = "quay_large";
    c.horizon = 50;
    c.global_inspect_cost = 0.02;
    c.degradation_models.push_back({"pole", kPoleStart, kPoleEnd, 50});
    c.degradation_models.push_back({"kesp", kKespStart, kKespEnd, 50});
    c.degradation_models.push_back({"floor", kFloorStart, kFloorEnd, 50});
    add_components(c, 18, "pole", 0.0055, 0.022);
    add_components(c, 6, "kesp", 0.0015, 0.0065);
    add_components(c, 2, "floor", 0.014, 0.0565);
    const std::vector<double> pole_f{0.0, 0.01, 0.1, 0.4};
    const std::vector<double> kesp_f{0.0, 0.03, 0.33};
    for (int g = 0; g < 6; ++g) {
        c.dependency_groups.push_back({"pole", {3 * g, 3 * g + 1, 3 * g + 2}, pole_f});
    }
    for (int g = 0; g < 5; ++g) {
        c.dependency_groups.push_back({"kesp", {18 + g, 19 + g}, kesp_f});
    }
    c.dependency_groups.push_back({"floor", {24}, {0.0, 0.05}});
    c.dependency_groups.push_back({"floor", {25}, {0.0, 0.05}});
    c.start_health = {4, 4, 3, 4, 3, 3, 4, 3, 4, 4, 4, 3, 4,
                      3, 3, 4, 3, 4, 3, 4, 3, 3, 4, 3, 3, 4};
    fill_uniform_belief(c);
    return c;
}

} // namespace

bool is_preset_name(const std::string& name) {
    return name == "simple" || name == "quay" || name == "quay_large";
}

EnvironmentConfig build_preset(const std::string& name) {
    if (name == "simple") return preset_simple();
    if (name == "quay") return preset_quay();
    if (name == "quay_large") return preset_quay_large();
    throw std::invalid_argument("unknown environment preset '" + name +
                                "' (valid presets: simple, quay, quay_large)");
}

void validate_config(const EnvironmentConfig& c) {
    if (c.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const std::size_t n = c.components.size();
    if (n == 0) throw std::invalid_argument("components must be non-empty");
    if (c.global_inspect_cost < 0) throw std::invalid_argument("global_inspect_cost must be >= 0");

    std::set<std::string> model_groups;
    for (const auto& m : c.degradation_models) {
        if (!model_groups.insert(m.group_id).second) {
            throw std::invalid_argument("degradation_models: duplicate group_id '" + m.group_id + "'");
        }
        validate_degradation_model(m);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = c.components[i];
        const std::string path = "components[" + std::to_string(i) + "]";
        if (s.index != static_cast<int>(i)) {
            throw std::invalid_argument(path + ".index must equal its position " + std::to_string(i));
        }
        if (!model_groups.count(s.group_id)) {
            throw std::invalid_argument(path + ".group_id '" + s.group_id +
                                        "' has no degradation model");
        }
        if (s.cost_nothing != 0.0) throw std::invalid_argument(path + ".cost_nothing must be 0");
        if (s.cost_repair < 0 || s.cost_replace < s.cost_repair) {
            throw std::invalid_argument(path + ": requires 0 <= cost_repair <= cost_replace");
        }
    }

    std::vector<bool> covered(n, false);
    for (std::size_t g = 0; g < c.dependency_groups.size(); ++g) {
        const auto& grp = c.dependency_groups[g];
        const std::string path = "dependency_groups[" + std::to_string(g) + "]";
        if (grp.members.empty()) throw std::invalid_argument(path + ".members must be non-empty");
        if (grp.failure_effect.size() != grp.members.size() + 1) {
            throw std::invalid_argument(path + ".failure_effect must have |members|+1 entries");
        }
        if (grp.failure_effect[0] != 0.0) {
            throw std::invalid_argument(path + ".failure_effect[0] must be 0");
        }
        for (std::size_t k = 0; k < grp.failure_effect.size(); ++k) {
            const double f = grp.failure_effect[k];
            if (f < 0.0 || f > 1.0) {
                throw std::invalid_argument(path + ".failure_effect[" + std::to_string(k) +
                                            "] out of [0,1]");
            }
            if (k > 0 && f < grp.failure_effect[k - 1]) {
                throw std::invalid_argument(path + ".failure_effect must be non-decreasing");
            }
        }
        for (std::size_t k = 0; k < grp.members.size(); ++k) {
            const int m = grp.members[k];
            if (m < 0 || m >= static_cast<int>(n)) {
                throw std::invalid_argument(path + ".members[" + std::to_string(k) +
                                            "] out of range");
            }
            if (c.components[static_cast<std::size_t>(m)].group_id != grp.group_id) {
                throw std::invalid_argument(path + ".members[" + std::to_string(k) +
                                            "]: component " + std::to_string(m) +
                                            " belongs to group '" +
                                            c.components[static_cast<std::size_t>(m)].group_id +
                                            "', not '" + grp.group_id + "'");
            }
            covered[static_cast<std::size_t>(m)] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!covered[i]) {
            throw std::invalid_argument("components[" + std::to_string(i) +
                                        "] appears in no dependency group");
        }
    }

    if (c.start_health.size() != n) {
        throw std::invalid_argument("start_health length != component count");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (c.start_health[i] < 0 || c.start_health[i] > kFailedState) {
            throw std::invalid_argument("start_health[" + std::to_string(i) + "] out of 0..4");
        }
    }

    if (c.initial_belief.size() != n * kNumHealthStates) {
        throw std::invalid_argument("initial_belief must be N x 5");
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int s = 0; s < kNumHealthStates; ++s) {
            const double v = c.initial_belief[i * kNumHealthStates + static_cast<std::size_t>(s)];
            if (v < 0.0) {
                throw std::invalid_argument("initial_belief[" + std::to_string(i) +
                                            "] has a negative entry");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("initial_belief[" + std::to_string(i) + "] sums to " +
                                        std::to_string(sum) + ", expected 1");
        }
    }
}

namespace {

json matrix_to_json(const Matrix5& m) {
    json rows = json::array();
    for (int r = 0; r < kNumHealthStates; ++r) {
        json row = json::array();
        for (int c = 0; c < kNumHealthStates; ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix5 matrix_from_json(const json& rows, const std::string& path) {
    if (!rows.is_array() || rows.size() != kNumHealthStates) {
        throw std::invalid_argument(path + " must be a 5x5 matrix");
    }
    Matrix5 m;
    for (int r = 0; r < kNumHealthStates; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != kNumHealthStates) {
            throw std::invalid_argument(path + " row " + std::to_string(r) + " must have 5 entries");
        }
        for (int c = 0; c < kNumHealthStates; ++c) {
            m.at(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

} // namespace

std::string config_to_json(const EnvironmentConfig& c) {
    json j;
    j["schema_version"] = 1;
    j["name"] = c.name;
    j["horizon"] = c.horizon;
    j["global_inspect_cost"] = c.global_inspect_cost;
    j["components"] = json::array();
    for (const auto& s : c.components) {
        j["components"].push_back({{"index", s.index},
                                   {"group_id", s.group_id},
                                   {"cost_nothing", s.cost_nothing},
                                   {"cost_repair", s.cost_repair},
                                   {"cost_replace", s.cost_replace}});
    }
    j["degradation_models"] = json::array();
    for (const auto& m : c.degradation_models) {
        j["degradation_models"].push_back({{"group_id", m.group_id},
                                           {"tau_max", m.tau_max},
                                           {"d_start", matrix_to_json(m.d_start)},
                                           {"d_end", matrix_to_json(m.d_end)}});
    }
    j["dependency_groups"] = json::array();
    for (const auto& g : c.dependency_groups) {
        j["dependency_groups"].push_back(
            {{"group_id", g.group_id}, {"members", g.members}, {"failure_effect", g.failure_effect}});
    }
    j["start_health"] = c.start_health;
    j["initial_belief"] = json::array();
    for (std::size_t i = 0; i < c.num_components(); ++i) {
        json row = json::array();
        for (int s = 0; s < kNumHealthStates; ++s) {
            row.push_back(c.initial_belief[i * kNumHealthStates + static_cast<std::size_t>(s)]);
        }
        j["initial_belief"].push_back(std::move(row));
    }
    return j.dump(2);
}

EnvironmentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("environment config: ") + e.what());
    }
    try {
        if (j.value("schema_version", 0) != 1) {
            throw std::invalid_argument("schema_version must be 1");
        }
        EnvironmentConfig c;
        c.name = j.at("name").get<std::string>();
        c.horizon = j.at("horizon").get<int>();
        c.global_inspect_cost = j.at("global_inspect_cost").get<double>();
        for (const auto& s : j.at("components")) {
            ComponentSpec spec;
            spec.index = s.at("index").get<int>();
            spec.group_id = s.at("group_id").get<std::string>();
            spec.cost_nothing = s.at("cost_nothing").get<double>();
            spec.cost_repair = s.at("cost_repair").get<double>();
            spec.cost_replace = s.at("cost_replace").get<double>();
            c.components.push_back(std::move(spec));
        }
        std::size_t mi = 0;
        for (const auto& m : j.at("degradation_models")) {
            DegradationModel model;
            model.group_id = m.at("group_id").get<std::string>();
            model.tau_max = m.at("tau_max").get<int>();
            const std::string path = "degradation_models[" + std::to_string(mi++) + "]";
            model.d_start = matrix_from_json(m.at("d_start"), path + ".d_start");
            model.d_end = matrix_from_json(m.at("d_end"), path + ".d_end");
            c.degradation_models.push_back(std::move(model));
        }
        for (const auto& g : j.at("dependency_groups")) {
            DependencyGroup grp;
            grp.group_id = g.at("group_id").get<std::string>();
            grp.members = g.at("members").get<std::vector<int>>();
            grp.failure_effect = g.at("failure_effect").get<std::vector<double>>();
            c.dependency_groups.push_back(std::move(grp));
        }
        c.start_health = j.at("start_health").get<std::vector<int>>();
        for (const auto& row : j.at("initial_belief")) {
            for (const auto& v : row) c.initial_belief.push_back(v.get<double>());
        }
        validate_config(c);
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("environment config: ") + e.what());
    }
}

EnvironmentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open environment config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

void save_config(const EnvironmentConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write environment config '" + path + "'");
    out << config_to_json(config) << "\n";
}

EnvironmentConfig resolve_environment(const std::string& name_or_path) {
    if (is_preset_name(name_or_path)) return build_preset(name_or_path);
    if (name_or_path.find('.') == std::string::npos &&
        name_or_path.find('/') == std::string::npos) {
        throw std::invalid_argument("unknown environment preset '" + name_or_path +
                                    "' (valid presets: simple, quay, quay_large)");
    }
    return load_config(name_or_path);
}

} // namespace quaymaint
