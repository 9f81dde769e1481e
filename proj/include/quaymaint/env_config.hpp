#pragma once

#include <string>
#include <vector>

#include "quaymaint/degradation.hpp"
#include "quaymaint/types.hpp"

namespace quaymaint {

struct ComponentSpec {
    int index = 0;
    std::string group_id;
    double cost_nothing = 0.0;
    double cost_repair = 0.0;
    double cost_replace = 0.0;
};

/// Sub-dependency group: components of the same group whose joint failures
/// raise the collapse probability through a count-indexed table.
/// failure_effect has |members|+1 entries, failure_effect[0] == 0, values
/// non-decreasing in the failure count.
struct DependencyGroup {
    std::string group_id;
    std::vector<int> members;
    std::vector<double> failure_effect;
};

struct EnvironmentConfig {
    std::string name;
    int horizon = 50;
    double global_inspect_cost = 0.0;
    std::vector<ComponentSpec> components;
    std::vector<DegradationModel> degradation_models;
    std::vector<DependencyGroup> dependency_groups;
    std::vector<int> start_health;
    std::vector<double> initial_belief; // row-major N x 5

    std::size_t num_components() const { return components.size(); }
    const DegradationModel& model_for(int component) const;
};

/// Builds one of the embedded presets: "simple", "quay" or "quay_large".
/// Throws std::invalid_argument for unknown names (the message lists the
/// valid presets).
EnvironmentConfig build_preset(const std::string& name);

bool is_preset_name(const std::string& name);

/// Full structural validation of a config; throws std::invalid_argument with
/// the offending field path. Called by load_config and by MaintenanceEnv.
void validate_config(const EnvironmentConfig& config);

/// JSON schema (schema_version 1) with top-level keys:
/// name, horizon, components[], degradation_models[], dependency_groups[],
/// global_inspect_cost, start_health[], initial_belief[][].
EnvironmentConfig load_config(const std::string& path);
void save_config(const EnvironmentConfig& config, const std::string& path);

std::string config_to_json(const EnvironmentConfig& config);
EnvironmentConfig config_from_json(const std::string& json_text);

/// Resolves "--env" values: preset name or path to a config file.
EnvironmentConfig resolve_environment(const std::string& name_or_path);

} // namespace quaymaint
