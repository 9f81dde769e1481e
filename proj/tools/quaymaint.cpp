#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "quaymaint/baselines.hpp"
#include "quaymaint/evaluation.hpp"
#include "quaymaint/trainer.hpp"
#include "quaymaint/weights_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace quaymaint;

namespace {

constexpr const char* kBuildId = "quaymaint 1.0.0";
constexpr long kPaperBudgetSteps = 25000000;

struct UtilityFlags {
    std::string name = "threshold";
    double f_max = 0.2;
    double c_max = 4.0;
    std::vector<double> levels{0.1, 0.2};
    std::vector<double> multipliers{3.0, 5.0};

    void attach(CLI::App* cmd) {
        cmd->add_option("--utility", name,
                        "Utility function: threshold | fmeca | threshold_penalized")
            ->default_val(name);
        cmd->add_option("--f-max", f_max, "FMECA collapse-probability weight")->default_val(f_max);
        cmd->add_option("--c-max", c_max, "FMECA cost weight")->default_val(c_max);
        cmd->add_option("--threshold-levels", levels,
                        "Threshold utility tier boundaries (two values)")
            ->expected(2);
        cmd->add_option("--threshold-multipliers", multipliers,
                        "Threshold utility tier multipliers (two values)")
            ->expected(2);
    }

    UtilityFunction build() const {
        const UtilityKind kind = utility_kind_from_string(name);
        ThresholdParams params;
        params.level1 = levels[0];
        params.level2 = levels[1];
        params.mult1 = multipliers[0];
        params.mult2 = multipliers[1];
        switch (kind) {
            case UtilityKind::threshold: return UtilityFunction::threshold(params);
            case UtilityKind::threshold_penalized:
                return UtilityFunction::threshold_penalized(params);
            case UtilityKind::fmeca: return UtilityFunction::fmeca(c_max, f_max);
        }
        throw std::invalid_argument("unknown utility kind");
    }
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json trainer_config_json(const TrainerConfig& c) {
    return json{{"total_steps", c.total_steps},
                {"actor_lr_start", c.actor_lr_start},
                {"actor_lr_end", c.actor_lr_end},
                {"critic_lr_start", c.critic_lr_start},
                {"critic_lr_end", c.critic_lr_end},
                {"clip_grad_norm", c.clip_grad_norm},
                {"update_every", c.update_every},
                {"n_atoms", c.n_atoms},
                {"lambda_val", c.lambda_val},
                {"lambda_ent", c.lambda_ent},
                {"gamma", c.gamma},
                {"v_min", c.v_min},
                {"v_max", c.v_max},
                {"seed", c.seed},
                {"eval_interval", c.eval_interval},
                {"eval_episodes", c.eval_episodes},
                {"shared_width", c.shared_width},
                {"head_hidden", c.head_hidden},
                {"critic_hidden", c.critic_hidden},
                {"include_tau", c.include_tau},
                {"adam_beta1", c.adam_beta1},
                {"adam_beta2", c.adam_beta2},
                {"adam_eps", c.adam_eps}};
}

void trainer_config_from_json(const json& j, TrainerConfig& c) {
    if (j.contains("total_steps")) c.total_steps = j["total_steps"].get<long>();
    if (j.contains("actor_lr_start")) c.actor_lr_start = j["actor_lr_start"].get<double>();
    if (j.contains("actor_lr_end")) c.actor_lr_end = j["actor_lr_end"].get<double>();
    if (j.contains("critic_lr_start")) c.critic_lr_start = j["critic_lr_start"].get<double>();
    if (j.contains("critic_lr_end")) c.critic_lr_end = j["critic_lr_end"].get<double>();
    if (j.contains("clip_grad_norm")) c.clip_grad_norm = j["clip_grad_norm"].get<double>();
    if (j.contains("update_every")) c.update_every = j["update_every"].get<int>();
    if (j.contains("n_atoms")) c.n_atoms = j["n_atoms"].get<int>();
    if (j.contains("lambda_val")) c.lambda_val = j["lambda_val"].get<double>();
    if (j.contains("lambda_ent")) c.lambda_ent = j["lambda_ent"].get<double>();
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    if (j.contains("v_min")) c.v_min = j["v_min"].get<std::array<double, 2>>();
    if (j.contains("v_max")) c.v_max = j["v_max"].get<std::array<double, 2>>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("eval_interval")) c.eval_interval = j["eval_interval"].get<long>();
    if (j.contains("eval_episodes")) c.eval_episodes = j["eval_episodes"].get<int>();
    if (j.contains("shared_width")) c.shared_width = j["shared_width"].get<int>();
    if (j.contains("head_hidden")) c.head_hidden = j["head_hidden"].get<int>();
    if (j.contains("critic_hidden")) c.critic_hidden = j["critic_hidden"].get<int>();
    if (j.contains("include_tau")) c.include_tau = j["include_tau"].get<bool>();
    if (j.contains("adam_beta1")) c.adam_beta1 = j["adam_beta1"].get<double>();
    if (j.contains("adam_beta2")) c.adam_beta2 = j["adam_beta2"].get<double>();
    if (j.contains("adam_eps")) c.adam_eps = j["adam_eps"].get<double>();
}

struct Checkpoint {
    EnvironmentConfig env;
    TrainerConfig trainer;
    std::string utility_name;
    nn::ActorNetwork actor;
};

void save_checkpoint(const fs::path& dir, const EnvironmentConfig& env,
                     const UtilityFlags& utility, const TrainerConfig& config,
                     const TrainResult& result) {
    fs::create_directories(dir);

    const auto actor_params = result.actor.parameters();
    std::vector<const nn::Parameter*> ap(actor_params.begin(), actor_params.end());
    nn::save_weights((dir / "actor_weights.json").string(), ap);
    const auto critic_params = result.critic.parameters();
    std::vector<const nn::Parameter*> cp(critic_params.begin(), critic_params.end());
    nn::save_weights((dir / "critic_weights.json").string(), cp);

    std::ostringstream log;
    write_train_log_csv(result.log, log);
    write_file(dir / "train_log.csv", log.str());

    json meta;
    meta["format"] = "quaymaint-checkpoint";
    meta["version"] = 1;
    meta["build"] = kBuildId;
    meta["environment"] = json::parse(config_to_json(env));
    meta["utility"] = {{"name", utility.name},
                       {"f_max", utility.f_max},
                       {"c_max", utility.c_max},
                       {"levels", utility.levels},
                       {"multipliers", utility.multipliers}};
    meta["trainer"] = trainer_config_json(config);
    meta["episodes_trained"] = result.episodes;
    meta["updates"] = result.updates;
    meta["run_id"] = fnv1a_hex(config_to_json(env) + trainer_config_json(config).dump());
    write_file(dir / "run_meta.json", meta.dump(2) + "\n");
}

Checkpoint load_checkpoint(const fs::path& dir) {
    std::ifstream in(dir / "run_meta.json");
    if (!in) throw std::invalid_argument("cannot open checkpoint '" + dir.string() + "'");
    json meta = json::parse(in);
    if (meta.value("format", "") != "quaymaint-checkpoint") {
        throw std::invalid_argument("not a checkpoint directory: " + dir.string());
    }
    Checkpoint ck;
    ck.env = config_from_json(meta.at("environment").dump());
    trainer_config_from_json(meta.at("trainer"), ck.trainer);
    ck.utility_name = meta.at("utility").at("name").get<std::string>();

    ck.actor = nn::make_actor(
        0, encoded_input_dim(static_cast<int>(ck.env.num_components()), ck.trainer.include_tau),
        static_cast<int>(ck.env.num_components()), ck.trainer.shared_width,
        ck.trainer.head_hidden);
    auto params = ck.actor.parameters();
    nn::load_weights((dir / "actor_weights.json").string(), params);
    return ck;
}

std::unique_ptr<Policy> parse_policy_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    if (head == "all_nothing") return std::make_unique<AllNothingPolicy>();
    if (head == "uniform_random") return std::make_unique<UniformRandomPolicy>();

    BaselinePolicy policy;
    policy.kind = baseline_kind_from_string(head);
    if (colon != std::string::npos) {
        const std::string rest = spec.substr(colon + 1);
        const auto eq = rest.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("policy parameter must look like interval=5 or fraction=0.4");
        }
        const std::string key = rest.substr(0, eq);
        const double value = std::stod(rest.substr(eq + 1));
        if (key == "interval") {
            policy.interval = static_cast<int>(value);
        } else if (key == "fraction") {
            policy.fraction = value;
        } else {
            throw std::invalid_argument("unknown policy parameter '" + key + "'");
        }
    }
    return std::make_unique<BaselineRunnerPolicy>(policy);
}

void print_report(const EvaluationReport& report) {
    std::cout << "policy " << report.policy_id << " on " << report.env_name << " ("
              << report.utility_name << ", gamma " << report.gamma << ", " << report.episodes
              << " episodes)\n";
    std::cout << "  score             " << report.score.mean << " +/- " << report.score.stddev
              << "\n";
    std::cout << "  cost (raw)        " << report.cost_raw.mean << " +/- "
              << report.cost_raw.stddev << "\n";
    std::cout << "  cost (discounted) " << report.cost_discounted.mean << " +/- "
              << report.cost_discounted.stddev << "\n";
    std::cout << "  P(collapse) raw   " << report.prisk_raw.mean << " +/- "
              << report.prisk_raw.stddev << "\n";
    std::cout << "  P(collapse) disc  " << report.prisk_discounted.mean << " +/- "
              << report.prisk_discounted.stddev << "\n";
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) grid.push_back(v);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) grid.push_back(std::stod(item));
    }
    return grid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maintenance-planning MOPOMDP toolkit: environments, utilities, baselines and "
                 "the distributional multi-objective actor-critic trainer"};
    app.require_subcommand(1);

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train the actor-critic on an environment");
    std::string train_env = "simple";
    std::string train_out = "out/train";
    std::string train_overrides;
    UtilityFlags train_utility;
    bool paper_budget = false;
    bool quiet = false;
    long train_steps = 500000;
    double train_gamma = -1.0;
    std::uint64_t train_seed = 0;
    TrainerConfig flag_config;
    train->add_option("--env", train_env, "Environment preset or config path")->required();
    train_utility.attach(train);
    train->add_option("--steps", train_steps, "Total environment steps")->default_val(train_steps);
    train->add_flag("--paper-budget", paper_budget,
                    "Use the full published training budget (2.5e7 steps)");
    train->add_option("--seed", train_seed, "Master seed")->default_val(0);
    train->add_option("--gamma", train_gamma, "Discount factor (defaults per utility)");
    train->add_option("--out-dir", train_out, "Checkpoint directory")->default_val(train_out);
    train->add_option("--config", train_overrides, "JSON file with trainer-config overrides");
    train->add_flag("--quiet", quiet, "Suppress progress lines");
    auto* opt_actor_lr_start = train->add_option("--actor-lr-start", flag_config.actor_lr_start);
    auto* opt_actor_lr_end = train->add_option("--actor-lr-end", flag_config.actor_lr_end);
    auto* opt_critic_lr_start = train->add_option("--critic-lr-start", flag_config.critic_lr_start);
    auto* opt_critic_lr_end = train->add_option("--critic-lr-end", flag_config.critic_lr_end);
    auto* opt_clip = train->add_option("--clip-grad-norm", flag_config.clip_grad_norm);
    auto* opt_update = train->add_option("--update-every", flag_config.update_every);
    auto* opt_atoms = train->add_option("--atoms", flag_config.n_atoms);
    auto* opt_lval = train->add_option("--lambda-val", flag_config.lambda_val);
    auto* opt_lent = train->add_option("--lambda-ent", flag_config.lambda_ent);
    auto* opt_vmin_cost = train->add_option("--vmin-cost", flag_config.v_min[0]);
    auto* opt_vmin_risk = train->add_option("--vmin-risk", flag_config.v_min[1]);
    auto* opt_vmax_cost = train->add_option("--vmax-cost", flag_config.v_max[0]);
    auto* opt_vmax_risk = train->add_option("--vmax-risk", flag_config.v_max[1]);
    auto* opt_eval_int = train->add_option("--eval-interval", flag_config.eval_interval);
    auto* opt_eval_eps = train->add_option("--eval-episodes", flag_config.eval_episodes);
    auto* opt_shared = train->add_option("--shared-width", flag_config.shared_width);
    auto* opt_head = train->add_option("--head-hidden", flag_config.head_hidden);
    auto* opt_critic_h = train->add_option("--critic-hidden", flag_config.critic_hidden);
    bool no_tau = false;
    train->add_flag("--no-tau", no_tau, "Exclude normalized tau from the network input");

    train->callback([&]() {
        TrainerConfig config =
            TrainerConfig::defaults_for(utility_kind_from_string(train_utility.name));
        if (!train_overrides.empty()) {
            std::ifstream in(train_overrides);
            if (!in) throw CLI::ValidationError("--config", "cannot open " + train_overrides);
            trainer_config_from_json(json::parse(in), config);
        }
        config.total_steps = paper_budget ? kPaperBudgetSteps : train_steps;
        config.seed = train_seed;
        if (train_gamma > 0.0) config.gamma = train_gamma;
        if (opt_actor_lr_start->count()) config.actor_lr_start = flag_config.actor_lr_start;
        if (opt_actor_lr_end->count()) config.actor_lr_end = flag_config.actor_lr_end;
        if (opt_critic_lr_start->count()) config.critic_lr_start = flag_config.critic_lr_start;
        if (opt_critic_lr_end->count()) config.critic_lr_end = flag_config.critic_lr_end;
        if (opt_clip->count()) config.clip_grad_norm = flag_config.clip_grad_norm;
        if (opt_update->count()) config.update_every = flag_config.update_every;
        if (opt_atoms->count()) config.n_atoms = flag_config.n_atoms;
        if (opt_lval->count()) config.lambda_val = flag_config.lambda_val;
        if (opt_lent->count()) config.lambda_ent = flag_config.lambda_ent;
        if (opt_vmin_cost->count()) config.v_min[0] = flag_config.v_min[0];
        if (opt_vmin_risk->count()) config.v_min[1] = flag_config.v_min[1];
        if (opt_vmax_cost->count()) config.v_max[0] = flag_config.v_max[0];
        if (opt_vmax_risk->count()) config.v_max[1] = flag_config.v_max[1];
        if (opt_eval_int->count()) config.eval_interval = flag_config.eval_interval;
        if (opt_eval_eps->count()) config.eval_episodes = flag_config.eval_episodes;
        if (opt_shared->count()) config.shared_width = flag_config.shared_width;
        if (opt_head->count()) config.head_hidden = flag_config.head_hidden;
        if (opt_critic_h->count()) config.critic_hidden = flag_config.critic_hidden;
        if (no_tau) config.include_tau = false;

        const EnvironmentConfig env = resolve_environment(train_env);
        Trainer trainer(env, train_utility.build(), config);
        const TrainResult result = trainer.run(quiet ? nullptr : &std::cout);
        save_checkpoint(train_out, env, train_utility, config, result);
        if (!result.log.empty()) {
            std::cout << "final mean utility " << result.log.back().mean_utility << " over "
                      << config.eval_episodes << " evaluation episodes\n";
        }
        std::cout << "checkpoint written to " << train_out << "\n";
    });

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "Monte-Carlo evaluation of a policy");
    std::string eval_env;
    std::string eval_checkpoint;
    std::string eval_policy;
    std::string eval_out = "out/evaluate";
    UtilityFlags eval_utility;
    int eval_episodes = 5000;
    std::uint64_t eval_seed = 0;
    double eval_gamma = -1.0;
    int eval_threads = 0;
    bool eval_greedy = false;
    evaluate->add_option("--env", eval_env, "Environment preset or config path");
    evaluate->add_option("--checkpoint", eval_checkpoint, "Checkpoint directory from `train`");
    evaluate->add_option("--policy", eval_policy,
                         "Policy spec: all_nothing | uniform_random | yba_repair:interval=5 | "
                         "yba_replace:interval=5 | ybi_cba:interval=5 | cbi_cba:fraction=0.4");
    eval_utility.attach(evaluate);
    evaluate->add_option("--episodes", eval_episodes)->default_val(eval_episodes);
    evaluate->add_option("--seed", eval_seed)->default_val(0);
    evaluate->add_option("--gamma", eval_gamma, "Discount (defaults per utility / checkpoint)");
    evaluate->add_option("--threads", eval_threads, "Worker cap (QUAYMAINT_THREADS also caps)");
    evaluate->add_flag("--greedy", eval_greedy, "Greedy action selection for checkpoints");
    evaluate->add_option("--out-dir", eval_out)->default_val(eval_out);

    evaluate->callback([&]() {
        if (eval_checkpoint.empty() == eval_policy.empty()) {
            throw CLI::ValidationError("evaluate", "pass exactly one of --checkpoint / --policy");
        }
        EnvironmentConfig env;
        std::unique_ptr<Policy> policy;
        const UtilityFunction utility = eval_utility.build();
        double gamma = eval_gamma;
        std::string policy_id;
        if (!eval_checkpoint.empty()) {
            Checkpoint ck = load_checkpoint(eval_checkpoint);
            env = eval_env.empty() ? ck.env : resolve_environment(eval_env);
            if (gamma <= 0.0) gamma = ck.trainer.gamma;
            policy = std::make_unique<ActorPolicy>(ck.actor.clone(), gamma,
                                                   ck.trainer.include_tau, eval_greedy);
            policy_id = "checkpoint:" + eval_checkpoint + (eval_greedy ? ":greedy" : "");
        } else {
            if (eval_env.empty()) throw CLI::ValidationError("evaluate", "--env is required");
            env = resolve_environment(eval_env);
            if (gamma <= 0.0) {
                gamma =
                    TrainerConfig::defaults_for(utility_kind_from_string(eval_utility.name)).gamma;
            }
            policy = parse_policy_spec(eval_policy);
            policy_id = eval_policy;
        }

        EvalOptions options;
        options.episodes = eval_episodes;
        options.seed = eval_seed;
        options.gamma = gamma;
        options.threads = eval_threads;
        options.policy_id = policy_id;
        const EvaluationReport report = evaluate_policy(env, *policy, utility, options);

        fs::create_directories(eval_out);
        std::ostringstream csv;
        write_eval_csv(report, csv);
        write_file(fs::path(eval_out) / "evaluation.csv", csv.str());
        print_report(report);
        std::cout << "report written to " << eval_out << "/evaluation.csv\n";
    });

    // ---- baseline ----
    auto* baseline = app.add_subcommand(
        "baseline", "Grid-search a rule-based policy family, then evaluate the winner");
    std::string base_policy = "cbi_cba";
    std::string base_env = "simple";
    std::string base_grid;
    std::string base_out = "out/baseline";
    UtilityFlags base_utility;
    int base_episodes = 500;
    int base_eval_episodes = 5000;
    std::uint64_t base_seed = 0;
    double base_gamma = -1.0;
    int base_threads = 0;
    baseline->add_option("--policy", base_policy, "yba_repair | yba_replace | ybi_cba | cbi_cba")
        ->required();
    baseline->add_option("--env", base_env)->required();
    base_utility.attach(baseline);
    baseline->add_option("--grid", base_grid,
                         "Comma list or lo..hi range (defaults: 1..25 intervals, 0.1..1.0 fractions)");
    baseline->add_option("--episodes", base_episodes, "Episodes per grid point")
        ->default_val(base_episodes);
    baseline->add_option("--eval-episodes", base_eval_episodes, "Episodes for the final report")
        ->default_val(base_eval_episodes);
    baseline->add_option("--seed", base_seed)->default_val(0);
    baseline->add_option("--gamma", base_gamma);
    baseline->add_option("--threads", base_threads);
    baseline->add_option("--out-dir", base_out)->default_val(base_out);

    baseline->callback([&]() {
        const EnvironmentConfig env = resolve_environment(base_env);
        const UtilityFunction utility = base_utility.build();
        const BaselineKind kind = baseline_kind_from_string(base_policy);
        const double gamma =
            base_gamma > 0.0
                ? base_gamma
                : TrainerConfig::defaults_for(utility_kind_from_string(base_utility.name)).gamma;
        const std::vector<double> grid =
            base_grid.empty() ? default_grid(kind) : parse_grid(base_grid);
        if (grid.empty()) throw CLI::ValidationError("--grid", "empty grid");

        const GridSearchResult result =
            grid_search(kind, env, utility, grid, base_episodes, base_seed, gamma, base_threads);

        fs::create_directories(base_out);
        std::ostringstream grid_csv;
        write_grid_csv(result, grid_csv);
        write_file(fs::path(base_out) / "grid.csv", grid_csv.str());

        const double param = kind == BaselineKind::cbi_cba
                                 ? result.best.fraction
                                 : static_cast<double>(result.best.interval);
        std::cout << "winner: " << base_policy << " "
                  << (kind == BaselineKind::cbi_cba ? "fraction=" : "interval=") << param << "\n";

        EvalOptions options;
        options.episodes = base_eval_episodes;
        options.seed = base_seed + 1; // fresh episodes for the final report
        options.gamma = gamma;
        options.threads = base_threads;
        options.policy_id = base_policy +
                            (kind == BaselineKind::cbi_cba ? ":fraction=" : ":interval=") +
                            std::to_string(param);
        const EvaluationReport report =
            evaluate_policy(env, BaselineRunnerPolicy(result.best), utility, options);
        std::ostringstream eval_csv;
        write_eval_csv(report, eval_csv);
        write_file(fs::path(base_out) / "evaluation.csv", eval_csv.str());
        print_report(report);
        std::cout << "grid table and report written to " << base_out << "\n";
    });

    // ---- sweep-gamma ----
    auto* sweep = app.add_subcommand(
        "sweep-gamma", "Train and evaluate across discount factors on one environment/utility");
    std::vector<double> sweep_gammas{0.9, 0.975, 0.99, 0.995, 1.0};
    std::string sweep_env = "simple";
    std::string sweep_out = "out/sweep";
    UtilityFlags sweep_utility;
    long sweep_steps = 500000;
    int sweep_episodes = 1000;
    std::uint64_t sweep_seed = 0;
    sweep->add_option("--gammas", sweep_gammas, "Discount factors to sweep")->delimiter(',');
    sweep->add_option("--env", sweep_env)->default_val(sweep_env);
    sweep_utility.attach(sweep);
    sweep->add_option("--steps", sweep_steps)->default_val(sweep_steps);
    sweep->add_option("--episodes", sweep_episodes, "Evaluation episodes per gamma")
        ->default_val(sweep_episodes);
    sweep->add_option("--seed", sweep_seed)->default_val(0);
    sweep->add_option("--out-dir", sweep_out)->default_val(sweep_out);

    sweep->callback([&]() {
        const EnvironmentConfig env = resolve_environment(sweep_env);
        const UtilityFunction utility = sweep_utility.build();
        fs::create_directories(sweep_out);

        auto fmt9 = [](double v) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            return std::string(buf);
        };
        std::ostringstream csv;
        csv << "gamma,score_mean,score_std,cost_discounted,cost_undiscounted,"
               "prisk_discounted,prisk_undiscounted\n";
        for (const double gamma : sweep_gammas) {
            TrainerConfig config =
                TrainerConfig::defaults_for(utility_kind_from_string(sweep_utility.name));
            config.gamma = gamma;
            config.total_steps = sweep_steps;
            config.seed = sweep_seed;
            Trainer trainer(env, utility, config);
            const TrainResult result = trainer.run();

            char sub[40];
            std::snprintf(sub, sizeof(sub), "gamma_%g", gamma);
            save_checkpoint(fs::path(sweep_out) / sub, env, sweep_utility, config, result);

            EvalOptions options;
            options.episodes = sweep_episodes;
            options.seed = sweep_seed;
            options.gamma = gamma;
            options.policy_id = std::string("modcmac:") + sub;
            ActorPolicy policy(result.actor.clone(), gamma, config.include_tau, false);
            const EvaluationReport report = evaluate_policy(env, policy, utility, options);
            std::ostringstream eval_csv;
            write_eval_csv(report, eval_csv);
            write_file(fs::path(sweep_out) / sub / "evaluation.csv", eval_csv.str());

            csv << fmt9(gamma) << ',' << fmt9(report.score.mean) << ','
                << fmt9(report.score.stddev) << ',' << fmt9(report.cost_discounted.mean) << ','
                << fmt9(report.cost_raw.mean) << ',' << fmt9(report.prisk_discounted.mean) << ','
                << fmt9(report.prisk_raw.mean) << '\n';
            std::cout << "gamma " << gamma << ": score " << report.score.mean << ", cost "
                      << report.cost_raw.mean << ", P(collapse) " << report.prisk_raw.mean
                      << "\n";
        }
        write_file(fs::path(sweep_out) / "sweep.csv", csv.str());
        std::cout << "sweep written to " << sweep_out << "/sweep.csv\n";
    });

    // ---- validate-env ----
    auto* validate = app.add_subcommand("validate-env", "Validate an environment config file");
    std::string validate_path;
    validate->add_option("path", validate_path, "Environment config (JSON)")->required();
    validate->callback([&]() {
        const EnvironmentConfig config = load_config(validate_path);
        std::cout << "OK: " << config.name << " with " << config.num_components()
                  << " components, horizon " << config.horizon << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
