#pragma once

#include <array>
#include <functional>
#include <optional>

#include "quaymaint/atom_grid.hpp"
#include "quaymaint/evaluation.hpp"
#include "quaymaint/network.hpp"
#include "quaymaint/optimizer.hpp"
#include "quaymaint/utility.hpp"

namespace quaymaint {

/// Utility over a d-vector candidate return. The production case wraps
/// UtilityFunction with x = (r_cost, r_risk); tests may inject any shape.
using UtilityFn = std::function<double(std::span<const double>)>;

UtilityFn utility_fn(const UtilityFunction& utility);

/// Expected utility of the critic distribution around an accrued return:
/// with reward == nullptr,   sum_i u(accrued + gamma_pow * z_i) * Z_i;
/// with reward provided,     sum_i u(accrued + gamma_pow * (r + gamma * z_i)) * Z_i.
double preference_score(std::span<const double> z_probs, std::span<const double> accrued,
                        const AtomGrid& grid, const UtilityFn& utility, double gamma_pow,
                        const double* reward, double gamma);

/// Preference difference between the bootstrapped next form and the current
/// form; terminal records use u(accrued + gamma^t * r) for the first term.
double raw_advantage(std::span<const double> z_next, std::span<const double> z_curr,
                     std::span<const double> accrued, std::span<const double> reward,
                     const AtomGrid& grid, const UtilityFn& utility, double gamma, int t,
                     bool done);

/// In-place z-scoring with the population standard deviation and eps = 1e-8
/// added to the denominator. Batches of identical values map to all zeros.
void normalize_advantages(std::span<double> advantages, double eps = 1e-8);

/// Categorical projection: each source atom's Bellman image r + gamma * z_j
/// (just r when done) is clipped into the grid box and its mass spread over
/// the 2^d surrounding atoms with multilinear weights. Output sums to 1.
std::vector<double> project_distribution(std::span<const double> reward,
                                         std::span<const double> z_next, const AtomGrid& grid,
                                         double gamma, bool done);

/// Network input layout: flattened belief (N x 5), optionally tau / tau_max
/// per component, t / H, accrued reward (2 values).
std::vector<double> encode_input(const BeliefState& belief, int horizon,
                                 std::array<double, 2> accrued, bool include_tau, int tau_max);
int encoded_input_dim(int num_components, bool include_tau);

struct TrainerConfig {
    long total_steps = 25000000;
    double actor_lr_start = 2e-4;
    double actor_lr_end = 2e-5;
    double critic_lr_start = 2e-3;
    double critic_lr_end = 2e-4;
    double clip_grad_norm = 100.0;
    int update_every = 128;
    int n_atoms = 11;
    double lambda_val = 0.5;
    double lambda_ent = 0.001;
    double gamma = 0.995;
    std::array<double, 2> v_min{-12.0, -0.1};
    std::array<double, 2> v_max{0.0, 0.0};
    std::uint64_t seed = 0;
    long eval_interval = 25000;
    int eval_episodes = 100;
    int shared_width = 128;
    int head_hidden = 50;
    int critic_hidden = 150;
    bool include_tau = true;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    /// Table-faithful defaults: gamma and value bounds differ per utility
    /// (threshold: gamma 0.995, V_min (-12, -0.1); fmeca: gamma 0.975,
    /// V_min (-4, -0.02)).
    static TrainerConfig defaults_for(UtilityKind kind);
};

/// One stored interaction, the unit of the update buffer.
struct TransitionRecord {
    std::vector<double> input;
    std::vector<double> next_input;
    std::vector<int> comp_actions;
    int global_action = 0;
    std::array<double, 2> reward{};
    std::array<double, 2> accrued{};
    int t = 0;
    bool done = false;
    std::vector<double> logp; // per head at sampling time (diagnostics)
};

struct TrainLogRow {
    long global_step = 0;
    long episode = 0;
    double mean_utility = 0.0;
    double mean_cost = 0.0;
    double mean_prisk = 0.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    double lr_actor = 0.0;
    double lr_critic = 0.0;
};

struct TrainResult {
    nn::ActorNetwork actor;
    nn::CriticNetwork critic;
    std::vector<TrainLogRow> log;
    long episodes = 0;
    long updates = 0;
};

struct UpdateStats {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    double grad_norm = 0.0;
};

/// Per-window constants of the combined loss: normalized advantages and
/// projected target distributions. These are plain values; no gradient flows
/// through them.
struct UpdateInputs {
    std::vector<double> advantages;      // one per record, normalized
    std::vector<std::vector<double>> targets; // one distribution per record
};
UpdateInputs prepare_update(std::span<const TransitionRecord> batch,
                            const nn::CriticNetwork& critic, const AtomGrid& grid,
                            const UtilityFn& utility, const TrainerConfig& config);

/// Loss pieces computed on a tape over a full update window; exposed for the
/// gradient-check tests.
struct LossNodes {
    nn::Tape::NodeId total = -1;
    nn::Tape::NodeId actor = -1;
    nn::Tape::NodeId critic = -1;
    nn::Tape::NodeId entropy = -1;
};
LossNodes build_loss_graph(nn::Tape& tape, nn::ActorNetwork& actor, nn::CriticNetwork& critic,
                           std::span<const TransitionRecord> batch, const UpdateInputs& inputs,
                           const TrainerConfig& config);

/// Runs stochastic (or greedy) rollouts of a trained actor through the
/// Policy interface; tracks the accrued reward input between steps.
class ActorPolicy final : public Policy {
public:
    ActorPolicy(nn::ActorNetwork net, double gamma, bool include_tau, bool greedy = false);

    std::unique_ptr<Policy> clone() const override;
    void reset(const EnvironmentConfig& config) override;
    ActionVector act(const MaintenanceEnv& env, const ObservationVector* last_obs,
                     RandomStream& rng) override;
    void observe_step(const StepResult& result) override;

private:
    nn::ActorNetwork net_;
    double gamma_;
    bool include_tau_;
    bool greedy_;
    std::array<double, 2> accrued_{};
    double discount_ = 1.0;
};

/// On-policy MO-DCMAC training: linear learning-rate annealing, updates every
/// update_every global steps (windows may span episode boundaries), periodic
/// evaluation snapshots. Deterministic given the config seed.
class Trainer {
public:
    Trainer(EnvironmentConfig env_config, UtilityFunction utility, TrainerConfig config);

    TrainResult run(std::ostream* progress = nullptr);

    double lr_actor_at(long step) const;
    double lr_critic_at(long step) const;

private:
    UpdateStats update_networks(std::span<const TransitionRecord> batch, long steps_done);
    TrainLogRow evaluation_snapshot(long step, long episode, const UpdateStats& last);

    EnvironmentConfig env_config_;
    UtilityFunction utility_;
    TrainerConfig config_;
    AtomGrid grid_;
    UtilityFn ufn_;
    nn::ActorNetwork actor_;
    nn::CriticNetwork critic_;
    nn::AdamOptimizer actor_opt_;
    nn::AdamOptimizer critic_opt_;
};

void write_train_log_csv(std::span<const TrainLogRow> rows, std::ostream& out);

} // namespace quaymaint
