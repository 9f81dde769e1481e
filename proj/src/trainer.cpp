#include "quaymaint/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace quaymaint {

UtilityFn utility_fn(const UtilityFunction& utility) {
    return [utility](std::span<const double> x) {
        return utility.evaluate({x[0], x[1]});
    };
}

double preference_score(std::span<const double> z_probs, std::span<const double> accrued,
                        const AtomGrid& grid, const UtilityFn& utility, double gamma_pow,
                        const double* reward, double gamma) {
    if (z_probs.size() != grid.size()) {
        throw std::invalid_argument("preference_score: distribution size != atom count");
    }
    const int d = grid.dims();
    double cand[8];
    double score = 0.0;
    for (std::size_t i = 0; i < z_probs.size(); ++i) {
        const double p = z_probs[i];
        if (p == 0.0) continue;
        const auto z = grid.atom(i);
        for (int k = 0; k < d; ++k) {
            const double inner = reward ? reward[k] + gamma * z[static_cast<std::size_t>(k)]
                                        : z[static_cast<std::size_t>(k)];
            cand[k] = accrued[static_cast<std::size_t>(k)] + gamma_pow * inner;
        }
        score += p * utility({cand, static_cast<std::size_t>(d)});
    }
    return score;
}

double raw_advantage(std::span<const double> z_next, std::span<const double> z_curr,
                     std::span<const double> accrued, std::span<const double> reward,
                     const AtomGrid& grid, const UtilityFn& utility, double gamma, int t,
                     bool done) {
    const double gamma_pow = std::pow(gamma, t);
    double next_term;
    if (done) {
        double cand[8];
        for (int k = 0; k < grid.dims(); ++k) {
            cand[k] = accrued[static_cast<std::size_t>(k)] +
                      gamma_pow * reward[static_cast<std::size_t>(k)];
        }
        next_term = utility({cand, static_cast<std::size_t>(grid.dims())});
    } else {
        next_term = preference_score(z_next, accrued, grid, utility, gamma_pow, reward.data(), gamma);
    }
    const double curr_term = preference_score(z_curr, accrued, grid, utility, gamma_pow, nullptr, gamma);
    return next_term - curr_term;
}

void normalize_advantages(std::span<double> advantages, double eps) {
    const std::size_t n = advantages.size();
    if (n < 2) throw std::invalid_argument("normalize_advantages: batch size must be >= 2");
    const auto [lo, hi] = std::minmax_element(advantages.begin(), advantages.end());
    if (*lo == *hi) {
        std::fill(advantages.begin(), advantages.end(), 0.0);
        return;
    }
    double mean = 0.0;
    for (double a : advantages) mean += a;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    const double denom = std::sqrt(var) + eps;
    for (double& a : advantages) a = (a - mean) / denom;
}

std::vector<double> project_distribution(std::span<const double> reward,
                                         std::span<const double> z_next, const AtomGrid& grid,
                                         double gamma, bool done) {
    if (z_next.size() != grid.size()) {
        throw std::invalid_argument("project_distribution: distribution size != atom count");
    }
    const int d = grid.dims();
    const int n = grid.atoms_per_dim();
    std::vector<double> out(grid.size(), 0.0);

    int lower[8];
    double frac[8];
    for (std::size_t j = 0; j < z_next.size(); ++j) {
        const double p = z_next[j];
        if (p == 0.0) continue;
        const auto z = grid.atom(j);
        for (int k = 0; k < d; ++k) {
            double tz = reward[static_cast<std::size_t>(k)];
            if (!done) tz += gamma * z[static_cast<std::size_t>(k)];
            tz = std::min(std::max(tz, grid.v_min(k)), grid.v_max(k));
            double x = (tz - grid.v_min(k)) / grid.delta(k);
            x = std::min(std::max(x, 0.0), static_cast<double>(n - 1));
            int l = static_cast<int>(std::floor(x));
            if (l >= n - 1) l = n - 1;
            lower[k] = l;
            frac[k] = x - static_cast<double>(l);
        }
        const int corners = 1 << d;
        for (int mask = 0; mask < corners; ++mask) {
            double w = p;
            std::size_t flat = 0;
            bool valid = true;
            for (int k = 0; k < d; ++k) {
                const bool hi = (mask >> k) & 1;
                const double wk = hi ? frac[k] : 1.0 - frac[k];
                if (wk == 0.0) {
                    valid = false;
                    break;
                }
                const int idx = lower[k] + (hi ? 1 : 0);
                if (idx >= n) {
                    valid = false;
                    break;
                }
                w *= wk;
                flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx);
            }
            if (valid) out[flat] += w;
        }
    }
    return out;
}

std::vector<double> encode_input(const BeliefState& belief, int horizon,
                                 std::array<double, 2> accrued, bool include_tau, int tau_max) {
    const std::size_t n = belief.num_components();
    std::vector<double> x;
    x.reserve(n * kNumHealthStates + (include_tau ? n : 0) + 3);
    x.insert(x.end(), belief.probs.begin(), belief.probs.end());
    if (include_tau) {
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(static_cast<double>(belief.tau[i]) / static_cast<double>(tau_max));
        }
    }
    x.push_back(static_cast<double>(belief.timestep) / static_cast<double>(horizon));
    x.push_back(accrued[0]);
    x.push_back(accrued[1]);
    return x;
}

int encoded_input_dim(int num_components, bool include_tau) {
    return num_components * kNumHealthStates + (include_tau ? num_components : 0) + 3;
}

TrainerConfig TrainerConfig::defaults_for(UtilityKind kind) {
    TrainerConfig c;
    if (kind == UtilityKind::fmeca) {
        c.gamma = 0.975;
        c.v_min = {-4.0, -0.02};
    } else {
        c.gamma = 0.995;
        c.v_min = {-12.0, -0.1};
    }
    return c;
}

UpdateInputs prepare_update(std::span<const TransitionRecord> batch,
                            const nn::CriticNetwork& critic, const AtomGrid& grid,
                            const UtilityFn& utility, const TrainerConfig& config) {
    const std::size_t B = batch.size();
    if (B < 2) throw std::invalid_argument("update: batch size must be >= 2");

    UpdateInputs inputs;
    inputs.advantages.resize(B);
    inputs.targets.resize(B);
    for (std::size_t i = 0; i < B; ++i) {
        const TransitionRecord& rec = batch[i];
        const std::vector<double> z_curr = forward_critic(critic, rec.input);
        const std::vector<double> z_next = forward_critic(critic, rec.next_input);
        inputs.advantages[i] = raw_advantage(z_next, z_curr, rec.accrued, rec.reward, grid,
                                             utility, config.gamma, rec.t, rec.done);
        inputs.targets[i] = project_distribution(rec.reward, z_next, grid, config.gamma, rec.done);
    }
    normalize_advantages(inputs.advantages);
    return inputs;
}

LossNodes build_loss_graph(nn::Tape& tape, nn::ActorNetwork& actor, nn::CriticNetwork& critic,
                           std::span<const TransitionRecord> batch, const UpdateInputs& inputs,
                           const TrainerConfig& config) {
    using nn::Tape;
    const std::size_t B = batch.size();
    if (B != inputs.advantages.size() || B != inputs.targets.size()) {
        throw std::invalid_argument("update: batch and inputs disagree");
    }

    Tape::NodeId actor_acc = -1;
    Tape::NodeId critic_acc = -1;
    Tape::NodeId ent_acc = -1;

    for (std::size_t i = 0; i < B; ++i) {
        const TransitionRecord& rec = batch[i];

        nn::Tensor in = nn::Tensor::zeros({rec.input.size()});
        in.v = rec.input;
        const Tape::NodeId input = tape.constant(std::move(in));

        const Tape::NodeId log_z = traced_critic_logp(tape, critic, input);
        nn::Tensor tgt = nn::Tensor::zeros({inputs.targets[i].size()});
        tgt.v = inputs.targets[i];
        const Tape::NodeId ce =
            tape.scale(tape.sum(tape.mul(tape.constant(std::move(tgt)), log_z)), -1.0);

        const nn::ActorTrace trace = traced_actor(tape, actor, input);
        Tape::NodeId lp =
            tape.gather(trace.comp_logp[0], static_cast<std::size_t>(rec.comp_actions[0]));
        for (std::size_t c = 1; c < trace.comp_logp.size(); ++c) {
            lp = tape.add(lp, tape.gather(trace.comp_logp[c],
                                          static_cast<std::size_t>(rec.comp_actions[c])));
        }
        lp = tape.add(lp, tape.gather(trace.global_logp, static_cast<std::size_t>(rec.global_action)));
        const Tape::NodeId weighted = tape.scale(lp, inputs.advantages[i]);

        Tape::NodeId ent = tape.scale(
            tape.sum(tape.mul(tape.exp(trace.comp_logp[0]), trace.comp_logp[0])), -1.0);
        for (std::size_t c = 1; c < trace.comp_logp.size(); ++c) {
            ent = tape.add(ent, tape.scale(tape.sum(tape.mul(tape.exp(trace.comp_logp[c]),
                                                             trace.comp_logp[c])), -1.0));
        }
        ent = tape.add(ent, tape.scale(
                                tape.sum(tape.mul(tape.exp(trace.global_logp), trace.global_logp)),
                                -1.0));

        actor_acc = i == 0 ? weighted : tape.add(actor_acc, weighted);
        critic_acc = i == 0 ? ce : tape.add(critic_acc, ce);
        ent_acc = i == 0 ? ent : tape.add(ent_acc, ent);
    }

    LossNodes nodes;
    nodes.actor = tape.scale(actor_acc, -1.0 / static_cast<double>(B));
    nodes.critic = tape.scale(critic_acc, 1.0 / static_cast<double>(B));
    nodes.entropy = tape.scale(ent_acc, 1.0 / static_cast<double>(B));
    nodes.total = tape.add(tape.add(nodes.actor, tape.scale(nodes.critic, config.lambda_val)),
                           tape.scale(nodes.entropy, -config.lambda_ent));
    return nodes;
}

ActorPolicy::ActorPolicy(nn::ActorNetwork net, double gamma, bool include_tau, bool greedy)
    : net_(std::move(net)), gamma_(gamma), include_tau_(include_tau), greedy_(greedy) {}

std::unique_ptr<Policy> ActorPolicy::clone() const { return std::make_unique<ActorPolicy>(*this); }

void ActorPolicy::reset(const EnvironmentConfig&) {
    accrued_ = {0.0, 0.0};
    discount_ = 1.0;
}

ActionVector ActorPolicy::act(const MaintenanceEnv& env, const ObservationVector*,
                              RandomStream& rng) {
    const auto& model = env.config().degradation_models.front();
    const std::vector<double> input =
        encode_input(env.belief(), env.horizon(), accrued_, include_tau_, model.tau_max);
    const nn::ActorDecision decision = forward_actor(net_, input);

    ActionVector a = make_nothing_actions(env.num_components());
    for (int c = 0; c < env.num_components(); ++c) {
        const auto& probs = decision.comp_probs[static_cast<std::size_t>(c)];
        std::size_t pick;
        if (greedy_) {
            pick = 0;
            for (std::size_t k = 1; k < probs.size(); ++k) {
                if (probs[k] > probs[pick]) pick = k;
            }
        } else {
            pick = rng.categorical(probs);
        }
        a.component[static_cast<std::size_t>(c)] = static_cast<ComponentAction>(pick);
    }
    if (greedy_) {
        a.global = decision.global_probs[1] > decision.global_probs[0] ? GlobalAction::inspect
                                                                       : GlobalAction::nothing;
    } else {
        a.global = static_cast<GlobalAction>(rng.categorical(decision.global_probs));
    }
    return a;
}

void ActorPolicy::observe_step(const StepResult& result) {
    accrued_[0] += discount_ * result.reward.neg_cost;
    accrued_[1] += discount_ * result.reward.log_survival;
    discount_ *= gamma_;
}

Trainer::Trainer(EnvironmentConfig env_config, UtilityFunction utility, TrainerConfig config)
    : env_config_(std::move(env_config)),
      utility_(std::move(utility)),
      config_(config),
      grid_({config.v_min[0], config.v_min[1]}, {config.v_max[0], config.v_max[1]},
            config.n_atoms),
      ufn_(utility_fn(utility_)),
      actor_(nn::make_actor(config.seed,
                            encoded_input_dim(static_cast<int>(env_config_.num_components()),
                                              config.include_tau),
                            static_cast<int>(env_config_.num_components()), config.shared_width,
                            config.head_hidden)),
      critic_(nn::make_critic(config.seed,
                              encoded_input_dim(static_cast<int>(env_config_.num_components()),
                                                config.include_tau),
                              static_cast<int>(grid_.size()), config.critic_hidden)),
      actor_opt_(actor_.parameters(), config.adam_beta1, config.adam_beta2, config.adam_eps),
      critic_opt_(critic_.parameters(), config.adam_beta1, config.adam_beta2, config.adam_eps) {
    validate_config(env_config_);
    if (config_.gamma <= 0.0 || config_.gamma > 1.0) {
        throw std::invalid_argument("TrainerConfig: gamma must be in (0, 1]");
    }
    if (config_.update_every < 2) {
        throw std::invalid_argument("TrainerConfig: update_every must be >= 2");
    }
}

double Trainer::lr_actor_at(long step) const {
    const double f = std::min(1.0, static_cast<double>(step) / static_cast<double>(config_.total_steps));
    return config_.actor_lr_start + f * (config_.actor_lr_end - config_.actor_lr_start);
}

double Trainer::lr_critic_at(long step) const {
    const double f = std::min(1.0, static_cast<double>(step) / static_cast<double>(config_.total_steps));
    return config_.critic_lr_start + f * (config_.critic_lr_end - config_.critic_lr_start);
}

UpdateStats Trainer::update_networks(std::span<const TransitionRecord> batch, long steps_done) {
    const UpdateInputs inputs = prepare_update(batch, critic_, grid_, ufn_, config_);
    nn::Tape tape;
    const LossNodes nodes = build_loss_graph(tape, actor_, critic_, batch, inputs, config_);

    UpdateStats stats;
    stats.actor_loss = tape.scalar_value(nodes.actor);
    stats.critic_loss = tape.scalar_value(nodes.critic);
    stats.entropy = tape.scalar_value(nodes.entropy);

    tape.backward(nodes.total);

    std::vector<nn::Parameter*> all = actor_.parameters();
    const auto critic_params = critic_.parameters();
    all.insert(all.end(), critic_params.begin(), critic_params.end());
    stats.grad_norm = nn::clip_global_norm(all, config_.clip_grad_norm);

    actor_opt_.step(lr_actor_at(steps_done));
    critic_opt_.step(lr_critic_at(steps_done));
    return stats;
}

TrainLogRow Trainer::evaluation_snapshot(long step, long episode, const UpdateStats& last) {
    double sum_u = 0.0, sum_cost = 0.0, sum_p = 0.0;
    ActorPolicy policy(actor_.clone(), config_.gamma, config_.include_tau, false);
    const std::uint64_t snapshot = static_cast<std::uint64_t>(step);
    for (int ep = 0; ep < config_.eval_episodes; ++ep) {
        const std::uint64_t idx = snapshot * 1000003ULL + static_cast<std::uint64_t>(ep);
        RandomStream env_rng = derive_stream(config_.seed, idx, StreamPurpose::training_eval_env);
        RandomStream pol_rng = derive_stream(config_.seed, idx, StreamPurpose::training_eval_policy);
        const EpisodeRow row =
            run_episode(env_config_, policy, utility_, config_.gamma, env_rng, pol_rng, ep);
        sum_u += row.utility;
        sum_cost += row.cost_raw;
        sum_p += row.prisk_raw;
    }
    const double n = static_cast<double>(config_.eval_episodes);
    TrainLogRow row;
    row.global_step = step;
    row.episode = episode;
    row.mean_utility = sum_u / n;
    row.mean_cost = sum_cost / n;
    row.mean_prisk = sum_p / n;
    row.actor_loss = last.actor_loss;
    row.critic_loss = last.critic_loss;
    row.entropy = last.entropy;
    row.lr_actor = lr_actor_at(step);
    row.lr_critic = lr_critic_at(step);
    return row;
}

TrainResult Trainer::run(std::ostream* progress) {
    TrainResult result{actor_.clone(), critic_.clone(), {}, 0, 0};

    std::vector<TransitionRecord> buffer;
    buffer.reserve(static_cast<std::size_t>(config_.update_every));

    MaintenanceEnv env(env_config_);
    long episode = 0;
    long n = 0;
    UpdateStats last_stats;

    RandomStream env_rng = derive_stream(config_.seed, 0, StreamPurpose::environment);
    RandomStream act_rng = derive_stream(config_.seed, 0, StreamPurpose::policy);
    std::array<double, 2> accrued{0.0, 0.0};
    double discount = 1.0;
    int t = 0;
    std::vector<double> input = encode_input(env.belief(), env.horizon(), accrued,
                                             config_.include_tau,
                                             env_config_.degradation_models.front().tau_max);

    while (n < config_.total_steps) {
        const nn::ActorDecision decision = forward_actor(actor_, input);
        TransitionRecord rec;
        rec.input = input;
        rec.comp_actions.resize(env_config_.num_components());
        rec.logp.reserve(env_config_.num_components() + 1);

        ActionVector actions = make_nothing_actions(env.num_components());
        for (std::size_t c = 0; c < env_config_.num_components(); ++c) {
            const std::size_t pick = act_rng.categorical(decision.comp_probs[c]);
            rec.comp_actions[c] = static_cast<int>(pick);
            rec.logp.push_back(decision.comp_logp[c][pick]);
            actions.component[c] = static_cast<ComponentAction>(pick);
        }
        const std::size_t gpick = act_rng.categorical(decision.global_probs);
        rec.global_action = static_cast<int>(gpick);
        rec.logp.push_back(decision.global_logp[gpick]);
        actions.global = static_cast<GlobalAction>(gpick);

        const StepResult sr = env.step(actions, env_rng);
        rec.reward = {sr.reward.neg_cost, sr.reward.log_survival};
        rec.accrued = accrued;
        rec.t = t;
        rec.done = sr.done;

        accrued[0] += discount * sr.reward.neg_cost;
        accrued[1] += discount * sr.reward.log_survival;
        discount *= config_.gamma;
        ++t;

        std::vector<double> next_input =
            encode_input(env.belief(), env.horizon(), accrued, config_.include_tau,
                         env_config_.degradation_models.front().tau_max);
        rec.next_input = next_input;
        buffer.push_back(std::move(rec));
        ++n;

        if (sr.done) {
            ++episode;
            env.reset();
            accrued = {0.0, 0.0};
            discount = 1.0;
            t = 0;
            env_rng = derive_stream(config_.seed, static_cast<std::uint64_t>(episode),
                                    StreamPurpose::environment);
            act_rng = derive_stream(config_.seed, static_cast<std::uint64_t>(episode),
                                    StreamPurpose::policy);
            next_input = encode_input(env.belief(), env.horizon(), accrued, config_.include_tau,
                                      env_config_.degradation_models.front().tau_max);
        }
        input = std::move(next_input);

        if (n % config_.update_every == 0) {
            last_stats = update_networks(buffer, n);
            buffer.clear();
            ++result.updates;
        }

        if (config_.eval_interval > 0 &&
            (n % config_.eval_interval == 0 || n == config_.total_steps)) {
            result.log.push_back(evaluation_snapshot(n, episode, last_stats));
            if (progress) {
                const auto& row = result.log.back();
                *progress << "step " << row.global_step << " episode " << row.episode
                          << " mean_utility " << row.mean_utility << " mean_cost " << row.mean_cost
                          << " mean_Prisk " << row.mean_prisk << "\n";
            }
        }
    }

    result.actor = actor_.clone();
    result.critic = critic_.clone();
    result.episodes = episode;
    return result;
}

void write_train_log_csv(std::span<const TrainLogRow> rows, std::ostream& out) {
    auto fmt9 = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    out << "global_step,episode,mean_utility,mean_cost,mean_Prisk,actor_loss,critic_loss,"
           "entropy,lr_actor,lr_critic\n";
    for (const auto& r : rows) {
        out << r.global_step << ',' << r.episode << ',' << fmt9(r.mean_utility) << ','
            << fmt9(r.mean_cost) << ',' << fmt9(r.mean_prisk) << ',' << fmt9(r.actor_loss) << ','
            << fmt9(r.critic_loss) << ',' << fmt9(r.entropy) << ',' << fmt9(r.lr_actor) << ','
            << fmt9(r.lr_critic) << '\n';
    }
}

} // namespace quaymaint
