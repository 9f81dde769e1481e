#pragma once

#include <array>
#include <span>

#include "quaymaint/autodiff.hpp"
#include "quaymaint/rng.hpp"

namespace quaymaint::nn {

inline constexpr int kComponentActionArity = 3;
inline constexpr int kGlobalActionArity = 2;

struct LinearLayer {
    Parameter W; // (out, in)
    Parameter b; // (out)
};

/**
 * Factored-actor MLP: one shared tanh input layer, one tanh hidden layer of
 * width head_hidden per component head plus one global head, and a softmax
 * output per head (3-way component, 2-way global).
 */
struct ActorNetwork {
    int input_dim = 0;
    int num_components = 0;
    int shared_width = 128;
    int head_hidden = 50;

    LinearLayer shared;
    std::vector<LinearLayer> head_h;
    std::vector<LinearLayer> head_out;
    LinearLayer global_h;
    LinearLayer global_out;

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
    ActorNetwork clone() const;
};

/// Categorical critic: one tanh hidden layer (150 by default), softmax output
/// over the n_out return atoms.
struct CriticNetwork {
    int input_dim = 0;
    int hidden = 150;
    int n_out = 0;

    LinearLayer h;
    LinearLayer out;

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
    CriticNetwork clone() const;
};

/// Deterministic initialization: every layer draws W row-major then b from
/// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) on a stream derived from
/// (seed, layer_counter); output layers are scaled down by 0.01 so initial
/// policies stay near uniform.
ActorNetwork make_actor(std::uint64_t seed, int input_dim, int num_components,
                        int shared_width = 128, int head_hidden = 50);
CriticNetwork make_critic(std::uint64_t seed, int input_dim, int n_out, int hidden = 150);

struct ActorDecision {
    std::vector<std::array<double, kComponentActionArity>> comp_probs;
    std::vector<std::array<double, kComponentActionArity>> comp_logp;
    std::array<double, kGlobalActionArity> global_probs{};
    std::array<double, kGlobalActionArity> global_logp{};
};

/// Pure forward pass (no gradients). Throws std::invalid_argument on an
/// input dimension mismatch.
ActorDecision forward_actor(const ActorNetwork& net, std::span<const double> input);
std::vector<double> forward_critic(const CriticNetwork& net, std::span<const double> input);

struct ActorTrace {
    std::vector<Tape::NodeId> comp_logp;
    Tape::NodeId global_logp = -1;
};

/// Gradient-recording forwards used by the trainer; log-probabilities come
/// from log-softmax nodes, probabilities from exp(log_softmax).
ActorTrace traced_actor(Tape& tape, ActorNetwork& net, Tape::NodeId input);
Tape::NodeId traced_critic_logp(Tape& tape, CriticNetwork& net, Tape::NodeId input);

} // namespace quaymaint::nn
