#include "quaymaint/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quaymaint::nn {

namespace {

Parameter init_matrix(const std::string& name, std::size_t out, std::size_t in, RandomStream& rng,
                      double scale) {
    Tensor t = Tensor::zeros({out, in});
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& v : t.v) v = rng.uniform(-bound, bound) * scale;
    return Parameter(name, std::move(t));
}

Parameter init_vector(const std::string& name, std::size_t out, std::size_t fan_in,
                      RandomStream& rng, double scale) {
    Tensor t = Tensor::zeros({out});
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : t.v) v = rng.uniform(-bound, bound) * scale;
    return Parameter(name, std::move(t));
}

LinearLayer make_layer(const std::string& name, std::size_t out, std::size_t in,
                       std::uint64_t seed, std::uint64_t layer_index, double scale) {
    RandomStream rng = derive_stream(seed, layer_index, StreamPurpose::network_init);
    Parameter W = init_matrix(name + ".W", out, in, rng, scale);
    Parameter b = init_vector(name + ".b", out, in, rng, scale);
    return {std::move(W), std::move(b)};
}

void affine_into(const LinearLayer& layer, std::span<const double> in, std::vector<double>& out) {
    const std::size_t m = layer.W.value.shape[0];
    const std::size_t k = layer.W.value.shape[1];
    if (in.size() != k) throw std::invalid_argument("forward: input dimension mismatch");
    out.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = layer.W.value.v.data() + i * k;
        double acc = layer.b.value.v[i];
        for (std::size_t j = 0; j < k; ++j) acc += row[j] * in[j];
        out[i] = acc;
    }
}

void tanh_inplace(std::vector<double>& x) {
    for (double& v : x) v = std::tanh(v);
}

/// log-softmax with max shift, written into logp; probs = exp(logp).
template <typename Out>
void log_softmax_into(std::span<const double> logits, Out& logp) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t i = 0; i < logits.size(); ++i) logp[i] = logits[i] - lse;
}

} // namespace

std::vector<Parameter*> ActorNetwork::parameters() {
    std::vector<Parameter*> out{&shared.W, &shared.b};
    for (auto& l : head_h) {
        out.push_back(&l.W);
        out.push_back(&l.b);
    }
    for (auto& l : head_out) {
        out.push_back(&l.W);
        out.push_back(&l.b);
    }
    out.push_back(&global_h.W);
    out.push_back(&global_h.b);
    out.push_back(&global_out.W);
    out.push_back(&global_out.b);
    return out;
}

std::vector<const Parameter*> ActorNetwork::parameters() const {
    auto mut = const_cast<ActorNetwork*>(this)->parameters();
    return {mut.begin(), mut.end()};
}

ActorNetwork ActorNetwork::clone() const { return *this; }

std::vector<Parameter*> CriticNetwork::parameters() {
    return {&h.W, &h.b, &out.W, &out.b};
}

std::vector<const Parameter*> CriticNetwork::parameters() const {
    auto mut = const_cast<CriticNetwork*>(this)->parameters();
    return {mut.begin(), mut.end()};
}

CriticNetwork CriticNetwork::clone() const { return *this; }

ActorNetwork make_actor(std::uint64_t seed, int input_dim, int num_components, int shared_width,
                        int head_hidden) {
    if (input_dim < 1 || num_components < 1 || shared_width < 1 || head_hidden < 1) {
        throw std::invalid_argument("make_actor: invalid dimensions");
    }
    ActorNetwork net;
    net.input_dim = input_dim;
    net.num_components = num_components;
    net.shared_width = shared_width;
    net.head_hidden = head_hidden;

    std::uint64_t layer = 0;
    net.shared = make_layer("actor.shared", static_cast<std::size_t>(shared_width),
                            static_cast<std::size_t>(input_dim), seed, layer++, 1.0);
    net.head_h.reserve(static_cast<std::size_t>(num_components));
    net.head_out.reserve(static_cast<std::size_t>(num_components));
    for (int c = 0; c < num_components; ++c) {
        net.head_h.push_back(make_layer("actor.head" + std::to_string(c) + ".hidden",
                                        static_cast<std::size_t>(head_hidden),
                                        static_cast<std::size_t>(shared_width), seed, layer++, 1.0));
        net.head_out.push_back(make_layer("actor.head" + std::to_string(c) + ".out",
                                          kComponentActionArity,
                                          static_cast<std::size_t>(head_hidden), seed, layer++,
                                          0.01));
    }
    net.global_h = make_layer("actor.global.hidden", static_cast<std::size_t>(head_hidden),
                              static_cast<std::size_t>(shared_width), seed, layer++, 1.0);
    net.global_out = make_layer("actor.global.out", kGlobalActionArity,
                                static_cast<std::size_t>(head_hidden), seed, layer++, 0.01);
    return net;
}

CriticNetwork make_critic(std::uint64_t seed, int input_dim, int n_out, int hidden) {
    if (input_dim < 1 || n_out < 1 || hidden < 1) {
        throw std::invalid_argument("make_critic: invalid dimensions");
    }
    CriticNetwork net;
    net.input_dim = input_dim;
    net.hidden = hidden;
    net.n_out = n_out;
    // layer indices offset so critic streams never collide with actor streams
    // under a shared seed
    const std::uint64_t base = 1u << 20;
    net.h = make_layer("critic.hidden", static_cast<std::size_t>(hidden),
                       static_cast<std::size_t>(input_dim), seed, base, 1.0);
    net.out = make_layer("critic.out", static_cast<std::size_t>(n_out),
                         static_cast<std::size_t>(hidden), seed, base + 1, 0.01);
    return net;
}

ActorDecision forward_actor(const ActorNetwork& net, std::span<const double> input) {
    if (input.size() != static_cast<std::size_t>(net.input_dim)) {
        throw std::invalid_argument("forward_actor: input dimension mismatch");
    }
    ActorDecision d;
    std::vector<double> shared_out;
    affine_into(net.shared, input, shared_out);
    tanh_inplace(shared_out);

    std::vector<double> hidden, logits;
    d.comp_probs.resize(static_cast<std::size_t>(net.num_components));
    d.comp_logp.resize(static_cast<std::size_t>(net.num_components));
    for (int c = 0; c < net.num_components; ++c) {
        affine_into(net.head_h[static_cast<std::size_t>(c)], shared_out, hidden);
        tanh_inplace(hidden);
        affine_into(net.head_out[static_cast<std::size_t>(c)], hidden, logits);
        auto& lp = d.comp_logp[static_cast<std::size_t>(c)];
        log_softmax_into(logits, lp);
        for (int a = 0; a < kComponentActionArity; ++a) {
            d.comp_probs[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] =
                std::exp(lp[static_cast<std::size_t>(a)]);
        }
    }

    affine_into(net.global_h, shared_out, hidden);
    tanh_inplace(hidden);
    affine_into(net.global_out, hidden, logits);
    log_softmax_into(logits, d.global_logp);
    for (int a = 0; a < kGlobalActionArity; ++a) {
        d.global_probs[static_cast<std::size_t>(a)] = std::exp(d.global_logp[static_cast<std::size_t>(a)]);
    }
    return d;
}

std::vector<double> forward_critic(const CriticNetwork& net, std::span<const double> input) {
    if (input.size() != static_cast<std::size_t>(net.input_dim)) {
        throw std::invalid_argument("forward_critic: input dimension mismatch");
    }
    std::vector<double> hidden, logits;
    affine_into(net.h, input, hidden);
    tanh_inplace(hidden);
    affine_into(net.out, hidden, logits);
    std::vector<double> logp(logits.size());
    log_softmax_into(logits, logp);
    for (std::size_t i = 0; i < logp.size(); ++i) logp[i] = std::exp(logp[i]);
    return logp;
}

ActorTrace traced_actor(Tape& tape, ActorNetwork& net, Tape::NodeId input) {
    const auto shared = tape.tanh(
        tape.affine(tape.parameter(net.shared.W), tape.parameter(net.shared.b), input));

    ActorTrace trace;
    trace.comp_logp.reserve(static_cast<std::size_t>(net.num_components));
    for (int c = 0; c < net.num_components; ++c) {
        auto& hh = net.head_h[static_cast<std::size_t>(c)];
        auto& ho = net.head_out[static_cast<std::size_t>(c)];
        const auto hidden =
            tape.tanh(tape.affine(tape.parameter(hh.W), tape.parameter(hh.b), shared));
        const auto logits = tape.affine(tape.parameter(ho.W), tape.parameter(ho.b), hidden);
        trace.comp_logp.push_back(tape.log_softmax(logits));
    }
    const auto ghidden = tape.tanh(
        tape.affine(tape.parameter(net.global_h.W), tape.parameter(net.global_h.b), shared));
    const auto glogits =
        tape.affine(tape.parameter(net.global_out.W), tape.parameter(net.global_out.b), ghidden);
    trace.global_logp = tape.log_softmax(glogits);
    return trace;
}

Tape::NodeId traced_critic_logp(Tape& tape, CriticNetwork& net, Tape::NodeId input) {
    const auto hidden =
        tape.tanh(tape.affine(tape.parameter(net.h.W), tape.parameter(net.h.b), input));
    const auto logits =
        tape.affine(tape.parameter(net.out.W), tape.parameter(net.out.b), hidden);
    return tape.log_softmax(logits);
}

} // namespace quaymaint::nn
