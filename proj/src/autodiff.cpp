#include "quaymaint/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace quaymaint::nn {

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    Tensor t;
    t.shape = std::move(shape);
    t.v.assign(n, 0.0);
    return t;
}

Parameter::Parameter(std::string name_, Tensor value_)
    : name(std::move(name_)), value(std::move(value_)) {
    grad = Tensor::zeros(value.shape);
}

void Parameter::zero_grad() { std::fill(grad.v.begin(), grad.v.end(), 0.0); }

Tape::NodeId Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<NodeId>(nodes_.size() - 1);
}

const Tape::Node& Tape::at(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
        throw std::logic_error("tape: invalid node id");
    }
    return nodes_[static_cast<std::size_t>(id)];
}

Tape::NodeId Tape::constant(Tensor t) {
    Node n;
    n.op = Op::constant;
    n.val = std::move(t);
    return push(std::move(n));
}

Tape::NodeId Tape::parameter(Parameter& p) {
    Node n;
    n.op = Op::parameter;
    n.param = &p;
    n.val = p.value;
    return push(std::move(n));
}

Tape::NodeId Tape::affine(NodeId W, NodeId b, NodeId x) {
    const Tensor& w = at(W).val;
    const Tensor& bias = at(b).val;
    const Tensor& in = at(x).val;
    if (w.shape.size() != 2 || in.shape.size() != 1 || bias.shape.size() != 1 ||
        w.shape[1] != in.shape[0] || w.shape[0] != bias.shape[0]) {
        throw std::invalid_argument("affine: dimension mismatch");
    }
    const std::size_t m = w.shape[0];
    const std::size_t k = w.shape[1];
    Node n;
    n.op = Op::affine;
    n.a = W;
    n.b = b;
    n.c = x;
    n.val = Tensor::zeros({m});
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = w.v.data() + i * k;
        double acc = bias.v[i];
        for (std::size_t j = 0; j < k; ++j) acc += row[j] * in.v[j];
        n.val.v[i] = acc;
    }
    return push(std::move(n));
}

Tape::NodeId Tape::tanh(NodeId x) {
    Node n;
    n.op = Op::tanh_op;
    n.a = x;
    n.val = at(x).val;
    for (double& v : n.val.v) v = std::tanh(v);
    return push(std::move(n));
}

Tape::NodeId Tape::log_softmax(NodeId x) {
    const Tensor& in = at(x).val;
    if (in.v.empty()) throw std::invalid_argument("log_softmax: empty input");
    Node n;
    n.op = Op::log_softmax;
    n.a = x;
    n.val = in;
    const double mx = *std::max_element(in.v.begin(), in.v.end());
    double sum = 0.0;
    for (double v : in.v) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    for (double& v : n.val.v) v -= lse;
    return push(std::move(n));
}

Tape::NodeId Tape::softmax(NodeId x) {
    const Tensor& in = at(x).val;
    if (in.v.empty()) throw std::invalid_argument("softmax: empty input");
    Node n;
    n.op = Op::softmax;
    n.a = x;
    n.val = in;
    const double mx = *std::max_element(in.v.begin(), in.v.end());
    double sum = 0.0;
    for (double& v : n.val.v) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : n.val.v) v /= sum;
    return push(std::move(n));
}

Tape::NodeId Tape::log(NodeId x) {
    Node n;
    n.op = Op::log_op;
    n.a = x;
    n.val = at(x).val;
    for (double& v : n.val.v) v = std::log(v);
    return push(std::move(n));
}

Tape::NodeId Tape::exp(NodeId x) {
    Node n;
    n.op = Op::exp_op;
    n.a = x;
    n.val = at(x).val;
    for (double& v : n.val.v) v = std::exp(v);
    return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    const Tensor& ta = at(a).val;
    const Tensor& tb = at(b).val;
    if (ta.shape != tb.shape) throw std::invalid_argument("add: shape mismatch");
    Node n;
    n.op = Op::add;
    n.a = a;
    n.b = b;
    n.val = ta;
    for (std::size_t i = 0; i < n.val.v.size(); ++i) n.val.v[i] += tb.v[i];
    return push(std::move(n));
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
    const Tensor& ta = at(a).val;
    const Tensor& tb = at(b).val;
    if (ta.shape != tb.shape) throw std::invalid_argument("mul: shape mismatch");
    Node n;
    n.op = Op::mul;
    n.a = a;
    n.b = b;
    n.val = ta;
    for (std::size_t i = 0; i < n.val.v.size(); ++i) n.val.v[i] *= tb.v[i];
    return push(std::move(n));
}

Tape::NodeId Tape::gather(NodeId x, std::size_t index) {
    const Tensor& in = at(x).val;
    if (index >= in.v.size()) throw std::invalid_argument("gather: index out of range");
    Node n;
    n.op = Op::gather;
    n.a = x;
    n.index = index;
    n.val = Tensor::scalar(in.v[index]);
    return push(std::move(n));
}

Tape::NodeId Tape::sum(NodeId x) {
    const Tensor& in = at(x).val;
    Node n;
    n.op = Op::sum;
    n.a = x;
    n.val = Tensor::scalar(std::accumulate(in.v.begin(), in.v.end(), 0.0));
    return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId x, double k) {
    Node n;
    n.op = Op::scale;
    n.a = x;
    n.k = k;
    n.val = at(x).val;
    for (double& v : n.val.v) v *= k;
    return push(std::move(n));
}

const Tensor& Tape::value(NodeId id) const { return at(id).val; }

double Tape::scalar_value(NodeId id) const {
    const Tensor& t = at(id).val;
    if (t.size() != 1) throw std::logic_error("scalar_value: node is not a scalar");
    return t.v[0];
}

void Tape::backward(NodeId loss) {
    if (nodes_.empty()) throw std::logic_error("backward: no recorded forward computation");
    if (loss < 0 || static_cast<std::size_t>(loss) >= nodes_.size()) {
        throw std::logic_error("backward: invalid loss node");
    }
    if (nodes_[static_cast<std::size_t>(loss)].val.size() != 1) {
        throw std::logic_error("backward: loss must be a scalar");
    }

    for (NodeId id = 0; id <= loss; ++id) {
        auto& n = nodes_[static_cast<std::size_t>(id)];
        n.grad = Tensor::zeros(n.val.shape);
    }
    nodes_[static_cast<std::size_t>(loss)].grad.v[0] = 1.0;

    for (NodeId id = loss; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        const std::vector<double>& g = n.grad.v;
        switch (n.op) {
            case Op::constant:
                break;
            case Op::parameter:
                for (std::size_t i = 0; i < g.size(); ++i) n.param->grad.v[i] += g[i];
                break;
            case Op::affine: {
                Node& wn = nodes_[static_cast<std::size_t>(n.a)];
                Node& bn = nodes_[static_cast<std::size_t>(n.b)];
                Node& xn = nodes_[static_cast<std::size_t>(n.c)];
                const std::size_t m = wn.val.shape[0];
                const std::size_t k = wn.val.shape[1];
                for (std::size_t i = 0; i < m; ++i) {
                    const double gi = g[i];
                    if (gi == 0.0) continue;
                    double* wg = wn.grad.v.data() + i * k;
                    const double* wv = wn.val.v.data() + i * k;
                    for (std::size_t j = 0; j < k; ++j) {
                        wg[j] += gi * xn.val.v[j];
                        xn.grad.v[j] += gi * wv[j];
                    }
                    bn.grad.v[i] += gi;
                }
                break;
            }
            case Op::tanh_op: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    xn.grad.v[i] += g[i] * (1.0 - n.val.v[i] * n.val.v[i]);
                }
                break;
            }
            case Op::softmax: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                double dot = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * n.val.v[i];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    xn.grad.v[i] += n.val.v[i] * (g[i] - dot);
                }
                break;
            }
            case Op::log_softmax: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                double gsum = 0.0;
                for (double gi : g) gsum += gi;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    xn.grad.v[i] += g[i] - std::exp(n.val.v[i]) * gsum;
                }
                break;
            }
            case Op::log_op: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                for (std::size_t i = 0; i < g.size(); ++i) xn.grad.v[i] += g[i] / xn.val.v[i];
                break;
            }
            case Op::exp_op: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                for (std::size_t i = 0; i < g.size(); ++i) xn.grad.v[i] += g[i] * n.val.v[i];
                break;
            }
            case Op::add: {
                Node& an = nodes_[static_cast<std::size_t>(n.a)];
                Node& bn = nodes_[static_cast<std::size_t>(n.b)];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    an.grad.v[i] += g[i];
                    bn.grad.v[i] += g[i];
                }
                break;
            }
            case Op::mul: {
                Node& an = nodes_[static_cast<std::size_t>(n.a)];
                Node& bn = nodes_[static_cast<std::size_t>(n.b)];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    an.grad.v[i] += g[i] * bn.val.v[i];
                    bn.grad.v[i] += g[i] * an.val.v[i];
                }
                break;
            }
            case Op::gather: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                xn.grad.v[n.index] += g[0];
                break;
            }
            case Op::sum: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                for (double& gi : xn.grad.v) gi += g[0];
                break;
            }
            case Op::scale: {
                Node& xn = nodes_[static_cast<std::size_t>(n.a)];
                for (std::size_t i = 0; i < g.size(); ++i) xn.grad.v[i] += n.k * g[i];
                break;
            }
        }
    }
}

void Tape::clear() { nodes_.clear(); }

} // namespace quaymaint::nn
