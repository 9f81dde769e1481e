#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace quaymaint::nn {

/// Dense row-major tensor of doubles. Rank 0 (scalar), 1 or 2 is all the
/// networks need.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> v;

    static Tensor scalar(double x) { return {{}, {x}}; }
    static Tensor zeros(std::vector<std::size_t> shape);
    std::size_t size() const { return v.size(); }
};

/// Trainable tensor with a same-shape gradient accumulator.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string name_, Tensor value_);
    void zero_grad();
};

/**
 * Define-by-run reverse-mode tape. Forward values are computed eagerly as
 * nodes are recorded; backward(loss) sweeps the recorded graph once and
 * accumulates d(loss)/d(parameter) into every Parameter touched by the
 * forward pass. Forward is pure; backward mutates only gradient buffers.
 */
class Tape {
public:
    using NodeId = int;

    NodeId constant(Tensor t);
    NodeId parameter(Parameter& p);

    /// y = W x + b with W (m,n), x (n), b (m).
    NodeId affine(NodeId W, NodeId b, NodeId x);
    NodeId tanh(NodeId x);
    NodeId softmax(NodeId x);
    /// Numerically stable log-softmax (max shift); softmax == exp(log_softmax).
    NodeId log_softmax(NodeId x);
    NodeId log(NodeId x);
    NodeId exp(NodeId x);
    NodeId add(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    /// Scalar pick of one element.
    NodeId gather(NodeId x, std::size_t index);
    /// Scalar reduction.
    NodeId sum(NodeId x);
    NodeId scale(NodeId x, double k);

    const Tensor& value(NodeId id) const;
    double scalar_value(NodeId id) const;

    /// Reverse sweep from a scalar loss node. Throws std::logic_error when
    /// there is no recorded computation or the node is not a scalar.
    void backward(NodeId loss);

    void clear();
    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        constant, parameter, affine, tanh_op, softmax, log_softmax, log_op,
        exp_op, add, mul, gather, sum, scale
    };

    struct Node {
        Op op;
        NodeId a = -1, b = -1, c = -1;
        Parameter* param = nullptr;
        double k = 0.0;
        std::size_t index = 0;
        Tensor val;
        Tensor grad;
    };

    NodeId push(Node node);
    const Node& at(NodeId id) const;

    std::vector<Node> nodes_;
};

} // namespace quaymaint::nn
