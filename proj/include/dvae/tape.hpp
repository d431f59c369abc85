#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dvae/param_store.hpp"

namespace dvae {

enum class Activation { identity, relu, tanh, sigmoid, exp };

// Reverse-mode gradient tape over vector-valued nodes. Operations are
// recorded in execution order; backward() replays them in reverse and
// accumulates dLoss/dtheta into the bound ParamStore's gradient shadow.
// A tape is confined to one thread; reset() recycles the buffers so a
// training loop can reuse one tape per sample without reallocation.
class Tape {
public:
    using NodeId = std::uint32_t;

    NodeId constant(std::span<const double> v);
    NodeId constant(double v) { return constant(std::span<const double>(&v, 1)); }
    NodeId zeros(std::size_t n);

    // Leaf bound to a parameter entry; memoized so shared weights (e.g. one
    // LSTM cell unrolled over several inputs) accumulate into one node.
    NodeId param(ParamStore& store, std::size_t entry_index);

    // y = W x + b with W read row-major as [rows(b) x len(x)].
    NodeId affine(NodeId w, NodeId b, NodeId x);
    NodeId activation(NodeId x, Activation a);
    NodeId add(NodeId a, NodeId b);
    NodeId hadamard(NodeId a, NodeId b);
    NodeId slice(NodeId x, std::size_t offset, std::size_t len);
    NodeId concat(std::span<const NodeId> parts);
    NodeId scale(NodeId x, double s);
    // s0*a + s1*b elementwise; used to combine scalar loss terms.
    NodeId add_scaled(NodeId a, double s0, NodeId b, double s1);

    // Escape hatch for fused operations with hand-written backward rules
    // (losses, the descriptive decoder). The closure runs during the reverse
    // sweep, receives its own output node and must add into the input
    // nodes' grads via grad().
    NodeId custom(std::vector<double> value, std::function<void(Tape&, NodeId)> backward);

    void backward(NodeId scalar_root, double seed = 1.0);

    std::span<const double> value(NodeId id) const;
    std::span<double> grad(NodeId id);
    double scalar(NodeId id) const;
    std::size_t size(NodeId id) const;

    std::size_t node_count() const { return nodes_.size(); }
    bool recorded() const { return !ops_.empty() || !nodes_.empty(); }

    void reset();

private:
    struct Node {
        std::size_t offset;
        std::size_t len;
    };

    enum class OpKind : std::uint8_t {
        param_transfer,
        affine,
        activation,
        add,
        hadamard,
        slice,
        concat,
        scale,
        add_scaled,
        custom,
    };

    struct Op {
        OpKind kind;
        Activation act = Activation::identity;
        NodeId out = 0;
        NodeId a = 0;
        NodeId b = 0;
        NodeId c = 0;
        double s0 = 0.0;
        double s1 = 0.0;
        std::size_t aux = 0;    // slice offset / concat args start
        std::size_t aux2 = 0;   // concat args count / custom index
        ParamEntry* entry = nullptr;
    };

    NodeId alloc(std::size_t len);
    std::span<double> mut_value(NodeId id);
    void run_backward_op(const Op& op);

    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<Op> ops_;
    std::vector<NodeId> concat_args_;
    std::vector<std::function<void(Tape&, NodeId)>> customs_;
    std::unordered_map<std::size_t, NodeId> param_memo_;
    ParamStore* bound_store_ = nullptr;
};

}  // namespace dvae
