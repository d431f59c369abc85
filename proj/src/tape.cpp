#include "dvae/tape.hpp"

#include <algorithm>
#include <cmath>

#include "dvae/errors.hpp"

namespace dvae {

Tape::NodeId Tape::alloc(std::size_t len) {
    const std::size_t offset = values_.size();
    values_.resize(offset + len, 0.0);
    grads_.resize(offset + len, 0.0);
    nodes_.push_back(Node{offset, len});
    return static_cast<NodeId>(nodes_.size() - 1);
}

std::span<double> Tape::mut_value(NodeId id) {
    const Node& n = nodes_[id];
    return {values_.data() + n.offset, n.len};
}

std::span<const double> Tape::value(NodeId id) const {
    const Node& n = nodes_[id];
    return {values_.data() + n.offset, n.len};
}

std::span<double> Tape::grad(NodeId id) {
    const Node& n = nodes_[id];
    return {grads_.data() + n.offset, n.len};
}

double Tape::scalar(NodeId id) const {
    if (size(id) != 1) throw UsageError("node is not a scalar");
    return value(id)[0];
}

std::size_t Tape::size(NodeId id) const { return nodes_[id].len; }

Tape::NodeId Tape::constant(std::span<const double> v) {
    const NodeId id = alloc(v.size());
    std::copy(v.begin(), v.end(), mut_value(id).begin());
    return id;
}

Tape::NodeId Tape::zeros(std::size_t n) { return alloc(n); }

Tape::NodeId Tape::param(ParamStore& store, std::size_t entry_index) {
    if (bound_store_ == nullptr) bound_store_ = &store;
    if (bound_store_ != &store)
        throw UsageError("one tape cannot mix parameters from two stores");
    auto it = param_memo_.find(entry_index);
    if (it != param_memo_.end()) return it->second;

    ParamEntry& e = store.entry(entry_index);
    const NodeId id = alloc(e.size());
    std::copy(e.values.begin(), e.values.end(), mut_value(id).begin());
    Op op;
    op.kind = OpKind::param_transfer;
    op.out = id;
    op.entry = &e;
    ops_.push_back(op);
    param_memo_.emplace(entry_index, id);
    return id;
}

Tape::NodeId Tape::affine(NodeId w, NodeId b, NodeId x) {
    const std::size_t out_dim = size(b);
    const std::size_t in_dim = size(x);
    if (size(w) != out_dim * in_dim)
        throw ConfigError("affine: weight size " + std::to_string(size(w)) +
                          " does not match " + std::to_string(out_dim) + "x" +
                          std::to_string(in_dim));
    const NodeId y = alloc(out_dim);
    auto yv = mut_value(y);
    auto wv = value(w);
    auto bv = value(b);
    auto xv = value(x);
    for (std::size_t o = 0; o < out_dim; ++o) {
        double acc = bv[o];
        const double* wrow = wv.data() + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) acc += wrow[i] * xv[i];
        yv[o] = acc;
    }
    Op op;
    op.kind = OpKind::affine;
    op.out = y;
    op.a = w;
    op.b = b;
    op.c = x;
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::activation(NodeId x, Activation a) {
    const NodeId y = alloc(size(x));
    auto yv = mut_value(y);
    auto xv = value(x);
    switch (a) {
        case Activation::identity:
            std::copy(xv.begin(), xv.end(), yv.begin());
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = xv[i] > 0.0 ? xv[i] : 0.0;
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = std::tanh(xv[i]);
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < xv.size(); ++i)
                yv[i] = xv[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-xv[i]))
                                     : std::exp(xv[i]) / (1.0 + std::exp(xv[i]));
            break;
        case Activation::exp:
            for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = std::exp(xv[i]);
            break;
    }
    Op op;
    op.kind = OpKind::activation;
    op.act = a;
    op.out = y;
    op.a = x;
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    if (size(a) != size(b)) throw ConfigError("add: length mismatch");
    const NodeId y = alloc(size(a));
    auto yv = mut_value(y);
    auto av = value(a);
    auto bv = value(b);
    for (std::size_t i = 0; i < av.size(); ++i) yv[i] = av[i] + bv[i];
    Op op;
    op.kind = OpKind::add;
    op.out = y;
    op.a = a;
    op.b = b;
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::hadamard(NodeId a, NodeId b) {
    if (size(a) != size(b)) throw ConfigError("hadamard: length mismatch");
    const NodeId y = alloc(size(a));
    auto yv = mut_value(y);
    auto av = value(a);
    auto bv = value(b);
    for (std::size_t i = 0; i < av.size(); ++i) yv[i] = av[i] * bv[i];
    Op op;
    op.kind = OpKind::hadamard;
    op.out = y;
    op.a = a;
    op.b = b;
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::slice(NodeId x, std::size_t offset, std::size_t len) {
    if (offset + len > size(x)) throw ConfigError("slice out of range");
    const NodeId y = alloc(len);
    auto yv = mut_value(y);
    auto xv = value(x);
    std::copy(xv.begin() + offset, xv.begin() + offset + len, yv.begin());
    Op op;
    op.kind = OpKind::slice;
    op.out = y;
    op.a = x;
    op.aux = offset;
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::concat(std::span<const NodeId> parts) {
    std::size_t total = 0;
    for (NodeId p : parts) total += size(p);
    const NodeId y = alloc(total);
    auto yv = mut_value(y);
    std::size_t at = 0;
    for (NodeId p : parts) {
        auto pv = value(p);
        std::copy(pv.begin(), pv.end(), yv.begin() + at);
        at += pv.size();
    }
    Op op;
    op.kind = OpKind::concat;
    op.out = y;
    op.aux = concat_args_.size();
    op.aux2 = parts.size();
    concat_args_.insert(concat_args_.end(), parts.begin(), parts.end());
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::scale(NodeId x, double s) {
    const NodeId y = alloc(size(x));
    auto yv = mut_value(y);
    auto xv = value(x);
    for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = s * xv[i];
    Op op;
    op.kind = OpKind::scale;
    op.out = y;
    op.a = x;
    op.s0 = s;
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::add_scaled(NodeId a, double s0, NodeId b, double s1) {
    if (size(a) != size(b)) throw ConfigError("add_scaled: length mismatch");
    const NodeId y = alloc(size(a));
    auto yv = mut_value(y);
    auto av = value(a);
    auto bv = value(b);
    for (std::size_t i = 0; i < av.size(); ++i) yv[i] = s0 * av[i] + s1 * bv[i];
    Op op;
    op.kind = OpKind::add_scaled;
    op.out = y;
    op.a = a;
    op.b = b;
    op.s0 = s0;
    op.s1 = s1;
    ops_.push_back(op);
    return y;
}

Tape::NodeId Tape::custom(std::vector<double> value,
                          std::function<void(Tape&, NodeId)> backward) {
    const NodeId y = alloc(value.size());
    std::copy(value.begin(), value.end(), mut_value(y).begin());
    Op op;
    op.kind = OpKind::custom;
    op.out = y;
    op.aux2 = customs_.size();
    customs_.push_back(std::move(backward));
    ops_.push_back(op);
    return y;
}

void Tape::run_backward_op(const Op& op) {
    switch (op.kind) {
        case OpKind::param_transfer: {
            auto g = grad(op.out);
            for (std::size_t i = 0; i < g.size(); ++i) op.entry->grads[i] += g[i];
            break;
        }
        case OpKind::affine: {
            const std::size_t out_dim = size(op.b);
            const std::size_t in_dim = size(op.c);
            auto dy = grad(op.out);
            auto wv = value(op.a);
            auto xv = value(op.c);
            {
                auto dw = grad(op.a);
                auto db = grad(op.b);
                for (std::size_t o = 0; o < out_dim; ++o) {
                    const double d = dy[o];
                    db[o] += d;
                    double* dwrow = dw.data() + o * in_dim;
                    for (std::size_t i = 0; i < in_dim; ++i) dwrow[i] += d * xv[i];
                }
            }
            {
                auto dx = grad(op.c);
                for (std::size_t o = 0; o < out_dim; ++o) {
                    const double d = dy[o];
                    const double* wrow = wv.data() + o * in_dim;
                    for (std::size_t i = 0; i < in_dim; ++i) dx[i] += d * wrow[i];
                }
            }
            break;
        }
        case OpKind::activation: {
            auto dy = grad(op.out);
            auto yv = value(op.out);
            auto xv = value(op.a);
            auto dx = grad(op.a);
            switch (op.act) {
                case Activation::identity:
                    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i];
                    break;
                case Activation::relu:
                    for (std::size_t i = 0; i < dy.size(); ++i)
                        if (xv[i] > 0.0) dx[i] += dy[i];
                    break;
                case Activation::tanh:
                    for (std::size_t i = 0; i < dy.size(); ++i)
                        dx[i] += dy[i] * (1.0 - yv[i] * yv[i]);
                    break;
                case Activation::sigmoid:
                    for (std::size_t i = 0; i < dy.size(); ++i)
                        dx[i] += dy[i] * yv[i] * (1.0 - yv[i]);
                    break;
                case Activation::exp:
                    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * yv[i];
                    break;
            }
            break;
        }
        case OpKind::add: {
            auto dy = grad(op.out);
            auto da = grad(op.a);
            for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i];
            auto db = grad(op.b);
            for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i];
            break;
        }
        case OpKind::hadamard: {
            auto dy = grad(op.out);
            auto av = value(op.a);
            auto bv = value(op.b);
            {
                auto da = grad(op.a);
                for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * bv[i];
            }
            {
                auto db = grad(op.b);
                for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i] * av[i];
            }
            break;
        }
        case OpKind::slice: {
            auto dy = grad(op.out);
            auto dx = grad(op.a);
            for (std::size_t i = 0; i < dy.size(); ++i) dx[op.aux + i] += dy[i];
            break;
        }
        case OpKind::concat: {
            auto dy = grad(op.out);
            std::size_t at = 0;
            for (std::size_t k = 0; k < op.aux2; ++k) {
                const NodeId part = concat_args_[op.aux + k];
                auto dp = grad(part);
                for (std::size_t i = 0; i < dp.size(); ++i) dp[i] += dy[at + i];
                at += dp.size();
            }
            break;
        }
        case OpKind::scale: {
            auto dy = grad(op.out);
            auto dx = grad(op.a);
            for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += op.s0 * dy[i];
            break;
        }
        case OpKind::add_scaled: {
            auto dy = grad(op.out);
            {
                auto da = grad(op.a);
                for (std::size_t i = 0; i < dy.size(); ++i) da[i] += op.s0 * dy[i];
            }
            {
                auto db = grad(op.b);
                for (std::size_t i = 0; i < dy.size(); ++i) db[i] += op.s1 * dy[i];
            }
            break;
        }
        case OpKind::custom:
            customs_[op.aux2](*this, op.out);
            break;
    }
}

void Tape::backward(NodeId scalar_root, double seed) {
    if (ops_.empty()) throw UsageError("backward called before any forward pass was recorded");
    if (scalar_root >= nodes_.size()) throw UsageError("backward: unknown node");
    if (size(scalar_root) != 1) throw UsageError("backward: loss node must be scalar");
    std::fill(grads_.begin(), grads_.end(), 0.0);
    grad(scalar_root)[0] = seed;
    for (std::size_t i = ops_.size(); i-- > 0;) run_backward_op(ops_[i]);
}

void Tape::reset() {
    nodes_.clear();
    values_.clear();
    grads_.clear();
    ops_.clear();
    concat_args_.clear();
    customs_.clear();
    param_memo_.clear();
    bound_store_ = nullptr;
}

}  // namespace dvae
