#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hagat::ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A trainable tensor that outlives individual tapes. Gradients accumulate
/// into `grad` until `zero_grad` is called.
struct Parameter {
    Parameter() = default;
    Parameter(std::string name, Matrix value, bool decay = true);

    void zero_grad() { grad.setZero(value.rows(), value.cols()); }

    std::string name;
    Matrix value;
    Matrix grad;
    bool decay = true;  // participates in weight decay
};

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Value {
public:
    Value() = default;

    const Matrix& data() const;
    const Matrix& grad() const;
    bool requires_grad() const;
    Eigen::Index rows() const { return data().rows(); }
    Eigen::Index cols() const { return data().cols(); }
    double item() const;

    Tape* tape() const { return tape_; }
    std::size_t id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

private:
    friend class Tape;
    Value(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Records operations in execution order and replays them in reverse.
class Tape {
public:
    /// Receives the output gradient plus one slot per input; a slot is null
    /// when that input does not require a gradient.
    using Backward = std::function<void(const Matrix& out_grad, std::span<Matrix* const> input_grads)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Value constant(Matrix data);
    Value leaf(Matrix data);
    /// Leaf whose data and gradient live in `p`.
    Value parameter(Parameter& p);

    /// Records an operation. Backward is dropped when no input needs a gradient.
    Value record(Matrix data, std::vector<Value> inputs, Backward backward);

    /// Seeds d(root)/d(root) = 1 and propagates. Leaf gradients accumulate
    /// across calls; intermediate gradients are recomputed each call.
    void backward(const Value& root);

    std::size_t size() const { return nodes_.size(); }

    const Matrix& data(std::size_t id) const { return *nodes_[id].data; }
    const Matrix& grad(std::size_t id) const { return *nodes_[id].grad; }
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

private:
    struct Node {
        Matrix data_storage;
        Matrix grad_storage;
        const Matrix* data = nullptr;
        Matrix* grad = nullptr;
        bool requires_grad = false;
        bool is_leaf = true;
        std::vector<std::size_t> inputs;
        Backward backward;
    };

    Node& push();
    void check_owner(const Value& v) const;

    std::deque<Node> nodes_;
};

}  // namespace hagat::ad
