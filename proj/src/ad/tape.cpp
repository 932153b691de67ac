#include "hagat/ad/tape.hpp"

#include "hagat/errors.hpp"

namespace hagat::ad {

Parameter::Parameter(std::string name, Matrix value, bool decay)
    : name(std::move(name)), value(std::move(value)), decay(decay) {
    zero_grad();
}

const Matrix& Value::data() const { return tape_->data(id_); }
const Matrix& Value::grad() const { return tape_->grad(id_); }
bool Value::requires_grad() const { return tape_->requires_grad(id_); }

double Value::item() const {
    const Matrix& d = data();
    if (d.rows() != 1 || d.cols() != 1) throw ContractError("item() on a non-scalar value");
    return d(0, 0);
}

Tape::Node& Tape::push() {
    nodes_.emplace_back();
    Node& n = nodes_.back();
    n.data = &n.data_storage;
    n.grad = &n.grad_storage;
    return n;
}

void Tape::check_owner(const Value& v) const {
    if (v.tape_ != this) throw ContractError("value belongs to a different tape");
}

Value Tape::constant(Matrix data) {
    Node& n = push();
    n.data_storage = std::move(data);
    return {this, nodes_.size() - 1};
}

Value Tape::leaf(Matrix data) {
    Node& n = push();
    n.data_storage = std::move(data);
    n.requires_grad = true;
    n.grad_storage = Matrix::Zero(n.data_storage.rows(), n.data_storage.cols());
    return {this, nodes_.size() - 1};
}

Value Tape::parameter(Parameter& p) {
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) p.zero_grad();
    Node& n = push();
    n.data = &p.value;
    n.grad = &p.grad;
    n.requires_grad = true;
    return {this, nodes_.size() - 1};
}

Value Tape::record(Matrix data, std::vector<Value> inputs, Backward backward) {
    bool needs = false;
    for (const Value& v : inputs) {
        check_owner(v);
        needs = needs || nodes_[v.id_].requires_grad;
    }
    Node& n = push();
    n.data_storage = std::move(data);
    n.is_leaf = false;
    n.requires_grad = needs;
    if (needs) {
        n.inputs.reserve(inputs.size());
        for (const Value& v : inputs) n.inputs.push_back(v.id_);
        n.backward = std::move(backward);
    }
    return {this, nodes_.size() - 1};
}

void Tape::backward(const Value& root) {
    check_owner(root);
    const Matrix& rd = data(root.id_);
    if (rd.rows() != 1 || rd.cols() != 1) throw ContractError("backward requires a scalar root");
    if (!nodes_[root.id_].requires_grad) return;

    for (std::size_t i = 0; i <= root.id_; ++i) {
        Node& n = nodes_[i];
        if (n.requires_grad && !n.is_leaf) n.grad_storage = Matrix::Zero(n.data->rows(), n.data->cols());
    }
    Node& r = nodes_[root.id_];
    if (r.is_leaf) {
        (*r.grad)(0, 0) += 1.0;
        return;
    }
    (*r.grad)(0, 0) = 1.0;

    std::vector<Matrix*> slots;
    for (std::size_t i = root.id_ + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.requires_grad || n.is_leaf || !n.backward) continue;
        slots.clear();
        for (std::size_t in : n.inputs) {
            Node& src = nodes_[in];
            slots.push_back(src.requires_grad ? src.grad : nullptr);
        }
        n.backward(*n.grad, slots);
    }
}

}  // namespace hagat::ad
