#include "hagat/ad/ops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hagat/errors.hpp"

namespace hagat::ad {
namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void require_same_shape(const Value& a, const Value& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape(a.data()) + " vs " + shape(b.data()));
    }
}

Tape& tape_of(const Value& v) {
    if (!v.valid()) throw ContractError("operation on an empty Value");
    return *v.tape();
}

void check_p(double p) {
    if (!(p >= 0.0 && p < 1.0)) throw ParameterError("dropout probability must lie in [0, 1), got " + std::to_string(p));
}

// Left-to-right reductions over one row. Vectorized Eigen reductions split a
// row according to its memory alignment, which would make a row's result
// depend on where it is stored.
double ordered_sum(const double* p, Eigen::Index n) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) acc += p[k];
    return acc;
}

double ordered_dot(const double* a, const double* b, Eigen::Index n) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

// Scalar exp everywhere: the packet exp can differ from std::exp in the last
// bit, and which path an element takes depends on its position.
double scalar_exp(double v) { return std::exp(v); }

double log_sum_exp(const Matrix& x, Eigen::Index i) {
    const double m = x.row(i).maxCoeff();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) acc += std::exp(x(i, k) - m);
    return m + std::log(acc);
}

}  // namespace

Value matmul(const Value& a, const Value& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions disagree " + shape(a.data()) + " * " + shape(b.data()));
    }
    const Matrix* A = &a.data();
    const Matrix* B = &b.data();
    // Each output row accumulates over k in increasing order from its own
    // input row only. Blocked GEMM kernels choose the summation order by row
    // position, so a relabeled node could pick up different rounding.
    Matrix out = Matrix::Zero(A->rows(), B->cols());
    for (Eigen::Index i = 0; i < A->rows(); ++i) {
        auto row = out.row(i);
        for (Eigen::Index k = 0; k < A->cols(); ++k) row += (*A)(i, k) * B->row(k);
    }
    return tape_of(a).record(std::move(out), {a, b}, [A, B](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) in[0]->noalias() += g * B->transpose();
        if (in[1]) in[1]->noalias() += A->transpose() * g;
    });
}

Value add(const Value& a, const Value& b) {
    require_same_shape(a, b, "add");
    return tape_of(a).record(a.data() + b.data(), {a, b}, [](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += g;
        if (in[1]) *in[1] += g;
    });
}

Value sub(const Value& a, const Value& b) {
    require_same_shape(a, b, "sub");
    return tape_of(a).record(a.data() - b.data(), {a, b}, [](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += g;
        if (in[1]) *in[1] -= g;
    });
}

Value mul(const Value& a, const Value& b) {
    require_same_shape(a, b, "mul");
    const Matrix* A = &a.data();
    const Matrix* B = &b.data();
    Matrix out = A->cwiseProduct(*B);
    return tape_of(a).record(std::move(out), {a, b}, [A, B](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += g.cwiseProduct(*B);
        if (in[1]) *in[1] += g.cwiseProduct(*A);
    });
}

Value div(const Value& a, const Value& b) {
    require_same_shape(a, b, "div");
    const Matrix* A = &a.data();
    const Matrix* B = &b.data();
    Matrix out = A->cwiseQuotient(*B);
    return tape_of(a).record(std::move(out), {a, b}, [A, B](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += g.cwiseQuotient(*B);
        if (in[1]) in[1]->array() -= g.array() * A->array() / B->array().square();
    });
}

Value scale(const Value& a, double c) {
    return tape_of(a).record(a.data() * c, {a}, [c](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += g * c;
    });
}

Value relu(const Value& a) {
    const Matrix* A = &a.data();
    Matrix out = A->cwiseMax(0.0);
    return tape_of(a).record(std::move(out), {a}, [A](const Matrix& g, std::span<Matrix* const> in) {
        // Subgradient at zero is zero.
        if (in[0]) in[0]->array() += (A->array() > 0.0).select(g.array(), 0.0);
    });
}

Value exp(const Value& a) {
    auto out = std::make_shared<Matrix>(a.data().unaryExpr(&scalar_exp));
    Matrix copy = *out;
    return tape_of(a).record(std::move(copy), {a}, [out](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += g.cwiseProduct(*out);
    });
}

Value sqrt(const Value& a) {
    auto out = std::make_shared<Matrix>(a.data().array().sqrt().matrix());
    Matrix copy = *out;
    return tape_of(a).record(std::move(copy), {a}, [out](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) in[0]->array() += 0.5 * g.array() / out->array();
    });
}

Value sum(const Value& a) {
    Matrix out(1, 1);
    out(0, 0) = a.data().sum();
    return tape_of(a).record(std::move(out), {a}, [](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) in[0]->array() += g(0, 0);
    });
}

namespace {

Matrix softmax_of(const Matrix& x) {
    Matrix y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        y.row(i) = (x.row(i).array() - m).matrix().unaryExpr(&scalar_exp);
        y.row(i) /= ordered_sum(&y(i, 0), y.cols());
    }
    return y;
}

}  // namespace

Value softmax_rows(const Value& a) {
    auto y = std::make_shared<Matrix>(softmax_of(a.data()));
    Matrix copy = *y;
    return tape_of(a).record(std::move(copy), {a}, [y](const Matrix& g, std::span<Matrix* const> in) {
        if (!in[0]) return;
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double dot = g.row(i).dot(y->row(i));
            in[0]->row(i).array() += y->row(i).array() * (g.row(i).array() - dot);
        }
    });
}

Value log_softmax_rows(const Value& a) {
    const Matrix& x = a.data();
    Matrix out(x.rows(), x.cols());
    auto y = std::make_shared<Matrix>(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double lse = log_sum_exp(x, i);
        out.row(i) = (x.row(i).array() - lse).matrix();
        y->row(i) = out.row(i).unaryExpr(&scalar_exp);
    }
    return tape_of(a).record(std::move(out), {a}, [y](const Matrix& g, std::span<Matrix* const> in) {
        if (!in[0]) return;
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            in[0]->row(i) += g.row(i) - y->row(i) * g.row(i).sum();
        }
    });
}

Value dropout(const Value& a, double p, bool training, Rng& rng) {
    check_p(p);
    if (!training || p == 0.0) return a;
    std::bernoulli_distribution keep(1.0 - p);
    const double s = 1.0 / (1.0 - p);
    auto mask = std::make_shared<Matrix>(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < mask->rows(); ++i) {
        for (Eigen::Index j = 0; j < mask->cols(); ++j) (*mask)(i, j) = keep(rng) ? s : 0.0;
    }
    Matrix out = a.data().cwiseProduct(*mask);
    return tape_of(a).record(std::move(out), {a}, [mask](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += g.cwiseProduct(*mask);
    });
}

graph::CsrMatrix dropout(const graph::CsrMatrix& a, double p, bool training, Rng& rng) {
    check_p(p);
    if (!training || p == 0.0) return a;
    std::bernoulli_distribution keep(1.0 - p);
    const double s = 1.0 / (1.0 - p);
    graph::CsrMatrix out;
    out.rows = a.rows;
    out.cols = a.cols;
    out.offsets.assign(a.rows + 1, 0);
    out.indices.reserve(a.indices.size());
    out.values.reserve(a.values.size());
    for (std::int64_t i = 0; i < a.rows; ++i) {
        for (graph::EdgeIndex e = a.offsets[i]; e < a.offsets[i + 1]; ++e) {
            if (keep(rng)) {
                out.indices.push_back(a.indices[e]);
                out.values.push_back(a.values[e] * s);
            }
        }
        out.offsets[i + 1] = static_cast<graph::EdgeIndex>(out.indices.size());
    }
    return out;
}

Value masked_cross_entropy(const Value& logits, std::span<const std::int32_t> labels,
                           std::span<const std::uint8_t> mask) {
    const Matrix& x = logits.data();
    if (labels.size() != static_cast<std::size_t>(x.rows()) || mask.size() != labels.size()) {
        throw DimensionError("masked_cross_entropy: labels/mask must have one entry per row");
    }
    std::size_t count = 0;
    for (auto m : mask) count += m ? 1 : 0;
    if (count == 0) throw ParameterError("masked_cross_entropy: empty mask");

    auto probs = std::make_shared<Matrix>(Matrix::Zero(x.rows(), x.cols()));
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (!mask[i]) continue;
        const auto y = labels[i];
        if (y < 0 || y >= x.cols()) throw ParameterError("masked_cross_entropy: label out of range");
        const double lse = log_sum_exp(x, i);
        total += lse - x(i, y);
        probs->row(i) = (x.row(i).array() - lse).matrix().unaryExpr(&scalar_exp);
        (*probs)(i, y) -= 1.0;
    }
    const double inv = 1.0 / static_cast<double>(count);
    Matrix out(1, 1);
    out(0, 0) = total * inv;
    return tape_of(logits).record(std::move(out), {logits}, [probs, inv](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) *in[0] += (*probs) * (g(0, 0) * inv);
    });
}

namespace {

// Total order on doubles: the unsigned image of the bit pattern, flipped so
// negative values order below positive ones.
std::uint64_t order_key(double x) {
    const auto u = std::bit_cast<std::uint64_t>(x);
    return (u >> 63) ? ~u : (u | (std::uint64_t{1} << 63));
}

bool row_less(const Matrix& m, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const auto ka = order_key(m(a, c)), kb = order_key(m(b, c));
        if (ka != kb) return ka < kb;
    }
    return false;
}

// Row reductions visit their terms sorted by operand value, not by storage
// position. Equal keys imply bit-identical terms, so every sum is a function
// of the multiset of terms alone and node relabeling changes no bits.
void spmm_into(const graph::CsrMatrix& s, const double* w, const Matrix& d, Matrix& out) {
    std::vector<graph::EdgeIndex> order;
    for (std::int64_t i = 0; i < s.rows; ++i) {
        order.clear();
        for (graph::EdgeIndex e = s.offsets[i]; e < s.offsets[i + 1]; ++e) order.push_back(e);
        std::sort(order.begin(), order.end(), [&](graph::EdgeIndex a, graph::EdgeIndex b) {
            const auto ka = order_key(w[a]), kb = order_key(w[b]);
            if (ka != kb) return ka < kb;
            return row_less(d, s.indices[a], s.indices[b]);
        });
        auto row = out.row(i);
        for (const graph::EdgeIndex e : order) row += w[e] * d.row(s.indices[e]);
    }
}

void check_spmm(const graph::CsrMatrix& s, const Value& d) {
    if (s.cols != d.rows()) {
        throw DimensionError("spmm: sparse matrix has " + std::to_string(s.cols) + " columns, dense operand has " +
                             std::to_string(d.rows()) + " rows");
    }
}

}  // namespace

Value spmm(const graph::CsrMatrix& s, const Value& d) {
    check_spmm(s, d);
    const Matrix* D = &d.data();
    Matrix out = Matrix::Zero(s.rows, D->cols());
    spmm_into(s, s.values.data(), *D, out);
    // The closure copies the structure; callers often pass temporaries.
    auto S = std::make_shared<graph::CsrMatrix>(s);
    return tape_of(d).record(std::move(out), {d}, [S](const Matrix& g, std::span<Matrix* const> in) {
        if (!in[0]) return;
        Matrix& gd = *in[0];
        for (std::int64_t i = 0; i < S->rows; ++i) {
            const auto gi = g.row(i);
            for (graph::EdgeIndex e = S->offsets[i]; e < S->offsets[i + 1]; ++e) {
                gd.row(S->indices[e]) += S->values[e] * gi;
            }
        }
    });
}

Value spmm(const graph::CsrMatrix& s, const Value& weights, const Value& d) {
    check_spmm(s, d);
    if (weights.rows() != s.nnz() || weights.cols() != 1) {
        throw DimensionError("spmm: weight column must be " + std::to_string(s.nnz()) + "x1, got " +
                             shape(weights.data()));
    }
    const Matrix* W = &weights.data();
    const Matrix* D = &d.data();
    Matrix out = Matrix::Zero(s.rows, D->cols());
    spmm_into(s, W->data(), *D, out);
    auto S = std::make_shared<graph::CsrMatrix>(s);
    S->values.clear();
    return tape_of(d).record(std::move(out), {weights, d}, [S, W, D](const Matrix& g, std::span<Matrix* const> in) {
        for (std::int64_t i = 0; i < S->rows; ++i) {
            const auto gi = g.row(i);
            for (graph::EdgeIndex e = S->offsets[i]; e < S->offsets[i + 1]; ++e) {
                const auto j = S->indices[e];
                if (in[0]) (*in[0])(e, 0) += gi.dot(D->row(j));
                if (in[1]) in[1]->row(j) += (*W)(e, 0) * gi;
            }
        }
    });
}

Value gather_rows(const Value& a, std::span<const graph::NodeId> index) {
    const Matrix& A = a.data();
    Matrix out(static_cast<Eigen::Index>(index.size()), A.cols());
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] < 0 || index[k] >= A.rows()) throw DimensionError("gather_rows: index out of range");
        out.row(static_cast<Eigen::Index>(k)) = A.row(index[k]);
    }
    auto idx = std::make_shared<std::vector<graph::NodeId>>(index.begin(), index.end());
    return tape_of(a).record(std::move(out), {a}, [idx](const Matrix& g, std::span<Matrix* const> in) {
        if (!in[0]) return;
        for (std::size_t k = 0; k < idx->size(); ++k) in[0]->row((*idx)[k]) += g.row(static_cast<Eigen::Index>(k));
    });
}

Value segment_sum(const Value& a, std::span<const graph::EdgeIndex> offsets) {
    const Matrix& A = a.data();
    if (offsets.empty() || offsets.back() != A.rows()) throw DimensionError("segment_sum: offsets do not cover rows");
    const auto n = static_cast<Eigen::Index>(offsets.size() - 1);
    Matrix out = Matrix::Zero(n, A.cols());
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i) {
        order.clear();
        for (auto e = offsets[i]; e < offsets[i + 1]; ++e) order.push_back(e);
        std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return row_less(A, x, y); });
        for (const Eigen::Index e : order) out.row(i) += A.row(e);
    }
    auto off = std::make_shared<std::vector<graph::EdgeIndex>>(offsets.begin(), offsets.end());
    return tape_of(a).record(std::move(out), {a}, [off](const Matrix& g, std::span<Matrix* const> in) {
        if (!in[0]) return;
        for (std::size_t i = 0; i + 1 < off->size(); ++i) {
            for (auto e = (*off)[i]; e < (*off)[i + 1]; ++e) in[0]->row(e) += g.row(static_cast<Eigen::Index>(i));
        }
    });
}

Value row_scale(const Value& d, const Value& s) {
    if (s.cols() != 1 || s.rows() != d.rows()) {
        throw DimensionError("row_scale: scale must be " + std::to_string(d.rows()) + "x1, got " + shape(s.data()));
    }
    const Matrix* D = &d.data();
    const Matrix* S = &s.data();
    Matrix out = S->col(0).asDiagonal() * (*D);
    return tape_of(d).record(std::move(out), {d, s}, [D, S](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) in[0]->noalias() += S->col(0).asDiagonal() * g;
        if (in[1]) in[1]->col(0) += g.cwiseProduct(*D).rowwise().sum();
    });
}

Value broadcast(const Value& scalar, Eigen::Index rows, Eigen::Index cols) {
    if (scalar.rows() != 1 || scalar.cols() != 1) throw DimensionError("broadcast: expected a 1x1 value");
    Matrix out = Matrix::Constant(rows, cols, scalar.data()(0, 0));
    return tape_of(scalar).record(std::move(out), {scalar}, [](const Matrix& g, std::span<Matrix* const> in) {
        if (in[0]) (*in[0])(0, 0) += g.sum();
    });
}

Value edge_dot(const Value& q, const Value& s, std::span<const graph::NodeId> src,
               std::span<const graph::NodeId> dst) {
    require_same_shape(q, s, "edge_dot");
    if (src.size() != dst.size()) throw DimensionError("edge_dot: src/dst length mismatch");
    const Matrix* Q = &q.data();
    const Matrix* S = &s.data();
    const auto n = Q->rows();
    Matrix out(static_cast<Eigen::Index>(src.size()), 1);
    for (std::size_t e = 0; e < src.size(); ++e) {
        if (src[e] < 0 || src[e] >= n || dst[e] < 0 || dst[e] >= n) throw DimensionError("edge_dot: node out of range");
        out(static_cast<Eigen::Index>(e), 0) = ordered_dot(&(*Q)(src[e], 0), &(*S)(dst[e], 0), Q->cols());
    }
    auto is = std::make_shared<std::vector<graph::NodeId>>(src.begin(), src.end());
    auto id = std::make_shared<std::vector<graph::NodeId>>(dst.begin(), dst.end());
    return tape_of(q).record(std::move(out), {q, s}, [Q, S, is, id](const Matrix& g, std::span<Matrix* const> in) {
        for (std::size_t e = 0; e < is->size(); ++e) {
            const double ge = g(static_cast<Eigen::Index>(e), 0);
            const auto i = (*is)[e], j = (*id)[e];
            if (in[0]) in[0]->row(i) += ge * S->row(j);
            if (in[1]) in[1]->row(j) += ge * Q->row(i);
        }
    });
}

}  // namespace hagat::ad
