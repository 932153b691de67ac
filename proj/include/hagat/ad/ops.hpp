#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "hagat/ad/tape.hpp"
#include "hagat/graph/csr.hpp"

// Differentiable operations over Values. Every op records itself on the tape
// of its first Value argument; mixing tapes is a ContractError.
namespace hagat::ad {

using Rng = std::mt19937_64;

Value matmul(const Value& a, const Value& b);

// Element-wise, identical shapes.
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value div(const Value& a, const Value& b);

Value scale(const Value& a, double c);
Value relu(const Value& a);
Value exp(const Value& a);
Value sqrt(const Value& a);

/// Sum of all entries as a 1x1 value.
Value sum(const Value& a);

Value softmax_rows(const Value& a);
Value log_softmax_rows(const Value& a);

/// Inverted dropout: survivors are scaled by 1/(1-p). Identity when not
/// training or when p == 0 (no random draws are consumed in either case).
Value dropout(const Value& a, double p, bool training, Rng& rng);

/// Inverted dropout on the stored entries of a constant sparse matrix.
graph::CsrMatrix dropout(const graph::CsrMatrix& a, double p, bool training, Rng& rng);

/// Mean over masked rows of -log softmax(logits)[label].
Value masked_cross_entropy(const Value& logits, std::span<const std::int32_t> labels,
                           std::span<const std::uint8_t> mask);

/// Constant sparse matrix times dense value.
Value spmm(const graph::CsrMatrix& s, const Value& d);

/// Sparse matrix whose structure comes from `s` and whose stored values are
/// the differentiable column `weights` (nnz x 1), times `d`.
Value spmm(const graph::CsrMatrix& s, const Value& weights, const Value& d);

/// out.row(k) = a.row(index[k]).
Value gather_rows(const Value& a, std::span<const graph::NodeId> index);

/// out.row(i) = sum of a.row(e) for e in [offsets[i], offsets[i+1]).
/// Row reductions here and in spmm add terms in value order, so results do
/// not depend on the storage order of the summed entries.
Value segment_sum(const Value& a, std::span<const graph::EdgeIndex> offsets);

/// out.row(i) = s(i, 0) * d.row(i), with s a column vector.
Value row_scale(const Value& d, const Value& s);

/// Broadcasts a 1x1 value to rows x cols.
Value broadcast(const Value& scalar, Eigen::Index rows, Eigen::Index cols);

/// out(e) = dot(q.row(src[e]), s.row(dst[e])), an (E x 1) column.
Value edge_dot(const Value& q, const Value& s, std::span<const graph::NodeId> src,
               std::span<const graph::NodeId> dst);

}  // namespace hagat::ad
