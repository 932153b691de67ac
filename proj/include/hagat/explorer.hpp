#pragma once

#include <string>
#include <vector>

#include "hagat/ad/ops.hpp"
#include "hagat/graph/csr.hpp"

namespace hagat {

enum class ExplorerKind { gcn, mlp };

ExplorerKind parse_explorer_kind(const std::string& s);
std::string to_string(ExplorerKind k);

/// Two-layer network mapping features to a distribution over `categories()`
/// latent node categories.
struct ExplorerParams {
    ad::Parameter w0;  // d x hidden
    ad::Parameter w1;  // hidden x t
    ExplorerKind kind = ExplorerKind::gcn;

    int categories() const { return static_cast<int>(w1.value.cols()); }
    std::vector<ad::Parameter*> parameters() { return {&w0, &w1}; }
};

ExplorerParams init_explorer(Eigen::Index in_dim, int hidden, int categories, ExplorerKind kind, ad::Rng& rng);

/// kind gcn: softmax_rows(A relu(A X W0) W1); kind mlp: softmax_rows(relu(X W0) W1).
/// `norm_adj` is ignored for mlp. `w0` and `w1` are the values of the
/// parameters on the caller's tape. Throws ParameterError when t < 1.
ad::Value explore(const ad::Value& features, const graph::CsrMatrix& norm_adj, const ad::Value& w0,
                  const ad::Value& w1, ExplorerKind kind);
/// Same with features held as a constant sparse matrix.
ad::Value explore(const graph::CsrMatrix& features, const graph::CsrMatrix& norm_adj, const ad::Value& w0,
                  const ad::Value& w1, ExplorerKind kind);

/// Column sums of S; their total is the row count.
std::vector<double> overall_categories(const ad::Matrix& s);

}  // namespace hagat
