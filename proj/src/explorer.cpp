#include "hagat/explorer.hpp"

#include "hagat/errors.hpp"
#include "hagat/init.hpp"

namespace hagat {

ExplorerKind parse_explorer_kind(const std::string& s) {
    if (s == "gcn") return ExplorerKind::gcn;
    if (s == "mlp") return ExplorerKind::mlp;
    throw ParameterError("unknown explorer kind '" + s + "'");
}

std::string to_string(ExplorerKind k) { return k == ExplorerKind::gcn ? "gcn" : "mlp"; }

ExplorerParams init_explorer(Eigen::Index in_dim, int hidden, int categories, ExplorerKind kind, ad::Rng& rng) {
    if (categories < 1) throw ParameterError("explorer needs at least one category");
    if (hidden < 1 || in_dim < 1) throw ParameterError("explorer widths must be positive");
    ExplorerParams p;
    p.w0 = ad::Parameter("explorer.w0", glorot_uniform(in_dim, hidden, rng));
    p.w1 = ad::Parameter("explorer.w1", glorot_uniform(hidden, categories, rng));
    p.kind = kind;
    return p;
}

namespace {

ad::Value finish(const ad::Value& xw, const graph::CsrMatrix& norm_adj, const ad::Value& w1, ExplorerKind kind) {
    if (w1.cols() < 1) throw ParameterError("explorer needs at least one category");
    if (kind == ExplorerKind::gcn) {
        const ad::Value h = ad::relu(ad::spmm(norm_adj, xw));
        return ad::softmax_rows(ad::spmm(norm_adj, ad::matmul(h, w1)));
    }
    return ad::softmax_rows(ad::matmul(ad::relu(xw), w1));
}

}  // namespace

ad::Value explore(const ad::Value& features, const graph::CsrMatrix& norm_adj, const ad::Value& w0,
                  const ad::Value& w1, ExplorerKind kind) {
    if (w1.cols() < 1) throw ParameterError("explorer needs at least one category");
    return finish(ad::matmul(features, w0), norm_adj, w1, kind);
}

ad::Value explore(const graph::CsrMatrix& features, const graph::CsrMatrix& norm_adj, const ad::Value& w0,
                  const ad::Value& w1, ExplorerKind kind) {
    if (w1.cols() < 1) throw ParameterError("explorer needs at least one category");
    return finish(ad::spmm(features, w0), norm_adj, w1, kind);
}

std::vector<double> overall_categories(const ad::Matrix& s) {
    std::vector<double> out(static_cast<std::size_t>(s.cols()), 0.0);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index k = 0; k < s.cols(); ++k) out[k] += s(i, k);
    }
    return out;
}

}  // namespace hagat
