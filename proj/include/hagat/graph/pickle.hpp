#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hagat/ad/tape.hpp"

// Just enough of the Python pickle format (protocols 0-5) to read the
// Planetoid citation files: numpy arrays, scipy CSR matrices and
// dict/defaultdict adjacency lists. Nothing is ever executed; unknown
// callables are kept as inert objects.
namespace hagat::graph::pickle {

struct Object;
using Ref = std::shared_ptr<Object>;

struct Object {
    enum class Kind { none, boolean, integer, real, text, bytes, tuple, list, dict, set, global, instance };

    Kind kind = Kind::none;
    std::int64_t integer = 0;
    double real = 0.0;
    std::string text;  // text, bytes (raw), global ("module.name")
    std::vector<Ref> items;                      // tuple, list, set, instance (appended items)
    std::vector<std::pair<Ref, Ref>> entries;     // dict, instance (set items)
    Ref callable;                                 // instance: the class or reduce callable
    Ref args;                                     // instance: constructor arguments (tuple)
    Ref state;                                    // instance: BUILD state

    bool is(Kind k) const { return kind == k; }
    /// Looks up a text key in a dict-like object (dict, or instance state dict).
    Ref get(const std::string& key) const;
};

/// Parses one pickle. Throws IngestionError on malformed or unsupported input.
Ref load(const std::string& bytes);
Ref load_file(const std::filesystem::path& path);

/// Interprets a numpy ndarray of real or integer type as a dense 2-D
/// matrix (1-D arrays become a column).
ad::Matrix to_dense(const Ref& obj);

/// Interprets a numpy ndarray or a scipy sparse CSR/CSC/COO matrix as dense.
ad::Matrix array_or_sparse_to_dense(const Ref& obj);

/// Interprets a dict or defaultdict mapping int -> list[int].
std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> to_adjacency(const Ref& obj);

}  // namespace hagat::graph::pickle
