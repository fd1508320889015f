#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgt/errors.hpp"

namespace cgt {

/// One sparse sample; feature indices are 1-based and strictly increasing.
struct SparseSample {
    double label = 0.0; ///< in {0, 1} after parsing
    std::vector<std::pair<int, double>> features;

    bool operator==(const SparseSample&) const = default;
};

struct Shard {
    std::vector<SparseSample> samples;
    int dim = 0; ///< global feature dimension; every index <= dim
};

struct ParsedDataset {
    std::vector<SparseSample> samples;
    int dim = 0; ///< max feature index seen (before any override)
};

/// Streaming LIBSVM parser: `<label> <idx>:<val> ...` per line, `#` starts a
/// comment. Labels in {-1,+1} or {0,1} map to {0,1}.
ParsedDataset parse_libsvm(std::istream& in);

/// Convenience file loader; decompresses transparently when the path ends in
/// ".gz". `declared_dim` overrides the inferred dimension (must cover every
/// index seen).
ParsedDataset load_libsvm(const std::string& path, int declared_dim = 0);

/// Inverse of parse_libsvm (labels printed as 0/1, values with 17 significant
/// digits, LF endings).
std::string serialize_libsvm(const std::vector<SparseSample>& samples);

enum class PartitionRule { contiguous, round_robin, label_skewed };

/// Splits samples into n_agents disjoint covering shards. contiguous cuts
/// ceil(n/N)-sized chunks in order; round_robin deals samples cyclically;
/// label_skewed stable-sorts by label first and then cuts contiguously.
/// Deterministic; the seed is reserved for future randomized rules.
std::vector<Shard> partition(const std::vector<SparseSample>& samples, int n_agents,
                             PartitionRule rule, std::uint64_t seed = 0, int dim = 0);

/// In-place per-feature max-abs scaling (optional; off by default).
void scale_features_maxabs(std::vector<SparseSample>& samples, int dim);

} // namespace cgt
