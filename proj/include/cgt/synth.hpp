#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgt/data.hpp"

namespace cgt {

/// Deterministic sparse binary-feature classification data in the shape of
/// the LIBSVM adult benchmarks: ~14 active 0/1 features per sample, labels
/// from a planted logistic model.
struct SyntheticSpec {
    long n_samples = 32561;
    int dim = 123;
    int min_active = 8;
    int max_active = 20;
    std::uint64_t seed = 9;
};

std::vector<SparseSample> make_synthetic_classification(const SyntheticSpec& spec);

/// Writes the dataset as LIBSVM text; byte-identical for identical specs.
void write_synthetic_libsvm(const std::string& path, const SyntheticSpec& spec);

} // namespace cgt
