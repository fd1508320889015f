#include "cgt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "cgt/rng.hpp"

namespace cgt {

std::vector<SparseSample> make_synthetic_classification(const SyntheticSpec& spec) {
    auto rng = rng::make(rng::derive(spec.seed, 0x64617461ULL)); // "data"

    std::vector<double> truth(static_cast<size_t>(spec.dim));
    const double scale = 1.0 / std::sqrt(0.5 * (spec.min_active + spec.max_active));
    for (int j = 0; j < spec.dim; j += 2) {
        const auto [a, b] = rng::normal_pair(rng);
        truth[static_cast<size_t>(j)] = scale * a;
        if (j + 1 < spec.dim) truth[static_cast<size_t>(j + 1)] = scale * b;
    }

    std::vector<SparseSample> samples;
    samples.reserve(static_cast<size_t>(spec.n_samples));
    std::vector<int> indices;
    for (long t = 0; t < spec.n_samples; ++t) {
        const int active = spec.min_active +
                           static_cast<int>(rng::uniform_below(
                               rng, static_cast<std::uint64_t>(spec.max_active - spec.min_active + 1)));
        indices.clear();
        while (static_cast<int>(indices.size()) < active) {
            const int idx = 1 + static_cast<int>(rng::uniform_below(
                                    rng, static_cast<std::uint64_t>(spec.dim)));
            if (std::find(indices.begin(), indices.end(), idx) == indices.end())
                indices.push_back(idx);
        }
        std::sort(indices.begin(), indices.end());

        double z = 0.0;
        SparseSample s;
        for (const int idx : indices) {
            s.features.emplace_back(idx, 1.0);
            z += truth[static_cast<size_t>(idx - 1)];
        }
        const double prob = 1.0 / (1.0 + std::exp(-2.0 * z));
        s.label = rng::uniform01(rng) < prob ? 1.0 : 0.0;
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_synthetic_libsvm(const std::string& path, const SyntheticSpec& spec) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << serialize_libsvm(make_synthetic_classification(spec));
}

} // namespace cgt
