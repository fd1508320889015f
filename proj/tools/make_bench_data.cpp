// Writes the default synthetic benchmark dataset (a9a-shaped LIBSVM file).

#include <iostream>

#include "cgt/synth.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: cgt_make_bench_data <output-path>\n";
        return 2;
    }
    try {
        cgt::write_synthetic_libsvm(argv[1], cgt::SyntheticSpec{});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
