#pragma once

#include "spdcwalk/biphoton.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <random>
#include <vector>

namespace spdcwalk::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::vector<std::complex<double>> random_complex(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<std::complex<double>> out(n);
    for (auto& v : out) v = {dist(gen), dist(gen)};
    return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Reference device geometry: C = 2.7 mm^-1, L chosen so that C L = coupling_length.
inline ArrayGeometry geometry_for(double coupling_length, double coupling = 2.7) {
    ArrayGeometry g;
    g.coupling = coupling;
    g.length = coupling_length / coupling;
    return g;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("spdcwalk_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace spdcwalk::test
