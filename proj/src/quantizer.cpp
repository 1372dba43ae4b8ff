#include "quantmc/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace quantmc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

QuantizerSpec::QuantizerSpec() : boundaries_{-kInf, 0.0, kInf} {}

QuantizerSpec::QuantizerSpec(std::vector<double> boundaries)
    : boundaries_(std::move(boundaries)) {
    if (boundaries_.size() < 2) {
        throw std::invalid_argument(
            "quantizer: need at least 2 boundaries (P >= 1)");
    }
    if (boundaries_.front() != -kInf || boundaries_.back() != kInf) {
        throw std::invalid_argument(
            "quantizer: boundaries must start at -inf and end at +inf");
    }
    for (std::size_t k = 1; k + 1 < boundaries_.size(); ++k) {
        if (!std::isfinite(boundaries_[k])) {
            throw std::invalid_argument(
                "quantizer: interior boundaries must be finite");
        }
    }
    for (std::size_t k = 1; k < boundaries_.size(); ++k) {
        if (!(boundaries_[k - 1] <= boundaries_[k])) {
            throw std::invalid_argument(
                "quantizer: boundaries must be non-decreasing");
        }
    }
}

QuantizerSpec QuantizerSpec::from_interior(
    const std::vector<double>& interior) {
    std::vector<double> b;
    b.reserve(interior.size() + 2);
    b.push_back(-kInf);
    b.insert(b.end(), interior.begin(), interior.end());
    b.push_back(kInf);
    return QuantizerSpec(std::move(b));
}

QuantizerSpec QuantizerSpec::binary(double threshold) {
    return from_interior({threshold});
}

std::vector<double> QuantizerSpec::interior_boundaries() const {
    return {boundaries_.begin() + 1, boundaries_.end() - 1};
}

double QuantizerSpec::lower_edge(int label) const {
    if (label < 1 || label > num_labels()) {
        throw std::invalid_argument("quantizer: label out of range");
    }
    return boundaries_[static_cast<std::size_t>(label) - 1];
}

double QuantizerSpec::upper_edge(int label) const {
    if (label < 1 || label > num_labels()) {
        throw std::invalid_argument("quantizer: label out of range");
    }
    return boundaries_[static_cast<std::size_t>(label)];
}

int QuantizerSpec::quantize(double x) const {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("quantize: value must be finite");
    }
    // label p is the first boundary w_p >= x among w_1..w_P; w_P = +inf
    // guarantees a hit, and taking the first occurrence of a repeated
    // boundary keeps w_{p-1} < x strict.
    const auto it =
        std::lower_bound(boundaries_.begin() + 1, boundaries_.end(), x);
    return static_cast<int>(it - boundaries_.begin());
}

}  // namespace quantmc
