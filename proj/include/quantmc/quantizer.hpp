#pragma once

#include <vector>

namespace quantmc {

/// Scalar quantizer over P ordered labels 1..P, given by bin boundaries
/// w_0 <= w_1 <= ... <= w_P with w_0 = -inf and w_P = +inf. A value x maps
/// to the label p with w_{p-1} < x <= w_p, so a value sitting exactly on a
/// boundary belongs to the lower bin.
class QuantizerSpec {
public:
    /// Binary quantizer {-inf, 0, +inf}.
    QuantizerSpec();

    /// Full boundary list including the two infinite endpoints. Throws
    /// std::invalid_argument when the list is shorter than 2, not
    /// non-decreasing, has non-finite interior values, or the endpoints are
    /// not -inf/+inf.
    explicit QuantizerSpec(std::vector<double> boundaries);

    /// Builds the P-label quantizer from its P-1 finite interior boundaries.
    static QuantizerSpec from_interior(const std::vector<double>& interior);

    /// Binary quantizer {-inf, threshold, +inf}.
    static QuantizerSpec binary(double threshold = 0.0);

    int num_labels() const { return static_cast<int>(boundaries_.size()) - 1; }
    const std::vector<double>& boundaries() const { return boundaries_; }
    std::vector<double> interior_boundaries() const;

    /// w_{label-1}, the open lower edge of the label's bin.
    double lower_edge(int label) const;
    /// w_label, the closed upper edge of the label's bin.
    double upper_edge(int label) const;

    /// The label whose bin contains x. Requires finite x.
    int quantize(double x) const;

    bool operator==(const QuantizerSpec& other) const = default;

private:
    std::vector<double> boundaries_;
};

}  // namespace quantmc
