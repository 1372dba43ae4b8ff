#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace quantmc {

/// One graded response: learner `learner` answered question `question` with
/// ordinal grade `label`. Indices are 0-based, labels are 1-based grades.
struct Response {
    int question;
    int learner;
    int label;
};

/// Sparse set of observed responses on a Q x N grid. At most one response
/// per (question, learner) pair; labels are at least 1 (the upper range
/// check against a quantizer's P happens where a quantizer is in scope).
class ObservedResponses {
public:
    ObservedResponses(int num_questions, int num_learners);

    /// Throws std::invalid_argument on out-of-range indices, label < 1, or
    /// a duplicate (question, learner) pair.
    void add(int question, int learner, int label);

    int num_questions() const { return num_questions_; }
    int num_learners() const { return num_learners_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Response>& entries() const { return entries_; }
    bool contains(int question, int learner) const;

    /// Largest label value present; 0 when empty.
    int max_label() const;

    bool operator==(const ObservedResponses& other) const {
        return num_questions_ == other.num_questions_ &&
               num_learners_ == other.num_learners_ && entries_same(other);
    }

private:
    bool entries_same(const ObservedResponses& other) const;
    std::int64_t key(int question, int learner) const;

    int num_questions_;
    int num_learners_;
    std::vector<Response> entries_;
    std::unordered_set<std::int64_t> keys_;
};

}  // namespace quantmc
