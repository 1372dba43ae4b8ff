#include "quantmc/responses.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace quantmc {

ObservedResponses::ObservedResponses(int num_questions, int num_learners)
    : num_questions_(num_questions), num_learners_(num_learners) {
    if (num_questions < 0 || num_learners < 0) {
        throw std::invalid_argument("responses: dimensions must be >= 0");
    }
}

std::int64_t ObservedResponses::key(int question, int learner) const {
    return static_cast<std::int64_t>(question) * num_learners_ + learner;
}

void ObservedResponses::add(int question, int learner, int label) {
    if (question < 0 || question >= num_questions_) {
        throw std::invalid_argument("responses: question index " +
                                    std::to_string(question) +
                                    " outside 0.." +
                                    std::to_string(num_questions_ - 1));
    }
    if (learner < 0 || learner >= num_learners_) {
        throw std::invalid_argument("responses: learner index " +
                                    std::to_string(learner) + " outside 0.." +
                                    std::to_string(num_learners_ - 1));
    }
    if (label < 1) {
        throw std::invalid_argument("responses: label must be >= 1");
    }
    if (!keys_.insert(key(question, learner)).second) {
        throw std::invalid_argument(
            "responses: duplicate entry for question " +
            std::to_string(question) + ", learner " + std::to_string(learner));
    }
    entries_.push_back({question, learner, label});
}

bool ObservedResponses::contains(int question, int learner) const {
    if (question < 0 || question >= num_questions_ || learner < 0 ||
        learner >= num_learners_) {
        return false;
    }
    return keys_.count(key(question, learner)) != 0;
}

int ObservedResponses::max_label() const {
    int m = 0;
    for (const Response& e : entries_) {
        m = std::max(m, e.label);
    }
    return m;
}

bool ObservedResponses::entries_same(const ObservedResponses& other) const {
    if (entries_.size() != other.entries_.size()) {
        return false;
    }
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const Response& a = entries_[k];
        const Response& b = other.entries_[k];
        if (a.question != b.question || a.learner != b.learner ||
            a.label != b.label) {
            return false;
        }
    }
    return true;
}

}  // namespace quantmc
