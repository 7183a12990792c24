#pragma once

#include <cstdint>
#include <vector>

#include "pcg/errors.hpp"

namespace pcg {

using TokenId = uint32_t;
using GroupId = uint32_t;

enum class DistRole : uint8_t {
    Draft,  // proposer, denoted p
    Target, // verifier, denoted q
    Other,
};

// Probability vector over the vocabulary. Entries >= 0, sums to 1 within 1e-9.
struct TokenDistribution {
    std::vector<double> probs;
    DistRole            role = DistRole::Other;
    int32_t             step = -1;

    TokenDistribution() = default;
    explicit TokenDistribution(std::vector<double> p, DistRole r = DistRole::Other, int32_t s = -1)
        : probs(std::move(p)), role(r), step(s) {}

    static TokenDistribution draft(std::vector<double> p, int32_t step = -1) {
        return TokenDistribution(std::move(p), DistRole::Draft, step);
    }
    static TokenDistribution target(std::vector<double> p, int32_t step = -1) {
        return TokenDistribution(std::move(p), DistRole::Target, step);
    }

    size_t size() const { return probs.size(); }

    void validate() const {
        if (probs.empty()) {
            throw InvalidArgError("distribution is empty");
        }
        double sum = 0.0;
        for (double v : probs) {
            if (!(v >= 0.0)) { // also catches NaN
                throw InvalidArgError("distribution has a negative or non-finite entry");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw InvalidArgError("distribution does not sum to 1 (sum=" + std::to_string(sum) + ")");
        }
    }
};

enum class GroupDistProvenance : uint8_t {
    ExactPc,
    ExactQc,
    ExactResidual,
    ExactEmitted,
    Empirical,
};

// Mass per group id, length M.
struct GroupDistribution {
    std::vector<double> mass;
    GroupDistProvenance provenance = GroupDistProvenance::Empirical;
};

// Coarse masses of one group under the draft (pc) and target (qc) distributions.
struct CoarseMassPair {
    GroupId group;
    double  pc;
    double  qc;
};

} // namespace pcg
