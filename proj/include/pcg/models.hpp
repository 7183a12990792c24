#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pcg/embedding.hpp"
#include "pcg/rng.hpp"
#include "pcg/types.hpp"

namespace pcg {

// Abstract next-token distribution source. Implementations are immutable
// after construction and next_distribution is pure, so models are shareable
// across threads. Real transformer inference is out of scope; these stand in
// for the draft/target pair.
class SequenceModel {
  public:
    virtual ~SequenceModel() = default;

    virtual uint32_t          vocab_size() const = 0;
    virtual TokenDistribution next_distribution(std::span<const TokenId> prefix) const = 0;

    // Abstract cost units per call, for speedup modeling.
    virtual double cost_tag() const { return 1.0; }
};

using ModelPtr = std::shared_ptr<const SequenceModel>;

// softmax(logits / T) with max-subtraction for stability. T > 0.
TokenDistribution softmax_temperature(std::span<const double> logits, double temperature);

// Fixed distribution, prefix ignored.
ModelPtr memoryless_model(std::vector<double> probs);

// next_distribution(prefix) = rows[last token], or `initial` for an empty
// prefix. Every row must be a valid distribution of matching length.
ModelPtr markov_model(std::vector<std::vector<double>> rows, std::vector<double> initial);

// Markov over softmax(logits / T); rows are converted once at construction.
ModelPtr logit_table_model(std::vector<std::vector<double>> logit_rows, std::vector<double> initial_logits,
                           double temperature);

// Model spec JSON:
//   {"kind":"memoryless","n":4,"probs":[...]}
//   {"kind":"markov","n":3,"initial":[...],"rows":[[...],...]}
//   {"kind":"markov","n":3,"table_path":"t.pcge"}      (n+1 x n matrix file; row 0 = initial)
//   {"kind":"logit-table","n":4,"temperature":0.8,"initial":[...],"logits":[[...],...]}
ModelPtr    model_from_json(const std::string & json_text);
std::string model_spec_to_json(const std::string & kind, uint32_t n, uint64_t seed, double temperature);

// Synthetic draft/target pair with clustered group structure. Cluster centers
// sit on the unit sphere; token embeddings are normalized(center +
// intra_spread * noise). Target token mass is coherent per cluster; the draft
// redistributes mass inside each cluster along a seeded random cycle, blended
// by `noise` in [0, 1], so cluster-level masses match the target analytically
// while token-level masses diverge. noise = 0 makes draft == target exactly.
struct ClusteredPair {
    ModelPtr              draft;
    ModelPtr              target;
    EmbeddingMatrix       embeddings; // unit-norm
    std::vector<uint32_t> cluster_of; // ground-truth cluster per token
    double                suggested_theta; // midpoint of the cosine margin between clusters
    double                min_intra_cosine;
    double                max_cross_cosine;
};

ClusteredPair clustered_pair(uint32_t n, uint32_t clusters, uint32_t dim, double intra_spread, double noise,
                             uint64_t seed, double temperature = 0.8);

// Draft = point mass on token 0, target puts mass `a` there: the per-step
// acceptance probability is exactly `a` for both token- and group-level
// verification (singleton groups).
struct AcceptRatePair {
    ModelPtr draft;
    ModelPtr target;
};

AcceptRatePair accept_rate_pair(uint32_t n, double a);

// Random instance helpers shared by the verification suites and tests.
std::vector<double> random_distribution(uint32_t n, RngStream & rng);
EmbeddingMatrix     random_unit_embeddings(uint32_t n, uint32_t dim, RngStream & rng);

} // namespace pcg
