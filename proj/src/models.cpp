#include "pcg/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace pcg {

namespace {

void validate_row(const std::vector<double> & row, size_t n, const char * what) {
    if (row.size() != n) {
        throw InvalidArgError(std::string(what) + ": row length does not match n");
    }
    TokenDistribution dist(row);
    dist.validate();
}

class MemorylessModel final : public SequenceModel {
  public:
    explicit MemorylessModel(std::vector<double> probs) : probs_(std::move(probs)) {
        validate_row(probs_, probs_.size(), "memoryless model");
    }

    uint32_t vocab_size() const override { return static_cast<uint32_t>(probs_.size()); }

    TokenDistribution next_distribution(std::span<const TokenId>) const override {
        return TokenDistribution(probs_);
    }

  private:
    std::vector<double> probs_;
};

class MarkovModel final : public SequenceModel {
  public:
    MarkovModel(std::vector<std::vector<double>> rows, std::vector<double> initial)
        : rows_(std::move(rows)), initial_(std::move(initial)) {
        const size_t n = rows_.size();
        if (n == 0) {
            throw InvalidArgError("markov model needs at least one row");
        }
        validate_row(initial_, n, "markov initial row");
        for (const auto & row : rows_) {
            validate_row(row, n, "markov transition row");
        }
    }

    uint32_t vocab_size() const override { return static_cast<uint32_t>(rows_.size()); }

    TokenDistribution next_distribution(std::span<const TokenId> prefix) const override {
        if (prefix.empty()) {
            return TokenDistribution(initial_);
        }
        const TokenId last = prefix.back();
        if (last >= rows_.size()) {
            throw InvalidArgError("markov model: prefix token out of range");
        }
        return TokenDistribution(rows_[last]);
    }

  private:
    std::vector<std::vector<double>> rows_;
    std::vector<double>              initial_;
};

} // namespace

TokenDistribution softmax_temperature(std::span<const double> logits, double temperature) {
    if (!(temperature > 0.0)) {
        throw InvalidArgError("softmax temperature must be positive");
    }
    if (logits.empty()) {
        throw InvalidArgError("softmax needs at least one logit");
    }
    double max_logit = logits[0];
    for (double v : logits) {
        if (!std::isfinite(v)) {
            throw InvalidArgError("softmax logits must be finite");
        }
        max_logit = std::max(max_logit, v);
    }
    std::vector<double> probs(logits.size());
    double              sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp((logits[i] - max_logit) / temperature);
        sum += probs[i];
    }
    for (double & v : probs) {
        v /= sum;
    }
    return TokenDistribution(std::move(probs));
}

ModelPtr memoryless_model(std::vector<double> probs) {
    return std::make_shared<MemorylessModel>(std::move(probs));
}

ModelPtr markov_model(std::vector<std::vector<double>> rows, std::vector<double> initial) {
    return std::make_shared<MarkovModel>(std::move(rows), std::move(initial));
}

ModelPtr logit_table_model(std::vector<std::vector<double>> logit_rows, std::vector<double> initial_logits,
                           double temperature) {
    std::vector<std::vector<double>> rows;
    rows.reserve(logit_rows.size());
    for (const auto & logits : logit_rows) {
        rows.push_back(softmax_temperature(logits, temperature).probs);
    }
    auto initial = softmax_temperature(initial_logits, temperature).probs;
    return markov_model(std::move(rows), std::move(initial));
}

ModelPtr model_from_json(const std::string & json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception & e) {
        throw ConfigError(std::string("model spec is not valid JSON: ") + e.what());
    }
    try {
        const std::string kind = doc.at("kind").get<std::string>();
        const uint32_t    n    = doc.at("n").get<uint32_t>();
        if (kind == "memoryless") {
            return memoryless_model(doc.at("probs").get<std::vector<double>>());
        }
        if (kind == "markov") {
            if (doc.contains("table_path")) {
                const EmbeddingMatrix table = load_matrix(doc["table_path"].get<std::string>());
                if (table.rows() != n + 1 || table.dim() != n) {
                    throw ConfigError("markov table file must be (n+1) x n with row 0 as the initial row");
                }
                std::vector<double>              initial(table.row(0).begin(), table.row(0).end());
                std::vector<std::vector<double>> rows(n);
                for (uint32_t t = 0; t < n; ++t) {
                    rows[t].assign(table.row(t + 1).begin(), table.row(t + 1).end());
                }
                return markov_model(std::move(rows), std::move(initial));
            }
            return markov_model(doc.at("rows").get<std::vector<std::vector<double>>>(),
                                doc.at("initial").get<std::vector<double>>());
        }
        if (kind == "logit-table") {
            return logit_table_model(doc.at("logits").get<std::vector<std::vector<double>>>(),
                                     doc.at("initial").get<std::vector<double>>(),
                                     doc.value("temperature", 1.0));
        }
        throw ConfigError("unknown model kind: " + kind);
    } catch (const nlohmann::json::exception & e) {
        throw ConfigError(std::string("model spec missing or mistyped field: ") + e.what());
    }
}

std::string model_spec_to_json(const std::string & kind, uint32_t n, uint64_t seed, double temperature) {
    nlohmann::ordered_json doc;
    doc["kind"]        = kind;
    doc["n"]           = n;
    doc["seed"]        = seed;
    doc["temperature"] = temperature;
    return doc.dump();
}

ClusteredPair clustered_pair(uint32_t n, uint32_t clusters, uint32_t dim, double intra_spread, double noise,
                             uint64_t seed, double temperature) {
    if (clusters < 1 || clusters > n) {
        throw InvalidArgError("clustered_pair needs 1 <= clusters <= n");
    }
    if (dim < 2) {
        throw InvalidArgError("clustered_pair needs dim >= 2");
    }
    if (noise < 0.0 || noise > 1.0) {
        throw InvalidArgError("clustered_pair noise must lie in [0, 1]");
    }

    ClusteredPair out;
    out.cluster_of.resize(n);
    for (uint32_t t = 0; t < n; ++t) {
        out.cluster_of[t] = t % clusters;
    }

    // Retry center geometry until clusters are separable in cosine (virtually
    // always the first attempt for small M and dim >= 4).
    std::vector<double> emb(static_cast<size_t>(n) * dim);
    double              min_intra = 1.0;
    double              max_cross = -1.0;
    for (uint64_t attempt = 0;; ++attempt) {
        if (attempt >= 100) {
            throw InvalidArgError("clustered_pair: could not separate cluster centers; raise dim or lower spread");
        }
        RngStream center_rng = RngStream::from(seed, attempt, 0, RngPurpose::Synthesis);
        std::vector<double> centers(static_cast<size_t>(clusters) * dim);
        for (uint32_t c = 0; c < clusters; ++c) {
            double norm = 0.0;
            for (uint32_t j = 0; j < dim; ++j) {
                const double v = center_rng.next_gaussian();
                centers[c * dim + j] = v;
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (uint32_t j = 0; j < dim; ++j) {
                centers[c * dim + j] /= norm;
            }
        }

        RngStream token_rng = RngStream::from(seed, attempt, 1, RngPurpose::Synthesis);
        for (uint32_t t = 0; t < n; ++t) {
            const uint32_t c    = out.cluster_of[t];
            double         norm = 0.0;
            for (uint32_t j = 0; j < dim; ++j) {
                const double v = centers[c * dim + j] + intra_spread * token_rng.next_gaussian();
                emb[static_cast<size_t>(t) * dim + j] = v;
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (uint32_t j = 0; j < dim; ++j) {
                emb[static_cast<size_t>(t) * dim + j] /= norm;
            }
        }

        min_intra = 1.0;
        max_cross = -1.0;
        for (uint32_t a = 0; a < n; ++a) {
            for (uint32_t b = a + 1; b < n; ++b) {
                double dot = 0.0;
                for (uint32_t j = 0; j < dim; ++j) {
                    dot += emb[static_cast<size_t>(a) * dim + j] * emb[static_cast<size_t>(b) * dim + j];
                }
                if (out.cluster_of[a] == out.cluster_of[b]) {
                    min_intra = std::min(min_intra, dot);
                } else {
                    max_cross = std::max(max_cross, dot);
                }
            }
        }
        if (clusters == 1 || n == clusters || max_cross < min_intra - 1e-6) {
            break;
        }
    }
    out.embeddings       = EmbeddingMatrix(n, dim, std::move(emb));
    out.min_intra_cosine = min_intra;
    out.max_cross_cosine = max_cross;
    out.suggested_theta  = 0.5 * (min_intra + max_cross);

    // Target: per-cluster base logit plus per-token jitter, softmaxed.
    RngStream           logit_rng = RngStream::from(seed, 0, 2, RngPurpose::Synthesis);
    std::vector<double> base(clusters);
    for (uint32_t c = 0; c < clusters; ++c) {
        base[c] = logit_rng.next_gaussian();
    }
    std::vector<double> logits(n);
    for (uint32_t t = 0; t < n; ++t) {
        logits[t] = base[out.cluster_of[t]] + 0.5 * logit_rng.next_gaussian();
    }
    std::vector<double> target = softmax_temperature(logits, temperature).probs;

    // Draft: blend each token's target mass with the mass of its successor on
    // a seeded random cycle through its cluster. Both terms keep each
    // cluster's total mass, so cluster-level masses match analytically.
    std::vector<std::vector<TokenId>> members(clusters);
    for (uint32_t t = 0; t < n; ++t) {
        members[out.cluster_of[t]].push_back(t);
    }
    RngStream           perm_rng = RngStream::from(seed, 0, 3, RngPurpose::Synthesis);
    std::vector<double> draft(n);
    for (uint32_t c = 0; c < clusters; ++c) {
        auto order = members[c];
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[perm_rng.next_below(i)]);
        }
        for (size_t i = 0; i < order.size(); ++i) {
            const TokenId from = order[i];
            const TokenId to   = order[(i + 1) % order.size()];
            draft[from]        = (1.0 - noise) * target[from] + noise * target[to];
        }
    }

    out.draft  = memoryless_model(std::move(draft));
    out.target = memoryless_model(std::move(target));
    return out;
}

AcceptRatePair accept_rate_pair(uint32_t n, double a) {
    if (n < 2) {
        throw InvalidArgError("accept_rate_pair needs n >= 2");
    }
    if (a < 0.0 || a > 1.0) {
        throw InvalidArgError("accept_rate_pair needs a in [0, 1]");
    }
    std::vector<double> draft(n, 0.0);
    draft[0] = 1.0;
    std::vector<double> target(n, (1.0 - a) / static_cast<double>(n - 1));
    target[0] = a;
    return AcceptRatePair{memoryless_model(std::move(draft)), memoryless_model(std::move(target))};
}

std::vector<double> random_distribution(uint32_t n, RngStream & rng) {
    std::vector<double> probs(n);
    double              sum = 0.0;
    for (uint32_t t = 0; t < n; ++t) {
        // Exp(1) variates normalize to a flat Dirichlet draw; entries stay
        // strictly positive.
        probs[t] = -std::log(1.0 - rng.next_unit());
        sum += probs[t];
    }
    for (double & v : probs) {
        v /= sum;
    }
    return probs;
}

EmbeddingMatrix random_unit_embeddings(uint32_t n, uint32_t dim, RngStream & rng) {
    std::vector<double> data(static_cast<size_t>(n) * dim);
    for (double & v : data) {
        v = rng.next_gaussian();
    }
    return normalize(EmbeddingMatrix(n, dim, std::move(data)));
}

} // namespace pcg
