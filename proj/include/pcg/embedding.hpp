#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcg/errors.hpp"

namespace pcg {

// n x d row-major matrix of token embeddings. Similarity math always runs in
// 64-bit reals regardless of the on-disk storage width.
class EmbeddingMatrix {
  public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(uint64_t n, uint64_t d, std::vector<double> row_major);

    uint64_t rows() const { return n_; }
    uint64_t dim() const { return d_; }

    std::span<const double> row(uint64_t t) const { return {data_.data() + t * d_, d_}; }
    std::span<double> row_mut(uint64_t t) { return {data_.data() + t * d_, d_}; }
    const std::vector<double> & data() const { return data_; }

    bool is_unit_norm(double tol = 1e-9) const;

  private:
    uint64_t            n_ = 0;
    uint64_t            d_ = 0;
    std::vector<double> data_;
};

// Scale every row to unit L2 norm so cosine becomes a plain dot product.
// Throws ZeroRowError if a row's norm is below 1e-12.
EmbeddingMatrix normalize(const EmbeddingMatrix & matrix);

// Binary matrix file, little-endian:
//   magic "PCGE", u32 version=1, u64 n, u64 d, u8 dtype (0=f32, 1=f64),
//   then n*d row-major values.
// `save_matrix`/`load_matrix` move raw values (used for model tables too);
// `load_embeddings` additionally normalizes unless the rows are declared
// pre-normalized, in which case near-unit norms are verified instead.
void            save_matrix(const EmbeddingMatrix & matrix, const std::string & path, bool as_f32 = false);
EmbeddingMatrix load_matrix(const std::string & path);
EmbeddingMatrix load_embeddings(const std::string & path, bool pre_normalized = false);

} // namespace pcg
