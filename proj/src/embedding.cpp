#include "pcg/embedding.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace pcg {

namespace {

constexpr char     kMagic[4]  = {'P', 'C', 'G', 'E'};
constexpr uint32_t kVersion   = 1;
constexpr uint8_t  kDtypeF32  = 0;
constexpr uint8_t  kDtypeF64  = 1;
constexpr double   kZeroNorm  = 1e-12;

template <typename T>
void write_pod(std::ofstream & out, const T & value) {
    out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream & in, const char * what) {
    T value;
    in.read(reinterpret_cast<char *>(&value), sizeof(T));
    if (!in) {
        throw FormatError(std::string("truncated matrix file while reading ") + what);
    }
    return value;
}

} // namespace

EmbeddingMatrix::EmbeddingMatrix(uint64_t n, uint64_t d, std::vector<double> row_major)
    : n_(n), d_(d), data_(std::move(row_major)) {
    if (n_ < 1 || d_ < 1) {
        throw InvalidArgError("embedding matrix needs n >= 1 and d >= 1");
    }
    if (data_.size() != n_ * d_) {
        throw InvalidArgError("embedding matrix payload size does not match n*d");
    }
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw InvalidArgError("embedding matrix has a non-finite entry");
        }
    }
}

bool EmbeddingMatrix::is_unit_norm(double tol) const {
    for (uint64_t t = 0; t < n_; ++t) {
        double s = 0.0;
        for (double v : row(t)) {
            s += v * v;
        }
        if (std::abs(std::sqrt(s) - 1.0) > tol) {
            return false;
        }
    }
    return true;
}

EmbeddingMatrix normalize(const EmbeddingMatrix & matrix) {
    std::vector<double> out(matrix.data());
    const uint64_t      n = matrix.rows();
    const uint64_t      d = matrix.dim();
    for (uint64_t t = 0; t < n; ++t) {
        double s = 0.0;
        for (uint64_t j = 0; j < d; ++j) {
            s += out[t * d + j] * out[t * d + j];
        }
        const double norm = std::sqrt(s);
        if (norm < kZeroNorm) {
            throw ZeroRowError(t);
        }
        for (uint64_t j = 0; j < d; ++j) {
            out[t * d + j] /= norm;
        }
    }
    return EmbeddingMatrix(n, d, std::move(out));
}

void save_matrix(const EmbeddingMatrix & matrix, const std::string & path, bool as_f32) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, matrix.rows());
    write_pod(out, matrix.dim());
    write_pod(out, as_f32 ? kDtypeF32 : kDtypeF64);
    if (as_f32) {
        for (double v : matrix.data()) {
            const float f = static_cast<float>(v);
            write_pod(out, f);
        }
    } else {
        out.write(reinterpret_cast<const char *>(matrix.data().data()),
                  static_cast<std::streamsize>(matrix.data().size() * sizeof(double)));
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

EmbeddingMatrix load_matrix(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("bad matrix magic in " + path);
    }
    const auto version = read_pod<uint32_t>(in, "version");
    if (version != kVersion) {
        throw FormatError("unsupported matrix version " + std::to_string(version));
    }
    const auto n     = read_pod<uint64_t>(in, "n");
    const auto d     = read_pod<uint64_t>(in, "d");
    const auto dtype = read_pod<uint8_t>(in, "dtype");
    if (n < 1 || d < 1) {
        throw FormatError("matrix header has n or d below 1");
    }
    if (dtype != kDtypeF32 && dtype != kDtypeF64) {
        throw FormatError("unknown matrix dtype " + std::to_string(dtype));
    }

    std::vector<double> data(n * d);
    if (dtype == kDtypeF64) {
        in.read(reinterpret_cast<char *>(data.data()), static_cast<std::streamsize>(n * d * sizeof(double)));
    } else {
        std::vector<float> raw(n * d);
        in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(n * d * sizeof(float)));
        for (size_t i = 0; i < raw.size(); ++i) {
            data[i] = static_cast<double>(raw[i]);
        }
    }
    if (!in) {
        throw FormatError("truncated matrix payload in " + path);
    }
    return EmbeddingMatrix(n, d, std::move(data));
}

EmbeddingMatrix load_embeddings(const std::string & path, bool pre_normalized) {
    EmbeddingMatrix raw = load_matrix(path);
    if (!pre_normalized) {
        return normalize(raw);
    }
    // f32 storage keeps roughly 1e-7 of the unit norm, so the check is loose.
    if (!raw.is_unit_norm(1e-6)) {
        throw ConsistencyError("embeddings declared pre-normalized but a row is not unit norm: " + path);
    }
    return raw;
}

} // namespace pcg
