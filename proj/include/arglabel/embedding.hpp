#ifndef ARGLABEL_EMBEDDING_HPP
#define ARGLABEL_EMBEDDING_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arglabel/errors.hpp"
#include "arglabel/types.hpp"
#include "arglabel/vocabulary.hpp"

namespace arglabel {

// One row per vocabulary id.
template <typename Scalar>
using EmbeddingMatrix = Matrix<Scalar>;

inline constexpr double kRandomEmbeddingBound = 0.05;

// Rows 1..size-1 uniform in [-bound, bound); row 0 (zero word) all zeros.
template <typename Scalar>
EmbeddingMatrix<Scalar> init_random(std::size_t vocab_size, Index dim,
                                    std::uint64_t seed,
                                    double bound = kRandomEmbeddingBound) {
  if (dim < 1) throw ConfigError("embedding dim must be >= 1");
  EmbeddingMatrix<Scalar> e =
      EmbeddingMatrix<Scalar>::Zero(static_cast<Index>(vocab_size), dim);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> dist(static_cast<Scalar>(-bound),
                                              static_cast<Scalar>(bound));
  for (Index r = 1; r < e.rows(); ++r)
    for (Index c = 0; c < dim; ++c) e(r, c) = dist(rng);
  return e;
}

template <typename Scalar>
EmbeddingMatrix<Scalar> init_random(const Vocabulary& vocab, Index dim,
                                    std::uint64_t seed,
                                    double bound = kRandomEmbeddingBound) {
  return init_random<Scalar>(vocab.size(), dim, seed, bound);
}

template <typename Scalar>
struct PretrainedEmbeddings {
  EmbeddingMatrix<Scalar> vectors;
  std::size_t coverage = 0;  // vocabulary words found in the file
};

// Reads "word v1 ... v_dim" lines. Words missing from the file keep their
// init_random row, so an empty file is equivalent to init_random.
template <typename Scalar>
PretrainedEmbeddings<Scalar> load_pretrained(const std::filesystem::path& path,
                                             const Vocabulary& vocab, Index dim,
                                             std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pretrained vectors: " + path.string());

  PretrainedEmbeddings<Scalar> out{init_random<Scalar>(vocab, dim, seed), 0};
  std::vector<bool> filled(vocab.size(), false);
  std::vector<std::string> fields;
  std::string line;
  std::size_t line_no = 0;
  Index file_dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    fields.clear();
    std::istringstream ss(line);
    for (std::string f; ss >> f;) fields.push_back(std::move(f));
    if (fields.empty()) continue;

    const auto arity = static_cast<Index>(fields.size()) - 1;
    if (file_dim < 0) {
      file_dim = arity;
      if (file_dim != dim)
        throw ConfigError(path.string() + " holds " + std::to_string(file_dim) +
                          "-dimensional vectors, expected " +
                          std::to_string(dim));
    } else if (arity != file_dim) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(file_dim) +
                           " values, found " + std::to_string(arity));
    }

    const int id = vocab.id(fields[0]);
    if (id == Vocabulary::kZeroWord || filled[id]) continue;
    for (Index c = 0; c < dim; ++c) {
      const std::string& f = fields[static_cast<std::size_t>(c) + 1];
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError(path.string(), line_no, "bad real '" + f + "'");
      out.vectors(id, c) = static_cast<Scalar>(value);
    }
    filled[id] = true;
    ++out.coverage;
  }
  return out;
}

}  // namespace arglabel

#endif  // ARGLABEL_EMBEDDING_HPP
