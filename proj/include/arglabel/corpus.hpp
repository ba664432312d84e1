#ifndef ARGLABEL_CORPUS_HPP
#define ARGLABEL_CORPUS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace arglabel {

class Vocabulary;

// Sorted, duplicate-free set of document token offsets.
class Span {
 public:
  Span() = default;
  Span(std::initializer_list<std::int64_t> indices);
  explicit Span(std::vector<std::int64_t> indices);

  bool empty() const noexcept { return indices_.empty(); }
  std::size_t size() const noexcept { return indices_.size(); }
  std::int64_t front() const { return indices_.front(); }
  std::int64_t back() const { return indices_.back(); }
  bool contains(std::int64_t index) const;
  bool intersects(const Span& other) const;
  const std::vector<std::int64_t>& indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  friend bool operator==(const Span&, const Span&) = default;

 private:
  std::vector<std::int64_t> indices_;
};

Span span_union(const Span& a, const Span& b);

struct Token {
  std::string surface;
  std::int64_t doc_index = 0;
};

struct Document {
  std::string doc_id;
  std::vector<Token> tokens;
};

using DocumentMap = std::map<std::string, Document>;

enum class RelationType { Explicit, NonExplicit };

struct Relation {
  std::int64_t id = 0;
  std::string doc_id;
  RelationType type = RelationType::Explicit;
  Span arg1;
  Span arg2;
  Span connective;
};

// Per-token class codes. The numeric order doubles as the argmax tie-break.
enum class Label : std::uint8_t { None = 0, Arg1 = 1, Arg2 = 2, Conn = 3 };
inline constexpr int kNumLabels = 4;

struct Instance {
  std::vector<int> word_ids;
  std::vector<Label> labels;
  std::int64_t window_start = 0;
  std::size_t real_len = 0;

  std::size_t max_len() const noexcept { return word_ids.size(); }
};

struct Dataset {
  std::vector<Relation> relations;
  DocumentMap documents;
};

// Table 1 bins.
enum class DistanceBin { Zero, One, TwoToTen, OverTen };
DistanceBin distance_bin(std::int64_t distance) noexcept;
const char* bin_name(DistanceBin bin) noexcept;
inline constexpr DistanceBin kAllBins[] = {DistanceBin::Zero, DistanceBin::One,
                                           DistanceBin::TwoToTen,
                                           DistanceBin::OverTen};

struct CorpusStats {
  std::size_t n_explicit_train = 0;
  std::size_t n_explicit_test = 0;
  std::size_t n_nonexplicit_train = 0;
  std::size_t n_nonexplicit_test = 0;
  // explicit relations whose distance was rejected (overlapping arguments)
  std::size_t n_distance_rejected = 0;
  std::map<std::int64_t, std::size_t> distance_histogram;
  std::map<DistanceBin, std::size_t> bin_counts;

  std::size_t n_explicit() const { return n_explicit_train + n_explicit_test; }
  std::size_t n_nonexplicit() const {
    return n_nonexplicit_train + n_nonexplicit_test;
  }
  std::size_t n_total() const { return n_explicit() + n_nonexplicit(); }
};

// Parses newline-delimited shared-task relation records and validates their
// token offsets against `documents`.
std::vector<Relation> load_relations(const std::filesystem::path& path,
                                     const DocumentMap& documents);

// Token-per-line files named by DocID.
DocumentMap load_token_documents(const std::filesystem::path& dir);
// The shared-task parses.json layout (only the word surfaces are read).
DocumentMap load_parses_json(const std::filesystem::path& path);

// `dir` holds relations.json plus either docs/ or parses.json.
Dataset load_dataset(const std::filesystem::path& dir);

std::vector<Relation> filter_explicit(std::span<const Relation> relations);

// Throws ValidationError if the relation breaks the pairwise-disjoint rule or
// references tokens outside the document.
void validate_relation(const Relation& relation, const Document& document);

struct Window {
  std::int64_t start = 0;
  std::int64_t end = 0;  // exclusive
  std::size_t length() const { return static_cast<std::size_t>(end - start); }
};

// Contiguous token range from the first to the last token of
// Arg1 ∪ Arg2 ∪ connective.
Window relation_window(const Relation& relation);

Instance build_instance(const Relation& relation, const Document& document,
                        const Vocabulary& vocab, std::size_t max_len);

std::int64_t distance(const Relation& relation);

CorpusStats corpus_stats(std::span<const Relation> train,
                         std::span<const Relation> test = {});

}  // namespace arglabel

#endif  // ARGLABEL_CORPUS_HPP
