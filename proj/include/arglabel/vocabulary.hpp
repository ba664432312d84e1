#ifndef ARGLABEL_VOCABULARY_HPP
#define ARGLABEL_VOCABULARY_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "arglabel/corpus.hpp"

namespace arglabel {

// Word → dense id map. Id 0 is the zero word used for padding and for
// out-of-vocabulary lookups; it never corresponds to a surface.
class Vocabulary {
 public:
  static constexpr int kZeroWord = 0;
  static constexpr const char* kZeroSymbol = "<zero>";

  Vocabulary();

  // Inserts the lowercased surface if unseen and returns its id.
  int add(std::string_view surface);
  // Lowercased lookup; kZeroWord for unknown words.
  int id(std::string_view surface) const;
  bool contains(std::string_view surface) const;
  const std::string& word(int id) const { return words_.at(id); }
  std::size_t size() const noexcept { return words_.size(); }

  // One "word<TAB>id" line per surface word (the zero word is implicit).
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

std::string lowercase(std::string_view s);

template <typename Range>
Vocabulary build_vocabulary(const Range& surfaces) {
  Vocabulary vocab;
  for (const auto& s : surfaces) vocab.add(s);
  return vocab;
}

// Window tokens of every explicit relation, in relation order.
Vocabulary build_vocabulary(std::span<const Relation> relations,
                            const DocumentMap& documents);

}  // namespace arglabel

#endif  // ARGLABEL_VOCABULARY_HPP
