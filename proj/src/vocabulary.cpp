#include "arglabel/vocabulary.hpp"

#include <cctype>
#include <fstream>

#include "arglabel/errors.hpp"

namespace arglabel {

// ASCII-only folding; bytes of multi-byte UTF-8 sequences pass through.
std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Vocabulary::Vocabulary() : words_{kZeroSymbol} {}

int Vocabulary::add(std::string_view surface) {
  std::string key = lowercase(surface);
  auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(words_.size()));
  if (inserted) words_.push_back(std::move(key));
  return it->second;
}

int Vocabulary::id(std::string_view surface) const {
  auto it = ids_.find(lowercase(surface));
  return it == ids_.end() ? kZeroWord : it->second;
}

bool Vocabulary::contains(std::string_view surface) const {
  return ids_.count(lowercase(surface)) != 0;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary: " + path.string());
  for (std::size_t id = 1; id < words_.size(); ++id)
    out << words_[id] << '\t' << id << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary: " + path.string());
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError(path.string(), line_no, "expected word<TAB>id");
    int id = 0;
    try {
      id = std::stoi(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "bad id");
    }
    if (id != static_cast<int>(vocab.size()))
      throw ParseError(path.string(), line_no, "ids must be dense and ascending from 1");
    if (vocab.add(line.substr(0, tab)) != id)
      throw ParseError(path.string(), line_no, "duplicate word");
  }
  return vocab;
}

Vocabulary build_vocabulary(std::span<const Relation> relations,
                            const DocumentMap& documents) {
  Vocabulary vocab;
  for (const Relation& r : relations) {
    if (r.type != RelationType::Explicit) continue;
    const auto& doc = documents.at(r.doc_id);
    const Window w = relation_window(r);
    for (std::int64_t p = w.start; p < w.end; ++p)
      vocab.add(doc.tokens.at(static_cast<std::size_t>(p)).surface);
  }
  return vocab;
}

}  // namespace arglabel
