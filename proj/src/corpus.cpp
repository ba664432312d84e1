#include "arglabel/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "arglabel/errors.hpp"
#include "arglabel/vocabulary.hpp"

namespace arglabel {

using nlohmann::json;

Span::Span(std::initializer_list<std::int64_t> indices)
    : Span(std::vector<std::int64_t>(indices)) {}

Span::Span(std::vector<std::int64_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool Span::contains(std::int64_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool Span::intersects(const Span& other) const {
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a;
    else ++b;
  }
  return false;
}

Span span_union(const Span& a, const Span& b) {
  std::vector<std::int64_t> merged;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(merged));
  return Span(std::move(merged));
}

DistanceBin distance_bin(std::int64_t distance) noexcept {
  if (distance <= 0) return DistanceBin::Zero;
  if (distance == 1) return DistanceBin::One;
  if (distance <= 10) return DistanceBin::TwoToTen;
  return DistanceBin::OverTen;
}

const char* bin_name(DistanceBin bin) noexcept {
  switch (bin) {
    case DistanceBin::Zero: return "0";
    case DistanceBin::One: return "1";
    case DistanceBin::TwoToTen: return "2-10";
    case DistanceBin::OverTen: return ">10";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Loading

namespace {

Span parse_token_list(const json& arg, const std::string& which,
                      const std::string& source, std::size_t line) {
  if (!arg.is_object())
    throw ParseError(source, line, which + " is not an object");
  auto it = arg.find("TokenList");
  if (it == arg.end() || !it->is_array())
    throw ParseError(source, line, which + " lacks a TokenList array");
  std::vector<std::int64_t> offsets;
  for (const auto& tok : *it) {
    if (!tok.is_array() || tok.size() != 5)
      throw ParseError(source, line,
                       which + " token entry must hold 5 integers "
                               "[charStart, charEnd, docTokenOffset, "
                               "sentenceOffset, sentenceTokenOffset]");
    for (const auto& v : tok)
      if (!v.is_number_integer())
        throw ParseError(source, line, which + " token entry holds a non-integer");
    const auto char_start = tok[0].get<std::int64_t>();
    const auto char_end = tok[1].get<std::int64_t>();
    if (char_start < 0 || char_end < char_start)
      throw ParseError(source, line, which + " has an inverted character span");
    const auto doc_offset = tok[2].get<std::int64_t>();
    if (doc_offset < 0)
      throw ParseError(source, line, which + " has a negative token offset");
    offsets.push_back(doc_offset);
  }
  return Span(std::move(offsets));
}

}  // namespace

void validate_relation(const Relation& r, const Document& doc) {
  const auto n = static_cast<std::int64_t>(doc.tokens.size());
  auto in_range = [&](const Span& s, const char* which) {
    if (!s.empty() && s.back() >= n)
      throw ValidationError("relation " + std::to_string(r.id) + ": " + which +
                            " token offset " + std::to_string(s.back()) +
                            " beyond document " + r.doc_id + " of " +
                            std::to_string(n) + " tokens");
  };
  in_range(r.arg1, "Arg1");
  in_range(r.arg2, "Arg2");
  in_range(r.connective, "Connective");
  if (r.arg1.empty() || r.arg2.empty())
    throw ValidationError("relation " + std::to_string(r.id) +
                          ": empty argument span");
  if (r.type == RelationType::Explicit && r.connective.empty())
    throw ValidationError("relation " + std::to_string(r.id) +
                          ": explicit relation without a connective");
  if (r.arg1.intersects(r.arg2) || r.arg1.intersects(r.connective) ||
      r.arg2.intersects(r.connective))
    throw ValidationError("relation " + std::to_string(r.id) +
                          ": Arg1, Arg2 and connective spans overlap");
}

std::vector<Relation> load_relations(const std::filesystem::path& path,
                                     const DocumentMap& documents) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open relation file: " + path.string());
  const std::string source = path.string();
  std::vector<Relation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(source, line_no, "record is not an object");
    Relation r;
    try {
      r.doc_id = rec.at("DocID").get<std::string>();
      const auto type = rec.at("Type").get<std::string>();
      r.type = type == "Explicit" ? RelationType::Explicit : RelationType::NonExplicit;
      if (auto id = rec.find("ID"); id != rec.end() && id->is_number_integer())
        r.id = id->get<std::int64_t>();
      else
        r.id = static_cast<std::int64_t>(line_no);
      r.arg1 = parse_token_list(rec.at("Arg1"), "Arg1", source, line_no);
      r.arg2 = parse_token_list(rec.at("Arg2"), "Arg2", source, line_no);
      r.connective = parse_token_list(rec.at("Connective"), "Connective", source, line_no);
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, std::string("bad record: ") + e.what());
    }
    auto doc = documents.find(r.doc_id);
    if (doc == documents.end())
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": unknown document " + r.doc_id);
    validate_relation(r, doc->second);
    out.push_back(std::move(r));
  }
  return out;
}

DocumentMap load_token_documents(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError("not a document directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  DocumentMap docs;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open document: " + file.string());
    Document doc;
    doc.doc_id = file.filename().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty())
        throw ParseError(file.string(), line_no, "empty token line");
      doc.tokens.push_back({line, static_cast<std::int64_t>(doc.tokens.size())});
    }
    docs.emplace(doc.doc_id, std::move(doc));
  }
  return docs;
}

DocumentMap load_parses_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parses file: " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  DocumentMap docs;
  try {
    for (const auto& [doc_id, body] : root.items()) {
      Document doc;
      doc.doc_id = doc_id;
      for (const auto& sentence : body.at("sentences"))
        for (const auto& word : sentence.at("words"))
          doc.tokens.push_back({word.at(0).get<std::string>(),
                                static_cast<std::int64_t>(doc.tokens.size())});
      docs.emplace(doc_id, std::move(doc));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": unexpected parses layout: " + e.what());
  }
  return docs;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError("dataset directory not found: " + dir.string());
  Dataset ds;
  if (std::filesystem::is_directory(dir / "docs", ec))
    ds.documents = load_token_documents(dir / "docs");
  else if (std::filesystem::exists(dir / "parses.json", ec))
    ds.documents = load_parses_json(dir / "parses.json");
  else
    throw IoError(dir.string() + " has neither docs/ nor parses.json");
  ds.relations = load_relations(dir / "relations.json", ds.documents);
  return ds;
}

std::vector<Relation> filter_explicit(std::span<const Relation> relations) {
  std::vector<Relation> out;
  std::copy_if(relations.begin(), relations.end(), std::back_inserter(out),
               [](const Relation& r) { return r.type == RelationType::Explicit; });
  return out;
}

// ---------------------------------------------------------------------------
// Instances

Window relation_window(const Relation& r) {
  std::int64_t lo = r.arg1.front();
  std::int64_t hi = r.arg1.back();
  for (const Span* s : {&r.arg2, &r.connective}) {
    if (s->empty()) continue;
    lo = std::min(lo, s->front());
    hi = std::max(hi, s->back());
  }
  return {lo, hi + 1};
}

Instance build_instance(const Relation& r, const Document& doc,
                        const Vocabulary& vocab, std::size_t max_len) {
  if (r.type != RelationType::Explicit)
    throw ValidationError("build_instance needs an explicit relation");
  if (r.arg1.empty() || r.arg2.empty() || r.connective.empty())
    throw ValidationError("relation " + std::to_string(r.id) + " has an empty span");
  const Window w = relation_window(r);
  if (w.end > static_cast<std::int64_t>(doc.tokens.size()))
    throw ValidationError("relation " + std::to_string(r.id) +
                          " window exceeds its document");
  if (w.length() > max_len) throw OversizeError(w.length(), max_len);

  Instance inst;
  inst.window_start = w.start;
  inst.real_len = w.length();
  inst.word_ids.assign(max_len, Vocabulary::kZeroWord);
  inst.labels.assign(max_len, Label::None);
  for (std::size_t t = 0; t < inst.real_len; ++t) {
    const std::int64_t p = w.start + static_cast<std::int64_t>(t);
    inst.word_ids[t] = vocab.id(doc.tokens[static_cast<std::size_t>(p)].surface);
    if (r.arg1.contains(p)) inst.labels[t] = Label::Arg1;
    else if (r.arg2.contains(p)) inst.labels[t] = Label::Arg2;
    else if (r.connective.contains(p)) inst.labels[t] = Label::Conn;
  }
  return inst;
}

// Tokens strictly between the last token of the earlier argument and the first
// token of the later one, not counting connective tokens.
std::int64_t distance(const Relation& r) {
  if (r.arg1.empty() || r.arg2.empty())
    throw ValidationError("distance: relation " + std::to_string(r.id) +
                          " has an empty argument");
  const bool arg1_first = r.arg1.front() < r.arg2.front();
  const Span& first = arg1_first ? r.arg1 : r.arg2;
  const Span& second = arg1_first ? r.arg2 : r.arg1;
  if (first.back() >= second.front())
    throw ValidationError("distance: relation " + std::to_string(r.id) +
                          " has overlapping argument extents");
  std::int64_t count = 0;
  for (std::int64_t p = first.back() + 1; p < second.front(); ++p)
    if (!r.connective.contains(p)) ++count;
  return count;
}

CorpusStats corpus_stats(std::span<const Relation> train,
                         std::span<const Relation> test) {
  CorpusStats s;
  for (DistanceBin b : kAllBins) s.bin_counts[b] = 0;
  auto visit = [&s](std::span<const Relation> rels, std::size_t& n_explicit,
                    std::size_t& n_nonexplicit) {
    for (const Relation& r : rels) {
      if (r.type != RelationType::Explicit) {
        ++n_nonexplicit;
        continue;
      }
      ++n_explicit;
      try {
        const std::int64_t d = distance(r);
        ++s.distance_histogram[d];
        ++s.bin_counts[distance_bin(d)];
      } catch (const ValidationError&) {
        ++s.n_distance_rejected;
      }
    }
  };
  visit(train, s.n_explicit_train, s.n_nonexplicit_train);
  visit(test, s.n_explicit_test, s.n_nonexplicit_test);
  return s;
}

}  // namespace arglabel
