#ifndef ARGLABEL_TESTS_SUPPORT_HPP
#define ARGLABEL_TESTS_SUPPORT_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "arglabel/corpus.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("arglabel_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct FixtureRelation {
  std::int64_t id;
  std::string doc_id;
  std::string type;  // "Explicit", "Implicit", ...
  std::vector<std::int64_t> arg1, arg2, conn;
};

// One shared-task record. Character offsets are synthesized from the token
// position; only the docTokenOffset column matters to the loader.
inline std::string relation_line(const FixtureRelation& r) {
  auto tokens = [](const std::vector<std::int64_t>& idx) {
    nlohmann::json list = nlohmann::json::array();
    for (auto i : idx) list.push_back({i * 10, i * 10 + 5, i, 0, i});
    return nlohmann::json{{"TokenList", list}, {"CharacterSpanList", nlohmann::json::array()},
                          {"RawText", ""}};
  };
  nlohmann::json j = {{"ID", r.id},          {"DocID", r.doc_id}, {"Type", r.type},
                      {"Sense", {"Expansion"}}, {"Arg1", tokens(r.arg1)},
                      {"Arg2", tokens(r.arg2)}, {"Connective", tokens(r.conn)}};
  return j.dump();
}

// dataset dir: relations.json + docs/<DocID> with one token per line.
inline void write_dataset(const fs::path& dir,
                          const std::map<std::string, std::vector<std::string>>& docs,
                          const std::vector<FixtureRelation>& relations) {
  fs::create_directories(dir / "docs");
  for (const auto& [id, words] : docs) {
    std::ofstream out(dir / "docs" / id);
    for (const auto& w : words) out << w << '\n';
  }
  std::ofstream out(dir / "relations.json");
  for (const auto& r : relations) out << relation_line(r) << '\n';
}

inline std::vector<std::int64_t> range(std::int64_t begin, std::int64_t end) {
  std::vector<std::int64_t> v;
  for (auto i = begin; i < end; ++i) v.push_back(i);
  return v;
}

inline arglabel::Document make_document(const std::string& id, const std::string& text) {
  arglabel::Document d;
  d.doc_id = id;
  for (const auto& w : split_words(text))
    d.tokens.push_back({w, static_cast<std::int64_t>(d.tokens.size())});
  return d;
}

inline arglabel::Relation make_relation(std::int64_t id, const std::string& doc,
                                        std::vector<std::int64_t> arg1,
                                        std::vector<std::int64_t> arg2,
                                        std::vector<std::int64_t> conn) {
  arglabel::Relation r;
  r.id = id;
  r.doc_id = doc;
  r.arg1 = arglabel::Span(std::move(arg1));
  r.arg2 = arglabel::Span(std::move(arg2));
  r.connective = arglabel::Span(std::move(conn));
  return r;
}

}  // namespace testing

#endif  // ARGLABEL_TESTS_SUPPORT_HPP
