#ifndef ARGLABEL_SYNTH_HPP
#define ARGLABEL_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "arglabel/corpus.hpp"

namespace arglabel {

// Synthetic explicit relations follow the template
//   <a1> content+ </a1> filler^distance CONN content+ </a2>
// where Arg1 covers <a1> .. </a1>, the connective is the single CONN token and
// Arg2 covers the content after it through </a2>. Markers and connectives
// never occur as content, so every label is recoverable from token identity.
struct SynthConfig {
  std::size_t n_instances = 2000;
  std::size_t vocab_size = 200;  // content words w0 .. w{n-1}
  std::size_t max_window = 60;
  std::vector<std::pair<std::int64_t, double>> distance_distribution = {
      {0, 0.25}, {1, 0.5}, {5, 0.15}, {12, 0.10}};
  std::vector<std::string> connective_lexicon = {"because", "when", "but",
                                                 "although", "until", "since"};
  std::string arg1_begin = "<a1>";
  std::string arg1_end = "</a1>";
  std::string arg2_end = "</a2>";
  std::size_t max_arg_len = 8;  // content tokens per argument
  std::size_t relations_per_doc = 4;
  std::size_t max_context = 3;  // unrelated tokens around each relation
  std::size_t n_nonexplicit = 0;  // extra Implicit relations over context text
  double zipf_exponent = 1.0;
  // Probability that a filler token is replaced by a connective word.
  double delimiter_ambiguity = 0.0;
  std::int64_t first_id = 1;
  std::string doc_prefix = "synth";
  std::uint64_t seed = 7;

  void validate() const;
  std::size_t min_template_length(std::int64_t distance) const;
};

struct GroundTruth {
  std::int64_t relation_id = 0;
  std::string doc_id;
  std::int64_t distance = 0;
  Span arg1, arg2, conn;
};

struct SynthCorpus {
  std::vector<Document> documents;
  std::vector<Relation> relations;  // explicit first (in truth order), then implicit
  std::vector<GroundTruth> truth;  // explicit relations only
};

SynthCorpus generate(const SynthConfig& cfg);

// Recomputes the explicit spans of a generated document from the reserved
// tokens alone, in document order.
std::vector<GroundTruth> oracle_label(const Document& doc, const SynthConfig& cfg);

// Writes relations.json, docs/<DocID> and ground_truth.csv under `dir`.
void write_synth_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);
std::vector<GroundTruth> read_ground_truth(const std::filesystem::path& path);

// Parses "0:0.25,1:0.5".
std::vector<std::pair<std::int64_t, double>> parse_distance_distribution(
    const std::string& text);

}  // namespace arglabel

#endif  // ARGLABEL_SYNTH_HPP
