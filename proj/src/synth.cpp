#include "arglabel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "arglabel/errors.hpp"

namespace arglabel {

using nlohmann::json;

namespace {

std::string content_word(std::size_t k) { return "w" + std::to_string(k); }

bool is_content_word(const std::string& s) {
  return s.size() > 1 && s[0] == 'w' &&
         std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Largest-remainder apportionment of n items over the weights.
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double exact = static_cast<double>(n) * weights[k] / total;
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[k];
    remainders.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned)
    ++counts[remainders[k % remainders.size()].second];
  return counts;
}

std::string join_surfaces(const Document& doc, const Span& span) {
  std::string out;
  for (auto p : span) {
    if (!out.empty()) out += ' ';
    out += doc.tokens[static_cast<std::size_t>(p)].surface;
  }
  return out;
}

std::string span_text(const Span& s) {
  std::string out;
  for (auto p : s) {
    if (!out.empty()) out += ' ';
    out += std::to_string(p);
  }
  return out;
}

Span parse_span_text(const std::string& text) {
  std::istringstream ss(text);
  std::vector<std::int64_t> v;
  for (std::int64_t x; ss >> x;) v.push_back(x);
  return Span(std::move(v));
}

}  // namespace

std::size_t SynthConfig::min_template_length(std::int64_t distance) const {
  // <a1> w </a1> filler^d CONN w </a2>
  return 6 + static_cast<std::size_t>(distance);
}

void SynthConfig::validate() const {
  if (vocab_size < 1) throw ConfigError("synth: vocab_size must be >= 1");
  if (distance_distribution.empty())
    throw ConfigError("synth: empty distance distribution");
  if (connective_lexicon.empty()) throw ConfigError("synth: empty connective lexicon");
  if (max_arg_len < 1) throw ConfigError("synth: max_arg_len must be >= 1");
  if (relations_per_doc < 1) throw ConfigError("synth: relations_per_doc must be >= 1");
  if (!(delimiter_ambiguity >= 0.0 && delimiter_ambiguity <= 1.0))
    throw ConfigError("synth: delimiter_ambiguity must be in [0, 1]");
  std::set<std::string> reserved{arg1_begin, arg1_end, arg2_end};
  for (const auto& c : connective_lexicon) reserved.insert(c);
  if (reserved.size() != connective_lexicon.size() + 3)
    throw ConfigError("synth: reserved tokens must be distinct");
  for (const auto& r : reserved)
    if (is_content_word(r) || r.empty())
      throw ConfigError("synth: reserved token '" + r + "' collides with content words");
  for (const auto& [d, w] : distance_distribution) {
    if (d < 0) throw ConfigError("synth: negative distance");
    if (!(w > 0.0)) throw ConfigError("synth: distance weights must be positive");
    if (min_template_length(d) > max_window)
      throw ConfigError("synth: distance " + std::to_string(d) +
                        " cannot fit max_window " + std::to_string(max_window));
  }
}

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  SynthCorpus out;
  std::mt19937_64 rng(cfg.seed);

  std::vector<double> zipf(cfg.vocab_size);
  for (std::size_t k = 0; k < zipf.size(); ++k)
    zipf[k] = 1.0 / std::pow(static_cast<double>(k + 1), cfg.zipf_exponent);
  std::discrete_distribution<std::size_t> word_dist(zipf.begin(), zipf.end());
  std::uniform_int_distribution<std::size_t> context_len(0, cfg.max_context);
  std::uniform_int_distribution<std::size_t> conn_pick(0, cfg.connective_lexicon.size() - 1);
  std::bernoulli_distribution ambiguous(cfg.delimiter_ambiguity);

  std::vector<double> weights;
  for (const auto& dw : cfg.distance_distribution) weights.push_back(dw.second);
  const auto counts = apportion(cfg.n_instances, weights);
  std::vector<std::int64_t> distances;
  for (std::size_t k = 0; k < counts.size(); ++k)
    distances.insert(distances.end(), counts[k], cfg.distance_distribution[k].first);
  std::shuffle(distances.begin(), distances.end(), rng);

  auto push = [](Document& doc, std::string s) {
    const auto idx = static_cast<std::int64_t>(doc.tokens.size());
    doc.tokens.push_back({std::move(s), idx});
    return idx;
  };
  auto push_content = [&](Document& doc) { return push(doc, content_word(word_dist(rng))); };

  Document doc;
  auto flush_doc = [&]() {
    const std::size_t trailing = context_len(rng);
    for (std::size_t k = 0; k < trailing; ++k) push_content(doc);
    out.documents.push_back(std::move(doc));
    doc = Document{};
  };

  for (std::size_t i = 0; i < cfg.n_instances; ++i) {
    if (i % cfg.relations_per_doc == 0) {
      if (i > 0) flush_doc();
      char name[32];
      std::snprintf(name, sizeof name, "_%05zu", i / cfg.relations_per_doc);
      doc.doc_id = cfg.doc_prefix + name;
    }
    const std::int64_t d = distances[i];
    const std::size_t budget = cfg.max_window - 4 - static_cast<std::size_t>(d);
    const std::size_t cap = std::min(cfg.max_arg_len, budget / 2);
    std::uniform_int_distribution<std::size_t> arg_len(1, cap);

    const std::size_t lead = context_len(rng);
    for (std::size_t k = 0; k < lead; ++k) push_content(doc);

    std::vector<std::int64_t> a1, a2;
    a1.push_back(push(doc, cfg.arg1_begin));
    for (std::size_t k = arg_len(rng); k > 0; --k) a1.push_back(push_content(doc));
    a1.push_back(push(doc, cfg.arg1_end));
    for (std::int64_t k = 0; k < d; ++k) {
      if (ambiguous(rng)) push(doc, cfg.connective_lexicon[conn_pick(rng)]);
      else push_content(doc);
    }
    const std::int64_t conn = push(doc, cfg.connective_lexicon[conn_pick(rng)]);
    for (std::size_t k = arg_len(rng); k > 0; --k) a2.push_back(push_content(doc));
    a2.push_back(push(doc, cfg.arg2_end));

    Relation r;
    r.id = cfg.first_id + static_cast<std::int64_t>(i);
    r.doc_id = doc.doc_id;
    r.type = RelationType::Explicit;
    r.arg1 = Span(std::move(a1));
    r.arg2 = Span(std::move(a2));
    r.connective = Span{conn};
    out.truth.push_back({r.id, r.doc_id, d, r.arg1, r.arg2, r.connective});
    out.relations.push_back(std::move(r));
  }
  if (cfg.n_instances > 0) flush_doc();

  // Implicit relations live in their own marker-free documents.
  std::uniform_int_distribution<std::size_t> imp_len(1, cfg.max_arg_len);
  for (std::size_t i = 0; i < cfg.n_nonexplicit; ++i) {
    Document idoc;
    char name[32];
    std::snprintf(name, sizeof name, "_implicit_%05zu", i);
    idoc.doc_id = cfg.doc_prefix + name;
    std::vector<std::int64_t> a1, a2;
    for (std::size_t k = imp_len(rng); k > 0; --k) a1.push_back(push_content(idoc));
    for (std::size_t k = imp_len(rng); k > 0; --k) a2.push_back(push_content(idoc));
    Relation r;
    r.id = cfg.first_id + static_cast<std::int64_t>(cfg.n_instances + i);
    r.doc_id = idoc.doc_id;
    r.type = RelationType::NonExplicit;
    r.arg1 = Span(std::move(a1));
    r.arg2 = Span(std::move(a2));
    out.relations.push_back(std::move(r));
    out.documents.push_back(std::move(idoc));
  }
  return out;
}

std::vector<GroundTruth> oracle_label(const Document& doc, const SynthConfig& cfg) {
  const std::set<std::string> conns(cfg.connective_lexicon.begin(),
                                    cfg.connective_lexicon.end());
  std::vector<GroundTruth> out;
  const auto n = static_cast<std::int64_t>(doc.tokens.size());
  auto surface = [&](std::int64_t p) -> const std::string& {
    return doc.tokens[static_cast<std::size_t>(p)].surface;
  };
  auto fail = [&](const std::string& why) {
    throw ValidationError("oracle_label(" + doc.doc_id + "): " + why);
  };
  std::int64_t p = 0;
  while (p < n) {
    const std::string& s = surface(p);
    if (s == cfg.arg1_end || s == cfg.arg2_end) fail("closing marker without <a1>");
    if (s != cfg.arg1_begin) {
      ++p;
      continue;
    }
    const std::int64_t open = p;
    std::int64_t close = -1;
    for (std::int64_t q = open + 1; q < n; ++q) {
      const std::string& t = surface(q);
      if (t == cfg.arg1_end) {
        close = q;
        break;
      }
      if (t == cfg.arg1_begin || t == cfg.arg2_end || conns.count(t))
        fail("reserved token inside Arg1");
    }
    if (close < 0) fail("unterminated Arg1");
    if (close == open + 1) fail("empty Arg1 content");
    std::int64_t end = -1;
    for (std::int64_t q = close + 1; q < n; ++q) {
      const std::string& t = surface(q);
      if (t == cfg.arg2_end) {
        end = q;
        break;
      }
      if (t == cfg.arg1_begin || t == cfg.arg1_end) fail("marker before </a2>");
    }
    if (end < 0) fail("unterminated Arg2");
    std::int64_t conn = -1;
    for (std::int64_t q = end - 1; q > close; --q)
      if (conns.count(surface(q))) {
        conn = q;
        break;
      }
    if (conn < 0) fail("no connective between </a1> and </a2>");
    if (conn == end - 1) fail("empty Arg2 content");

    GroundTruth g;
    g.doc_id = doc.doc_id;
    std::vector<std::int64_t> a1(static_cast<std::size_t>(close - open + 1));
    std::iota(a1.begin(), a1.end(), open);
    std::vector<std::int64_t> a2(static_cast<std::size_t>(end - conn));
    std::iota(a2.begin(), a2.end(), conn + 1);
    g.arg1 = Span(std::move(a1));
    g.arg2 = Span(std::move(a2));
    g.conn = Span{conn};
    g.distance = conn - close - 1;
    out.push_back(std::move(g));
    p = end + 1;
  }
  return out;
}

void write_synth_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "docs", ec);
  if (ec) throw IoError("cannot create " + (dir / "docs").string() + ": " + ec.message());

  std::map<std::string, const Document*> by_id;
  std::map<std::string, std::vector<std::int64_t>> char_starts;
  for (const Document& doc : corpus.documents) {
    by_id[doc.doc_id] = &doc;
    std::ofstream out(dir / "docs" / doc.doc_id, std::ios::binary);
    if (!out) throw IoError("cannot write document " + doc.doc_id);
    auto& starts = char_starts[doc.doc_id];
    std::int64_t offset = 0;
    for (const Token& t : doc.tokens) {
      out << t.surface << '\n';
      starts.push_back(offset);
      offset += static_cast<std::int64_t>(t.surface.size()) + 1;
    }
  }

  std::ofstream rel(dir / "relations.json", std::ios::binary);
  if (!rel) throw IoError("cannot write relations.json under " + dir.string());
  for (const Relation& r : corpus.relations) {
    const Document& doc = *by_id.at(r.doc_id);
    const auto& starts = char_starts.at(r.doc_id);
    auto arg = [&](const Span& s) {
      json tokens = json::array();
      json chars = json::array();
      for (auto p : s) {
        const auto start = starts[static_cast<std::size_t>(p)];
        const auto end = start + static_cast<std::int64_t>(
                                     doc.tokens[static_cast<std::size_t>(p)].surface.size());
        tokens.push_back({start, end, p, 0, p});
        chars.push_back({start, end});
      }
      return json{{"CharacterSpanList", chars},
                  {"RawText", join_surfaces(doc, s)},
                  {"TokenList", tokens}};
    };
    json rec = {{"Arg1", arg(r.arg1)},
                {"Arg2", arg(r.arg2)},
                {"Connective", arg(r.connective)},
                {"DocID", r.doc_id},
                {"ID", r.id},
                {"Sense", json::array({"Synthetic"})},
                {"Type", r.type == RelationType::Explicit ? "Explicit" : "Implicit"}};
    rel << rec.dump() << '\n';
  }

  std::ofstream gt(dir / "ground_truth.csv", std::ios::binary);
  if (!gt) throw IoError("cannot write ground_truth.csv under " + dir.string());
  gt << "id,doc_id,distance,arg1,arg2,conn\n";
  for (const GroundTruth& g : corpus.truth)
    gt << g.relation_id << ',' << g.doc_id << ',' << g.distance << ','
       << span_text(g.arg1) << ',' << span_text(g.arg2) << ',' << span_text(g.conn)
       << '\n';
  if (!rel || !gt) throw IoError("write failed under " + dir.string());
}

std::vector<GroundTruth> read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ground truth: " + path.string());
  std::vector<GroundTruth> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw ParseError(path.string(), line_no, "expected 6 columns");
    GroundTruth g;
    try {
      g.relation_id = std::stoll(f[0]);
      g.distance = std::stoll(f[2]);
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "bad integer");
    }
    g.doc_id = f[1];
    g.arg1 = parse_span_text(f[3]);
    g.arg2 = parse_span_text(f[4]);
    g.conn = parse_span_text(f[5]);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<std::pair<std::int64_t, double>> parse_distance_distribution(
    const std::string& text) {
  std::vector<std::pair<std::int64_t, double>> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("distance distribution entry '" + item + "' needs distance:weight");
    try {
      out.emplace_back(std::stoll(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("bad distance distribution entry '" + item + "'");
    }
  }
  return out;
}

}  // namespace arglabel
