#include "arglabel/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "arglabel/errors.hpp"
#include "arglabel/numeric.hpp"

namespace arglabel {

namespace {

constexpr char kMagic[8] = {'A', 'R', 'G', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kByteOrder = 0x01020304;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write checkpoint: " + path.string());
  }
  void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void tensor(const std::string& name, const double* data, Index rows, Index cols) {
    str(name);
    i64(rows);
    i64(cols);
    raw(data, static_cast<std::size_t>(rows * cols) * sizeof(double));
  }
  void close() {
    out_.close();
    if (!out_) throw IoError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open checkpoint: " + path.string());
  }
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw ParseError(path_.string() + ": truncated checkpoint");
  }
  std::uint32_t u32() { std::uint32_t v; raw(&v, sizeof v); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, sizeof v); return v; }
  std::int64_t i64() { std::int64_t v; raw(&v, sizeof v); return v; }
  std::string str() {
    const auto n = u64();
    if (n > (1ULL << 32)) throw ParseError(path_.string() + ": corrupt string length");
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::map<std::string, std::string> config_entries(const ModelConfig& c) {
  return {{"model.variant", variant_name(c.variant)},
          {"model.embed_dim", std::to_string(c.embed_dim)},
          {"model.hidden", std::to_string(c.hidden)},
          {"model.n_labels", std::to_string(c.n_labels)},
          {"model.dropout_rate", format_real(c.dropout_rate)},
          {"model.mid_dense_size", std::to_string(c.mid_dense_size)},
          {"model.max_len", std::to_string(c.max_len)},
          {"model.mask_padding", c.mask_padding ? "1" : "0"}};
}

ModelConfig config_from_entries(const std::map<std::string, std::string>& kv,
                                const std::string& source) {
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(source + ": checkpoint lacks " + key);
    return it->second;
  };
  ModelConfig c;
  try {
    c.variant = parse_variant(get("model.variant"));
    c.embed_dim = std::stoll(get("model.embed_dim"));
    c.hidden = std::stoll(get("model.hidden"));
    c.n_labels = std::stoll(get("model.n_labels"));
    c.dropout_rate = std::stod(get("model.dropout_rate"));
    c.mid_dense_size = std::stoll(get("model.mid_dense_size"));
    c.max_len = std::stoull(get("model.max_len"));
    c.mask_padding = get("model.mask_padding") == "1";
  } catch (const std::invalid_argument&) {
    throw ParseError(source + ": bad model entry in checkpoint");
  }
  return c;
}

struct RawTensor {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> data;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  Writer w(path);
  w.raw(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(kByteOrder);

  auto kv = config_entries(ckpt.model);
  for (const auto& [k, v] : ckpt.meta) kv["meta." + k] = v;
  kv["train.has_state"] = ckpt.has_train_state ? "1" : "0";
  if (ckpt.has_train_state) {
    std::ostringstream rng;
    rng << ckpt.state.rng;
    kv["train.rng"] = rng.str();
    kv["train.epochs_done"] = std::to_string(ckpt.state.epochs_done);
    kv["train.adam_step"] = std::to_string(ckpt.state.adam.step);
  }
  w.u64(kv.size());
  for (const auto& [k, v] : kv) {
    w.str(k);
    w.str(v);
  }

  w.u64(ckpt.vocab.size() - 1);
  for (std::size_t id = 1; id < ckpt.vocab.size(); ++id) w.str(ckpt.vocab.word(static_cast<int>(id)));

  std::vector<std::pair<std::string, const Matrix<double>*>> mats;
  std::vector<std::pair<std::string, const Vector<double>*>> vecs;
  auto collect = [&](const std::string& prefix, const ModelParams<double>& p) {
    for_each_tensor(
        [&](const char* name, const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, Matrix<double>>) mats.emplace_back(prefix + name, &t);
          else vecs.emplace_back(prefix + name, &t);
        },
        p);
  };
  collect("", ckpt.state.params);
  if (ckpt.has_train_state) {
    collect("adam.m.", ckpt.state.adam.m);
    collect("adam.v.", ckpt.state.adam.v);
  }
  Matrix<double> records(static_cast<Index>(ckpt.state.records.size()), 5);
  for (std::size_t k = 0; k < ckpt.state.records.size(); ++k) {
    const auto& r = ckpt.state.records[k];
    records.row(static_cast<Index>(k)) << r.epoch, r.train_loss, r.f1_arg1, r.f1_arg2, r.f1_both;
  }
  if (ckpt.has_train_state) mats.emplace_back("train.records", &records);

  w.u64(mats.size() + vecs.size());
  for (const auto& [name, m] : mats) w.tensor(name, m->data(), m->rows(), m->cols());
  for (const auto& [name, v] : vecs) w.tensor(name, v->data(), v->rows(), 1);

  const auto& steps = ckpt.state.adam.row_step;
  w.u64(ckpt.has_train_state ? steps.size() : 0);
  if (ckpt.has_train_state)
    w.raw(steps.data(), steps.size() * sizeof(std::int64_t));
  w.close();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  const std::string source = path.string();
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ParseError(source + ": not a checkpoint file");
  if (r.u32() != kVersion) throw ParseError(source + ": unsupported checkpoint version");
  if (r.u32() != kByteOrder) throw ParseError(source + ": checkpoint byte order differs from host");

  std::map<std::string, std::string> kv;
  for (auto n = r.u64(); n > 0; --n) {
    std::string k = r.str();
    kv[k] = r.str();
  }
  Checkpoint ckpt;
  ckpt.model = config_from_entries(kv, source);
  ckpt.model.validate();
  for (const auto& [k, v] : kv)
    if (k.starts_with("meta.")) ckpt.meta[k.substr(5)] = v;
  ckpt.has_train_state = kv["train.has_state"] == "1";

  for (auto n = r.u64(); n > 0; --n) ckpt.vocab.add(r.str());

  std::map<std::string, RawTensor> tensors;
  for (auto n = r.u64(); n > 0; --n) {
    std::string name = r.str();
    RawTensor t;
    t.rows = r.i64();
    t.cols = r.i64();
    if (t.rows < 0 || t.cols < 0 || t.rows * t.cols > (Index{1} << 34))
      throw ParseError(source + ": corrupt shape for " + name);
    t.data.resize(static_cast<std::size_t>(t.rows * t.cols));
    r.raw(t.data.data(), t.data.size() * sizeof(double));
    tensors.emplace(std::move(name), std::move(t));
  }
  std::vector<std::int64_t> steps(r.u64());
  r.raw(steps.data(), steps.size() * sizeof(std::int64_t));

  auto fill = [&](const std::string& prefix, ModelParams<double>& p) {
    if (ckpt.model.variant == Variant::M2) p.mid.emplace();
    for_each_tensor(
        [&](const char* name, auto& t) {
          auto it = tensors.find(prefix + name);
          if (it == tensors.end()) throw ParseError(source + ": missing tensor " + prefix + name);
          const RawTensor& raw = it->second;
          if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Vector<double>>) {
            if (raw.cols != 1) throw ValidationError(source + ": tensor " + prefix + name + " is not a vector");
            t.resize(raw.rows);
          } else {
            t.resize(raw.rows, raw.cols);
          }
          std::copy(raw.data.begin(), raw.data.end(), t.data());
        },
        p);
    p.out.activation = Activation::Softmax;
  };
  fill("", ckpt.state.params);
  check_shapes(ckpt.state.params, ckpt.model);
  if (static_cast<std::size_t>(ckpt.state.params.embeddings.rows()) != ckpt.vocab.size())
    throw ValidationError(source + ": embedding rows do not match the vocabulary size");

  if (ckpt.has_train_state) {
    fill("adam.m.", ckpt.state.adam.m);
    fill("adam.v.", ckpt.state.adam.v);
    ckpt.state.adam.row_step = std::move(steps);
    try {
      ckpt.state.adam.step = std::stoll(kv.at("train.adam_step"));
      ckpt.state.epochs_done = std::stoi(kv.at("train.epochs_done"));
    } catch (const std::exception&) {
      throw ParseError(source + ": bad training state");
    }
    std::istringstream rng(kv["train.rng"]);
    rng >> ckpt.state.rng;
    if (!rng) throw ParseError(source + ": bad RNG state");
    const auto it = tensors.find("train.records");
    if (it == tensors.end()) throw ParseError(source + ": missing epoch records");
    const RawTensor& rec = it->second;
    Eigen::Map<const Matrix<double>> m(rec.data.data(), rec.rows, rec.cols);
    for (Index k = 0; k < m.rows(); ++k)
      ckpt.state.records.push_back({static_cast<int>(m(k, 0)), m(k, 1), m(k, 2), m(k, 3), m(k, 4)});
  }
  return ckpt;
}

}  // namespace arglabel
