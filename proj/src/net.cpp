#include "arglabel/net.hpp"

namespace arglabel {

const char* variant_name(Variant v) noexcept {
  return v == Variant::M2 ? "m2" : "m1";
}

Variant parse_variant(const std::string& name) {
  if (name == "m1") return Variant::M1;
  if (name == "m2") return Variant::M2;
  throw ConfigError("unknown model variant '" + name + "' (expected m1 or m2)");
}

void ModelConfig::validate() const {
  if (embed_dim < 1 || hidden < 1)
    throw ConfigError("embed_dim and hidden must be >= 1");
  if (n_labels != kNumLabels)
    throw ConfigError("n_labels must be " + std::to_string(kNumLabels));
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw ConfigError("dropout_rate must be in [0, 1)");
  if (variant == Variant::M2 && mid_dense_size < 1)
    throw ConfigError("mid_dense_size must be >= 1");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
}

DecodedSpans decode_spans(std::span<const Label> labels, const Instance& inst) {
  std::vector<std::int64_t> a1, a2, cn;
  const std::size_t n = std::min(inst.real_len, labels.size());
  for (std::size_t t = 0; t < n; ++t) {
    const std::int64_t p = inst.window_start + static_cast<std::int64_t>(t);
    switch (labels[t]) {
      case Label::Arg1: a1.push_back(p); break;
      case Label::Arg2: a2.push_back(p); break;
      case Label::Conn: cn.push_back(p); break;
      case Label::None: break;
    }
  }
  return {Span(std::move(a1)), Span(std::move(a2)), Span(std::move(cn))};
}

}  // namespace arglabel
