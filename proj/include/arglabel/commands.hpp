#ifndef ARGLABEL_COMMANDS_HPP
#define ARGLABEL_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "arglabel/net.hpp"
#include "arglabel/synth.hpp"

namespace arglabel {

// Each command returns a process exit code: 0 on success, exit_code(kind) for
// library errors. Reports go to `out`, diagnostics to `err`.

struct StatsOptions {
  std::filesystem::path train;  // dataset directory (may be empty)
  std::filesystem::path test;
  std::filesystem::path json_out;
};
int cmd_stats(const StatsOptions& opt, std::ostream& out, std::ostream& err);

struct SynthOptions {
  SynthConfig config;
  std::filesystem::path out;
};
int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);

struct TrainOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> resume;
  std::optional<unsigned> workers;
  std::optional<int> epochs;
  // Stop after this epoch (checkpoint written) without changing the target
  // epoch count, so that a later --resume continues the same run.
  std::optional<int> stop_after;
};
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::filesystem::path out;
  std::optional<std::filesystem::path> config;  // optional shape cross-check
  unsigned workers = 1;
};
int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err);

struct ScoreOptionsCli {
  std::filesystem::path predictions;
  std::filesystem::path gold;  // dataset directory
  bool fold_connective = false;
  std::filesystem::path json_out;
  std::filesystem::path csv_out;
};
int cmd_score(const ScoreOptionsCli& opt, std::ostream& out, std::ostream& err);

// Reduced model for finite-difference checks: embed dim 8, hidden 5, T = 12,
// vocabulary 20 (m2 adds a 6-wide intermediate dense layer).
struct GradCheckFixture {
  ModelConfig config;
  ModelParams<double> params;
  Instance instance;
};
GradCheckFixture make_gradcheck_fixture(Variant variant, std::uint64_t seed);

struct GradCheckOptions {
  Variant variant = Variant::M1;
  std::uint64_t seed = 1;
  std::size_t per_family = 200;
  double epsilon = 1e-5;
  double threshold = 1e-4;
};
int cmd_gradcheck(const GradCheckOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace arglabel

#endif  // ARGLABEL_COMMANDS_HPP
