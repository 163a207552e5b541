#pragma once

// End-to-end building blocks shared by the command-line tool and the
// acceptance suite: training presets, batch retrieval under each strategy,
// result files, evaluation and the timing harness.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddah/code_io.hpp"
#include "ddah/hasher.hpp"
#include "ddah/index.hpp"
#include "ddah/irma.hpp"
#include "ddah/radon.hpp"

namespace ddah {

struct TrainConfig {
  std::string preset = "custom";
  EncoderGeometry geometry;
  PretrainOptions pretrain{};
  FineTuneOptions fine_tune{};
  bool fine_tune_enabled = true;
};

/// dda16: [(1024,768),(768,512),(512,16)], RMSProp fine-tuning.
/// dda512: [(1024,768),(768,512)], Adam fine-tuning.
/// rabc: [(input_dim, code_bits)], RMSProp throughout, 2200 fine-tune epochs.
/// Pretraining always uses RMSProp; epochs 100 and batch 16 unless noted.
TrainConfig preset_config(std::string_view preset, std::size_t rabc_input_dim = 4096,
                          std::size_t rabc_code_bits = 2048);

struct TrainEvent {
  std::string stage;  // "pretrain" or "finetune"
  std::size_t layer = 0;
  std::size_t epoch = 0;
  double loss = 0.0;
  double seconds = 0.0;  // wall time since training started
};
using TrainLogger = std::function<void(const TrainEvent&)>;

struct TrainedModel {
  Network autoencoder;
  Network encoder;
};

/// Layer-wise pretraining followed (unless disabled) by fine-tuning. Without
/// fine-tuning the autoencoder is the pretrained stack with sigmoid outputs.
TrainedModel train_model(const Matrix& inputs, const TrainConfig& config, Rng& rng,
                         const TrainLogger& log = {});

/// Accepts either an encoder or a mirrored autoencoder.
Network as_encoder(const Network& model);

enum class Strategy { exhaustive, semantic_hash, combined, pearson };
Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy strategy);

struct RetrievalRecord {
  std::string query_id;
  std::string retrieved_id;
  double distance = 0.0;
  std::size_t candidates = 0;
  bool fallback = false;  // semantic hashing found no candidate; exhaustive answer used
  std::int64_t latency_ns = 0;
};

std::vector<RetrievalRecord> retrieve_exhaustive(const CodeSet& queries, const CodeDatabase& db);

/// queries_short and queries_long must list the same ids in the same order.
std::vector<RetrievalRecord> retrieve_semantic(const CodeSet& queries_short, const CodeSet& queries_long,
                                               const HashIndex& index, std::size_t radius, bool exact);

/// Queries are matched across the two code families by id.
std::vector<RetrievalRecord> retrieve_combined(const CodeSet& queries_a, const CodeDatabase& db_a,
                                               const CodeSet& queries_b, const CodeDatabase& db_b);

std::vector<RetrievalRecord> retrieve_pearson(const std::vector<RadonProjectionSet>& queries,
                                              const std::vector<RadonProjectionSet>& db);

/// Results file: "# ddah-results v1 <header_fields>" then one
/// "query_id retrieved_id distance candidates fallback" line per query.
/// Latencies are not written here so that reruns compare byte for byte.
void save_results(const std::filesystem::path& path, const std::vector<RetrievalRecord>& records,
                  const std::string& header_fields);
std::vector<RetrievalRecord> load_results(const std::filesystem::path& path);

/// "# ddah-timings v1 <header_fields>" then "query_id latency_ns" lines.
void save_timings(const std::filesystem::path& path, const std::vector<RetrievalRecord>& records,
                  const std::string& header_fields);

/// Sums the per-pair error over (query, first hit). Throws LoadError listing
/// every id without an IRMA code.
IrmaError evaluate_records(const std::vector<RetrievalRecord>& records,
                           const std::map<std::string, IrmaCode>& codes, const BranchTable& table);

/// Summary of repeated timing runs (seconds per query).
struct TimingSummary {
  std::vector<double> runs;
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95% Student-t interval
  double ci_low() const { return mean - ci_half_width; }
  double ci_high() const { return mean + ci_half_width; }
};

/// Requires at least two runs.
TimingSummary summarize_runs(std::vector<double> runs);

/// Calls body() `runs` times and records each call's wall time divided by
/// per_call_units. Throws InvalidArgument when runs < 2.
TimingSummary time_runs(std::size_t runs, std::size_t per_call_units, const std::function<void()>& body);

/// 64-bit FNV-1a, used to fingerprint canonical configuration strings.
std::uint64_t fnv1a(std::string_view text);
std::string fingerprint(std::string_view canonical_config);

}  // namespace ddah
