#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddah::cli {

namespace fs = std::filesystem;

/// Bad flag combination detected after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 42;
  unsigned threads = 1;
  fs::path out;
};

struct SynthOptions {
  std::size_t n = 2000;
  std::size_t classes = 10;
  std::size_t size = 32;
  double test_fraction = 0.2;
};

struct TrainCommand {
  fs::path manifest;
  fs::path projections;
  std::string preset;
  std::string geometry;
  std::string optimizer;
  std::string pretrain_optimizer = "rmsprop";
  std::size_t epochs = 0;
  std::size_t pretrain_epochs = 0;
  std::size_t finetune_epochs = 0;
  std::size_t batch = 16;
  std::size_t code_bits = 2048;
  double dropout_p = 0.2;
  double learning_rate = 1e-3;
  bool no_dropout = false;
  bool no_finetune = false;
  bool keep_decoder = false;
  std::string output_activation = "softmax";
  std::size_t image_size = 0;
  fs::path scaler_out;
  fs::path log;
};

struct EncodeCommand {
  fs::path model;
  fs::path manifest;
  fs::path projections;
  fs::path scaler;
  std::size_t image_size = 0;
};

struct RadonCommand {
  fs::path manifest;
  std::size_t angles = 16;
  std::size_t image_size = 256;
  fs::path barcode_out;
};

struct IndexCommand {
  fs::path short_codes;
  fs::path long_codes;
};

struct RetrieveCommand {
  std::string strategy = "exhaustive";
  fs::path queries, db;
  fs::path queries_short, db_short;
  fs::path queries_aux, db_aux;
  fs::path query_projections, db_projections;
  std::size_t bit_flips = 2;
  bool exact_flips = false;
  fs::path timings;
};

struct EvaluateCommand {
  fs::path results;
  fs::path irma_codes;
  fs::path branch_table;
  fs::path branch_from;
  bool prefix_conditioned = false;
  fs::path branch_table_out;
};

struct BenchCommand {
  RetrieveCommand inputs;
  std::vector<std::size_t> bit_flips{2};
  std::size_t runs = 20;
  fs::path encode_model;
  fs::path encode_manifest;
};

int cmd_synth(const GlobalOptions& g, const SynthOptions& o, std::ostream& out);
int cmd_train(const GlobalOptions& g, const TrainCommand& o, std::ostream& out);
int cmd_encode(const GlobalOptions& g, const EncodeCommand& o, std::ostream& out);
int cmd_radon(const GlobalOptions& g, const RadonCommand& o, std::ostream& out);
int cmd_index(const GlobalOptions& g, const IndexCommand& o, std::ostream& out);
int cmd_retrieve(const GlobalOptions& g, const RetrieveCommand& o, std::ostream& out);
int cmd_evaluate(const GlobalOptions& g, const EvaluateCommand& o, std::ostream& out);
int cmd_bench(const GlobalOptions& g, const BenchCommand& o, std::ostream& out);

}  // namespace ddah::cli
