#include "ddah/cli.hpp"

#include <exception>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ddah/error.hpp"

namespace ddah {

namespace {

using namespace ddah::cli;

void add_retrieval_inputs(CLI::App* cmd, RetrieveCommand& o) {
  cmd->add_option("--queries", o.queries, "Query codes (long codes for semantic hashing)");
  cmd->add_option("--db", o.db, "Database codes");
  cmd->add_option("--queries-short", o.queries_short, "16-bit query codes (semantic hashing)");
  cmd->add_option("--db-short", o.db_short, "16-bit database codes (semantic hashing)");
  cmd->add_option("--queries-aux", o.queries_aux, "Second code family for queries (combined)");
  cmd->add_option("--db-aux", o.db_aux, "Second code family for the database (combined)");
  cmd->add_option("--query-projections", o.query_projections, "Query projection file (pearson)");
  cmd->add_option("--db-projections", o.db_projections, "Database projection file (pearson)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binary image codes from de-noising autoencoders and Radon barcodes, with Hamming retrieval", "ddah"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed (recorded in every output)")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for loading and encoding")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file or directory");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labelled image collection");
  synth_cmd->add_option("--n", synth.n, "Number of images")->capture_default_str();
  synth_cmd->add_option("--classes", synth.classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--size", synth.size, "Image side length in pixels")->capture_default_str();
  synth_cmd->add_option("--test-fraction", synth.test_fraction, "Share of each class held out")->capture_default_str();

  TrainCommand train;
  auto* train_cmd = app.add_subcommand("train", "Pretrain and fine-tune an encoder");
  train_cmd->add_option("--manifest", train.manifest, "Training image manifest");
  train_cmd->add_option("--projections", train.projections, "Training projection file (Radon autoencoder)");
  auto* preset = train_cmd->add_option("--preset", train.preset, "dda16, dda512 or rabc")
                     ->check(CLI::IsMember({"dda16", "dda512", "rabc"}));
  auto* geometry = train_cmd->add_option("--geometry", train.geometry, "Custom encoder, e.g. 1024-768-512");
  preset->excludes(geometry);
  train_cmd->add_option("--optimizer", train.optimizer, "Fine-tuning optimizer (rmsprop|adam); preset default otherwise")
      ->check(CLI::IsMember({"rmsprop", "adam"}));
  train_cmd->add_option("--pretrain-optimizer", train.pretrain_optimizer, "Pretraining optimizer")
      ->capture_default_str()
      ->check(CLI::IsMember({"rmsprop", "adam"}));
  train_cmd->add_option("--epochs", train.epochs, "Epochs for both stages");
  train_cmd->add_option("--pretrain-epochs", train.pretrain_epochs, "Epochs per pretrained layer");
  train_cmd->add_option("--finetune-epochs", train.finetune_epochs, "Fine-tuning epochs");
  train_cmd->add_option("--batch", train.batch, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--learning-rate", train.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--dropout-p", train.dropout_p, "Dropout probability")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.999));
  train_cmd->add_flag("--no-dropout", train.no_dropout, "Fine-tune without dropout before the coding layer");
  train_cmd->add_flag("--no-finetune", train.no_finetune, "Skip fine-tuning");
  train_cmd->add_option("--output-activation", train.output_activation, "Last decoder layer: softmax or sigmoid")
      ->capture_default_str();
  train_cmd->add_option("--code-bits", train.code_bits, "Code length for the rabc preset")->capture_default_str();
  train_cmd->add_option("--image-size", train.image_size, "Image side (default: from the input width)");
  train_cmd->add_flag("--keep-decoder", train.keep_decoder, "Save the full autoencoder instead of the encoder");
  train_cmd->add_option("--scaler-out", train.scaler_out, "Projection scaler path (default: <out>.scaler)");
  train_cmd->add_option("--log", train.log, "Per-epoch loss and wall-time log");

  EncodeCommand enc;
  auto* encode_cmd = app.add_subcommand("encode", "Encode images or projections into binary codes");
  encode_cmd->add_option("--model", enc.model, "Trained model")->required();
  encode_cmd->add_option("--manifest", enc.manifest, "Image manifest");
  encode_cmd->add_option("--projections", enc.projections, "Projection file");
  encode_cmd->add_option("--scaler", enc.scaler, "Projection scaler fitted at training time");
  encode_cmd->add_option("--image-size", enc.image_size, "Image side (default: from the model input width)");

  RadonCommand radon;
  auto* radon_cmd = app.add_subcommand("radon", "Compute Radon projections and optional Radon barcodes");
  radon_cmd->add_option("--manifest", radon.manifest, "Image manifest")->required();
  radon_cmd->add_option("--angles", radon.angles, "Projection angles over [0, pi)")->capture_default_str();
  radon_cmd->add_option("--image-size", radon.image_size, "Images are resized to this square side")
      ->capture_default_str();
  radon_cmd->add_option("--barcode-out", radon.barcode_out, "Also write median-thresholded barcodes here");

  IndexCommand index;
  auto* index_cmd = app.add_subcommand("index", "Build the 16-bit hash table and report its buckets");
  index_cmd->add_option("--short", index.short_codes, "16-bit codes")->required();
  index_cmd->add_option("--long", index.long_codes, "Long codes for the same ids")->required();

  RetrieveCommand retrieve;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "First-hit retrieval for every query");
  retrieve_cmd->add_option("--strategy", retrieve.strategy, "exhaustive, semantic-hash, combined or pearson")
      ->capture_default_str()
      ->check(CLI::IsMember({"exhaustive", "semantic-hash", "combined", "pearson"}));
  add_retrieval_inputs(retrieve_cmd, retrieve);
  retrieve_cmd->add_option("--bit-flips", retrieve.bit_flips, "Hamming ball radius H")->capture_default_str();
  retrieve_cmd->add_flag("--exact-flips", retrieve.exact_flips, "Probe only keys at distance exactly H");
  retrieve_cmd->add_option("--timings", retrieve.timings, "Per-query latency file");

  EvaluateCommand evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Hierarchical IRMA error of a results file");
  evaluate_cmd->add_option("--results", evaluate.results, "Results from retrieve")->required();
  evaluate_cmd->add_option("--irma-codes", evaluate.irma_codes, "id;code file covering queries and hits")->required();
  evaluate_cmd->add_option("--branch-table", evaluate.branch_table, "j,i,count table (default: derived)");
  evaluate_cmd->add_option("--branch-from", evaluate.branch_from, "Derive branch counts from this database manifest");
  evaluate_cmd->add_flag("--prefix-conditioned", evaluate.prefix_conditioned, "Derive branch counts per prefix");
  evaluate_cmd->add_option("--branch-table-out", evaluate.branch_table_out, "Write the table used");

  BenchCommand bench;
  auto* bench_cmd = app.add_subcommand("bench", "Repeated retrieval timing with 95% confidence intervals");
  add_retrieval_inputs(bench_cmd, bench.inputs);
  bench_cmd->add_option("--bit-flips", bench.bit_flips, "Radii to benchmark, e.g. 0,1,2,3")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--runs", bench.runs, "Repetitions per strategy")->capture_default_str();
  bench_cmd->add_option("--encode-model", bench.encode_model, "Add per-query encoding time with this model");
  bench_cmd->add_option("--encode-manifest", bench.encode_manifest, "Query images for encoding time");

  // Global flags are accepted after the subcommand name as well.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ddah: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(g, synth, out);
    if (*train_cmd) return cmd_train(g, train, out);
    if (*encode_cmd) return cmd_encode(g, enc, out);
    if (*radon_cmd) return cmd_radon(g, radon, out);
    if (*index_cmd) return cmd_index(g, index, out);
    if (*retrieve_cmd) return cmd_retrieve(g, retrieve, out);
    if (*evaluate_cmd) return cmd_evaluate(g, evaluate, out);
    if (*bench_cmd) return cmd_bench(g, bench, out);
  } catch (const UsageError& e) {
    err << "ddah: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "ddah: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ddah
