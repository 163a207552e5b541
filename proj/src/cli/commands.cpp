#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "ddah/error.hpp"
#include "ddah/image.hpp"
#include "ddah/manifest.hpp"
#include "ddah/model_io.hpp"
#include "ddah/pipeline.hpp"
#include "ddah/synthetic.hpp"

namespace ddah::cli {

namespace {

// Canonical "key=value" record of everything that determines a command's
// answers. Output paths are left out so reruns into other files match.
class RunRecord {
 public:
  RunRecord(const std::string& command, const GlobalOptions& g) : command_(command), seed_(g.seed) {}

  template <typename T>
  void set(const std::string& key, const T& value) {
    std::ostringstream text;
    text << std::setprecision(17) << value;
    fields_[key] = text.str();
  }

  std::string fingerprint() const {
    std::string canonical = command_;
    canonical += ";seed=" + std::to_string(seed_);
    for (const auto& [k, v] : fields_) canonical += ";" + k + "=" + v;
    return ddah::fingerprint(canonical);
  }

  /// Header fields shared by every text output.
  std::string header() const {
    return "command=" + command_ + " seed=" + std::to_string(seed_) + " config=" + fingerprint();
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  std::map<std::string, std::string> fields_;
};

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return fingerprint(bytes.str());
}

void require(const fs::path& value, const std::string& flag, const std::string& context) {
  if (value.empty()) throw UsageError(context + " requires " + flag);
}

void require_out(const GlobalOptions& g, const std::string& command) {
  if (g.out.empty()) throw UsageError(command + " requires --out");
}

std::ofstream open_text(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  return out;
}

std::size_t square_side(std::size_t pixels, const std::string& what) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(pixels))));
  if (side * side != pixels)
    throw UsageError(what + " expects " + std::to_string(pixels) +
                     " inputs, which is not a square image; pass --image-size");
  return side;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t per = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t * per; i < std::min(n, (t + 1) * per); ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Matrix stack_projections(const std::vector<RadonProjectionSet>& sets) {
  if (sets.empty()) throw InvalidArgument("projection file holds no records");
  const Eigen::Index dim = static_cast<Eigen::Index>(sets.front().n_angles() * sets.front().n_bins());
  Matrix out(dim, static_cast<Eigen::Index>(sets.size()));
  for (std::size_t i = 0; i < sets.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = sets[i].flatten();
  return out;
}

Activation parse_activation(const std::string& name) {
  if (name == "softmax") return Activation::softmax;
  if (name == "sigmoid") return Activation::sigmoid;
  throw UsageError("--output-activation must be softmax or sigmoid, got '" + name + "'");
}

CodeSet load_code_file(const fs::path& path) { return load_codes(path); }

}  // namespace

int cmd_synth(const GlobalOptions& g, const SynthOptions& o, std::ostream& out) {
  require_out(g, "synth");
  const auto data = generate_synthetic(o.n, o.classes, o.size, g.seed);
  const auto split = write_synthetic(g.out, data, o.test_fraction);
  RunRecord record("synth", g);
  record.set("n", o.n);
  record.set("classes", o.classes);
  record.set("size", o.size);
  record.set("test_fraction", o.test_fraction);
  auto info = open_text(g.out / "synth.txt");
  info << "# ddah-synth v1 " << record.header() << '\n'
       << "images=" << data.size() << "\ntrain=" << split.train.size() << "\ntest=" << split.test.size() << '\n';
  out << "wrote " << data.size() << " images (" << split.train.size() << " train, " << split.test.size()
      << " test) to " << g.out.string() << '\n';
  return 0;
}

int cmd_train(const GlobalOptions& g, const TrainCommand& o, std::ostream& out) {
  require_out(g, "train");
  if (o.manifest.empty() == o.projections.empty())
    throw UsageError("train needs exactly one of --manifest (images) or --projections (Radon projections)");
  if (o.preset.empty() == o.geometry.empty()) throw UsageError("train needs exactly one of --preset or --geometry");
  if (o.preset == "rabc" && o.projections.empty()) throw UsageError("preset rabc trains on --projections");

  RunRecord record("train", g);
  Matrix inputs;
  std::optional<ProjectionScaler> scaler;
  std::size_t input_dim = 0;
  if (!o.projections.empty()) {
    const Matrix raw = stack_projections(load_projections(o.projections));
    scaler = ProjectionScaler::fit(raw);
    inputs = scaler->apply(raw);
    input_dim = static_cast<std::size_t>(inputs.rows());
    record.set("projections", file_digest(o.projections));
  }

  TrainConfig config;
  if (!o.preset.empty()) {
    config = preset_config(o.preset, input_dim ? input_dim : 4096, o.code_bits);
  } else {
    config.geometry = EncoderGeometry::parse(o.geometry);
  }
  if (!o.optimizer.empty()) config.fine_tune.optimizer.kind = parse_optimizer(o.optimizer);
  config.pretrain.optimizer.kind = parse_optimizer(o.pretrain_optimizer);
  config.pretrain.optimizer.learning_rate = config.fine_tune.optimizer.learning_rate = o.learning_rate;
  if (o.epochs) config.pretrain.train.epochs = config.fine_tune.train.epochs = o.epochs;
  if (o.pretrain_epochs) config.pretrain.train.epochs = o.pretrain_epochs;
  if (o.finetune_epochs) config.fine_tune.train.epochs = o.finetune_epochs;
  config.pretrain.train.batch_size = config.fine_tune.train.batch_size = o.batch;
  config.pretrain.dropout_p = config.fine_tune.dropout_p = o.dropout_p;
  config.fine_tune.use_dropout = !o.no_dropout;
  config.fine_tune_enabled = !o.no_finetune;
  config.fine_tune.output_activation = parse_activation(o.output_activation);

  std::size_t image_size = 0;
  if (!o.manifest.empty()) {
    image_size = o.image_size ? o.image_size : square_side(config.geometry.input_dim(), "geometry");
    const auto manifest = load_manifest(o.manifest);
    inputs = load_images(manifest, image_size, g.threads);
    record.set("manifest", file_digest(o.manifest));
  }

  record.set("preset", o.preset.empty() ? "custom" : o.preset);
  record.set("geometry", config.geometry.to_string());
  record.set("pretrain_optimizer", to_string(config.pretrain.optimizer.kind));
  record.set("finetune_optimizer", to_string(config.fine_tune.optimizer.kind));
  record.set("pretrain_epochs", config.pretrain.train.epochs);
  record.set("finetune_epochs", config.fine_tune.train.epochs);
  record.set("batch", o.batch);
  record.set("dropout_p", o.dropout_p);
  record.set("dropout", !o.no_dropout);
  record.set("finetune", !o.no_finetune);
  record.set("output_activation", o.output_activation);
  record.set("learning_rate", o.learning_rate);
  record.set("image_size", image_size);
  record.set("keep_decoder", o.keep_decoder);

  std::ofstream log;
  if (!o.log.empty()) {
    log = open_text(o.log);
    log << "# ddah-trainlog v1 " << record.header() << "\n# stage layer epoch loss seconds\n";
  }
  double last_loss = 0.0;
  Rng rng(g.seed);
  const TrainedModel trained = train_model(inputs, config, rng, [&](const TrainEvent& e) {
    last_loss = e.loss;
    if (log.is_open())
      log << e.stage << ' ' << e.layer << ' ' << e.epoch + 1 << ' ' << std::setprecision(10) << e.loss << ' '
          << std::setprecision(6) << e.seconds << '\n';
  });

  if (g.out.has_parent_path()) fs::create_directories(g.out.parent_path());
  save_model(g.out, o.keep_decoder ? trained.autoencoder : trained.encoder);
  if (scaler) scaler->save(o.scaler_out.empty() ? fs::path(g.out.string() + ".scaler") : o.scaler_out);

  out << "trained " << config.geometry.to_string() << " on " << inputs.cols() << " samples, final loss "
      << std::setprecision(6) << last_loss << ", " << record.header() << '\n';
  return 0;
}

int cmd_encode(const GlobalOptions& g, const EncodeCommand& o, std::ostream& out) {
  require_out(g, "encode");
  require(o.model, "--model", "encode");
  if (o.manifest.empty() == o.projections.empty())
    throw UsageError("encode needs exactly one of --manifest or --projections");
  const Network encoder = as_encoder(load_model(o.model));
  RunRecord record("encode", g);
  record.set("model", file_digest(o.model));

  Matrix inputs;
  std::vector<std::string> ids;
  if (!o.manifest.empty()) {
    const std::size_t size = o.image_size ? o.image_size : square_side(encoder.input_dim(), "model");
    const auto manifest = load_manifest(o.manifest);
    inputs = load_images(manifest, size, g.threads);
    for (const auto& e : manifest.entries) ids.push_back(e.id);
    record.set("manifest", file_digest(o.manifest));
    record.set("image_size", size);
  } else {
    require(o.scaler, "--scaler", "encoding projections");
    const auto sets = load_projections(o.projections);
    inputs = ProjectionScaler::load(o.scaler).apply(stack_projections(sets));
    for (const auto& s : sets) ids.push_back(s.id);
    record.set("projections", file_digest(o.projections));
    record.set("scaler", file_digest(o.scaler));
  }

  const auto codes = encode(encoder, inputs, g.threads);
  CodeSet set;
  set.bits = encoder.output_dim();
  for (std::size_t i = 0; i < codes.size(); ++i) set.add(ids[i], codes[i]);
  if (g.out.has_parent_path()) fs::create_directories(g.out.parent_path());
  save_codes(g.out, set, record.header());
  out << "encoded " << set.size() << " items into " << set.bits << "-bit codes, " << record.header() << '\n';
  return 0;
}

int cmd_radon(const GlobalOptions& g, const RadonCommand& o, std::ostream& out) {
  require_out(g, "radon");
  require(o.manifest, "--manifest", "radon");
  if (o.angles == 0 || o.image_size == 0) throw UsageError("--angles and --image-size must be positive");
  const auto manifest = load_manifest(o.manifest);
  const auto angles = default_angles(o.angles);
  std::vector<RadonProjectionSet> sets(manifest.size());
  parallel_for(manifest.size(), g.threads, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    const ImageVector v = preprocess(manifest.resolve(entry), o.image_size);
    const auto n = static_cast<Eigen::Index>(o.image_size);
    const Matrix image = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        v.pixels.data(), n, n);
    sets[i] = radon_projections(image, angles, o.image_size, entry.id);
  });
  if (g.out.has_parent_path()) fs::create_directories(g.out.parent_path());
  save_projections(g.out, sets);

  RunRecord record("radon", g);
  record.set("manifest", file_digest(o.manifest));
  record.set("angles", o.angles);
  record.set("image_size", o.image_size);
  if (!o.barcode_out.empty()) {
    CodeSet barcodes;
    barcodes.bits = o.angles * o.image_size;
    for (const auto& s : sets) barcodes.add(s.id, radon_barcode(s));
    save_codes(o.barcode_out, barcodes, record.header());
  }
  out << "projected " << sets.size() << " images at " << o.angles << " angles, " << record.header() << '\n';
  return 0;
}

int cmd_index(const GlobalOptions& g, const IndexCommand& o, std::ostream& out) {
  require_out(g, "index");
  require(o.short_codes, "--short", "index");
  require(o.long_codes, "--long", "index");
  const auto short_db = CodeDatabase::from_code_set(load_code_file(o.short_codes));
  const auto long_db = CodeDatabase::from_code_set(load_code_file(o.long_codes));
  const HashIndex index(short_db, long_db);

  RunRecord record("index", g);
  record.set("short", file_digest(o.short_codes));
  record.set("long", file_digest(o.long_codes));
  std::size_t largest = 0;
  for (std::uint32_t key = 0; key < 65536; ++key) largest = std::max(largest, index.bucket(static_cast<std::uint16_t>(key)).size());

  auto file = open_text(g.out);
  file << "# ddah-index v1 " << record.header() << '\n'
       << "# entries=" << index.size() << " occupied=" << index.occupied_buckets() << " largest=" << largest << '\n';
  for (std::uint32_t key = 0; key < 65536; ++key) {
    const auto bucket = index.bucket(static_cast<std::uint16_t>(key));
    if (bucket.empty()) continue;
    file << std::hex << std::setw(4) << std::setfill('0') << key << std::dec << ' ' << bucket.size();
    for (auto pos : bucket) file << ' ' << short_db.id(pos);
    file << '\n';
  }
  out << "indexed " << index.size() << " codes into " << index.occupied_buckets() << " buckets (largest " << largest
      << "), " << record.header() << '\n';
  return 0;
}

namespace {

// Databases live behind shared pointers because the hash index refers to
// the long-code database by address.
struct RetrievalSetup {
  CodeSet queries, queries_short, queries_aux;
  std::shared_ptr<const CodeDatabase> db, db_short, db_aux;
  std::shared_ptr<const HashIndex> index;
  std::vector<RadonProjectionSet> query_projections, db_projections;
};

std::shared_ptr<const CodeDatabase> make_db(const CodeSet& set) {
  return std::make_shared<const CodeDatabase>(CodeDatabase::from_code_set(set));
}

RetrievalSetup load_setup(const RetrieveCommand& o, Strategy strategy, bool need_short, RunRecord& record) {
  RetrievalSetup s;
  const std::string ctx = std::string(to_string(strategy)) + " retrieval";
  auto codes = [&](const fs::path& p, const std::string& flag, const std::string& key) {
    require(p, flag, ctx);
    record.set(key, file_digest(p));
    return load_code_file(p);
  };
  if (strategy == Strategy::pearson) {
    require(o.query_projections, "--query-projections", ctx);
    require(o.db_projections, "--db-projections", ctx);
    s.query_projections = load_projections(o.query_projections);
    s.db_projections = load_projections(o.db_projections);
    record.set("query_projections", file_digest(o.query_projections));
    record.set("db_projections", file_digest(o.db_projections));
    return s;
  }
  s.queries = codes(o.queries, "--queries", "queries");
  s.db = make_db(codes(o.db, "--db", "db"));
  if (need_short || strategy == Strategy::semantic_hash) {
    s.queries_short = codes(o.queries_short, "--queries-short", "queries_short");
    s.db_short = make_db(codes(o.db_short, "--db-short", "db_short"));
    s.index = std::make_shared<const HashIndex>(*s.db_short, *s.db);
  }
  if (strategy == Strategy::combined) {
    if (o.queries_aux.empty() || o.db_aux.empty())
      throw UsageError("combined retrieval requires both code families: --queries/--db and --queries-aux/--db-aux");
    s.queries_aux = codes(o.queries_aux, "--queries-aux", "queries_aux");
    s.db_aux = make_db(codes(o.db_aux, "--db-aux", "db_aux"));
  }
  return s;
}

std::vector<RetrievalRecord> run_strategy(const RetrievalSetup& s, Strategy strategy, std::size_t radius,
                                          bool exact) {
  switch (strategy) {
    case Strategy::exhaustive: return retrieve_exhaustive(s.queries, *s.db);
    case Strategy::semantic_hash: return retrieve_semantic(s.queries_short, s.queries, *s.index, radius, exact);
    case Strategy::combined: return retrieve_combined(s.queries, *s.db, s.queries_aux, *s.db_aux);
    case Strategy::pearson: return retrieve_pearson(s.query_projections, s.db_projections);
  }
  return {};
}

}  // namespace

int cmd_retrieve(const GlobalOptions& g, const RetrieveCommand& o, std::ostream& out) {
  require_out(g, "retrieve");
  const Strategy strategy = parse_strategy(o.strategy);
  RunRecord record("retrieve", g);
  record.set("strategy", to_string(strategy));
  const RetrievalSetup setup = load_setup(o, strategy, false, record);
  if (strategy == Strategy::semantic_hash) {
    if (o.bit_flips > 16) throw UsageError("--bit-flips must lie in 0..16");
    record.set("bit_flips", o.bit_flips);
    record.set("exact_flips", o.exact_flips);
  }
  const auto records = run_strategy(setup, strategy, o.bit_flips, o.exact_flips);
  std::string header = "strategy=" + std::string(to_string(strategy));
  if (strategy == Strategy::semantic_hash) header += " H=" + std::to_string(o.bit_flips);
  header += " " + record.header();
  if (g.out.has_parent_path()) fs::create_directories(g.out.parent_path());
  save_results(g.out, records, header);
  if (!o.timings.empty()) save_timings(o.timings, records, header);

  const auto fallbacks = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.fallback; });
  double total_ns = 0.0;
  for (const auto& r : records) total_ns += static_cast<double>(r.latency_ns);
  out << "retrieved " << records.size() << " queries with " << to_string(strategy) << ", mean latency "
      << std::setprecision(6) << (records.empty() ? 0.0 : total_ns / static_cast<double>(records.size())) << " ns";
  if (fallbacks) out << ", " << fallbacks << " exhaustive fallbacks";
  out << ", " << record.header() << '\n';
  return 0;
}

int cmd_evaluate(const GlobalOptions& g, const EvaluateCommand& o, std::ostream& out) {
  require(o.results, "--results", "evaluate");
  require(o.irma_codes, "--irma-codes", "evaluate");
  const auto records = load_results(o.results);
  const auto codes = load_irma_codes(o.irma_codes);
  RunRecord record("evaluate", g);
  record.set("results", file_digest(o.results));
  record.set("irma_codes", file_digest(o.irma_codes));

  BranchTable table;
  if (!o.branch_table.empty()) {
    if (o.prefix_conditioned) throw UsageError("--prefix-conditioned only applies to derived branch tables");
    if (!o.branch_from.empty()) throw UsageError("--branch-from and --branch-table are mutually exclusive");
    table = BranchTable::load(o.branch_table);
    record.set("branch_table", file_digest(o.branch_table));
  } else {
    std::vector<IrmaCode> source;
    if (!o.branch_from.empty()) {
      const auto manifest = load_manifest(o.branch_from, false);
      for (const auto& e : manifest.entries) {
        if (e.irma) {
          source.push_back(*e.irma);
          continue;
        }
        const auto it = codes.find(e.id);
        if (it == codes.end()) throw LoadError("no IRMA code for database image " + e.id);
        source.push_back(it->second);
      }
      record.set("branch_from", file_digest(o.branch_from));
    } else {
      for (const auto& [id, code] : codes) source.push_back(code);
    }
    table = build_branch_table(source, o.prefix_conditioned);
    record.set("branch_table", o.prefix_conditioned ? "derived-prefix" : "derived");
  }
  if (!o.branch_table_out.empty()) table.save(o.branch_table_out);

  const IrmaError err = evaluate_records(records, codes, table);
  const auto fallbacks = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.fallback; });
  std::ostringstream report;
  report << "# ddah-eval v1 " << record.header() << '\n' << std::setprecision(12)
         << "queries=" << records.size() << '\n'
         << "fallbacks=" << fallbacks << '\n'
         << "E_total=" << err.total << '\n'
         << "E_technical=" << err.per_structure[0] << '\n'
         << "E_directional=" << err.per_structure[1] << '\n'
         << "E_anatomical=" << err.per_structure[2] << '\n'
         << "E_biological=" << err.per_structure[3] << '\n';
  if (!g.out.empty()) open_text(g.out) << report.str();
  out << report.str();
  return 0;
}

int cmd_bench(const GlobalOptions& g, const BenchCommand& o, std::ostream& out) {
  if (o.runs < 2) throw InvalidArgument("--runs must be at least 2, got " + std::to_string(o.runs));
  RunRecord record("bench", g);
  record.set("runs", o.runs);

  struct Arm {
    std::string name;
    Strategy strategy;
    std::size_t radius = 0;
  };
  const RetrieveCommand& in = o.inputs;
  const bool have_codes = !in.queries.empty() || !in.db.empty();
  const bool have_short = !in.queries_short.empty() || !in.db_short.empty();
  const bool have_aux = !in.queries_aux.empty() || !in.db_aux.empty();
  const bool have_proj = !in.query_projections.empty() || !in.db_projections.empty();
  if (!have_codes && !have_proj) throw UsageError("bench needs --queries/--db codes or --query-projections/--db-projections");

  std::vector<Arm> arms;
  std::optional<RetrievalSetup> codes_setup, aux_setup, proj_setup;
  if (have_codes) {
    codes_setup = load_setup(in, Strategy::exhaustive, have_short, record);
    arms.push_back({"exhaustive", Strategy::exhaustive});
    if (have_short) {
      for (std::size_t h : o.bit_flips) {
        if (h > 16) throw UsageError("--bit-flips values must lie in 0..16");
        arms.push_back({"semantic-hash(H=" + std::to_string(h) + ")", Strategy::semantic_hash, h});
      }
    }
    if (have_aux) {
      aux_setup = load_setup(in, Strategy::combined, false, record);
      arms.push_back({"combined", Strategy::combined});
    }
  }
  if (have_proj) {
    proj_setup = load_setup(in, Strategy::pearson, false, record);
    arms.push_back({"pearson", Strategy::pearson});
  }
  std::string flips;
  for (std::size_t h : o.bit_flips) flips += (flips.empty() ? "" : ",") + std::to_string(h);
  record.set("bit_flips", flips);

  // Optional per-query encoding cost, added to every arm's mean.
  std::optional<TimingSummary> encoding;
  if (!o.encode_model.empty() || !o.encode_manifest.empty()) {
    require(o.encode_model, "--encode-model", "end-to-end timing");
    require(o.encode_manifest, "--encode-manifest", "end-to-end timing");
    const Network encoder = as_encoder(load_model(o.encode_model));
    const auto manifest = load_manifest(o.encode_manifest);
    const Matrix images = load_images(manifest, square_side(encoder.input_dim(), "model"), 1);
    record.set("encode_model", file_digest(o.encode_model));
    encoding = time_runs(o.runs, static_cast<std::size_t>(images.cols()), [&] {
      for (Eigen::Index c = 0; c < images.cols(); ++c) (void)encode(encoder, images.col(c), 1);
    });
  }

  std::ostringstream report;
  report << "# ddah-bench v1 " << record.header() << '\n';
  report << std::setprecision(9);
  std::map<std::string, TimingSummary> summaries;
  for (const auto& arm : arms) {
    const RetrievalSetup& setup = arm.strategy == Strategy::pearson    ? *proj_setup
                                  : arm.strategy == Strategy::combined ? *aux_setup
                                                                       : *codes_setup;
    std::vector<RetrievalRecord> first;
    std::vector<std::uint64_t> latencies;
    bool stable = true;
    std::size_t queries = arm.strategy == Strategy::pearson ? setup.query_projections.size() : setup.queries.size();
    const TimingSummary summary = time_runs(o.runs, queries, [&] {
      auto records = run_strategy(setup, arm.strategy, arm.radius, false);
      for (const auto& r : records) latencies.push_back(r.latency_ns);
      if (first.empty()) {
        first = std::move(records);
        return;
      }
      for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].retrieved_id != first[i].retrieved_id) stable = false;
    });
    const auto fallbacks = std::count_if(first.begin(), first.end(), [](const auto& r) { return r.fallback; });
    report << "strategy=" << arm.name << " queries=" << queries << " mean_s=" << summary.mean
           << " ci95_low=" << summary.ci_low() << " ci95_high=" << summary.ci_high()
           << " ci95_half_width=" << summary.ci_half_width << " answers_stable=" << (stable ? 1 : 0)
           << " fallbacks=" << fallbacks;
    if (encoding) report << " mean_with_encoding_s=" << summary.mean + encoding->mean;
    report << '\n';
    std::sort(latencies.begin(), latencies.end());
    const auto percentile = [&](double q) {
      if (latencies.empty()) return std::uint64_t{0};
      const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(latencies.size())));
      return latencies[std::max<std::size_t>(rank, 1) - 1];
    };
    report << "latency strategy=" << arm.name << " p50_ns=" << percentile(0.5) << " p90_ns=" << percentile(0.9)
           << " p99_ns=" << percentile(0.99) << " max_ns=" << (latencies.empty() ? 0 : latencies.back()) << '\n';
    for (const auto& r : first)
      report << "query strategy=" << arm.name << " id=" << r.query_id << " retrieved=" << r.retrieved_id
             << " candidates=" << r.candidates << " distance=" << r.distance << " ns=" << r.latency_ns << '\n';
    summaries.emplace(arm.name, summary);
  }
  if (encoding)
    report << "encoding mean_s=" << encoding->mean << " ci95_half_width=" << encoding->ci_half_width << '\n';
  if (summaries.count("exhaustive")) {
    const double base = summaries.at("exhaustive").mean;
    for (const auto& arm : arms)
      if (arm.name != "exhaustive")
        report << "speedup " << arm.name << "_vs_exhaustive=" << base / summaries.at(arm.name).mean << '\n';
  }
  for (const auto& arm : arms) {
    const auto& runs = summaries.at(arm.name).runs;
    for (std::size_t r = 0; r < runs.size(); ++r)
      report << "run strategy=" << arm.name << " r=" << r << " seconds_per_query=" << runs[r] << '\n';
  }
  if (!g.out.empty()) open_text(g.out) << report.str();
  out << report.str();
  return 0;
}

}  // namespace ddah::cli
