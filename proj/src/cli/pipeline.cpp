#include "ddah/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "ddah/error.hpp"

namespace ddah {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::int64_t nanos(Clock::duration d) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(d).count();
}

std::string format_distance(double d) {
  if (d == std::floor(d) && std::abs(d) < 1e15) return std::to_string(static_cast<long long>(d));
  std::ostringstream out;
  out << std::setprecision(17) << d;
  return out.str();
}

}  // namespace

TrainConfig preset_config(std::string_view preset, std::size_t rabc_input_dim, std::size_t rabc_code_bits) {
  TrainConfig config;
  config.preset = std::string(preset);
  config.pretrain.optimizer = OptimizerConfig{OptimizerKind::rmsprop};
  if (preset == "dda16") {
    config.geometry = EncoderGeometry({{1024, 768}, {768, 512}, {512, 16}});
    config.fine_tune.optimizer = OptimizerConfig{OptimizerKind::rmsprop};
  } else if (preset == "dda512") {
    config.geometry = EncoderGeometry({{1024, 768}, {768, 512}});
    config.fine_tune.optimizer = OptimizerConfig{OptimizerKind::adam};
  } else if (preset == "rabc") {
    config.geometry = EncoderGeometry({{rabc_input_dim, rabc_code_bits}});
    config.fine_tune.optimizer = OptimizerConfig{OptimizerKind::rmsprop};
    config.fine_tune.train.epochs = 2200;
  } else {
    throw InvalidArgument("unknown preset '" + std::string(preset) + "' (expected dda16, dda512 or rabc)");
  }
  return config;
}

TrainedModel train_model(const Matrix& inputs, const TrainConfig& config, Rng& rng, const TrainLogger& log) {
  const auto start = Clock::now();
  auto emit = [&](const char* stage, std::size_t layer, std::size_t epoch, double loss) {
    if (log) log(TrainEvent{stage, layer, epoch, loss, seconds_since(start)});
  };
  const PretrainedStack stack = layer_train(
      inputs, config.geometry, config.pretrain, rng,
      [&](std::size_t layer, std::size_t epoch, double loss) { emit("pretrain", layer, epoch, loss); });

  TrainedModel out;
  if (config.fine_tune_enabled) {
    auto tuned = fine_tune(inputs, config.geometry, stack, config.fine_tune, rng,
                           [&](std::size_t epoch, double loss) { emit("finetune", 0, epoch, loss); });
    out.autoencoder = std::move(tuned.model);
  } else {
    out.autoencoder = assemble_autoencoder(config.geometry, stack, false, 0.0, Activation::sigmoid);
  }
  out.encoder = build_encoder(out.autoencoder);
  return out;
}

Network as_encoder(const Network& model) {
  if (is_autoencoder(model)) return build_encoder(model);
  if (model.empty()) throw InvalidState("model has no layers");
  const auto* last = std::get_if<DenseLayer>(&model.layers().back());
  if (!last || last->activation != Activation::sigmoid)
    throw InvalidState("model does not end in a sigmoid coding layer");
  return model;
}

Strategy parse_strategy(std::string_view name) {
  if (name == "exhaustive") return Strategy::exhaustive;
  if (name == "semantic-hash") return Strategy::semantic_hash;
  if (name == "combined") return Strategy::combined;
  if (name == "pearson") return Strategy::pearson;
  throw InvalidArgument("unknown strategy '" + std::string(name) +
                        "' (expected exhaustive, semantic-hash, combined or pearson)");
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::exhaustive: return "exhaustive";
    case Strategy::semantic_hash: return "semantic-hash";
    case Strategy::combined: return "combined";
    case Strategy::pearson: return "pearson";
  }
  return "?";
}

std::vector<RetrievalRecord> retrieve_exhaustive(const CodeSet& queries, const CodeDatabase& db) {
  if (queries.bits != db.bits())
    throw InvalidArgument("exhaustive retrieval: query codes have " + std::to_string(queries.bits) +
                          " bits, database has " + std::to_string(db.bits()));
  std::vector<RetrievalRecord> records;
  records.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto t0 = Clock::now();
    const SearchHit hit = exhaustive_search(queries.codes[q], db);
    const auto t1 = Clock::now();
    records.push_back({queries.ids[q], db.id(hit.index), hit.distance, hit.candidates, false, nanos(t1 - t0)});
  }
  return records;
}

std::vector<RetrievalRecord> retrieve_semantic(const CodeSet& queries_short, const CodeSet& queries_long,
                                               const HashIndex& index, std::size_t radius, bool exact) {
  if (queries_short.ids != queries_long.ids)
    throw InvalidArgument("semantic-hash retrieval: short and long query files list different ids");
  std::vector<RetrievalRecord> records;
  records.reserve(queries_short.size());
  for (std::size_t q = 0; q < queries_short.size(); ++q) {
    const auto t0 = Clock::now();
    auto hit = semantic_hash_retrieve(queries_short.codes[q], queries_long.codes[q], index, radius, exact);
    const bool fallback = !hit;
    if (fallback) hit = exhaustive_search(queries_long.codes[q], index.long_codes());
    const auto t1 = Clock::now();
    records.push_back({queries_short.ids[q], index.long_codes().id(hit->index), hit->distance,
                       hit->candidates, fallback, nanos(t1 - t0)});
  }
  return records;
}

std::vector<RetrievalRecord> retrieve_combined(const CodeSet& queries_a, const CodeDatabase& db_a,
                                               const CodeSet& queries_b, const CodeDatabase& db_b) {
  if (db_a.ids() != db_b.ids())
    throw InvalidArgument("combined retrieval: the two databases must list the same ids in the same order");
  std::map<std::string, std::size_t> b_position;
  for (std::size_t i = 0; i < queries_b.size(); ++i) b_position.emplace(queries_b.ids[i], i);
  std::vector<RetrievalRecord> records;
  records.reserve(queries_a.size());
  for (std::size_t q = 0; q < queries_a.size(); ++q) {
    const auto it = b_position.find(queries_a.ids[q]);
    if (it == b_position.end())
      throw InvalidArgument("combined retrieval: query '" + queries_a.ids[q] + "' missing from second code file");
    const auto t0 = Clock::now();
    const SearchHit hit = combined_search(queries_a.codes[q], db_a, queries_b.codes[it->second], db_b);
    const auto t1 = Clock::now();
    records.push_back({queries_a.ids[q], db_a.id(hit.index), hit.distance, hit.candidates, false, nanos(t1 - t0)});
  }
  return records;
}

std::vector<RetrievalRecord> retrieve_pearson(const std::vector<RadonProjectionSet>& queries,
                                              const std::vector<RadonProjectionSet>& db) {
  if (db.empty()) throw InvalidState("pearson retrieval: empty database");
  const Vector first = db.front().flatten();
  Matrix columns(first.size(), static_cast<Eigen::Index>(db.size()));
  for (std::size_t i = 0; i < db.size(); ++i) {
    const Vector v = db[i].flatten();
    if (v.size() != first.size()) throw InvalidArgument("pearson retrieval: inconsistent projection sizes");
    columns.col(static_cast<Eigen::Index>(i)) = v;
  }
  std::vector<RetrievalRecord> records;
  records.reserve(queries.size());
  for (const auto& query : queries) {
    const Vector v = query.flatten();
    const auto t0 = Clock::now();
    const SearchHit hit = pearson_retrieve(v, columns);
    const auto t1 = Clock::now();
    records.push_back({query.id, db[hit.index].id, hit.distance, hit.candidates, false, nanos(t1 - t0)});
  }
  return records;
}

void save_results(const std::filesystem::path& path, const std::vector<RetrievalRecord>& records,
                  const std::string& header_fields) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "# ddah-results v1";
  if (!header_fields.empty()) out << ' ' << header_fields;
  out << '\n';
  for (const auto& r : records)
    out << r.query_id << ' ' << r.retrieved_id << ' ' << format_distance(r.distance) << ' ' << r.candidates
        << ' ' << (r.fallback ? 1 : 0) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<RetrievalRecord> load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open results file");
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ddah-results v1", 0) != 0)
    throw LoadError(path.string() + ": expected header '# ddah-results v1', found '" + line + "'");
  std::vector<RetrievalRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    RetrievalRecord r;
    int fallback = 0;
    if (!(fields >> r.query_id >> r.retrieved_id >> r.distance >> r.candidates >> fallback))
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": malformed result line");
    r.fallback = fallback != 0;
    records.push_back(std::move(r));
  }
  return records;
}

void save_timings(const std::filesystem::path& path, const std::vector<RetrievalRecord>& records,
                  const std::string& header_fields) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "# ddah-timings v1";
  if (!header_fields.empty()) out << ' ' << header_fields;
  out << '\n';
  for (const auto& r : records) out << r.query_id << ' ' << r.latency_ns << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

IrmaError evaluate_records(const std::vector<RetrievalRecord>& records,
                           const std::map<std::string, IrmaCode>& codes, const BranchTable& table) {
  std::vector<std::string> missing;
  std::vector<IrmaPair> pairs;
  pairs.reserve(records.size());
  for (const auto& r : records) {
    const auto q = codes.find(r.query_id);
    const auto h = codes.find(r.retrieved_id);
    if (q == codes.end()) missing.push_back(r.query_id);
    if (h == codes.end()) missing.push_back(r.retrieved_id);
    if (q != codes.end() && h != codes.end()) pairs.emplace_back(q->second, h->second);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw LoadError("no IRMA code for: " + list);
  }
  return total_error_breakdown(pairs, table);
}

TimingSummary summarize_runs(std::vector<double> runs) {
  if (runs.size() < 2) throw InvalidArgument("timing summary needs at least 2 runs, got " + std::to_string(runs.size()));
  TimingSummary s;
  const double n = static_cast<double>(runs.size());
  s.mean = std::accumulate(runs.begin(), runs.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : runs) ss += (r - s.mean) * (r - s.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  s.ci_half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
  s.runs = std::move(runs);
  return s;
}

TimingSummary time_runs(std::size_t runs, std::size_t per_call_units, const std::function<void()>& body) {
  if (runs < 2) throw InvalidArgument("benchmark needs at least 2 runs, got " + std::to_string(runs));
  const double units = static_cast<double>(std::max<std::size_t>(per_call_units, 1));
  std::vector<double> samples;
  samples.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    const auto t0 = Clock::now();
    body();
    samples.push_back(seconds_since(t0) / units);
  }
  return summarize_runs(std::move(samples));
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint(std::string_view canonical_config) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical_config);
  return out.str();
}

}  // namespace ddah
