// semcse command-line tool: gen, train, embed, bench, analyze.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semcse/semcse.hpp"

namespace fs = std::filesystem;
using namespace semcse;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create directory " + dir + ": " + ec.message());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path);
  }
  return out;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) {
    throw Error("no such file: " + path);
  }
}

// --- gen ---------------------------------------------------------------------

struct GenArgs {
  SyntheticOptions opt;
  std::string out;
};

void cmd_gen(const GenArgs& a) {
  RunManifest m;
  m.command = "gen";
  m.seed = a.opt.seed;
  m.config = {{"docs", a.opt.n_docs},
              {"topics", a.opt.n_topics},
              {"vocab_per_topic", a.opt.vocab_per_topic},
              {"shared_vocab", a.opt.shared_vocab},
              {"seed", a.opt.seed}};
  const auto corpus = generate_synthetic_corpus(a.opt);
  save_corpus(corpus, a.out);
  m.outputs["corpus"] = a.out;
  m.write(a.out + ".manifest.json");
  std::cerr << "wrote " << corpus.size() << " documents and " << corpus.summaries().size() << " summaries to "
            << a.out << '\n';
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  TrainConfig cfg;
  std::string mode = "full";
  std::string distance = "euclidean";
  std::string corpus;
  std::string out_dir;
};

nlohmann::ordered_json config_json(const TrainConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"distance", to_string(c.distance)},
          {"margin", c.margin},
          {"tau", c.temperature},
          {"l2_weight", c.l2_weight},
          {"batch_pairs", c.batch_pairs},
          {"mix_summary", c.positive_mix.summary},
          {"mix_title", c.positive_mix.title},
          {"mix_sentence", c.positive_mix.abstract_sentence},
          {"eval_every", c.eval_every},
          {"patience", c.patience},
          {"max_batches", c.max_batches},
          {"lr", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"adam_eps", c.epsilon},
          {"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},
          {"output_dim", c.output_dim},
          {"dropout", c.dropout},
          {"min_count", c.min_count},
          {"val_frac", c.val_frac},
          {"seed", c.seed}};
}

void cmd_train(TrainArgs a) {
  a.cfg.mode = parse_mode(a.mode);
  a.cfg.distance = parse_distance(a.distance);
  a.cfg.validate();
  require_file(a.corpus);
  const auto corpus = load_corpus(a.corpus);
  ensure_dir(a.out_dir);

  RunManifest m;
  m.command = "train";
  m.seed = a.cfg.seed;
  m.config = config_json(a.cfg);
  m.inputs["corpus"] = a.corpus;

  const auto result = train(corpus, a.cfg, [](const LogRecord& r) {
    std::cerr << "batch " << r.batch << " epoch " << r.epoch << " loss " << std::setprecision(5) << r.loss
              << " active " << r.active_fraction << " s2s " << r.val_rank_s2s << " s2d " << r.val_rank_s2d
              << (r.best ? " *" : "") << '\n';
  });

  const std::string best = (fs::path(a.out_dir) / "ckpt-best.bin").string();
  const std::string last = (fs::path(a.out_dir) / "ckpt-last.bin").string();
  const std::string log = (fs::path(a.out_dir) / "log.jsonl").string();
  save_model(result.best, best);
  save_model(result.last, last);
  auto log_out = open_out(log);
  write_log(result.log, log_out);

  m.outputs = {{"ckpt_best", best}, {"ckpt_last", last}, {"log", log}};
  m.config["batches_run"] = result.batches;
  m.config["stop_reason"] = result.stop_reason;
  m.write((fs::path(a.out_dir) / "manifest.json").string());
  std::cerr << "stopped after " << result.batches << " batches: " << result.stop_reason << '\n';
}

// --- embed -------------------------------------------------------------------

struct EmbedArgs {
  std::string ckpt;
  std::string corpus;
  std::string field = "title-abstract";
  std::string source;
  std::string out;
};

void cmd_embed(const EmbedArgs& a) {
  const Field field = parse_field(a.field);
  require_file(a.ckpt);
  require_file(a.corpus);
  const auto model = load_model(a.ckpt);
  const auto corpus = load_corpus(a.corpus);
  const std::string source = a.source.empty() ? a.ckpt : a.source;
  const auto emb = embed_field(embedder_of(model), corpus, field, source);
  write_embeddings(emb.set, a.out);

  RunManifest m;
  m.command = "embed";
  m.config = {{"field", to_string(field)}, {"source", source}};
  m.inputs = {{"ckpt", a.ckpt}, {"corpus", a.corpus}};
  m.outputs = {{"embeddings", a.out}};
  m.config["records"] = emb.set.size();
  m.config["skipped"] = emb.skipped;
  m.write(a.out + ".manifest.json");
  std::cerr << "embedded " << emb.set.size() << " documents (" << emb.skipped << " skipped: no " << to_string(field)
            << ") into " << a.out << '\n';
}

// --- bench -------------------------------------------------------------------

struct BenchArgs {
  std::string corpus;
  std::vector<std::string> ckpts;
  std::vector<std::string> emb_dirs;
  std::string distance = "euclidean";
  double test_frac = 0.2;
  std::size_t k = 5;
  std::string out_dir;
};

/// Reads <dir>/<field>.jsonl; every file of one source must share a dimension.
FieldProvider exchange_fields(const std::string& dir, const Corpus& corpus) {
  auto dim = std::make_shared<std::size_t>(0);
  return [dir, &corpus, dim](Field f) {
    const auto path = (fs::path(dir) / (std::string(to_string(f)) + ".jsonl")).string();
    require_file(path);
    auto set = read_embeddings(path);
    if (*dim != 0 && set.dim() != *dim) {
      throw Error(path + ": dimension " + std::to_string(set.dim()) + " differs from " + std::to_string(*dim) +
                  " in the other files of " + dir);
    }
    *dim = set.dim();
    const std::size_t skipped = corpus.size() > set.size() ? corpus.size() - set.size() : 0;
    return FieldEmbeddings{std::move(set), skipped};
  };
}

void cmd_bench(const BenchArgs& a) {
  const Distance kind = parse_distance(a.distance);
  if (a.ckpts.empty() && a.emb_dirs.empty()) {
    throw Error("bench needs at least one --ckpt or --emb-dir source");
  }
  require_file(a.corpus);
  const auto corpus = load_corpus(a.corpus);
  ensure_dir(a.out_dir);

  RunManifest m;
  m.command = "bench";
  m.config = {{"distance", to_string(kind)}, {"test_frac", a.test_frac}, {"k", a.k}};
  m.inputs = {{"corpus", a.corpus}, {"ckpt", a.ckpts}, {"emb_dir", a.emb_dirs}};

  std::vector<SourceScores> sources;
  std::set<std::string> names;
  const auto add_name = [&](const std::string& name) {
    if (!names.insert(name).second) {
      throw Error("source \"" + name + "\" given twice");
    }
  };
  for (const auto& path : a.ckpts) {
    add_name(path);
    require_file(path);
    const auto model = load_model(path);
    sources.push_back(run_benchmark(path, model_fields(embedder_of(model), corpus, path), corpus, a.test_frac, kind, a.k));
  }
  for (const auto& dir : a.emb_dirs) {
    add_name(dir);
    if (!fs::is_directory(dir)) {
      throw Error("no such directory: " + dir);
    }
    sources.push_back(run_benchmark(dir, exchange_fields(dir, corpus), corpus, a.test_frac, kind, a.k));
  }
  const auto report = build_report(std::move(sources), kind);

  const std::string json_path = (fs::path(a.out_dir) / "report.json").string();
  const std::string csv_path = (fs::path(a.out_dir) / "report.csv").string();
  open_out(json_path) << to_json(report).dump(2) << '\n';
  auto csv = open_out(csv_path);
  write_csv(report, csv);
  write_table(report, std::cout);
  for (const auto& w : report.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  m.outputs = {{"report_json", json_path}, {"report_csv", csv_path}};
  m.write((fs::path(a.out_dir) / "manifest.json").string());
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::vector<std::string> embs;
  std::vector<std::string> ckpts;
  std::string corpus;
  std::string field = "title-abstract";
  bool project2d = false;
  std::size_t top_k = 0;
  std::string out_dir;
};

void cmd_analyze(const AnalyzeArgs& a) {
  std::vector<EmbeddingSet> sets;
  std::map<std::string, std::string> categories;
  std::optional<Corpus> corpus;
  if (!a.corpus.empty()) {
    require_file(a.corpus);
    corpus = load_corpus(a.corpus);
    for (const auto& d : corpus->documents()) {
      if (d.category) {
        categories[d.id] = *d.category;
      }
    }
  }
  for (const auto& path : a.embs) {
    require_file(path);
    sets.push_back(read_embeddings(path));
  }
  if (!a.ckpts.empty() && !corpus) {
    throw Error("--ckpt needs --corpus to know what to embed");
  }
  for (const auto& path : a.ckpts) {
    require_file(path);
    const auto model = load_model(path);
    sets.push_back(embed_field(embedder_of(model), *corpus, parse_field(a.field), path).set);
  }
  if (sets.empty() || sets.size() > 2) {
    throw Error("analyze takes one source, or two for a --top-k comparison");
  }
  ensure_dir(a.out_dir);

  RunManifest m;
  m.command = "analyze";
  m.config = {{"field", a.field}, {"project2d", a.project2d}, {"top_k", a.top_k}};
  m.inputs = {{"emb", a.embs}, {"ckpt", a.ckpts}, {"corpus", a.corpus}};

  std::vector<VarianceProfile> profiles;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string tag = std::to_string(i + 1);
    profiles.push_back(variance_profile(sets[i]));
    const auto prof_path = (fs::path(a.out_dir) / ("profile-" + tag + ".csv")).string();
    auto out = open_out(prof_path);
    write_profile_csv(profiles.back(), out);
    m.outputs["profile_" + tag] = prof_path;
    if (a.project2d) {
      const auto proj_path = (fs::path(a.out_dir) / ("projection-" + tag + ".csv")).string();
      auto pout = open_out(proj_path);
      write_projection_csv(pca_project_2d(sets[i]), categories, pout);
      m.outputs["projection_" + tag] = proj_path;
    }
  }

  std::cout << std::setprecision(6) << std::fixed;
  if (a.top_k > 0) {
    std::vector<double> mass;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      mass.push_back(top_k_mass(profiles[i], a.top_k));
      std::cout << "top-" << a.top_k << " mass " << sets[i].source() << ": " << mass.back() << '\n';
    }
    if (mass.size() == 2) {
      std::cout << "difference (first - second): " << mass[0] - mass[1] << '\n';
    }
  } else {
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      std::cout << sets[i].source() << ": top-1 " << profiles[i].fractions[0] << ", dimension "
                << profiles[i].dimension << ", points " << profiles[i].n_points << '\n';
    }
  }
  m.write((fs::path(a.out_dir) / "manifest.json").string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrastive summary-embedding lab: synthesize data, train, embed, benchmark, analyze."};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic corpus (JSON lines)");
  g->add_option("--docs", gen.opt.n_docs, "Number of documents")->capture_default_str();
  g->add_option("--topics", gen.opt.n_topics, "Number of topics (>= 2)")->capture_default_str();
  g->add_option("--vocab-per-topic", gen.opt.vocab_per_topic, "Topic-specific words per topic")->capture_default_str();
  g->add_option("--shared-vocab", gen.opt.shared_vocab, "Words shared by all topics")->capture_default_str();
  g->add_option("--seed", gen.opt.seed, "Random seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output corpus path")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train an encoder; writes ckpt-best, ckpt-last, log.jsonl, manifest.json");
  t->add_option("--corpus", tr.corpus, "Training corpus (JSON lines)")->required();
  t->add_option("--out-dir", tr.out_dir, "Output directory")->required();
  t->add_option("--mode", tr.mode, "full | just-summaries | same-input")->capture_default_str();
  t->add_option("--distance", tr.distance, "euclidean (triplet loss) | cosine (softmax loss)")->capture_default_str();
  t->add_option("--margin", tr.cfg.margin, "Triplet margin")->capture_default_str();
  t->add_option("--tau", tr.cfg.temperature, "Softmax temperature for --distance cosine")->capture_default_str();
  t->add_option("--l2-weight", tr.cfg.l2_weight, "Weight of the anchor L2 penalty")->capture_default_str();
  t->add_option("--batch-pairs", tr.cfg.batch_pairs, "Anchor/positive pairs per batch (>= 2)")->capture_default_str();
  t->add_option("--mix-summary", tr.cfg.positive_mix.summary, "Share of summary positives (full mode)")
      ->capture_default_str();
  t->add_option("--mix-title", tr.cfg.positive_mix.title, "Share of title positives (full mode)")
      ->capture_default_str();
  t->add_option("--mix-sentence", tr.cfg.positive_mix.abstract_sentence,
                "Share of abstract-sentence positives (full mode)")
      ->capture_default_str();
  t->add_option("--eval-every", tr.cfg.eval_every, "Batches between validation runs")->capture_default_str();
  t->add_option("--patience", tr.cfg.patience, "Stagnant epochs tolerated before stopping")->capture_default_str();
  t->add_option("--max-batches", tr.cfg.max_batches, "Hard cap on training batches")->capture_default_str();
  t->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate")->capture_default_str();
  t->add_option("--beta1", tr.cfg.beta1, "Adam first-moment decay")->capture_default_str();
  t->add_option("--beta2", tr.cfg.beta2, "Adam second-moment decay")->capture_default_str();
  t->add_option("--adam-eps", tr.cfg.epsilon, "Adam epsilon")->capture_default_str();
  t->add_option("--embed-dim", tr.cfg.embed_dim, "Token embedding width")->capture_default_str();
  t->add_option("--hidden-dim", tr.cfg.hidden_dim, "Hidden layer width")->capture_default_str();
  t->add_option("--output-dim", tr.cfg.output_dim, "Output embedding dimension")->capture_default_str();
  t->add_option("--dropout", tr.cfg.dropout, "Hidden-layer dropout rate")->capture_default_str();
  t->add_option("--min-count", tr.cfg.min_count, "Minimum token frequency for the vocabulary")->capture_default_str();
  t->add_option("--val-frac", tr.cfg.val_frac, "Fraction of trailing documents used for validation")
      ->capture_default_str();
  t->add_option("--seed", tr.cfg.seed, "Random seed")->capture_default_str();

  EmbedArgs em;
  auto* e = app.add_subcommand("embed", "Embed one field of every document into an exchange file");
  e->add_option("--ckpt", em.ckpt, "Checkpoint path (vocabulary read from <ckpt>.vocab)")->required();
  e->add_option("--corpus", em.corpus, "Corpus (JSON lines)")->required();
  e->add_option("--field", em.field, "title | abstract | title-abstract | summary | query | half1 | half2")
      ->capture_default_str();
  e->add_option("--source", em.source, "Source name in the file header (default: checkpoint path)");
  e->add_option("--out", em.out, "Output exchange file")->required();

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "Run the four-task benchmark over one or more sources");
  b->add_option("--corpus", be.corpus, "Benchmark corpus (JSON lines)")->required();
  b->add_option("--ckpt", be.ckpts, "Checkpoint source (repeatable)");
  b->add_option("--emb-dir", be.emb_dirs,
                "Directory of exchange files named <field>.jsonl for title, abstract, title-abstract, half1, half2, "
                "query (repeatable)");
  b->add_option("--distance", be.distance, "euclidean | cosine")->capture_default_str();
  b->add_option("--test-frac", be.test_frac, "Trailing share of documents classified in the clustering task")
      ->capture_default_str();
  b->add_option("--k", be.k, "Neighbours for clustering purity")->capture_default_str();
  b->add_option("--out-dir", be.out_dir, "Writes report.json, report.csv, manifest.json")->required();

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "PCA variance profile and 2-D projection of embeddings");
  a->add_option("--emb", an.embs, "Exchange file source (repeatable)");
  a->add_option("--ckpt", an.ckpts, "Checkpoint source, embedded from --corpus (repeatable)");
  a->add_option("--corpus", an.corpus, "Corpus for --ckpt sources and projection categories");
  a->add_option("--field", an.field, "Field embedded for --ckpt sources")->capture_default_str();
  a->add_flag("--project2d", an.project2d, "Also write projection-<i>.csv (key,x,y,category)");
  a->add_option("--top-k", an.top_k, "Print the top-k variance mass of each source and their difference");
  a->add_option("--out-dir", an.out_dir, "Writes profile-<i>.csv and manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) {
      cmd_gen(gen);
    } else if (t->parsed()) {
      cmd_train(tr);
    } else if (e->parsed()) {
      cmd_embed(em);
    } else if (b->parsed()) {
      cmd_bench(be);
    } else if (a->parsed()) {
      cmd_analyze(an);
    }
  } catch (const std::exception& ex) {
    std::cerr << "semcse: error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
