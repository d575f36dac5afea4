#include "mvd/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mvd/dataio/checkpoint.hpp"
#include "mvd/dataio/color.hpp"
#include "mvd/dataio/dataset.hpp"
#include "mvd/dataio/errors.hpp"
#include "mvd/dataio/feature_file.hpp"
#include "mvd/model/network.hpp"
#include "mvd/model/trainer.hpp"
#include "mvd/numerics/random.hpp"
#include "mvd/retrieval/intent.hpp"
#include "mvd/retrieval/ranking.hpp"
#include "mvd/simulator/experiments.hpp"
#include "mvd/simulator/reports.hpp"
#include "mvd/simulator/synthetic.hpp"

namespace mvd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Seed streams derived from --seed.
constexpr std::uint64_t kStatsStream = 0x57a7;

class CliError : public std::runtime_error {
 public:
  CliError(int code, std::string kind, const std::string& what)
      : std::runtime_error(what), code_(code), kind_(std::move(kind)) {}
  int code() const noexcept { return code_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  int code_;
  std::string kind_;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw CliError(kExitUsage, "usage", what + " is required");
  if (!fs::exists(path)) throw CliError(kExitMissingFile, "not_found", what + " not found: " + path);
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError(IoError::Kind::Io, "cannot write " + path.string());
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw CliError(kExitUsage, "usage", "--out-dir is required");
  fs::create_directories(dir);
}

/// Every flag of the subcommand with its final value, after defaults, --config and flags.
void record_config(const CLI::App& app, const std::string& out_dir) {
  write_text(fs::path(out_dir) / "resolved_config.toml",
             "# " + app.get_name() + "\n" + app.config_to_str(true, false));
}

// CLI11 only reads a config file attached to the root app, so subcommands apply theirs here.
// Keys fill the options not given on the command line.
void apply_config_file(CLI::App& app) {
  const CLI::Option* cfg = app.get_config_ptr();
  if (cfg == nullptr || cfg->count() == 0) return;
  const std::string path = cfg->results().front();
  if (!fs::exists(path)) throw CliError(kExitMissingFile, "not_found", "--config not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw IoError(IoError::Kind::Schema, path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents != std::vector<std::string>{app.get_name()}) continue;
    CLI::Option* opt = app.get_option_no_throw("--" + item.name);
    if (opt == nullptr || opt == cfg) {
      throw IoError(IoError::Kind::Schema, path + ": unknown key '" + item.name + "'");
    }
    if (opt->count() > 0) continue;
    const bool unset = std::all_of(item.inputs.begin(), item.inputs.end(), [](const auto& v) { return v.empty(); });
    if (unset) continue;
    for (const auto& v : item.inputs) opt->add_result(v);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw IoError(IoError::Kind::Schema, path + ": " + item.name + ": " + e.what());
    }
  }
}

void enable_config_files(CLI::App& app) {
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    if (sub->get_config_ptr() != nullptr) sub->parse_complete_callback([sub] { apply_config_file(*sub); });
    enable_config_files(*sub);
  }
}

Split parse_split_flag(const std::string& s) {
  try {
    return parse_split(s);
  } catch (const std::exception&) {
    throw CliError(kExitUsage, "usage", "unknown split '" + s + "'");
  }
}

std::vector<std::size_t> rows_for(const MultiViewDataset& ds, const std::string& split) {
  if (split == "all") {
    std::vector<std::size_t> rows(ds.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
  }
  return ds.indices(parse_split_flag(split));
}

std::vector<std::size_t> rows_of_ids(const MultiViewDataset& ds, const std::vector<std::string>& ids,
                                     const std::string& source) {
  std::vector<std::size_t> rows;
  for (const auto& id : ids) {
    auto r = ds.index_of(id);
    if (!r) throw IoError(IoError::Kind::Schema, source + ": unknown item id '" + id + "'");
    rows.push_back(*r);
  }
  return rows;
}

json per_view(const std::vector<std::string>& names, std::span<const double> values) {
  json j = json::object();
  for (std::size_t m = 0; m < names.size(); ++m) j[names[m]] = values[m];
  return j;
}

std::string ranked_lines(const RankedList& list, const std::vector<std::string>& views) {
  std::string out;
  for (std::size_t i = 0; i < list.items.size(); ++i) {
    const auto& it = list.items[i];
    json line = {{"rank", i + 1}, {"id", it.id}, {"score", it.score}, {"per_view_sim", per_view(views, it.per_view_sim)}};
    out += line.dump() + "\n";
  }
  return out;
}

void emit(const std::string& text, const std::string& out_dir, const std::string& file) {
  if (out_dir.empty()) {
    std::cout << text;
  } else {
    write_text(fs::path(out_dir) / file, text);
  }
}

// ---- shared option groups ------------------------------------------------------

struct TrainFlags {
  std::uint64_t seed = 0;
  double lambda1 = LossWeights{}.lambda1;
  double lambda2 = LossWeights{}.lambda2;
  double lambda3 = LossWeights{}.lambda3;
  double lambda4 = LossWeights{}.lambda4;
  std::size_t epochs = ModelConfig{}.epochs;
  std::size_t batch_size = ModelConfig{}.batch_size;
  double lr = ModelConfig{}.learning_rate;
  std::vector<std::size_t> hidden;
  std::size_t aligned_dim = ModelConfig{}.aligned_dim;
  std::size_t shared_dim = ModelConfig{}.shared_dim;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "Seed for initialization and batch order")->capture_default_str();
    app->add_option("--lambda1", lambda1, "Alignment loss weight")->capture_default_str();
    app->add_option("--lambda2", lambda2, "Orthogonalization loss weight")->capture_default_str();
    app->add_option("--lambda3", lambda3, "Information loss weight")->capture_default_str();
    app->add_option("--lambda4", lambda4, "Reconstruction loss weight")->capture_default_str();
    app->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    app->add_option("--batch-size", batch_size, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    app->add_option("--hidden", hidden, "Hidden width of the specific and reconstruction pathways, one per view "
                                        "(default max(d_m, 32))");
    app->add_option("--aligned-dim", aligned_dim, "Aligned representation width")->capture_default_str();
    app->add_option("--shared-dim", shared_dim, "Shared layer width")->capture_default_str();
  }

  ModelConfig config(const MultiViewDataset& ds) const {
    ModelConfig c = ModelConfig::defaults_for(ds.views);
    c.loss_weights = {lambda1, lambda2, lambda3, lambda4};
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.learning_rate = lr;
    c.seed = seed;
    c.aligned_dim = aligned_dim;
    c.aligned_hidden = aligned_dim;
    c.shared_dim = shared_dim;
    if (!hidden.empty()) {
      if (hidden.size() != ds.view_count()) throw CliError(kExitUsage, "usage", "--hidden needs one value per view");
      c.specific_hidden = hidden;
      c.recon_hidden = hidden;
    }
    c.validate();
    return c;
  }
};

struct ModelInputs {
  std::string data_dir;
  std::string checkpoint;

  void add(CLI::App* app, bool need_checkpoint = true) {
    app->add_option("--data-dir", data_dir, "Dataset directory (views.json, <view>.mvdf, manifest.jsonl)");
    if (need_checkpoint) app->add_option("--checkpoint", checkpoint, "Model checkpoint (.mvdc)");
  }

  MultiViewDataset dataset() const {
    require_file(data_dir, "--data-dir");
    return load_dataset(data_dir);
  }
  Checkpoint model() const {
    require_file(checkpoint, "--checkpoint");
    return load_checkpoint(checkpoint);
  }
};

struct CorpusFlags {
  std::string split = "all";
  std::size_t stat_pairs = kDefaultStatPairs;
  bool exact_stats = false;

  void add(CLI::App* app, const std::string& default_split) {
    split = default_split;
    app->add_option("--split", split, "Corpus split: all, train, val or test")->capture_default_str();
    app->add_option("--stat-pairs", stat_pairs, "Sampled pairs for the corpus similarity statistics")
        ->capture_default_str();
    app->add_flag("--exact-stats", exact_stats, "Enumerate every corpus pair instead of sampling");
  }
};

/// Corpus over the chosen split plus any listed members outside it.
EvalContext corpus_context(const MultiViewDataset& ds, const Checkpoint& ckpt, const CorpusFlags& f,
                           const std::vector<std::size_t>& extra_rows, std::uint64_t seed) {
  auto rows = rows_for(ds, f.split);
  std::set<std::size_t> have(rows.begin(), rows.end());
  for (std::size_t r : extra_rows)
    if (have.insert(r).second) rows.push_back(r);
  return make_eval_context(ds, ckpt.config, ckpt.params, std::move(rows), derive_seed(seed, kStatsStream),
                           f.stat_pairs, f.exact_stats);
}

// ---- subcommands ------------------------------------------------------------------

void add_gen_synthetic(CLI::App& root) {
  struct Flags {
    std::string out_dir;
    std::uint64_t seed = 0;
    SyntheticConfig config = SyntheticConfig::defaults();
    std::vector<std::size_t> dims;
  };
  auto f = std::make_shared<Flags>();
  for (const auto& v : f->config.views) f->dims.push_back(v.input_dim);
  auto* app = root.add_subcommand("gen-synthetic", "Write a synthetic three-view dataset");
  app->set_config("--config", "", "Key = value file; explicit flags override it");
  app->add_option("--out-dir", f->out_dir, "Output dataset directory");
  app->add_option("--seed", f->seed, "Dataset seed")->capture_default_str();
  app->add_option("--items", f->config.items, "Number of items")->capture_default_str();
  app->add_option("--dims", f->dims, "Input dims of the object, style and color views")
      ->expected(3)
      ->capture_default_str();
  app->add_option("--shared-latent-dim", f->config.shared_latent_dim, "Width of the latent shared by all views")
      ->capture_default_str();
  app->add_option("--w-class", f->config.w_class, "Weight of the class centroid")->capture_default_str();
  app->add_option("--w-shared", f->config.w_shared, "Weight of the shared latent")->capture_default_str();
  app->add_option("--w-noise", f->config.w_noise, "Weight of the per-item noise")->capture_default_str();
  app->callback([f, app] {
    ensure_dir(f->out_dir);
    SyntheticConfig c = f->config;
    c.seed = f->seed;
    for (std::size_t m = 0; m < c.views.size(); ++m) c.views[m].input_dim = f->dims[m];
    save_dataset(generate_synthetic(c), f->out_dir);
    record_config(*app, f->out_dir);
  });
}

void add_train(CLI::App& root) {
  struct Flags {
    ModelInputs in;
    std::string out_dir;
    std::string resume;
    TrainFlags train;
    bool quiet = false;
  };
  auto f = std::make_shared<Flags>();
  auto* app = root.add_subcommand("train", "Train a model; writes checkpoint.mvdc, best_val.mvdc and history.jsonl");
  app->set_config("--config", "", "Key = value file; explicit flags override it");
  f->in.add(app, false);
  app->add_option("--out-dir", f->out_dir, "Output directory");
  app->add_option("--resume", f->resume, "Continue from this checkpoint (its config wins except --epochs)");
  f->train.add(app);
  app->add_flag("--quiet", f->quiet, "No per-epoch log lines");
  app->callback([f, app] {
    const auto ds = f->in.dataset();
    ensure_dir(f->out_dir);
    std::unique_ptr<Trainer> trainer;
    if (!f->resume.empty()) {
      require_file(f->resume, "--resume");
      Checkpoint ckpt = load_checkpoint(f->resume);
      ckpt.config.epochs = f->train.epochs;
      trainer = std::make_unique<Trainer>(ds, std::move(ckpt));
    } else {
      trainer = std::make_unique<Trainer>(ds, f->train.config(ds));
    }
    record_config(*app, f->out_dir);

    double best = std::numeric_limits<double>::infinity();
    std::optional<Checkpoint> best_ckpt;
    // A resumed run starts from the best of its recorded history.
    for (const auto& rec : trainer->checkpoint().history) {
      if (rec.split == Split::Val && rec.loss.total < best) best = rec.loss.total;
    }
    trainer->run([&](const Trainer& t, const EpochRecord& train, const EpochRecord* val) {
      const double score = val != nullptr ? val->loss.total : train.loss.total;
      if (score < best) {
        best = score;
        best_ckpt = t.checkpoint();
      }
      if (!f->quiet) {
        std::cout << "epoch " << train.epoch << " train " << format_number(train.loss.total);
        if (val != nullptr) std::cout << " val " << format_number(val->loss.total);
        std::cout << '\n';
      }
    });
    const Checkpoint& final = trainer->checkpoint();
    save_checkpoint(final, fs::path(f->out_dir) / "checkpoint.mvdc");
    save_checkpoint(best_ckpt ? *best_ckpt : final, fs::path(f->out_dir) / "best_val.mvdc");

    std::string history;
    for (const auto& r : final.history) {
      json line = {{"epoch", r.epoch}, {"split", std::string(to_string(r.split))},
                   {"ali", r.loss.ali},  {"spc", r.loss.spc},
                   {"inf", r.loss.inf},  {"rec", r.loss.rec},
                   {"total", r.loss.total}};
      history += line.dump() + "\n";
    }
    write_text(fs::path(f->out_dir) / "history.jsonl", history);
  });
}

void add_embed(CLI::App& root) {
  struct Flags {
    ModelInputs in;
    std::string out_dir;
    std::string split = "all";
  };
  auto f = std::make_shared<Flags>();
  auto* app = root.add_subcommand("embed", "Write view-specific and aligned output features");
  app->set_config("--config", "", "Key = value file; explicit flags override it");
  f->in.add(app);
  app->add_option("--out-dir", f->out_dir, "Output directory");
  app->add_option("--split", f->split, "Items to embed: all, train, val or test")->capture_default_str();
  app->callback([f, app] {
    const auto ds = f->in.dataset();
    const auto ckpt = f->in.model();
    ensure_dir(f->out_dir);
    const auto rows = rows_for(ds, f->split);
    const auto e = embed(ckpt.config, ckpt.params, gather_features(ds, rows));
    for (std::size_t m = 0; m < ds.view_count(); ++m) {
      write_view_features(e.z_specific[m], fs::path(f->out_dir) / (ds.views[m].name + ".specific.mvdf"));
      write_view_features(e.z_aligned[m], fs::path(f->out_dir) / (ds.views[m].name + ".aligned.mvdf"));
    }
    std::string ids;
    for (std::size_t r : rows) ids += ds.item_ids[r] + "\n";
    write_text(fs::path(f->out_dir) / "ids.txt", ids);
    record_config(*app, f->out_dir);
  });
}

void add_intent(CLI::App& root) {
  struct Flags {
    ModelInputs in;
    CorpusFlags corpus;
    std::string collection;
    std::string out_dir;
    std::uint64_t seed = 0;
  };
  auto f = std::make_shared<Flags>();
  auto* app = root.add_subcommand("intent", "Per-view intent of a collection as JSON");
  app->set_config("--config", "", "Key = value file; explicit flags override it");
  f->in.add(app);
  f->corpus.add(app, "all");
  app->add_option("--collection", f->collection, "File with one member id per line");
  app->add_option("--seed", f->seed, "Seed for the corpus statistics")->capture_default_str();
  app->add_option("--out-dir", f->out_dir, "Write intent.json here instead of stdout");
  app->callback([f, app] {
    const auto ds = f->in.dataset();
    const auto ckpt = f->in.model();
    require_file(f->collection, "--collection");
    const auto ids = read_id_list(f->collection);
    const auto members = rows_of_ids(ds, ids, f->collection);
    if (members.size() < 2) throw IoError(IoError::Kind::Schema, "intent needs a collection of at least 2 items");
    const auto ctx = corpus_context(ds, ckpt, f->corpus, members, f->seed);
    const auto reps = embed(ckpt.config, ckpt.params, gather_features(ds, members)).z_specific;
    const auto w = intent(raw_intent(reps), ctx.corpus.output_stats);
    const auto& names = ctx.corpus.view_names;
    const json j = {{"alpha", per_view(names, w.alpha)},
                    {"beta", per_view(names, w.beta)},
                    {"beta_hat", per_view(names, w.beta_hat)}};
    if (!f->out_dir.empty()) {
      ensure_dir(f->out_dir);
      record_config(*app, f->out_dir);
    }
    emit(j.dump() + "\n", f->out_dir, "intent.json");
  });
}

void add_retrieve(CLI::App& root) {
  struct Flags {
    ModelInputs in;
    CorpusFlags corpus;
    std::string collection;
    std::string mode = "output-output";
    std::size_t k = 100;
    bool renormalize = false;
    std::string out_dir;
    std::uint64_t seed = 0;
  };
  auto f = std::make_shared<Flags>();
  auto* app = root.add_subcommand("retrieve", "Rank the corpus for a collection; JSON lines");
  app->set_config("--config", "", "Key = value file; explicit flags override it");
  f->in.add(app);
  f->corpus.add(app, "all");
  app->add_option("--collection", f->collection, "File with one member id per line");
  app->add_option("--mode", f->mode, "input-uniform, input-output, output-output or single:<view>")
      ->capture_default_str();
  app->add_option("--k", f->k, "Number of results")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_flag("--renormalize", f->renormalize, "Scale each collection centroid to unit norm before scoring");
  app->add_option("--seed", f->seed, "Seed for the corpus statistics")->capture_default_str();
  app->add_option("--out-dir", f->out_dir, "Write ranked.jsonl here instead of stdout");
  app->callback([f, app] {
    const auto ds = f->in.dataset();
    const auto ckpt = f->in.model();
    require_file(f->collection, "--collection");
    const auto ids = read_id_list(f->collection);
    if (ids.empty()) throw IoError(IoError::Kind::Schema, "empty collection");
    const auto ctx = corpus_context(ds, ckpt, f->corpus, rows_of_ids(ds, ids, f->collection), f->seed);
    RankingMode mode;
    try {
      mode = parse_ranking_mode(f->mode, ctx.corpus.view_names);
    } catch (const std::invalid_argument& e) {
      throw CliError(kExitUsage, "usage", e.what());
    }
    const bool needs_intent =
        mode.kind == RankingMode::Kind::InputOutput || mode.kind == RankingMode::Kind::OutputOutput;
    if (needs_intent && ids.size() < 2) {
      throw IoError(IoError::Kind::Schema, "mode " + f->mode + " infers intent and needs at least 2 members");
    }
    const auto list = rank(ids, ctx.corpus, mode, f->k, f->renormalize);
    if (!f->out_dir.empty()) {
      ensure_dir(f->out_dir);
      record_config(*app, f->out_dir);
    }
    emit(ranked_lines(list, ctx.corpus.view_names), f->out_dir, "ranked.jsonl");
  });
}

void add_compose(CLI::App& root) {
  struct Flags {
    ModelInputs in;
    CorpusFlags corpus;
    std::vector<std::string> sources;
    std::size_t k = 100;
    bool renormalize = false;
    std::string out_dir;
    std::uint64_t seed = 0;
  };
  auto f = std::make_shared<Flags>();
  auto* app = root.add_subcommand("compose", "Rank the corpus for a composition of collections; JSON lines");
  app->set_config("--config", "", "Key = value file; explicit flags override it");
  f->in.add(app);
  f->corpus.add(app, "all");
  app->add_option("--source", f->sources, "FILE:view[,view...] (repeat per source)");
  app->add_option("--k", f->k, "Number of results")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_flag("--renormalize", f->renormalize, "Scale each collection centroid to unit norm before scoring");
  app->add_option("--seed", f->seed, "Seed for the corpus statistics")->capture_default_str();
  app->add_option("--out-dir", f->out_dir, "Write ranked.jsonl here instead of stdout");
  app->callback([f, app] {
    const auto ds = f->in.dataset();
    const auto ckpt = f->in.model();
    if (f->sources.empty()) throw CliError(kExitUsage, "usage", "at least one --source is required");
    std::vector<ComposeSource> sources;
    std::vector<std::size_t> member_rows;
    for (const auto& spec : f->sources) {
      const auto colon = spec.rfind(':');
      if (colon == std::string::npos || colon + 1 == spec.size()) {
        throw CliError(kExitUsage, "usage", "--source must look like FILE:view[,view...]: " + spec);
      }
      const std::string file = spec.substr(0, colon);
      require_file(file, "--source file");
      ComposeSource s;
      s.member_ids = read_id_list(file);
      if (s.member_ids.empty()) throw IoError(IoError::Kind::Schema, file + ": empty collection");
      std::stringstream views(spec.substr(colon + 1));
      for (std::string v; std::getline(views, v, ',');) {
        try {
          s.selected_views.insert(ds.view_index(v));
        } catch (const std::invalid_argument& e) {
          throw CliError(kExitUsage, "usage", e.what());
        }
      }
      const auto rows = rows_of_ids(ds, s.member_ids, file);
      member_rows.insert(member_rows.end(), rows.begin(), rows.end());
      sources.push_back(std::move(s));
    }
    const auto ctx = corpus_context(ds, ckpt, f->corpus, member_rows, f->seed);
    RankedList list;
    try {
      list = rank_composition(sources, ctx.corpus, f->k, f->renormalize);
    } catch (const std::invalid_argument& e) {
      throw CliError(kExitUsage, "usage", e.what());
    }
    if (!f->out_dir.empty()) {
      ensure_dir(f->out_dir);
      record_config(*app, f->out_dir);
    }
    emit(ranked_lines(list, ctx.corpus.view_names), f->out_dir, "ranked.jsonl");
  });
}

struct ProtocolFlags {
  SimProtocol protocol;
  std::size_t threads = 1;

  void add(CLI::App* app) {
    app->add_option("--collections", protocol.collections, "Simulated collections per configuration")
        ->capture_default_str();
    app->add_option("--min-size", protocol.min_size, "Smallest collection")->capture_default_str();
    app->add_option("--max-size", protocol.max_size, "Largest collection")->capture_default_str();
    app->add_option("--k", protocol.k, "Cutoff for MAP and MRR")->capture_default_str();
    app->add_option("--seed", protocol.seed, "Protocol seed")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads (results do not depend on it)")->capture_default_str();
  }
};

void add_eval(CLI::App& root) {
  auto* eval = root.add_subcommand("eval", "Experiment runners writing JSON and CSV reports");
  eval->require_subcommand(1);

  struct Flags {
    ModelInputs in;
    CorpusFlags corpus;
    ProtocolFlags proto;
    std::string out_dir;
    std::vector<double> grid = default_purity_grid();
    std::size_t trials = 50;
    std::size_t compose_k = 20;
  };

  auto add_runner = [&](const std::string& name, const std::string& help) {
    auto f = std::make_shared<Flags>();
    auto* app = eval->add_subcommand(name, help);
    app->set_config("--config", "", "Key = value file; explicit flags override it");
    f->in.add(app);
    f->corpus.add(app, "test");
    f->proto.add(app);
    app->add_option("--out-dir", f->out_dir, "Report directory");
    return std::pair{f, app};
  };

  auto load = [](const Flags& f) {
    auto ds = std::make_shared<MultiViewDataset>(f.in.dataset());
    return std::pair{ds, f.in.model()};
  };

  auto context = [](const Flags& f, const MultiViewDataset& ds, const Checkpoint& ckpt) {
    return make_eval_context(ds, ckpt.config, ckpt.params, rows_for(ds, f.corpus.split),
                             derive_seed(f.proto.protocol.seed, kStatsStream), f.corpus.stat_pairs,
                             f.corpus.exact_stats);
  };

  {
    auto [f, app] = add_runner("benchmark", "MAP/MRR@k of every ranking variant over pure collections");
    app->callback([f, app, load, context] {
      auto [ds, ckpt] = load(*f);
      ensure_dir(f->out_dir);
      const auto ctx = context(*f, *ds, ckpt);
      const auto variants = all_variants(ds->view_count());
      write_report(run_benchmark(ctx, f->proto.protocol, variants, f->proto.threads), f->out_dir, "benchmark");
      record_config(*app, f->out_dir);
    });
  }
  {
    auto [f, app] = add_runner("diversity", "MAP and per-view diversity of every ranking variant");
    app->callback([f, app, load, context] {
      auto [ds, ckpt] = load(*f);
      ensure_dir(f->out_dir);
      const auto ctx = context(*f, *ds, ckpt);
      const auto variants = all_variants(ds->view_count());
      write_report(diversity_study(ctx, f->proto.protocol, variants, f->proto.threads), f->out_dir, "diversity");
      record_config(*app, f->out_dir);
    });
  }
  {
    auto [f, app] = add_runner("purity", "Mean intent per view against collection purity");
    app->add_option("--purity-grid", f->grid, "Purity values in [0, 1]")->capture_default_str();
    app->callback([f, app, load, context] {
      auto [ds, ckpt] = load(*f);
      ensure_dir(f->out_dir);
      const auto ctx = context(*f, *ds, ckpt);
      write_report(purity_curve(ctx, f->proto.protocol, f->grid, f->proto.threads), f->out_dir, "purity");
      record_config(*app, f->out_dir);
    });
  }
  {
    auto [f, app] = add_runner("composition", "Joint-label MAP of composed queries against their sources");
    app->add_option("--trials", f->trials, "Number of source pairs")->capture_default_str();
    app->add_option("--compose-k", f->compose_k, "Cutoff for the joint-label MAP")->capture_default_str();
    app->callback([f, app, load, context] {
      auto [ds, ckpt] = load(*f);
      ensure_dir(f->out_dir);
      const auto ctx = context(*f, *ds, ckpt);
      write_report(composition_study(ctx, f->proto.protocol, f->trials, f->compose_k, f->proto.threads), f->out_dir,
                   "composition");
      record_config(*app, f->out_dir);
    });
  }
  {
    struct SweepFlags {
      ModelInputs in;
      TrainFlags train;
      std::string out_dir;
      std::vector<double> lambda2 = {0.0, 0.05, 0.5, 5.0};
      std::size_t threads = 1;
      bool save_models = false;
    };
    auto f = std::make_shared<SweepFlags>();
    auto* app = eval->add_subcommand("sweep", "Train one model per lambda2 and report disentanglement metrics");
    app->set_config("--config", "", "Key = value file; explicit flags override it");
    f->in.add(app, false);
    f->train.add(app);
    app->add_option("--lambda2-values", f->lambda2, "lambda2 values to train")->capture_default_str();
    app->add_option("--threads", f->threads, "Parallel trainings (results do not depend on it)")
        ->capture_default_str();
    app->add_option("--out-dir", f->out_dir, "Report directory");
    app->add_flag("--save-models", f->save_models, "Also write model_<i>.mvdc per lambda2 value");
    app->callback([f, app] {
      const auto ds = f->in.dataset();
      ensure_dir(f->out_dir);
      std::vector<Checkpoint> models;
      const auto report = lambda_sweep(ds, f->train.config(ds), f->lambda2, f->threads, &models);
      write_report(report, f->out_dir, "sweep");
      if (f->save_models) {
        for (std::size_t i = 0; i < models.size(); ++i) {
          save_checkpoint(models[i], fs::path(f->out_dir) / ("model_" + std::to_string(i) + ".mvdc"));
        }
      }
      record_config(*app, f->out_dir);
    });
  }
}

void add_featurize_color(CLI::App& root) {
  struct Flags {
    std::vector<std::string> images;
    std::string raw;
    std::size_t width = 0;
    std::size_t height = 0;
    bool marginal = false;
    std::string out;
  };
  auto f = std::make_shared<Flags>();
  auto* app = root.add_subcommand("featurize-color", "LAB color histograms as a view feature file, one row per image");
  app->set_config("--config", "", "Key = value file; explicit flags override it");
  app->add_option("--image", f->images, "PPM image (P3 or P6); repeat for more rows");
  app->add_option("--raw", f->raw, "Raw interleaved RGB8 file (needs --width and --height)");
  app->add_option("--width", f->width, "Width of the raw image");
  app->add_option("--height", f->height, "Height of the raw image");
  app->add_flag("--marginal", f->marginal, "Concatenated per-channel histograms (62 bins) instead of the joint 6760");
  app->add_option("--out", f->out, "Output feature file (.mvdf)");
  app->callback([f] {
    if (f->out.empty()) throw CliError(kExitUsage, "usage", "--out is required");
    if (f->images.empty() && f->raw.empty()) throw CliError(kExitUsage, "usage", "give --image or --raw");
    const auto layout = f->marginal ? HistogramLayout::Marginal : HistogramLayout::Joint;
    std::vector<Vector> rows;
    for (const auto& path : f->images) {
      require_file(path, "--image");
      const auto img = read_ppm(path);
      rows.push_back(lab_histogram(img.pixels, img.width, img.height, layout));
    }
    if (!f->raw.empty()) {
      require_file(f->raw, "--raw");
      std::ifstream in(f->raw, std::ios::binary);
      std::vector<std::uint8_t> pixels((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (f->width == 0 || f->height == 0 || pixels.size() != 3 * f->width * f->height) {
        throw IoError(IoError::Kind::Schema, "raw RGB file size does not match --width x --height x 3");
      }
      rows.push_back(lab_histogram(pixels, f->width, f->height, layout));
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    const fs::path out(f->out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_view_features(m, out);
  });
}

int exit_code_for(IoError::Kind kind) {
  switch (kind) {
    case IoError::Kind::NotFound: return kExitMissingFile;
    case IoError::Kind::Io: return kExitFailure;
    default: return kExitSchema;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Disentangled multi-view representations, collection intent and intent-weighted retrieval"};
  app.name("mvd_cli");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  add_gen_synthetic(app);
  add_train(app);
  add_embed(app);
  add_intent(app);
  add_retrieve(app);
  add_compose(app);
  add_eval(app);
  add_featurize_color(app);
  enable_config_files(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitUsage;
  } catch (const CliError& e) {
    print_error(e.kind(), e.what());
    return e.code();
  } catch (const IoError& e) {
    print_error(to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    print_error("schema", e.what());
    return kExitSchema;
  } catch (const std::exception& e) {
    print_error("failure", e.what());
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace mvd::cli
