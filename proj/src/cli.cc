#include "xsdp/cli.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "xsdp/checkpoint.h"
#include "xsdp/config.h"
#include "xsdp/evaluation.h"
#include "xsdp/formats.h"
#include "xsdp/pipeline.h"
#include "xsdp/projection.h"
#include "xsdp/synth.h"
#include "xsdp/training.h"

namespace xsdp {

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Rethrows reader errors with the offending file name attached.
template <class F>
auto read_with_name(const std::string& path, F&& fn) {
  auto in = open_in(path);
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

SdpDocument load_sdp(const std::string& path) {
  return read_with_name(path, [](std::istream& in) { return read_sdp(in); });
}

AlignmentFile load_alignments(const std::string& path) {
  return read_with_name(path, [](std::istream& in) { return read_alignments(in); });
}

std::vector<SyntacticTree> load_trees(const std::string& path) {
  return read_with_name(path, [](std::istream& in) { return read_conllu(in); });
}

std::vector<ContextMatrix> load_context(const std::string& path, int dim, const std::vector<int>& counts) {
  return read_with_name(path, [&](std::istream& in) { return read_context_vectors(in, dim, &counts); });
}

struct IdentifiedSentences {
  std::vector<std::string> ids;
  std::vector<Sentence> sentences;
};

// Tokens of a .sdp or .conllu file plus sentence ids (sent_id comments or
// running numbers).
IdentifiedSentences load_sentences(const std::string& path) {
  IdentifiedSentences out;
  if (fs::path(path).extension() == ".sdp") {
    for (auto& s : load_sdp(path)) {
      out.ids.push_back(s.id);
      out.sentences.push_back(std::move(s.graph.tokens));
    }
    return out;
  }
  auto trees = read_with_name(path, [](std::istream& in) { return read_conllu_full(in); });
  for (std::size_t i = 0; i < trees.size(); ++i) {
    std::string id = "s" + std::to_string(i + 1);
    for (const auto& c : trees[i].tree.comments) {
      const std::string key = "# sent_id = ";
      if (c.rfind(key, 0) == 0) id = c.substr(key.size());
    }
    out.ids.push_back(id);
    out.sentences.push_back(std::move(trees[i].tree.tokens));
  }
  return out;
}

void write_manifest(const std::string& path, const std::string& command, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, const Json& config) {
  Json in = Json::object();
  for (const auto& p : inputs) in[p] = hex64(fnv1a(slurp(p)));
  Json outs = Json::object();
  for (const auto& p : outputs)
    if (fs::is_regular_file(p)) outs[p] = hex64(fnv1a(slurp(p)));
  Json m{{"command", command}, {"inputs", in}, {"outputs", outs}, {"config", config}};
  write_file(path, m.dump(2) + "\n");
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, std::string("JSON config file (default: $") + kConfigEnv + ")");
    sub->add_option("--seed", seed, "random seed (model init, shuffling, sampling)");
    sub->add_option("--threads", threads, "worker threads for parsing")->check(CLI::PositiveNumber);
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    std::string path = config_path;
    if (path.empty())
      if (const char* env = std::getenv(kConfigEnv)) path = env;
    if (!path.empty()) cfg = load_config(path);
    if (seed) {
      cfg.seed = *seed;
      cfg.train.seed = *seed;
      cfg.synth.seed = *seed;
    }
    if (threads) cfg.threads = *threads;
    return cfg;
  }
};

std::string manifest_path(const std::string& p) { return p + ".manifest.json"; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-lingual semantic dependency parsing toolkit", args.empty() ? "xsdp" : args[0]};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // intersect
  Common c_intersect;
  std::string fwd_path, bwd_path, out_path;
  auto* intersect = app.add_subcommand("intersect", "intersect two alignment files into one-to-one links");
  c_intersect.attach(intersect);
  intersect->add_option("--forward", fwd_path, "source->target alignments (.align)")->required();
  intersect->add_option("--backward", bwd_path, "target->source alignments as source-target pairs")->required();
  intersect->add_option("--out", out_path, "intersected alignments (.align)")->required();

  // project
  Common c_project;
  std::string src_path, tgt_path, proj_out, dens_out;
  auto* project = app.add_subcommand("project", "project source graphs onto target sentences");
  c_project.attach(project);
  project->add_option("--source", src_path, "source graphs (.sdp)")->required();
  project->add_option("--forward", fwd_path, "source->target alignments (.align)")->required();
  project->add_option("--backward", bwd_path, "target->source alignments (.align)")->required();
  project->add_option("--target", tgt_path, "target sentences (.conllu or .sdp)")->required();
  project->add_option("--out", proj_out, "projected graphs with alignment masks (.sdp)")->required();
  project->add_option("--densities", dens_out, "write per-sentence alignment densities (tsv)");

  // sample
  Common c_sample;
  std::string sample_in, sample_out;
  std::size_t sample_size = 0;
  std::optional<double> threshold;
  auto* sample = app.add_subcommand("sample", "density-balanced sample of a projected corpus");
  c_sample.attach(sample);
  sample->add_option("--in", sample_in, "projected corpus (.sdp)")->required();
  sample->add_option("--size", sample_size, "sample size K (even)")->required();
  sample->add_option("--threshold", threshold, "density threshold T (default 0.8)");
  sample->add_option("--out", sample_out, "sampled corpus (.sdp)")->required();

  // split
  Common c_split;
  std::string split_in, split_train, split_held;
  std::optional<double> heldout;
  auto* split = app.add_subcommand("split", "split a corpus into train and heldout parts");
  c_split.attach(split);
  split->add_option("--in", split_in, "corpus (.sdp)")->required();
  split->add_option("--heldout", heldout, "heldout fraction (default 0.05)");
  split->add_option("--train-out", split_train, "training part (.sdp)")->required();
  split->add_option("--heldout-out", split_held, "heldout part (.sdp)")->required();

  // synth
  Common c_synth;
  std::string synth_dir;
  std::optional<int> s_count, s_min, s_max;
  std::optional<double> s_density, s_agree, s_noise;
  auto* synth = app.add_subcommand("synth", "generate a synthetic parallel corpus");
  c_synth.attach(synth);
  synth->add_option("--out", synth_dir, "output directory")->required();
  synth->add_option("--sentences", s_count, "number of sentence pairs");
  synth->add_option("--min-length", s_min, "minimum target length");
  synth->add_option("--max-length", s_max, "maximum target length");
  synth->add_option("--density", s_density, "target alignment density");
  synth->add_option("--agreement", s_agree, "syntactic/semantic head agreement rate");
  synth->add_option("--noise", s_noise, "source edge noise rate");

  // train
  Common c_train;
  std::string tr_train, tr_held, tr_syntax, tr_model, tr_log, tr_pre, tr_ctx_train, tr_ctx_held;
  std::string tasks_arg = "sem", share_arg;
  std::optional<int> epochs, patience, budget, word_dim, pos_dim, char_dim, lstm_dim, lstm_layers, fnn_dim, ctx_dim;
  std::optional<double> lambda, omega_syn, lr;
  bool combined = false;
  auto* trainc = app.add_subcommand("train", "train a parser on projected graphs");
  c_train.attach(trainc);
  trainc->add_option("--train", tr_train, "projected training graphs (.sdp)")->required();
  trainc->add_option("--heldout", tr_held, "projected heldout graphs (.sdp)")->required();
  trainc->add_option("--syntax", tr_syntax, "syntactic trees for the auxiliary task (.conllu)");
  trainc->add_option("--tasks", tasks_arg, "sem or sem,syn");
  trainc->add_option("--share", share_arg, "shared layers: rnn[,fnn][,taskrnn] or none (default from config)");
  trainc->add_option("--model", tr_model, "output checkpoint")->required();
  trainc->add_option("--log", tr_log, "metrics log (default: stdout)");
  trainc->add_option("--pretrained", tr_pre, "fixed pretrained word vectors (text)");
  trainc->add_option("--context-train", tr_ctx_train, "context vectors for the training graphs (.vec)");
  trainc->add_option("--context-heldout", tr_ctx_held, "context vectors for the heldout graphs (.vec)");
  trainc->add_option("--epochs", epochs, "maximum epochs");
  trainc->add_option("--patience", patience, "early-stopping patience");
  trainc->add_option("--token-budget", budget, "tokens per minibatch");
  trainc->add_option("--lambda", lambda, "label/edge loss interpolation");
  trainc->add_option("--omega-syn", omega_syn, "syntactic task weight (semantic gets 1 - w)");
  trainc->add_option("--lr", lr, "Adam learning rate");
  trainc->add_flag("--combined", combined, "combined sem+syn steps instead of alternating");
  trainc->add_option("--word-dim", word_dim, "word embedding size");
  trainc->add_option("--pos-dim", pos_dim, "POS embedding size");
  trainc->add_option("--char-dim", char_dim, "character embedding size");
  trainc->add_option("--lstm-dim", lstm_dim, "BiLSTM output size (both directions)");
  trainc->add_option("--lstm-layers", lstm_layers, "BiLSTM layers");
  trainc->add_option("--fnn-dim", fnn_dim, "FNN output size");
  trainc->add_option("--context-dim", ctx_dim, "context vector size");

  // parse
  Common c_parse;
  std::string pa_model, pa_in, pa_out, pa_ctx;
  auto* parse = app.add_subcommand("parse", "parse sentences with a trained model");
  c_parse.attach(parse);
  parse->add_option("--model", pa_model, "checkpoint")->required();
  parse->add_option("--input", pa_in, "sentences (.conllu or .sdp)")->required();
  parse->add_option("--out", pa_out, "predicted graphs (.sdp)")->required();
  parse->add_option("--context", pa_ctx, "context vectors (.vec)");

  // score
  Common c_score;
  std::string sc_pred, sc_gold, sc_out, sc_format = "kv";
  auto* score = app.add_subcommand("score", "labeled / unlabeled F1 of predicted graphs");
  c_score.attach(score);
  score->add_option("--pred", sc_pred, "predicted graphs (.sdp)")->required();
  score->add_option("--gold", sc_gold, "gold graphs (.sdp)")->required();
  score->add_option("--format", sc_format, "kv or table")->check(CLI::IsMember({"kv", "table"}));
  score->add_option("--out", sc_out, "report file (default: stdout)");

  // analyze
  Common c_analyze;
  std::string an_gold, an_a, an_b, an_trees, an_out;
  bool an_buckets = false, an_head = false, an_contrib = false;
  auto* analyze = app.add_subcommand("analyze", "dependency-length, head-match and label-contribution analyses");
  c_analyze.attach(analyze);
  analyze->add_option("--gold", an_gold, "gold graphs (.sdp)")->required();
  analyze->add_option("--pred-a", an_a, "predictions A (.sdp; the multitask model for --contribution)")->required();
  analyze->add_option("--pred-b", an_b, "predictions B (.sdp; the single-task model for --contribution)");
  analyze->add_option("--trees", an_trees, "syntactic trees of the gold sentences (.conllu)");
  auto* f_b = analyze->add_flag("--buckets", an_buckets, "labeled precision by dependency length");
  auto* f_h = analyze->add_flag("--headmatch", an_head, "syntactic head match / mismatch rates");
  auto* f_c = analyze->add_flag("--contribution", an_contrib, "improvements by syntactic label");
  f_b->excludes(f_h)->excludes(f_c);
  f_h->excludes(f_c);
  analyze->add_option("--out", an_out, "data series file (default: stdout)");

  // gradcheck
  Common c_grad;
  int gc_dim = 8;
  double gc_tol = 1e-4;
  bool gc_multi = false;
  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of the full parser loss");
  c_grad.attach(grad);
  grad->add_option("--dim", gc_dim, "every layer size (even, >= 2)");
  grad->add_option("--tolerance", gc_tol, "maximum relative error");
  grad->add_flag("--multitask", gc_multi, "include the syntactic loss and a task RNN");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*intersect) {
      PipelineConfig cfg = c_intersect.resolve();
      AlignmentFile f = load_alignments(fwd_path), b = load_alignments(bwd_path);
      if (f.size() != b.size())
        throw std::invalid_argument("alignment files have " + std::to_string(f.size()) + " and " +
                                    std::to_string(b.size()) + " lines");
      AlignmentFile result;
      for (std::size_t i = 0; i < f.size(); ++i) result.push_back(intersect_links(f[i], b[i]));
      std::ostringstream o;
      write_alignments(o, result);
      write_file(out_path, o.str());
      write_manifest(manifest_path(out_path), "intersect", {fwd_path, bwd_path}, {out_path}, to_json(cfg));
    } else if (*project) {
      PipelineConfig cfg = c_project.resolve();
      SdpDocument src = load_sdp(src_path);
      IdentifiedSentences tgt = load_sentences(tgt_path);
      std::vector<SemanticGraph> graphs;
      for (const auto& s : src) graphs.push_back(s.graph);
      auto proj = project_corpus(graphs, tgt.sentences, load_alignments(fwd_path), load_alignments(bwd_path));
      SdpDocument doc;
      std::string dens = "id\tdensity\n";
      for (std::size_t i = 0; i < proj.size(); ++i) {
        doc.push_back(SdpSentence::from_partial(src[i].id, proj[i]));
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", proj[i].density());
        dens += src[i].id + "\t" + buf + "\n";
      }
      write_file(proj_out, write_sdp(doc));
      if (!dens_out.empty()) write_file(dens_out, dens);
      write_manifest(manifest_path(proj_out), "project", {src_path, fwd_path, bwd_path, tgt_path}, {proj_out},
                     to_json(cfg));
    } else if (*sample) {
      PipelineConfig cfg = c_sample.resolve();
      const double t = threshold.value_or(cfg.density_threshold);
      SdpDocument doc = load_sdp(sample_in);
      std::vector<double> d;
      for (const auto& s : doc) d.push_back(s.partial().density());
      SdpDocument picked;
      for (std::size_t i : density_sample(d, sample_size, t, cfg.seed)) picked.push_back(doc[i]);
      write_file(sample_out, write_sdp(picked));
      Json j = to_json(cfg);
      j["projection"]["density_threshold"] = t;
      j["sample_size"] = sample_size;
      write_manifest(manifest_path(sample_out), "sample", {sample_in}, {sample_out}, j);
    } else if (*split) {
      PipelineConfig cfg = c_split.resolve();
      const double f = heldout.value_or(cfg.heldout_fraction);
      SdpDocument doc = load_sdp(split_in);
      Split s = heldout_split(doc.size(), f, cfg.seed);
      SdpDocument a, b;
      for (std::size_t i : s.train) a.push_back(doc[i]);
      for (std::size_t i : s.heldout) b.push_back(doc[i]);
      write_file(split_train, write_sdp(a));
      write_file(split_held, write_sdp(b));
      Json j = to_json(cfg);
      j["projection"]["heldout_fraction"] = f;
      write_manifest(manifest_path(split_train), "split", {split_in}, {split_train, split_held}, j);
    } else if (*synth) {
      PipelineConfig cfg = c_synth.resolve();
      if (s_count) cfg.synth.sentence_count = *s_count;
      if (s_min) cfg.synth.min_length = *s_min;
      if (s_max) cfg.synth.max_length = *s_max;
      if (s_density) cfg.synth.alignment_density = *s_density;
      if (s_agree) cfg.synth.syntactic_agreement = *s_agree;
      if (s_noise) cfg.synth.edge_noise = *s_noise;
      auto files = write_synth_corpus(synth_corpus(cfg.synth), synth_dir);
      write_manifest((fs::path(synth_dir) / "manifest.json").string(), "synth", {}, files, to_json(cfg));
    } else if (*trainc) {
      PipelineConfig cfg = c_train.resolve();
      if (!share_arg.empty()) cfg.sharing = parse_sharing(share_arg);
      if (epochs) cfg.train.max_epochs = *epochs;
      if (patience) cfg.train.patience = *patience;
      if (budget) cfg.train.token_budget = *budget;
      if (lambda) cfg.train.lambda_label = *lambda;
      if (omega_syn) {
        cfg.train.omega_syn = *omega_syn;
        cfg.train.omega_sem = 1.0 - *omega_syn;
      }
      if (lr) cfg.train.adam.lr = *lr;
      if (combined) cfg.train.combined_step = true;
      if (word_dim) cfg.network.word_dim = *word_dim;
      if (pos_dim) cfg.network.pos_dim = *pos_dim;
      if (char_dim) cfg.network.char_dim = *char_dim;
      if (lstm_dim) cfg.network.lstm_dim = *lstm_dim;
      if (lstm_layers) cfg.network.lstm_layers = *lstm_layers;
      if (fnn_dim) cfg.network.fnn_dim = *fnn_dim;
      if (ctx_dim) cfg.network.context_dim = *ctx_dim;
      cfg.network.validate();
      cfg.train.validate();

      std::vector<Task> tasks;
      for (std::size_t pos = 0; pos <= tasks_arg.size();) {
        std::size_t end = tasks_arg.find(',', pos);
        if (end == std::string::npos) end = tasks_arg.size();
        tasks.push_back(parse_task(tasks_arg.substr(pos, end - pos)));
        pos = end + 1;
      }
      if (tasks.empty() || tasks[0] != Task::kSemantic)
        throw std::invalid_argument("--tasks must start with sem (sem or sem,syn)");
      const bool multitask = tasks.size() > 1;
      if (multitask && tr_syntax.empty()) throw std::invalid_argument("--tasks sem,syn needs --syntax");
      if (!multitask && !tr_syntax.empty()) throw std::invalid_argument("--syntax given without --tasks sem,syn");

      TrainData data;
      std::vector<std::string> inputs = {tr_train, tr_held};
      for (const auto& s : load_sdp(tr_train)) data.sem_train.push_back(s.partial());
      for (const auto& s : load_sdp(tr_held)) data.sem_heldout.push_back(s.partial());
      if (multitask) {
        data.syn_train = load_trees(tr_syntax);
        inputs.push_back(tr_syntax);
      }
      auto counts = [](const std::vector<PartialGraph>& v) {
        std::vector<int> c;
        for (const auto& p : v) c.push_back(p.size());
        return c;
      };
      if (cfg.network.context_dim > 0) {
        if (tr_ctx_train.empty() || tr_ctx_held.empty())
          throw std::invalid_argument("context_dim > 0 needs --context-train and --context-heldout");
        data.sem_train_context = load_context(tr_ctx_train, cfg.network.context_dim, counts(data.sem_train));
        data.sem_heldout_context = load_context(tr_ctx_held, cfg.network.context_dim, counts(data.sem_heldout));
        inputs.push_back(tr_ctx_train);
        inputs.push_back(tr_ctx_held);
      } else if (!tr_ctx_train.empty() || !tr_ctx_held.empty()) {
        throw std::invalid_argument("context vectors given but context_dim is 0 (set --context-dim)");
      }
      std::optional<PretrainedTable> pre;
      if (!tr_pre.empty()) {
        pre = read_pretrained(tr_pre, cfg.network.word_dim);
        inputs.push_back(tr_pre);
      }

      std::vector<SemanticGraph> sem;
      for (const auto& p : data.sem_train) sem.push_back(p.graph);
      ParserModel model(cfg.network, cfg.sharing, tasks, build_vocabularies(sem, data.syn_train), cfg.seed,
                        pre ? &*pre : nullptr);
      std::ofstream log_file;
      std::ostream* log = &out;
      if (!tr_log.empty()) {
        log_file.open(tr_log);
        if (!log_file) throw std::runtime_error("cannot write '" + tr_log + "'");
        log = &log_file;
      }
      Json resolved = to_json(cfg);
      resolved["tasks"] = tasks_arg;
      *log << "config=" << resolved.dump() << '\n';
      TrainResult r = train(model, data, cfg.train, log);
      *log << "best_epoch=" << r.best_epoch << " best_heldout_lf=" << r.best_lf
           << " stopped_early=" << (r.stopped_early ? 1 : 0) << '\n';
      save_checkpoint(model, tr_model);
      std::vector<std::string> outs = {tr_model};
      if (!tr_log.empty()) outs.push_back(tr_log);
      log_file.close();
      write_manifest(manifest_path(tr_model), "train", inputs, outs, resolved);
    } else if (*parse) {
      PipelineConfig cfg = c_parse.resolve();
      auto model = load_checkpoint(pa_model);
      IdentifiedSentences in = load_sentences(pa_in);
      std::vector<std::string> inputs = {pa_model, pa_in};
      std::vector<ContextMatrix> ctx;
      if (model->config().context_dim > 0) {
        if (pa_ctx.empty()) throw std::invalid_argument("model uses context vectors; pass --context");
        std::vector<int> counts;
        for (const auto& s : in.sentences) counts.push_back(static_cast<int>(s.size()));
        ctx = load_context(pa_ctx, model->config().context_dim, counts);
        inputs.push_back(pa_ctx);
      } else if (!pa_ctx.empty()) {
        throw std::invalid_argument("model was trained without context vectors");
      }
      auto graphs = parse_corpus(*model, in.sentences, ctx.empty() ? nullptr : &ctx, cfg.threads);
      SdpDocument doc;
      for (std::size_t i = 0; i < graphs.size(); ++i) doc.push_back({in.ids[i], std::move(graphs[i]), std::nullopt});
      write_file(pa_out, write_sdp(doc));
      write_manifest(manifest_path(pa_out), "parse", inputs, {pa_out}, to_json(cfg));
    } else if (*score) {
      c_score.resolve();
      std::vector<SemanticGraph> p, g;
      for (auto& s : load_sdp(sc_pred)) p.push_back(std::move(s.graph));
      for (auto& s : load_sdp(sc_gold)) g.push_back(std::move(s.graph));
      ScoreReport r = score_graphs(p, g);
      const std::string text = sc_format == "kv" ? format_report_kv(r) : format_report_table(r);
      if (sc_out.empty()) out << text;
      else write_file(sc_out, text);
    } else if (*analyze) {
      c_analyze.resolve();
      if (!an_buckets && !an_head && !an_contrib)
        throw std::invalid_argument("choose one of --buckets, --headmatch, --contribution");
      auto graphs = [](const std::string& path) {
        std::vector<SemanticGraph> v;
        for (auto& s : load_sdp(path)) v.push_back(std::move(s.graph));
        return v;
      };
      auto gold = graphs(an_gold);
      auto a = graphs(an_a);
      std::string text;
      if (an_buckets) {
        text = format_buckets(length_buckets(a, gold));
      } else {
        if (an_b.empty() || an_trees.empty()) throw std::invalid_argument("this analysis needs --pred-b and --trees");
        auto b = graphs(an_b);
        auto trees = load_trees(an_trees);
        text = an_head ? format_head_match(head_match_stats(gold, trees, a, b))
                       : format_contribution(label_contribution(a, b, gold, trees));
      }
      if (an_out.empty()) out << text;
      else write_file(an_out, text);
    } else if (*grad) {
      PipelineConfig cfg = c_grad.resolve();
      ad::GradCheckOptions opt;
      opt.tolerance = gc_tol;
      auto r = parser_gradient_check(gc_dim, cfg.seed, gc_multi, opt);
      out << "max_rel_error=" << r.max_rel_error << " max_abs_error=" << r.max_abs_error
          << " worst_param=" << r.worst_param << " coords=" << r.coords_checked << " tolerance=" << r.tolerance
          << " passed=" << (r.passed ? 1 : 0) << '\n';
      return r.passed ? 0 : 2;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace xsdp
