#include "xsdp/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace xsdp {

namespace {

// Visits every key of an object, rejecting keys without a handler.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument("config '" + where() + "' must be an object");
  }

  template <class T>
  Reader& field(const char* key, T& out) {
    handlers_[key] = [this, key, &out](const Json& v) { read(v, key, out); };
    return *this;
  }
  Reader& object(const char* key, std::function<void(const Json&, const std::string&)> fn) {
    handlers_[key] = [this, key, fn](const Json& v) { fn(v, join(key)); };
    return *this;
  }
  void run() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      auto h = handlers_.find(it.key());
      if (h == handlers_.end()) throw std::invalid_argument("unknown config key '" + join(it.key()) + "'");
      h->second(it.value());
    }
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  void read(const Json& v, const char* key, bool& out) {
    if (!v.is_boolean()) type_error(key, "a boolean");
    out = v.get<bool>();
  }
  void read(const Json& v, const char* key, int& out) {
    if (!v.is_number_integer()) type_error(key, "an integer");
    out = v.get<int>();
  }
  void read(const Json& v, const char* key, std::uint64_t& out) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      type_error(key, "a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void read(const Json& v, const char* key, double& out) {
    if (!v.is_number()) type_error(key, "a number");
    out = v.get<double>();
  }
  void read(const Json& v, const char* key, std::vector<std::string>& out) {
    if (!v.is_array()) type_error(key, "an array of strings");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_string()) type_error(key, "an array of strings");
      out.push_back(e.get<std::string>());
    }
  }
  [[noreturn]] void type_error(const char* key, const char* what) {
    throw std::invalid_argument("config key '" + join(key) + "' must be " + what);
  }

  const Json& j_;
  std::string path_;
  std::map<std::string, std::function<void(const Json&)>> handlers_;
};

NetworkConfig network_at(const Json& j, NetworkConfig c, const std::string& path) {
  Reader r(j, path);
  r.field("word_dim", c.word_dim)
      .field("pos_dim", c.pos_dim)
      .field("char_dim", c.char_dim)
      .field("lstm_dim", c.lstm_dim)
      .field("lstm_layers", c.lstm_layers)
      .field("fnn_dim", c.fnn_dim)
      .field("context_dim", c.context_dim)
      .field("biaffine_bias", c.biaffine_bias)
      .object("dropout", [&c](const Json& v, const std::string& p) {
        Reader d(v, p);
        d.field("word", c.dropout.word)
            .field("pos", c.dropout.pos)
            .field("recurrent", c.dropout.recurrent)
            .field("edge_fnn", c.dropout.edge_fnn)
            .field("label_fnn", c.dropout.label_fnn)
            .run();
      })
      .run();
  return c;
}

SharingTopology sharing_at(const Json& j, SharingTopology t, const std::string& path) {
  Reader(j, path).field("shared_rnn", t.shared_rnn).field("shared_fnn", t.shared_fnn).field("task_rnn", t.task_rnn).run();
  return t;
}

TrainConfig train_at(const Json& j, TrainConfig c, const std::string& path) {
  Reader(j, path)
      .field("lr", c.adam.lr)
      .field("beta1", c.adam.beta1)
      .field("beta2", c.adam.beta2)
      .field("eps", c.adam.eps)
      .field("token_budget", c.token_budget)
      .field("lambda_label", c.lambda_label)
      .field("omega_sem", c.omega_sem)
      .field("omega_syn", c.omega_syn)
      .field("max_epochs", c.max_epochs)
      .field("patience", c.patience)
      .field("seed", c.seed)
      .field("combined_step", c.combined_step)
      .field("eval_train", c.eval_train)
      .field("stop_lf", c.stop_lf)
      .run();
  return c;
}

SynthConfig synth_at(const Json& j, SynthConfig c, const std::string& path) {
  Reader(j, path)
      .field("sentence_count", c.sentence_count)
      .field("min_length", c.min_length)
      .field("max_length", c.max_length)
      .field("labels", c.labels)
      .field("alignment_density", c.alignment_density)
      .field("syntactic_agreement", c.syntactic_agreement)
      .field("edge_noise", c.edge_noise)
      .field("words_per_class", c.words_per_class)
      .field("seed", c.seed)
      .run();
  return c;
}

}  // namespace

Json to_json(const NetworkConfig& c) {
  return Json{{"word_dim", c.word_dim},
              {"pos_dim", c.pos_dim},
              {"char_dim", c.char_dim},
              {"lstm_dim", c.lstm_dim},
              {"lstm_layers", c.lstm_layers},
              {"fnn_dim", c.fnn_dim},
              {"context_dim", c.context_dim},
              {"biaffine_bias", c.biaffine_bias},
              {"dropout",
               {{"word", c.dropout.word},
                {"pos", c.dropout.pos},
                {"recurrent", c.dropout.recurrent},
                {"edge_fnn", c.dropout.edge_fnn},
                {"label_fnn", c.dropout.label_fnn}}}};
}

Json to_json(const SharingTopology& t) {
  return Json{{"shared_rnn", t.shared_rnn}, {"shared_fnn", t.shared_fnn}, {"task_rnn", t.task_rnn}};
}

Json to_json(const TrainConfig& c) {
  return Json{{"lr", c.adam.lr},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"eps", c.adam.eps},
              {"token_budget", c.token_budget},
              {"lambda_label", c.lambda_label},
              {"omega_sem", c.omega_sem},
              {"omega_syn", c.omega_syn},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"seed", c.seed},
              {"combined_step", c.combined_step},
              {"eval_train", c.eval_train},
              {"stop_lf", c.stop_lf}};
}

Json to_json(const SynthConfig& c) {
  return Json{{"sentence_count", c.sentence_count},
              {"min_length", c.min_length},
              {"max_length", c.max_length},
              {"labels", c.labels},
              {"alignment_density", c.alignment_density},
              {"syntactic_agreement", c.syntactic_agreement},
              {"edge_noise", c.edge_noise},
              {"words_per_class", c.words_per_class},
              {"seed", c.seed}};
}

Json to_json(const PipelineConfig& c) {
  return Json{{"seed", c.seed},
              {"network", to_json(c.network)},
              {"sharing", to_json(c.sharing)},
              {"train", to_json(c.train)},
              {"synth", to_json(c.synth)},
              {"projection", {{"heldout_fraction", c.heldout_fraction}, {"density_threshold", c.density_threshold}}},
              {"threads", c.threads}};
}

NetworkConfig network_from_json(const Json& j, NetworkConfig base) { return network_at(j, base, "network"); }
SharingTopology sharing_from_json(const Json& j, SharingTopology base) { return sharing_at(j, base, "sharing"); }
TrainConfig train_from_json(const Json& j, TrainConfig base) { return train_at(j, base, "train"); }
SynthConfig synth_from_json(const Json& j, SynthConfig base) { return synth_at(j, base, "synth"); }

PipelineConfig config_from_json(const Json& j, PipelineConfig c) {
  Reader(j, "")
      .field("seed", c.seed)
      .field("threads", c.threads)
      .object("network", [&c](const Json& v, const std::string& p) { c.network = network_at(v, c.network, p); })
      .object("sharing", [&c](const Json& v, const std::string& p) { c.sharing = sharing_at(v, c.sharing, p); })
      .object("train", [&c](const Json& v, const std::string& p) { c.train = train_at(v, c.train, p); })
      .object("synth", [&c](const Json& v, const std::string& p) { c.synth = synth_at(v, c.synth, p); })
      .object("projection",
              [&c](const Json& v, const std::string& p) {
                Reader(v, p)
                    .field("heldout_fraction", c.heldout_fraction)
                    .field("density_threshold", c.density_threshold)
                    .run();
              })
      .run();
  c.network.validate();
  c.sharing.validate();
  c.train.validate();
  validate_synth_config(c.synth);
  if (!(c.heldout_fraction > 0.0 && c.heldout_fraction < 1.0))
    throw std::invalid_argument("projection.heldout_fraction must be in (0, 1)");
  if (c.threads < 1) throw std::invalid_argument("threads must be positive");
  return c;
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace xsdp
