#include "xsdp/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "xsdp/config.h"

namespace xsdp {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'X', 'S', 'D', 'P', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(const std::string& s) : s_(s) {}
  template <class T>
  T get(const char* what) {
    T v;
    std::memcpy(&v, take(sizeof(T), what), sizeof(T));
    return v;
  }
  const char* take(std::size_t n, const char* what) {
    if (s_.size() - pos_ < n) throw CheckpointError(std::string("truncated checkpoint while reading ") + what);
    const char* p = s_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

Json vocab_json(const Vocab& v) { return Json(v.items()); }

Vocab vocab_from(const Json& j, bool with_unk, const char* what) {
  if (!j.is_array()) throw CheckpointError(std::string("checkpoint vocabulary '") + what + "' is not an array");
  try {
    return Vocab::from_items(j.get<std::vector<std::string>>(), with_unk);
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("bad checkpoint vocabulary '") + what + "': " + e.what());
  }
}

}  // namespace

std::string checkpoint_bytes(const ParserModel& model) {
  Json tasks = Json::array();
  for (Task t : model.tasks()) tasks.push_back(std::string(task_name(t)));
  const Vocabularies& v = model.vocab();
  Json header{{"format", "xsdp-checkpoint"},
              {"network", to_json(model.config())},
              {"sharing", to_json(model.topology())},
              {"tasks", tasks},
              {"seed", model.seed()},
              {"vocab",
               {{"words", vocab_json(v.words)},
                {"chars", vocab_json(v.chars)},
                {"pos", vocab_json(v.pos)},
                {"sem_labels", vocab_json(v.sem_labels)},
                {"syn_labels", vocab_json(v.syn_labels)},
                {"pretrained", vocab_json(model.pretrained_words())}}}};
  const std::string h = header.dump();
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, h.size());
  out += h;
  const auto params = model.params().all();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const ad::Parameter* p : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out += p->name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.cols()));
    out.append(reinterpret_cast<const char*>(p->value.data()), static_cast<std::size_t>(p->value.size()) * sizeof(double));
  }
  return out;
}

void save_checkpoint(const ParserModel& model, const std::string& path) {
  const std::string bytes = checkpoint_bytes(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("error writing checkpoint '" + path + "'");
}

std::unique_ptr<ParserModel> checkpoint_from_bytes(const std::string& bytes, const CheckpointExpectation& expect) {
  Cursor c(bytes);
  if (std::memcmp(c.take(sizeof kMagic, "magic"), kMagic, sizeof kMagic) != 0)
    throw CheckpointError("not an xsdp checkpoint (bad magic)");
  const auto version = c.get<std::uint32_t>("version");
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto hlen = c.get<std::uint64_t>("header length");
  const char* hp = c.take(hlen, "header");
  Json header;
  try {
    header = Json::parse(hp, hp + hlen);
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }

  NetworkConfig net;
  SharingTopology sharing;
  std::vector<Task> tasks;
  Vocabularies vocab;
  PretrainedTable pretrained;
  std::uint64_t seed;
  try {
    net = network_from_json(header.at("network"));
    sharing = sharing_from_json(header.at("sharing"));
    for (const auto& t : header.at("tasks")) tasks.push_back(parse_task(t.get<std::string>()));
    seed = header.at("seed").get<std::uint64_t>();
    const Json& v = header.at("vocab");
    vocab.words = vocab_from(v.at("words"), true, "words");
    vocab.chars = vocab_from(v.at("chars"), true, "chars");
    vocab.pos = vocab_from(v.at("pos"), true, "pos");
    vocab.sem_labels = vocab_from(v.at("sem_labels"), false, "sem_labels");
    vocab.syn_labels = vocab_from(v.at("syn_labels"), false, "syn_labels");
    pretrained.words = vocab_from(v.at("pretrained"), true, "pretrained");
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("invalid checkpoint header: ") + e.what());
  }
  if (expect.network && !(*expect.network == net))
    throw CheckpointError("checkpoint network config differs from the requested one: stored " + to_json(net).dump() +
                          ", requested " + to_json(*expect.network).dump());
  if (expect.sharing && !(*expect.sharing == sharing))
    throw CheckpointError("checkpoint sharing topology " + format_sharing(sharing) + " differs from requested " +
                          format_sharing(*expect.sharing));

  pretrained.vectors = Matrix::Zero(pretrained.words.size(), net.word_dim);
  std::unique_ptr<ParserModel> model;
  try {
    model = std::make_unique<ParserModel>(net, sharing, tasks, vocab, seed, &pretrained);
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("checkpoint describes an invalid model: ") + e.what());
  }

  const auto count = c.get<std::uint32_t>("tensor count");
  std::set<std::string> seen;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto nlen = c.get<std::uint32_t>("tensor name length");
    std::string name(c.take(nlen, "tensor name"), nlen);
    const auto rows = c.get<std::uint32_t>("tensor rows");
    const auto cols = c.get<std::uint32_t>("tensor cols");
    if (!model->params().contains(name)) throw CheckpointError("checkpoint tensor '" + name + "' is not part of the model");
    if (!seen.insert(name).second) throw CheckpointError("checkpoint tensor '" + name + "' appears twice");
    ad::Parameter& p = model->params().get(name);
    if (rows != p.value.rows() || cols != p.value.cols())
      throw CheckpointError("checkpoint tensor '" + name + "' is " + std::to_string(rows) + "x" + std::to_string(cols) +
                            ", model expects " + std::to_string(p.value.rows()) + "x" + std::to_string(p.value.cols()));
    const std::size_t bytes_n = static_cast<std::size_t>(rows) * cols * sizeof(double);
    std::memcpy(p.value.data(), c.take(bytes_n, "tensor values"), bytes_n);
  }
  if (seen.size() != model->params().size()) {
    for (const auto* p : model->params().all())
      if (!seen.count(p->name)) throw CheckpointError("checkpoint lacks tensor '" + p->name + "'");
  }
  if (!c.done()) throw CheckpointError("trailing bytes after checkpoint tensors");
  return model;
}

std::unique_ptr<ParserModel> load_checkpoint(const std::string& path, const CheckpointExpectation& expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_bytes(ss.str(), expect);
}

}  // namespace xsdp
