#ifndef XSDP_VOCAB_H_
#define XSDP_VOCAB_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xsdp {

// String <-> id table. With an unknown entry, id 0 is "<unk>" and absent
// strings map to it; label vocabularies have none.
class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr std::string_view kUnkString = "<unk>";

  explicit Vocab(bool with_unk = true);
  static Vocab from_items(const std::vector<std::string>& items, bool with_unk);

  int add(const std::string& s);
  std::optional<int> find(const std::string& s) const;
  // Unknown id for absent strings; throws if the vocabulary has no unknown entry.
  int id(const std::string& s) const;
  const std::string& str(int id) const { return items_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(items_.size()); }
  bool has_unk() const { return with_unk_; }
  // Every entry including "<unk>".
  const std::vector<std::string>& items() const { return items_; }

  bool operator==(const Vocab& o) const { return with_unk_ == o.with_unk_ && items_ == o.items_; }

 private:
  bool with_unk_;
  std::vector<std::string> items_;
  std::unordered_map<std::string, int> index_;
};

// Splits UTF-8 text into code points (invalid bytes become single units).
std::vector<std::string> utf8_chars(std::string_view s);

}  // namespace xsdp

#endif  // XSDP_VOCAB_H_
