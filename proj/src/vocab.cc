#include "xsdp/vocab.h"

#include <stdexcept>

namespace xsdp {

Vocab::Vocab(bool with_unk) : with_unk_(with_unk) {
  if (with_unk_) add(std::string(kUnkString));
}

Vocab Vocab::from_items(const std::vector<std::string>& items, bool with_unk) {
  Vocab v(false);
  v.with_unk_ = with_unk;
  for (const auto& s : items) v.add(s);
  if (with_unk && (items.empty() || items[0] != kUnkString))
    throw std::invalid_argument("vocabulary with unknown entry must start with <unk>");
  return v;
}

int Vocab::add(const std::string& s) {
  auto it = index_.find(s);
  if (it != index_.end()) return it->second;
  const int id = size();
  items_.push_back(s);
  index_.emplace(s, id);
  return id;
}

std::optional<int> Vocab::find(const std::string& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocab::id(const std::string& s) const {
  if (auto f = find(s)) return *f;
  if (!with_unk_) throw std::out_of_range("'" + s + "' is not in the vocabulary");
  return kUnk;
}

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0 && c < 0xF8) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    if (c >= 0xF8 || i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace xsdp
