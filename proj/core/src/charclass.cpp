#include "regreg/charclass.hpp"

#include <algorithm>

#include "regreg/utf8.hpp"

namespace regreg {

namespace {

std::vector<CharRange> normalize(std::vector<CharRange> rs) {
  for (auto& r : rs) {
    if (r.lo > r.hi) std::swap(r.lo, r.hi);
    r.hi = std::min(r.hi, kMaxScalar);
  }
  rs.erase(std::remove_if(rs.begin(), rs.end(), [](const CharRange& r) { return r.lo > kMaxScalar; }),
           rs.end());
  std::sort(rs.begin(), rs.end());
  std::vector<CharRange> out;
  for (const auto& r : rs) {
    if (!out.empty() && r.lo <= out.back().hi + 1) {
      out.back().hi = std::max(out.back().hi, r.hi);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<CharRange> complement_ranges(const std::vector<CharRange>& rs) {
  std::vector<CharRange> out;
  char32_t next = 0;
  for (const auto& r : rs) {
    if (r.lo > next) out.push_back({next, r.lo - 1});
    next = r.hi + 1;
  }
  if (next <= kMaxScalar) out.push_back({next, kMaxScalar});
  return out;
}

void append_escaped(std::string& out, char32_t c) {
  switch (c) {
    case '\n': out += "\\n"; return;
    case '\r': out += "\\r"; return;
    case '\t': out += "\\t"; return;
    case '\\': out += "\\\\"; return;
    case '>': out += "\\>"; return;
    case '-': out += "\\-"; return;
    case '\'': out += "\\'"; return;
    case '"': out += "\\\""; return;
    default: utf8::append(out, c);
  }
}

}  // namespace

CharClassSet CharClassSet::single(char32_t c) { return from_ranges({{c, c}}); }

CharClassSet CharClassSet::range(char32_t lo, char32_t hi) { return from_ranges({{lo, hi}}); }

CharClassSet CharClassSet::from_ranges(std::vector<CharRange> ranges, bool negated) {
  CharClassSet s;
  s.ranges_ = normalize(std::move(ranges));
  s.negated_ = negated;
  return s;
}

CharClassSet CharClassSet::all() { return from_ranges({}, true); }

bool CharClassSet::contains(char32_t c) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), c,
                             [](char32_t v, const CharRange& r) { return v < r.lo; });
  bool in = it != ranges_.begin() && c <= std::prev(it)->hi;
  return in != negated_;
}

std::optional<char32_t> CharClassSet::single_char() const {
  if (negated_ || ranges_.size() != 1 || ranges_[0].lo != ranges_[0].hi) return std::nullopt;
  return ranges_[0].lo;
}

CharClassSet CharClassSet::positive() const {
  if (!negated_) return *this;
  CharClassSet s;
  s.ranges_ = complement_ranges(ranges_);
  return s;
}

CharClassSet CharClassSet::complement() const {
  CharClassSet s;
  s.ranges_ = complement_ranges(positive().ranges_);
  return s;
}

CharClassSet CharClassSet::intersect(const CharClassSet& other) const {
  auto a = positive().ranges_;
  auto b = other.positive().ranges_;
  std::vector<CharRange> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    char32_t lo = std::max(a[i].lo, b[j].lo);
    char32_t hi = std::min(a[i].hi, b[j].hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return from_ranges(std::move(out));
}

CharClassSet CharClassSet::unite(const CharClassSet& other) const {
  auto a = positive().ranges_;
  const auto& b = other.positive().ranges_;
  a.insert(a.end(), b.begin(), b.end());
  return from_ranges(std::move(a));
}

bool CharClassSet::is_canonical() const {
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    if (ranges_[i].lo > ranges_[i].hi || ranges_[i].hi > kMaxScalar) return false;
    if (i > 0 && ranges_[i].lo <= ranges_[i - 1].hi + 1) return false;
  }
  return true;
}

std::size_t CharClassSet::hash() const {
  std::size_t h = negated_ ? 0x9e3779b97f4a7c15ULL : 0;
  for (const auto& r : ranges_) {
    h ^= (static_cast<std::size_t>(r.lo) << 21 | r.hi) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::string CharClassSet::to_string() const {
  if (auto c = single_char()) {
    std::string out = "'";
    append_escaped(out, *c);
    return out + "'";
  }
  std::string body;
  bool caret = false;
  for (const auto& r : ranges_) {
    for (char32_t c = r.lo;; ++c) {
      if (c == '^') {
        caret = true;  // emitted last so it is never read as negation
      } else if (r.hi - r.lo >= 2 && c == r.lo && r.lo != '^' && r.hi != '^') {
        append_escaped(body, r.lo);
        body += '-';
        append_escaped(body, r.hi);
        break;
      } else {
        append_escaped(body, c);
      }
      if (c == r.hi) break;
    }
  }
  if (caret) body += '^';
  return std::string(negated_ ? "<^" : "<") + body + ">";
}

}  // namespace regreg
