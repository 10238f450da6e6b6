#include "regreg/value.hpp"

#include "regreg/utf8.hpp"

namespace regreg {

bool operator==(const Item& a, const Item& b) {
  if (a.kind != b.kind || a.value != b.value) return false;
  if (a.kind != Item::Kind::Seq) return true;
  return a.seq == b.seq || (a.seq && b.seq && *a.seq == *b.seq);
}

std::vector<Item> items_from_utf8(std::string_view text) {
  std::vector<Item> out;
  for (char32_t c : utf8::decode(text)) out.push_back(Item::scalar(c));
  return out;
}

std::string print_item(const Item& it) {
  switch (it.kind) {
    case Item::Kind::Scalar: {
      std::string out = "'";
      utf8::append(out, it.as_scalar());
      return out + "'";
    }
    case Item::Kind::Atom: return std::to_string(it.value);
    case Item::Kind::Seq: {
      std::string out = "[";
      for (std::size_t i = 0; i < it.seq->size(); ++i) {
        if (i) out += ", ";
        out += print_item((*it.seq)[i]);
      }
      return out + "]";
    }
  }
  return "?";
}

bool NumberValue::equals(const HostValue& other) const {
  auto* o = dynamic_cast<const NumberValue*>(&other);
  return o && o->v_ == v_;
}

Value Value::atom(Item item) {
  Value v;
  v.kind_ = Kind::Atom;
  v.item_ = std::move(item);
  return v;
}

Value Value::text(std::string text, Span span) {
  Value v;
  v.kind_ = Kind::Text;
  v.rep_ = std::make_shared<const Rep>(Rep{std::move(text), span, {}, nullptr});
  return v;
}

Value Value::list(std::vector<Value> elems) {
  Value v;
  v.kind_ = Kind::List;
  v.rep_ = std::make_shared<const Rep>(Rep{{}, {}, std::move(elems), nullptr});
  return v;
}

Value Value::node(std::string rule, std::vector<Value> children, Span span) {
  Value v;
  v.kind_ = Kind::Node;
  v.rep_ = std::make_shared<const Rep>(Rep{std::move(rule), span, std::move(children), nullptr});
  return v;
}

Value Value::host(std::shared_ptr<const HostValue> h) {
  Value v;
  v.kind_ = Kind::Host;
  v.rep_ = std::make_shared<const Rep>(Rep{{}, {}, {}, std::move(h)});
  return v;
}

const std::string& Value::text() const {
  static const std::string kEmpty;
  return rep_ ? rep_->text : kEmpty;
}

Span Value::span() const { return rep_ ? rep_->span : Span{}; }

const std::vector<Value>& Value::elems() const {
  static const std::vector<Value> kNone;
  return rep_ ? rep_->elems : kNone;
}

const HostValue* Value::host_value() const { return rep_ ? rep_->host.get() : nullptr; }

std::optional<std::int64_t> Value::as_int() const {
  if (kind_ == Kind::Atom && item_.kind != Item::Kind::Seq) return item_.value;
  if (kind_ == Kind::Host) {
    if (auto* n = dynamic_cast<const NumberValue*>(host_value())) return n->get();
  }
  return std::nullopt;
}

Value Value::frozen() const {
  switch (kind_) {
    case Kind::Host: return host(rep_->host ? rep_->host->freeze() : nullptr);
    case Kind::List:
    case Kind::Node: {
      bool any_host = false;
      for (const auto& e : rep_->elems) any_host |= e.kind_ == Kind::Host || !e.elems().empty();
      if (!any_host) return *this;
      std::vector<Value> out;
      out.reserve(rep_->elems.size());
      for (const auto& e : rep_->elems) out.push_back(e.frozen());
      return kind_ == Kind::List ? list(std::move(out)) : node(rep_->text, std::move(out), rep_->span);
    }
    default: return *this;
  }
}

Value Value::shifted(std::ptrdiff_t delta) const {
  if (delta == 0) return *this;
  auto mv = [delta](Span s) {
    return Span{static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.start) + delta),
                static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.end) + delta)};
  };
  switch (kind_) {
    case Kind::Text: return text(rep_->text, mv(rep_->span));
    case Kind::List:
    case Kind::Node: {
      std::vector<Value> out;
      out.reserve(rep_->elems.size());
      for (const auto& e : rep_->elems) out.push_back(e.shifted(delta));
      return kind_ == Kind::List ? list(std::move(out)) : node(rep_->text, std::move(out), mv(rep_->span));
    }
    default: return *this;
  }
}

namespace {

void quote(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
}

}  // namespace

std::string Value::print() const {
  switch (kind_) {
    case Kind::Nil: return "nil";
    case Kind::Atom: return print_item(item_);
    case Kind::Text: {
      std::string out;
      quote(out, rep_->text);
      return out;
    }
    case Kind::List:
    case Kind::Node: {
      std::string out;
      if (kind_ == Kind::Node) {
        out += rep_->text + "@" + std::to_string(rep_->span.start) + ":" + std::to_string(rep_->span.end);
        if (rep_->elems.empty()) return out;
        out += "(";
      } else {
        out += "[";
      }
      for (std::size_t i = 0; i < rep_->elems.size(); ++i) {
        if (i) out += ", ";
        out += rep_->elems[i].print();
      }
      out += kind_ == Kind::Node ? ")" : "]";
      return out;
    }
    case Kind::Host: return rep_->host ? rep_->host->print() : "host";
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::Nil: return true;
    case Value::Kind::Atom: return a.item_ == b.item_;
    case Value::Kind::Text: return a.rep_->text == b.rep_->text && a.rep_->span == b.rep_->span;
    case Value::Kind::List:
    case Value::Kind::Node:
      if (a.rep_ == b.rep_) return true;
      return a.rep_->text == b.rep_->text && a.rep_->span == b.rep_->span && a.rep_->elems == b.rep_->elems;
    case Value::Kind::Host: {
      const HostValue* x = a.host_value();
      const HostValue* y = b.host_value();
      if (!x || !y) return x == y;
      return x->equals(*y);
    }
  }
  return false;
}

std::vector<Item> value_to_items(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Atom:
      if (v.item().kind == Item::Kind::Seq) return *v.item().seq;
      return {v.item()};
    case Value::Kind::Text: return items_from_utf8(v.text());
    case Value::Kind::List: {
      std::vector<Item> out;
      for (const auto& e : v.elems()) {
        if (e.kind() == Value::Kind::Atom) {
          out.push_back(e.item());
        } else if (auto n = e.as_int()) {
          out.push_back(Item::atom(*n));
        } else {
          out.push_back(Item::sequence(value_to_items(e)));
        }
      }
      return out;
    }
    default: return {};
  }
}

}  // namespace regreg
