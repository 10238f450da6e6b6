#pragma once

#include <cstdint>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regreg {

// One input position: a unicode scalar for text, or an opaque atom, or a
// whole sub-sequence that Enter can descend into.
struct Item {
  enum class Kind : std::uint8_t { Scalar, Atom, Seq };

  Kind kind = Kind::Scalar;
  std::int64_t value = 0;
  std::shared_ptr<const std::vector<Item>> seq;

  static Item scalar(char32_t c) { return Item{Kind::Scalar, static_cast<std::int64_t>(c), nullptr}; }
  static Item atom(std::int64_t v) { return Item{Kind::Atom, v, nullptr}; }
  static Item sequence(std::vector<Item> items) {
    return Item{Kind::Seq, 0, std::make_shared<const std::vector<Item>>(std::move(items))};
  }

  bool is_scalar() const { return kind == Kind::Scalar; }
  char32_t as_scalar() const { return static_cast<char32_t>(value); }

  friend bool operator==(const Item& a, const Item& b);
};

std::vector<Item> items_from_utf8(std::string_view text);
std::string print_item(const Item& it);

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

class HostValue {
 public:
  virtual ~HostValue() = default;
  // Returns a deeply immutable equivalent; called before a value is memoized.
  virtual std::shared_ptr<const HostValue> freeze() const = 0;
  virtual bool equals(const HostValue& other) const = 0;
  virtual std::string print() const = 0;
};

// Arbitrary-precision is out of scope; the calculator works on int64.
class NumberValue final : public HostValue {
 public:
  explicit NumberValue(std::int64_t v) : v_(v) {}
  std::int64_t get() const { return v_; }
  std::shared_ptr<const HostValue> freeze() const override { return std::make_shared<NumberValue>(v_); }
  bool equals(const HostValue& other) const override;
  std::string print() const override { return std::to_string(v_); }

 private:
  std::int64_t v_;
};

// Immutable semantic value. Copies share structure.
class Value {
 public:
  enum class Kind : std::uint8_t { Nil, Atom, Text, List, Node, Host };

  Value() = default;
  static Value atom(Item item);
  static Value text(std::string text, Span span);
  static Value list(std::vector<Value> elems);
  static Value node(std::string rule, std::vector<Value> children, Span span);
  static Value host(std::shared_ptr<const HostValue> h);
  static Value number(std::int64_t v) { return host(std::make_shared<NumberValue>(v)); }

  Kind kind() const { return kind_; }
  bool is_nil() const { return kind_ == Kind::Nil; }
  const Item& item() const { return item_; }
  const std::string& text() const;
  const std::string& rule() const { return text(); }
  Span span() const;
  const std::vector<Value>& elems() const;
  const std::vector<Value>& children() const { return elems(); }
  const HostValue* host_value() const;

  // int64 view of Atom(Atom|Scalar) and NumberValue hosts.
  std::optional<std::int64_t> as_int() const;

  Value frozen() const;
  Value shifted(std::ptrdiff_t delta) const;  // moves every span by delta

  std::string print() const;
  friend bool operator==(const Value& a, const Value& b);

 private:
  struct Rep {
    std::string text;  // Text payload or Node rule name
    Span span;
    std::vector<Value> elems;
    std::shared_ptr<const HostValue> host;
  };

  Kind kind_ = Kind::Nil;
  Item item_;
  std::shared_ptr<const Rep> rep_;
};

// Flattens a returned value into the item sequence Enter descends into.
std::vector<Item> value_to_items(const Value& v);

}  // namespace regreg
