#include "regreg/actions.hpp"

#include <cctype>

#include "regreg/errors.hpp"

namespace regreg {

void ActionRegistry::add(ActionSpec spec) {
  std::string key = spec.name;
  specs_.insert_or_assign(std::move(key), std::move(spec));
}

std::optional<ActionSpec> ActionRegistry::resolve(std::string_view name) const {
  if (auto it = specs_.find(name); it != specs_.end()) return it->second;
  if (name.starts_with(kLoadPrefix)) {
    std::string var(name.substr(kLoadPrefix.size()));
    return ActionSpec{std::string(name), ActionKind::Action,
                      [var](ActionContext& ctx) {
                        const Value* v = ctx.binding(var);
                        ctx.set_returned(v ? *v : Value{});
                        return true;
                      },
                      false, false};
  }
  if (name.starts_with(kLogPrefix) && name.size() > kLogPrefix.size()) {
    std::string tag(name.substr(kLogPrefix.size()));
    return ActionSpec{std::string(name), ActionKind::Action,
                      [tag](ActionContext& ctx) {
                        ctx.emit("log", Value::text(tag + "@" + std::to_string(ctx.position()), {}));
                        return true;
                      },
                      false, true};
  }
  return std::nullopt;
}

namespace {

std::int64_t int_binding(ActionContext& ctx, std::string_view name) {
  const Value* v = ctx.binding(name);
  if (!v) throw Error(ErrorCode::InvalidArgument, "action needs binding '" + std::string(name) + "'");
  auto n = v->as_int();
  if (!n) throw Error(ErrorCode::InvalidArgument, "binding '" + std::string(name) + "' is not a number");
  return *n;
}

ActionSpec arith(std::string name, std::int64_t (*op)(std::int64_t, std::int64_t)) {
  return ActionSpec{name, ActionKind::Action,
                    [op](ActionContext& ctx) {
                      ctx.set_returned(Value::number(op(int_binding(ctx, "x"), int_binding(ctx, "y"))));
                      return true;
                    },
                    false, false};
}

std::string flat_text(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Text: return v.text();
    case Value::Kind::Nil: return "";
    default: return v.print();
  }
}

}  // namespace

std::shared_ptr<const ActionRegistry> ActionRegistry::standard() {
  static const std::shared_ptr<const ActionRegistry> reg = [] {
    auto r = std::make_shared<ActionRegistry>();
    r->add(arith("add", [](std::int64_t a, std::int64_t b) { return a + b; }));
    r->add(arith("sub", [](std::int64_t a, std::int64_t b) { return a - b; }));
    r->add(arith("mul", [](std::int64_t a, std::int64_t b) { return a * b; }));
    r->add(arith("div", [](std::int64_t a, std::int64_t b) {
      if (b == 0) throw Error(ErrorCode::InvalidArgument, "division by zero");
      return a / b;
    }));
    r->add({"int", ActionKind::Action,
            [](ActionContext& ctx) {
              std::string t = ctx.matched_text();
              std::size_t b = 0, e = t.size();
              while (b < e && std::isspace(static_cast<unsigned char>(t[b]))) ++b;
              while (e > b && std::isspace(static_cast<unsigned char>(t[e - 1]))) --e;
              ctx.set_returned(Value::number(std::stoll(t.substr(b, e - b))));
              return true;
            },
            false, false});
    r->add({"x", ActionKind::Action,
            [](ActionContext& ctx) {
              const Value* v = ctx.binding("x");
              ctx.set_returned(v ? *v : Value{});
              return true;
            },
            false, false});
    r->add({"id", ActionKind::Action, [](ActionContext&) { return true; }, false, false});
    r->add({"text", ActionKind::Action,
            [](ActionContext& ctx) {
              ctx.set_returned(Value::text(ctx.matched_text(), ctx.rule_span()));
              return true;
            },
            false, false});
    r->add({"bracket", ActionKind::Action,
            [](ActionContext& ctx) {
              const Value* x = ctx.binding("x");
              const Value* y = ctx.binding("y");
              std::string s = "(" + (x ? flat_text(*x) : "") + "." + (y ? flat_text(*y) : "") + ")";
              ctx.set_returned(Value::text(std::move(s), {}));
              return true;
            },
            false, false});
    return std::shared_ptr<const ActionRegistry>(std::move(r));
  }();
  return reg;
}

}  // namespace regreg
