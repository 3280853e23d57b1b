#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minidot/syntax.hpp"

namespace minidot {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct RtBinding {
  VarRef name;
  ValuePtr value;
  // Static type the binding was introduced at (parameter annotation, self
  // type, fixpoint annotation, or F<: bound for type bindings).
  Ty type;
  bool type_binding = false;  // F<: `Y = <H,T>`
};

// Runtime environment H: persistent, newest binding first. Carries the
// static context it induces so that Γ(H) is available in O(1).
class RtEnv {
 public:
  RtEnv() = default;

  RtEnv extend(VarRef name, ValuePtr value, Ty type, bool type_binding = false) const;
  // Next positional name; matches the static checker's choice for Γ(H).
  VarRef fresh_name() const { return term_name_at(size()); }
  const RtBinding* lookup(const VarRef& name) const;
  std::size_t size() const { return head_ ? head_->size : 0; }
  bool empty() const { return head_ == nullptr; }
  std::vector<RtBinding> bindings() const;  // oldest first
  const TypingCtx& static_ctx() const;
  const void* id() const { return head_.get(); }
  // Drops everything newer than the first `n` bindings.
  RtEnv prefix(std::size_t n) const;

 private:
  struct Node {
    RtBinding binding;
    std::shared_ptr<const Node> next;
    std::size_t size;
    TypingCtx ctx;
  };
  explicit RtEnv(std::shared_ptr<const Node> h) : head_(std::move(h)) {}
  std::shared_ptr<const Node> head_;
};

enum class ValueKind { Closure, TyClosure, TyAbsClosure, Obj, Loc, FixThunk };

struct Value {
  ValueKind kind = ValueKind::Closure;
  RtEnv env;
  // Closure: parameter annotation. TyClosure: the type. TyAbsClosure: bound.
  // Obj: synthesized self type (BindSelf for objects, fields for records).
  // FixThunk: annotation under the fixpoint binder.
  Ty ty;
  Tm body;  // Closure / TyAbsClosure / FixThunk body; Obj: the source term
  bool has_self = false;  // Obj: DOT object (true) or record (false)
  int loc = -1;
  // Strict-field cache for objects, indexed like the declarations.
  mutable std::vector<ValuePtr> field_cache;

  const std::vector<Decl>& decls() const { return body.decls(); }
};

ValuePtr make_closure(RtEnv env, Ty annot, Tm body);
ValuePtr make_ty_closure(RtEnv env, Ty t);
ValuePtr make_loc(int loc);

struct StoreTypingEntry {
  RtEnv env;
  Ty type;
};

struct Store {
  std::vector<ValuePtr> cells;
  std::vector<StoreTypingEntry> typing;  // append-only, same domain as cells

  std::size_t size() const { return cells.size(); }
};

int alloc(Store& store, RtEnv env, Ty type, ValuePtr v);
ValuePtr read(const Store& store, int loc);  // null when unknown
bool write(Store& store, int loc, ValuePtr v);

enum class StoreEvent { Alloc, Read, Write };

struct EvalOptions {
  bool strict_fields = false;
  std::function<void(StoreEvent, int loc, const Store&)> observer;
};

struct EvalResult {
  enum class Kind { Timeout, Error, Val } kind = Kind::Timeout;
  ValuePtr value;
  std::string error;
  std::size_t fuel_used = 0;  // deepest fuel level reached

  bool timeout() const { return kind == Kind::Timeout; }
  bool error_result() const { return kind == Kind::Error; }
  bool val() const { return kind == Kind::Val; }
};

std::optional<ValuePtr> lookup(const RtEnv& env, const VarRef& x);

EvalResult eval(Level level, std::size_t fuel, const RtEnv& env, Store& store, const Tm& t,
                const EvalOptions& opts = {});

std::string describe(const ValuePtr& v, Level level = Level::DOT);
std::string_view result_tag(const EvalResult& r);

}  // namespace minidot
