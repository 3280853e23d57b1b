#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace minidot {

// The calculus ladder, ordered by feature inclusion (DSub .. Mut). FSub sits
// below DSub only through the bridge encoding, and DOT replaces lambdas,
// records and fix by objects.
enum class Level : std::uint8_t {
  FSub,
  DSub,
  DSubBot,
  DSubBotAndOr,
  DSubBotAndOrRec,
  DSubBotAndOrRecFix,
  DSubBotAndOrRecFixMut,
  DOT,
};

std::string_view level_name(Level level);
std::optional<Level> parse_level(std::string_view name);
const std::vector<Level>& all_levels();

enum class LabelKind : std::uint8_t { Type, Value, Method };

struct Label {
  LabelKind kind = LabelKind::Type;
  std::string name;

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;
};

Label type_label(std::string name);
Label value_label(std::string name);
Label method_label(std::string name);
// The single global type label of the D levels.
const Label& the_type_label();

enum class Namespace : std::uint8_t { Term, Compare };

struct VarRef {
  bool bound = false;
  int index = 0;
  Namespace ns = Namespace::Term;
  std::string name;

  static VarRef bound_at(int index);
  static VarRef term(std::string name);
  static VarRef compare(std::string name);

  bool is_free() const { return !bound; }
  friend bool operator==(const VarRef&, const VarRef&) = default;
  friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

// ---------------------------------------------------------------------------
// Types

enum class TyKind : std::uint8_t {
  Top,
  Bot,
  And,
  Or,
  TypeMem,   // L : lo .. hi
  Fld,       // l : T
  Method,    // m(x:S):U^x, result under one binder
  Sel,       // x.L
  BindSelf,  // rec(z) T^z
  DepFun,    // all(x:S) U^x
  TypeTag,   // { Type = lo .. hi }
  RefTy,
  FVarSub,   // F<: type variable
  AllSub,    // all(X<:S) T^X
  ArrowSub,  // S -> T
};

struct TyNode;

// Immutable, structurally shared type handle. A default-constructed Ty is
// "absent" and is used for optional annotations.
class Ty {
 public:
  Ty() = default;

  static Ty top();
  static Ty bot();
  static Ty and_(Ty a, Ty b);
  static Ty or_(Ty a, Ty b);
  static Ty type_mem(Label l, Ty lo, Ty hi);
  static Ty fld(Label l, Ty t);
  static Ty method(Label m, Ty param, Ty result);
  static Ty sel(VarRef x, Label l);
  static Ty bind_self(Ty body);
  static Ty dep_fun(Ty param, Ty result);
  static Ty type_tag(Ty lo, Ty hi);
  static Ty ref(Ty t);
  static Ty fvar(VarRef x);
  static Ty all_sub(Ty bound, Ty body);
  static Ty arrow(Ty a, Ty b);

  explicit operator bool() const { return node_ != nullptr; }
  TyKind kind() const;
  const Label& label() const;
  const VarRef& var() const;
  // First/second child; meaning depends on kind (lo/hi, param/result, ...).
  const Ty& a() const;
  const Ty& b() const;
  const TyNode* raw() const { return node_.get(); }

  friend bool operator==(const Ty& x, const Ty& y);

 private:
  explicit Ty(std::shared_ptr<const TyNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TyNode> node_;
};

struct TyNode {
  TyKind kind;
  Label label;
  VarRef var;
  Ty a;
  Ty b;
};

// ---------------------------------------------------------------------------
// Terms

enum class TmKind : std::uint8_t {
  Var,
  Lam,
  App,
  TyLamSub,
  TyAppSub,
  TypeVal,
  Rec,
  SelField,
  InvokeMethod,
  Obj,
  Fix,
  RefNew,
  Deref,
  Assign,
  Loc,
};

enum class DeclKind : std::uint8_t { TypeInit, FieldInit, MethodInit };

class Tm;
struct TmNode;

struct Decl {
  DeclKind kind = DeclKind::TypeInit;
  Label label;
  // TypeInit: the type. FieldInit: optional annotation. MethodInit: parameter type.
  Ty ty;
  // MethodInit: optional result annotation, under the parameter binder.
  Ty result;
  // FieldInit: initializer. MethodInit: body, under the parameter binder.
  std::shared_ptr<const TmNode> body;

  static Decl type_init(Label l, Ty t);
  static Decl field_init(Label l, Tm t, Ty annot = {});
  static Decl method_init(Label m, Ty param, Tm body, Ty result = {});
  Tm body_tm() const;
  friend bool operator==(const Decl& x, const Decl& y);
};

class Tm {
 public:
  Tm() = default;

  static Tm var(VarRef x);
  static Tm lam(Ty annot, Tm body);
  static Tm app(Tm f, Tm a);
  static Tm ty_lam(Ty bound, Tm body);
  static Tm ty_app(Tm f, Ty arg);
  static Tm type_val(Ty t);
  static Tm rec(std::vector<Decl> decls);
  static Tm sel_field(Tm t, Label l);
  static Tm invoke(Tm t, Label m, Tm arg);
  // Self annotation and declarations live under the self binder.
  static Tm obj(std::vector<Decl> decls, Ty self_annot = {});
  static Tm fix(Ty annot, Tm body);
  static Tm ref_new(Tm t);
  static Tm deref(Tm t);
  static Tm assign(Tm target, Tm value);
  static Tm loc(int id);

  explicit operator bool() const { return node_ != nullptr; }
  TmKind kind() const;
  const VarRef& var() const;
  const Label& label() const;
  const Ty& ty() const;
  const Tm& a() const;
  const Tm& b() const;
  const std::vector<Decl>& decls() const;
  int loc_id() const;
  const TmNode* raw() const { return node_.get(); }
  const std::shared_ptr<const TmNode>& ptr() const { return node_; }
  static Tm from_ptr(std::shared_ptr<const TmNode> p) { return Tm(std::move(p)); }

  friend bool operator==(const Tm& x, const Tm& y);

 private:
  explicit Tm(std::shared_ptr<const TmNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TmNode> node_;
};

struct TmNode {
  TmKind kind;
  VarRef var;
  Label label;
  Ty ty;
  Tm a;
  Tm b;
  std::vector<Decl> decls;
  int loc = -1;
};

// ---------------------------------------------------------------------------
// Typing contexts: persistent list, newest binding first.

struct Binding {
  VarRef name;  // always free
  Ty type;
};

class TypingCtx {
 public:
  TypingCtx() = default;

  // Term bindings must not be appended after comparison bindings.
  TypingCtx extend(VarRef name, Ty type) const;
  std::optional<Ty> lookup(const VarRef& name) const;
  bool contains(const VarRef& name) const;
  std::size_t size() const;
  std::size_t term_count() const;
  std::size_t compare_count() const;
  // Oldest first.
  std::vector<Binding> bindings() const;
  bool empty() const { return head_ == nullptr; }
  // Identity of the underlying list node; equal ids mean equal contexts.
  const void* id() const { return head_.get(); }

  friend bool operator==(const TypingCtx& x, const TypingCtx& y);

 private:
  struct Node {
    Binding binding;
    std::shared_ptr<const Node> next;
    std::size_t size;
    std::size_t terms;
  };
  explicit TypingCtx(std::shared_ptr<const Node> h) : head_(std::move(h)) {}
  std::shared_ptr<const Node> head_;
  friend TypingCtx ctx_restrict_impl(const TypingCtx&, const VarRef&);
};

// Drops comparison bindings strictly to the right of x. Throws
// std::invalid_argument when x is unbound.
TypingCtx ctx_restrict(const TypingCtx& ctx, const VarRef& x);

// Positional fresh names shared by the static checker and the evaluator, so
// that a runtime environment and its static context agree name by name.
VarRef term_name_at(std::size_t position);

// ---------------------------------------------------------------------------
// Locally nameless kit

Ty open_ty(const Ty& t, const VarRef& v);
Ty open_ty_at(const Ty& t, int depth, const VarRef& v);
Ty close_ty(const Ty& t, const VarRef& v);
// Replaces the outermost bound type variable (FVarSub) by a type.
Ty open_ty_with(const Ty& t, const Ty& replacement);
Ty subst_ty_in_ty(const Ty& t, const VarRef& from, const VarRef& to);
Ty shift_ty(const Ty& t, int by, int cutoff = 0);

Tm open_tm(const Tm& t, const VarRef& v);
Tm close_tm(const Tm& t, const VarRef& v);
// Replaces the outermost bound variable by the term `value`; occurrences in
// type positions become `name` (which must denote the same thing).
Tm open_tm_with(const Tm& t, const Tm& value, const VarRef& name);
Decl open_decl(const Decl& d, const VarRef& v);

std::set<VarRef> fv(const Ty& t);
std::set<VarRef> fv(const Tm& t);
bool mentions(const Ty& t, const VarRef& v);
bool mentions_bound(const Ty& t, int depth = 0);
bool mentions_bound(const Tm& t, int depth = 0);
bool mentions_namespace(const Ty& t, Namespace ns);
// Bound index `depth` occurs inside some type annotation of t.
bool mentions_bound_in_types(const Tm& t, int depth = 0);
// Rewrites Sel / FVarSub leaves; `fn` gets the leaf and its binder depth.
Ty map_leaves(const Ty& t, const std::function<std::optional<Ty>(const Ty& leaf, int depth)>& fn);
// No dangling bound indices.
bool locally_closed(const Ty& t, int depth = 0);
bool locally_closed(const Tm& t, int depth = 0);

int size(const Ty& t);
int size(const Tm& t);

// Grammar admission per level. Loc is never admitted (not source syntax).
bool gate_type(Level level, const Ty& t);
bool gate_term(Level level, const Tm& t);
// Name of the first constructor rejected at `level`, if any.
std::optional<std::string> gate_type_offender(Level level, const Ty& t);
std::optional<std::string> gate_term_offender(Level level, const Tm& t);

bool wf(const TypingCtx& ctx, const Ty& t);

std::string_view kind_name(TyKind k);
std::string_view kind_name(TmKind k);

}  // namespace minidot
