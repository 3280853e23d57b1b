#include "minidot/fsub_bridge.hpp"

#include <stdexcept>

namespace minidot {

Ty encode_ty(const Ty& t) {
  if (!t) return t;
  switch (t.kind()) {
    case TyKind::Top:
      return t;
    case TyKind::FVarSub:
      return Ty::sel(t.var(), the_type_label());
    case TyKind::AllSub:
      return Ty::dep_fun(Ty::type_tag(Ty::bot(), encode_ty(t.a())), encode_ty(t.b()));
    case TyKind::ArrowSub:
      // The codomain moves under a new binder.
      return Ty::dep_fun(encode_ty(t.a()), shift_ty(encode_ty(t.b()), 1));
    default:
      throw std::invalid_argument("encode_ty: " + std::string(kind_name(t.kind())) + " is not an F<: type");
  }
}

Tm encode_tm(const Tm& t) {
  switch (t.kind()) {
    case TmKind::Var:
      return t;
    case TmKind::Lam:
      return Tm::lam(encode_ty(t.ty()), encode_tm(t.a()));
    case TmKind::App:
      return Tm::app(encode_tm(t.a()), encode_tm(t.b()));
    case TmKind::TyLamSub:
      return Tm::lam(Ty::type_tag(Ty::bot(), encode_ty(t.ty())), encode_tm(t.a()));
    case TmKind::TyAppSub:
      return Tm::app(encode_tm(t.a()), Tm::type_val(encode_ty(t.ty())));
    default:
      throw std::invalid_argument("encode_tm: " + std::string(kind_name(t.kind())) + " is not an F<: term");
  }
}

}  // namespace minidot
