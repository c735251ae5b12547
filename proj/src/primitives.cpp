#include "evosal/primitives.hpp"

#include "evosal/errors.hpp"
#include "evosal/morphology.hpp"
#include "evosal/operators.hpp"

#include <initializer_list>

namespace evosal {

namespace {

constexpr std::uint8_t O = role_bit(Role::Orientation);
constexpr std::uint8_t C = role_bit(Role::Color);
constexpr std::uint8_t S = role_bit(Role::Shape);
constexpr std::uint8_t I = role_bit(Role::Integration);

using Op = Primitive::Op;

struct FunctionRow {
    const char* token;
    Op op;
    int arity;
    bool constant;
    std::uint8_t roles;
};

// One row per function primitive; the role mask lists every tree that may use it.
const FunctionRow kFunctions[] = {
    {"add", Op::Add, 2, false, O | C | S | I},
    {"sub", Op::Sub, 2, false, O | C | S | I},
    {"mul", Op::Mul, 2, false, O | C | S | I},
    {"div", Op::Div, 2, false, O | C | S | I},
    {"abs", Op::Abs, 1, false, O | C | S | I},
    {"absadd", Op::AbsAdd, 2, false, O | I},
    {"abssub", Op::AbsSub, 2, false, O | I},
    {"log2", Op::Log2, 1, false, O | C},
    {"half", Op::Half, 1, false, O},
    {"pow2", Op::Square, 1, false, O | C | I},
    {"sqrt", Op::Sqrt, 1, false, O | C | I},
    {"exp", Op::Exp, 1, false, C | I},
    {"comp", Op::Complement, 1, false, C},
    {"kmul", Op::KMul, 1, true, O | C | S | I},
    {"kdiv", Op::KDiv, 1, true, O | C | S | I},
    {"kroot", Op::KRoot, 1, true, O | C | S | I},
    {"kpow", Op::KPow, 1, true, O | C | S | I},
    {"kaddinv", Op::KAddInv, 1, true, O | C | S | I},
    {"ksubinv", Op::KSubInv, 1, true, O | C | S | I},
    {"gauss1", Op::Gauss1, 1, false, O | I},
    {"gauss2", Op::Gauss2, 1, false, O | I},
    {"dx", Op::Dx, 1, false, O | I},
    {"dy", Op::Dy, 1, false, O | I},
    {"round", Op::Round, 1, false, O | C | S | I},
    {"floor", Op::Floor, 1, false, O | C | S | I},
    {"ceil", Op::Ceil, 1, false, O | C | S | I},
    {"inf", Op::Inf, 2, false, O},
    {"sup", Op::Sup, 2, false, O},
    {"thr", Op::Threshold, 1, false, O | C | S | I},
    {"attn", Op::Attenuate, 1, false, O},
    {"gabor", Op::Gabor, 1, false, O},
    {"hist", Op::Hist, 1, false, I},
    {"dilate_disk", Op::DilateDisk, 1, false, S},
    {"dilate_square", Op::DilateSquare, 1, false, S},
    {"dilate_diamond", Op::DilateDiamond, 1, false, S},
    {"erode_disk", Op::ErodeDisk, 1, false, S},
    {"erode_square", Op::ErodeSquare, 1, false, S},
    {"erode_diamond", Op::ErodeDiamond, 1, false, S},
    {"skeleton", Op::Skeleton, 1, false, S},
    {"perimeter", Op::Perimeter, 1, false, S},
    {"hitmiss_disk", Op::HitMissDisk, 1, false, S},
    {"hitmiss_square", Op::HitMissSquare, 1, false, S},
    {"hitmiss_diamond", Op::HitMissDiamond, 1, false, S},
    {"tophat", Op::TopHat, 1, false, S},
    {"bottomhat", Op::BottomHat, 1, false, S},
    {"open_square", Op::OpenSquare, 1, false, S},
    {"close_square", Op::CloseSquare, 1, false, S},
};

constexpr const char* kSourceTokens[kFeatureSourceCount] = {
    "I_r", "I_g", "I_b", "I_c", "I_m", "I_y", "I_k", "I_h", "I_s", "I_v",
    "DKL_r", "DKL_phi", "DKL_theta", "Op_rg", "Op_by"};

constexpr const char* kDimensionTokens[kDimensionCount] = {"CM_O", "CM_C", "CM_S", "CM_Int", "CM_MM"};

} // namespace

std::string_view role_name(Role role)
{
    switch (role) {
    case Role::Orientation:
        return "EVO_O";
    case Role::Color:
        return "EVO_C";
    case Role::Shape:
        return "EVO_S";
    case Role::Integration:
        return "EFI";
    }
    return "?";
}

std::optional<Role> role_from_name(std::string_view name)
{
    for (Role r : kRoles)
        if (role_name(r) == name)
            return r;
    return std::nullopt;
}

std::string_view form_prefix(Form form)
{
    switch (form) {
    case Form::Identity:
        return "";
    case Form::Dx:
        return "Dx.";
    case Form::Dxx:
        return "Dxx.";
    case Form::Dy:
        return "Dy.";
    case Form::Dyy:
        return "Dyy.";
    case Form::Dxy:
        return "Dxy.";
    case Form::Attenuate:
        return "Attn.";
    case Form::Gabor:
        return "Gabor.";
    }
    return "";
}

Registry::Registry()
{
    auto add = [this](Primitive p) {
        const auto id = static_cast<PrimId>(prims_.size());
        for (Role r : kRoles)
            if (p.allowed_in(r))
                (p.is_terminal() ? terminals_ : functions_)[static_cast<std::size_t>(r)].push_back(id);
        prims_.push_back(std::move(p));
    };

    for (const auto& row : kFunctions)
        add(Primitive{row.token, row.op, row.arity, row.constant, row.roles, {}});

    auto feature = [&](std::size_t src, Form form, std::uint8_t roles) {
        add(Primitive{std::string(form_prefix(form)) + kSourceTokens[src], Op::Terminal, 0, false, roles,
                      TerminalSpec{false, static_cast<std::uint8_t>(src), form}});
    };
    // Color channels: plain in every feature tree; derived forms only in orientation.
    for (std::size_t ch = 0; ch < 10; ++ch)
        feature(ch, Form::Identity, O | C | S);
    for (Form form : {Form::Dx, Form::Dxx, Form::Dy, Form::Dyy, Form::Dxy, Form::Attenuate, Form::Gabor})
        for (std::size_t ch = 0; ch < 10; ++ch)
            feature(ch, form, O);
    for (std::size_t src = 10; src < kFeatureSourceCount; ++src)
        feature(src, Form::Identity, C);

    for (Form form : {Form::Identity, Form::Dx, Form::Dxx, Form::Dy, Form::Dyy, Form::Dxy})
        for (std::size_t d = 0; d < kDimensionCount; ++d)
            add(Primitive{std::string(form_prefix(form)) + kDimensionTokens[d], Op::Terminal, 0, false, I,
                          TerminalSpec{true, static_cast<std::uint8_t>(d), form}});
}

const Registry& Registry::instance()
{
    static const Registry registry;
    return registry;
}

std::optional<PrimId> Registry::find(std::string_view token) const
{
    for (std::size_t i = 0; i < prims_.size(); ++i)
        if (prims_[i].token == token)
            return static_cast<PrimId>(i);
    return std::nullopt;
}

ScalarMap apply_form(Form form, const ScalarMap& base)
{
    switch (form) {
    case Form::Identity:
        return base;
    case Form::Dx:
        return ops::dx(base);
    case Form::Dxx:
        return ops::dxx(base);
    case Form::Dy:
        return ops::dy(base);
    case Form::Dyy:
        return ops::dyy(base);
    case Form::Dxy:
        return ops::dxy(base);
    case Form::Attenuate:
        return ops::attenuate_borders(base);
    case Form::Gabor:
        return ops::gabor(base);
    }
    return base;
}

ScalarMap apply_primitive(const Primitive& p, std::span<const ScalarMap> args, double k)
{
    if (p.is_terminal() || static_cast<int>(args.size()) != p.arity)
        throw ContractViolation("apply_primitive: bad arguments for '" + p.token + "'");
    using morph::Element;
    const ScalarMap& a = args[0];
    switch (p.op) {
    case Op::Add:
        return ops::add(a, args[1]);
    case Op::Sub:
        return ops::sub(a, args[1]);
    case Op::Mul:
        return ops::mul(a, args[1]);
    case Op::Div:
        return ops::div(a, args[1]);
    case Op::AbsAdd:
        return ops::abs_add(a, args[1]);
    case Op::AbsSub:
        return ops::abs_sub(a, args[1]);
    case Op::Inf:
        return ops::inf(a, args[1]);
    case Op::Sup:
        return ops::sup(a, args[1]);
    case Op::Abs:
        return ops::abs(a);
    case Op::Log2:
        return ops::log2(a);
    case Op::Half:
        return ops::half(a);
    case Op::Square:
        return ops::square(a);
    case Op::Sqrt:
        return ops::sqrt(a);
    case Op::Exp:
        return ops::exp(a);
    case Op::Complement:
        return ops::complement(a);
    case Op::Threshold:
        return ops::threshold(a);
    case Op::Round:
        return ops::round(a);
    case Op::Floor:
        return ops::floor(a);
    case Op::Ceil:
        return ops::ceil(a);
    case Op::Gauss1:
        return ops::gaussian(a, 1.0);
    case Op::Gauss2:
        return ops::gaussian(a, 2.0);
    case Op::Dx:
        return ops::dx(a);
    case Op::Dy:
        return ops::dy(a);
    case Op::Attenuate:
        return ops::attenuate_borders(a);
    case Op::Gabor:
        return ops::gabor(a);
    case Op::Hist:
        return ops::hist_equalize(a);
    case Op::KMul:
        return ops::scale(a, k);
    case Op::KDiv:
        return ops::divide_by(a, k);
    case Op::KRoot:
        return ops::root(a, k);
    case Op::KPow:
        return ops::power(a, k);
    case Op::KAddInv:
        return ops::add_reciprocal(a, k);
    case Op::KSubInv:
        return ops::sub_reciprocal(a, k);
    case Op::DilateDisk:
        return morph::dilate(a, Element::Disk);
    case Op::DilateSquare:
        return morph::dilate(a, Element::Square);
    case Op::DilateDiamond:
        return morph::dilate(a, Element::Diamond);
    case Op::ErodeDisk:
        return morph::erode(a, Element::Disk);
    case Op::ErodeSquare:
        return morph::erode(a, Element::Square);
    case Op::ErodeDiamond:
        return morph::erode(a, Element::Diamond);
    case Op::Skeleton:
        return morph::skeleton(a);
    case Op::Perimeter:
        return morph::perimeter(a);
    case Op::HitMissDisk:
        return morph::hit_or_miss(a, Element::Disk);
    case Op::HitMissSquare:
        return morph::hit_or_miss(a, Element::Square);
    case Op::HitMissDiamond:
        return morph::hit_or_miss(a, Element::Diamond);
    case Op::TopHat:
        return morph::top_hat(a);
    case Op::BottomHat:
        return morph::bottom_hat(a);
    case Op::OpenSquare:
        return morph::open(a, Element::Square);
    case Op::CloseSquare:
        return morph::close(a, Element::Square);
    case Op::Terminal:
        break;
    }
    throw ContractViolation("apply_primitive: unhandled op '" + p.token + "'");
}

} // namespace evosal
