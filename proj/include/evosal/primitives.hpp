#pragma once

#include "evosal/scalar_map.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evosal {

/// Tree roles in chromosome order.
enum class Role : std::uint8_t { Orientation = 0, Color = 1, Shape = 2, Integration = 3 };
inline constexpr std::array<Role, 4> kRoles = {Role::Orientation, Role::Color, Role::Shape, Role::Integration};

/// "EVO_O", "EVO_C", "EVO_S", "EFI"
std::string_view role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);

inline constexpr std::uint8_t role_bit(Role r) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r)); }

/// Derived form applied to a base terminal map.
enum class Form : std::uint8_t { Identity, Dx, Dxx, Dy, Dyy, Dxy, Attenuate, Gabor };
inline constexpr std::size_t kFormCount = 8;

/// Base maps of the feature terminals: the ten color channels followed by
/// the DKL spherical coordinates and the two opponencies.
enum class FeatureSource : std::uint8_t {
    R, G, B, C, M, Y, K, H, S, V,
    DklRadius, DklAzimuth, DklElevation, OpponentRG, OpponentBY
};
inline constexpr std::size_t kFeatureSourceCount = 15;

/// Conspicuity maps available to the integration tree.
enum class Dimension : std::uint8_t { Orientation, Color, Shape, Intensity, Mean };
inline constexpr std::size_t kDimensionCount = 5;

struct TerminalSpec {
    bool conspicuity = false;  // false: FeatureSource, true: Dimension
    std::uint8_t source = 0;
    Form form = Form::Identity;
};

/// Supplies terminal maps during tree evaluation.
class TerminalSource {
public:
    virtual ~TerminalSource() = default;
    virtual const ScalarMap& terminal(const TerminalSpec& spec) const = 0;
};

using PrimId = std::uint16_t;

struct Primitive {
    enum class Op : std::uint8_t {
        Terminal,
        Add, Sub, Mul, Div, AbsAdd, AbsSub, Inf, Sup,
        Abs, Log2, Half, Square, Sqrt, Exp, Complement, Threshold, Round, Floor, Ceil,
        Gauss1, Gauss2, Dx, Dy, Attenuate, Gabor, Hist,
        KMul, KDiv, KRoot, KPow, KAddInv, KSubInv,
        DilateDisk, DilateSquare, DilateDiamond, ErodeDisk, ErodeSquare, ErodeDiamond,
        Skeleton, Perimeter, HitMissDisk, HitMissSquare, HitMissDiamond,
        TopHat, BottomHat, OpenSquare, CloseSquare,
    };

    std::string token;
    Op op = Op::Terminal;
    int arity = 0;                // number of child maps
    bool takes_constant = false;  // carries an ephemeral constant k
    std::uint8_t roles = 0;       // bitmask of role_bit()
    TerminalSpec terminal{};      // meaningful when op == Terminal

    bool is_terminal() const noexcept { return op == Op::Terminal; }
    bool allowed_in(Role r) const noexcept { return (roles & role_bit(r)) != 0; }
};

/// Immutable table of every primitive, indexed by PrimId.
class Registry {
public:
    static const Registry& instance();

    const Primitive& at(PrimId id) const { return prims_.at(id); }
    std::size_t size() const noexcept { return prims_.size(); }
    std::optional<PrimId> find(std::string_view token) const;

    std::span<const PrimId> functions(Role r) const { return functions_[static_cast<std::size_t>(r)]; }
    std::span<const PrimId> terminals(Role r) const { return terminals_[static_cast<std::size_t>(r)]; }

private:
    Registry();

    std::vector<Primitive> prims_;
    std::array<std::vector<PrimId>, 4> functions_;
    std::array<std::vector<PrimId>, 4> terminals_;
};

/// Applies a function primitive to its argument maps (and constant k).
ScalarMap apply_primitive(const Primitive& p, std::span<const ScalarMap> args, double k);

/// Applies a derived terminal form to a base map.
ScalarMap apply_form(Form form, const ScalarMap& base);

std::string_view form_prefix(Form form);

} // namespace evosal
