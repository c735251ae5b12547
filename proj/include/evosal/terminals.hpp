#pragma once

#include "evosal/color.hpp"
#include "evosal/primitives.hpp"

#include <array>
#include <memory>
#include <mutex>

namespace evosal {

/// Feature terminals of one image. Derived forms (Dx(I_r), Gabor(I_v), ...)
/// are computed on first request and cached; concurrent readers are safe.
class FeatureContext final : public TerminalSource {
public:
    explicit FeatureContext(ColorDecomposition decomposition);

    FeatureContext(const FeatureContext&) = delete;
    FeatureContext& operator=(const FeatureContext&) = delete;

    const ScalarMap& terminal(const TerminalSpec& spec) const override;
    const ColorDecomposition& decomposition() const noexcept { return decomposition_; }
    const ScalarMap& base(FeatureSource source) const;

private:
    struct Slot {
        std::once_flag once;
        ScalarMap map;
    };

    ColorDecomposition decomposition_;
    mutable std::array<std::array<Slot, kFormCount>, kFeatureSourceCount> slots_;
};

/// The conspicuity maps an integration tree reads.
struct ConspicuitySet {
    ScalarMap orientation, color, shape, intensity, mean;

    const ScalarMap& get(Dimension d) const;
};

class ConspicuityContext final : public TerminalSource {
public:
    explicit ConspicuityContext(ConspicuitySet maps);

    ConspicuityContext(const ConspicuityContext&) = delete;
    ConspicuityContext& operator=(const ConspicuityContext&) = delete;

    const ScalarMap& terminal(const TerminalSpec& spec) const override;
    const ConspicuitySet& maps() const noexcept { return maps_; }

private:
    struct Slot {
        std::once_flag once;
        ScalarMap map;
    };

    ConspicuitySet maps_;
    mutable std::array<std::array<Slot, kFormCount>, kDimensionCount> slots_;
};

} // namespace evosal
