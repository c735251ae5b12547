#include "evosal/terminals.hpp"

#include "evosal/errors.hpp"

namespace evosal {

FeatureContext::FeatureContext(ColorDecomposition decomposition)
    : decomposition_(std::move(decomposition))
{
}

const ScalarMap& FeatureContext::base(FeatureSource source) const
{
    const auto idx = static_cast<std::size_t>(source);
    if (idx < kChannelCount)
        return decomposition_.channels[idx];
    switch (source) {
    case FeatureSource::DklRadius:
        return decomposition_.dkl_radius;
    case FeatureSource::DklAzimuth:
        return decomposition_.dkl_azimuth;
    case FeatureSource::DklElevation:
        return decomposition_.dkl_elevation;
    case FeatureSource::OpponentRG:
        return decomposition_.opponent_rg;
    case FeatureSource::OpponentBY:
        return decomposition_.opponent_by;
    default:
        throw ContractViolation("unknown feature source");
    }
}

const ScalarMap& FeatureContext::terminal(const TerminalSpec& spec) const
{
    if (spec.conspicuity || spec.source >= kFeatureSourceCount)
        throw ContractViolation("feature context cannot resolve a conspicuity terminal");
    const auto& src = base(static_cast<FeatureSource>(spec.source));
    if (spec.form == Form::Identity)
        return src;
    Slot& slot = slots_[spec.source][static_cast<std::size_t>(spec.form)];
    std::call_once(slot.once, [&] { slot.map = apply_form(spec.form, src); });
    return slot.map;
}

const ScalarMap& ConspicuitySet::get(Dimension d) const
{
    switch (d) {
    case Dimension::Orientation:
        return orientation;
    case Dimension::Color:
        return color;
    case Dimension::Shape:
        return shape;
    case Dimension::Intensity:
        return intensity;
    case Dimension::Mean:
        return mean;
    }
    throw ContractViolation("unknown dimension");
}

ConspicuityContext::ConspicuityContext(ConspicuitySet maps)
    : maps_(std::move(maps))
{
}

const ScalarMap& ConspicuityContext::terminal(const TerminalSpec& spec) const
{
    if (!spec.conspicuity || spec.source >= kDimensionCount)
        throw ContractViolation("conspicuity context cannot resolve a feature terminal");
    const auto& src = maps_.get(static_cast<Dimension>(spec.source));
    if (spec.form == Form::Identity)
        return src;
    Slot& slot = slots_[spec.source][static_cast<std::size_t>(spec.form)];
    std::call_once(slot.once, [&] { slot.map = apply_form(spec.form, src); });
    return slot.map;
}

} // namespace evosal
