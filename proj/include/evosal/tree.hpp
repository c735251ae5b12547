#pragma once

#include "evosal/primitives.hpp"
#include "evosal/scalar_map.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace evosal {

/// Ephemeral constant stored in hundredths: 1..100 maps to 0.01..1.00.
struct Constant {
    static constexpr int kMin = 1;
    static constexpr int kMax = 100;

    std::uint8_t hundredths = 0;

    double value() const noexcept { return hundredths / 100.0; }
    friend bool operator==(const Constant&, const Constant&) = default;
};

struct Node {
    PrimId id = 0;
    Constant k{};  // zero unless the primitive takes a constant

    friend bool operator==(const Node&, const Node&) = default;
};

/// One syntactic tree stored in prefix order.
///
/// Depth counts edges: a lone terminal has depth 0.
class ExprTree {
public:
    ExprTree() = default;
    /// Throws ContractViolation if the prefix sequence is not arity-consistent.
    ExprTree(Role role, std::vector<Node> nodes);

    Role role() const noexcept { return role_; }
    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    int depth() const;
    /// Depth (edges from the root) of the node at prefix index i.
    int node_depth(std::size_t i) const;
    /// One past the last prefix index of the subtree rooted at i.
    std::size_t subtree_end(std::size_t i) const;
    std::span<const Node> subtree(std::size_t i) const;
    /// Copy of this tree with the subtree at i replaced.
    ExprTree with_subtree(std::size_t i, std::span<const Node> replacement) const;
    /// Every node's primitive is registered for this tree's role.
    bool roles_valid() const;

    friend bool operator==(const ExprTree&, const ExprTree&) = default;

private:
    Role role_ = Role::Orientation;
    std::vector<Node> nodes_;
};

/// Four trees in fixed order: orientation, color, shape, integration.
struct Chromosome {
    std::array<ExprTree, 4> trees;
    std::optional<double> fitness;

    const ExprTree& tree(Role r) const { return trees[static_cast<std::size_t>(r)]; }
    ExprTree& tree(Role r) { return trees[static_cast<std::size_t>(r)]; }
    std::size_t node_count() const;
    int max_depth() const;
    /// Tree-wise equality, ignoring fitness.
    bool same_structure(const Chromosome& other) const { return trees == other.trees; }
};

/// Evaluates a tree bottom-up against the terminal source.
ScalarMap evaluate(const ExprTree& tree, const TerminalSource& terminals);

} // namespace evosal
