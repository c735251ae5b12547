#include "evosal/tree.hpp"

#include "evosal/errors.hpp"

#include <algorithm>

namespace evosal {

namespace {

int arity_of(const Node& n)
{
    return Registry::instance().at(n.id).arity;
}

} // namespace

ExprTree::ExprTree(Role role, std::vector<Node> nodes)
    : role_(role), nodes_(std::move(nodes))
{
    const auto& reg = Registry::instance();
    long open = 1;
    for (const auto& n : nodes_) {
        if (n.id >= reg.size())
            throw ContractViolation("ExprTree: unknown primitive id");
        if (open <= 0)
            throw ContractViolation("ExprTree: trailing nodes after a complete tree");
        open += arity_of(n) - 1;
    }
    if (nodes_.empty() || open != 0)
        throw ContractViolation("ExprTree: prefix sequence is not arity-consistent");
}

std::size_t ExprTree::subtree_end(std::size_t i) const
{
    long open = 1;
    std::size_t j = i;
    while (open > 0) {
        open += arity_of(nodes_.at(j)) - 1;
        ++j;
    }
    return j;
}

std::span<const Node> ExprTree::subtree(std::size_t i) const
{
    return std::span<const Node>(nodes_).subspan(i, subtree_end(i) - i);
}

namespace {

// Depth of every node, in prefix order.
std::vector<int> node_depths(std::span<const Node> nodes)
{
    std::vector<int> depths(nodes.size());
    std::vector<int> pending;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        depths[i] = static_cast<int>(pending.size());
        if (!pending.empty())
            --pending.back();
        const int arity = arity_of(nodes[i]);
        if (arity > 0)
            pending.push_back(arity);
        while (!pending.empty() && pending.back() == 0)
            pending.pop_back();
    }
    return depths;
}

} // namespace

int ExprTree::depth() const
{
    const auto depths = node_depths(nodes_);
    return depths.empty() ? 0 : *std::max_element(depths.begin(), depths.end());
}

int ExprTree::node_depth(std::size_t target) const
{
    if (target >= nodes_.size())
        throw ContractViolation("node_depth: index out of range");
    return node_depths(nodes_)[target];
}

ExprTree ExprTree::with_subtree(std::size_t i, std::span<const Node> replacement) const
{
    const std::size_t end = subtree_end(i);
    std::vector<Node> out;
    out.reserve(nodes_.size() - (end - i) + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
    out.insert(out.end(), replacement.begin(), replacement.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    return ExprTree(role_, std::move(out));
}

bool ExprTree::roles_valid() const
{
    const auto& reg = Registry::instance();
    return std::all_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return reg.at(n.id).allowed_in(role_); });
}

std::size_t Chromosome::node_count() const
{
    std::size_t n = 0;
    for (const auto& t : trees)
        n += t.size();
    return n;
}

int Chromosome::max_depth() const
{
    int d = 0;
    for (const auto& t : trees)
        d = std::max(d, t.depth());
    return d;
}

ScalarMap evaluate(const ExprTree& tree, const TerminalSource& terminals)
{
    if (tree.empty())
        throw ContractViolation("evaluate: empty tree");
    const auto& reg = Registry::instance();
    const auto nodes = tree.nodes();
    // Postfix walk over the prefix sequence using a value stack.
    std::vector<ScalarMap> stack;
    for (std::size_t i = nodes.size(); i-- > 0;) {
        const Primitive& p = reg.at(nodes[i].id);
        if (p.is_terminal()) {
            stack.push_back(terminals.terminal(p.terminal));
            continue;
        }
        // Children of node i sit on top of the stack, first child last pushed.
        std::vector<ScalarMap> args;
        args.reserve(p.arity);
        for (int a = 0; a < p.arity; ++a) {
            args.push_back(std::move(stack.back()));
            stack.pop_back();
        }
        stack.push_back(apply_primitive(p, args, nodes[i].k.value()));
    }
    return std::move(stack.back());
}

} // namespace evosal
