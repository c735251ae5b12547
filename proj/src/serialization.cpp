#include "evosal/serialization.hpp"

#include "evosal/errors.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace evosal {

namespace {

struct Token {
    std::string text;
    std::size_t line;
};

std::vector<Token> tokenize(std::string_view text, std::size_t first_line)
{
    std::vector<Token> out;
    std::size_t line = first_line;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n')
                ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(' || c == ')') {
            out.push_back({std::string(1, c), line});
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '('
                   && text[j] != ')' && text[j] != '#')
                ++j;
            out.push_back({std::string(text.substr(i, j - i)), line});
            i = j;
        }
    }
    return out;
}

std::string format_constant(Constant k)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%d.%02d", k.hundredths / 100, k.hundredths % 100);
    return buf;
}

// Accepts exactly "d.dd" within [0.01, 1.00].
std::optional<Constant> parse_constant(const std::string& s)
{
    if (s.size() != 4 || !std::isdigit(static_cast<unsigned char>(s[0])) || s[1] != '.'
        || !std::isdigit(static_cast<unsigned char>(s[2])) || !std::isdigit(static_cast<unsigned char>(s[3])))
        return std::nullopt;
    const int v = (s[0] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    if (v < Constant::kMin || v > Constant::kMax)
        return std::nullopt;
    return Constant{static_cast<std::uint8_t>(v)};
}

class TreeParser {
public:
    TreeParser(Role role, const std::vector<Token>& tokens, std::size_t begin, std::size_t end)
        : role_(role), tokens_(tokens), pos_(begin), end_(end)
    {
    }

    std::vector<Node> parse_all()
    {
        if (pos_ >= end_)
            fail(last_line(), "", std::string("missing expression for ") + std::string(role_name(role_)));
        parse_expr();
        if (pos_ < end_)
            fail(tokens_[pos_].line, tokens_[pos_].text, "unexpected token after complete expression");
        return std::move(nodes_);
    }

private:
    [[noreturn]] void fail(std::size_t line, const std::string& token, const std::string& what) const
    {
        throw ParseError(line, token, what);
    }

    std::size_t last_line() const { return end_ > 0 && end_ <= tokens_.size() ? tokens_[end_ - 1].line : 1; }

    const Token& next()
    {
        if (pos_ >= end_)
            fail(last_line(), "", "unexpected end of expression");
        return tokens_[pos_++];
    }

    const Primitive& lookup(const Token& t)
    {
        const auto& reg = Registry::instance();
        const auto id = reg.find(t.text);
        if (!id)
            fail(t.line, t.text, "unknown token");
        const Primitive& p = reg.at(*id);
        if (!p.allowed_in(role_))
            fail(t.line, t.text, std::string("primitive not allowed in ") + std::string(role_name(role_)));
        return p;
    }

    void parse_expr()
    {
        const Token& t = next();
        if (t.text == ")")
            fail(t.line, t.text, "unexpected ')'");
        if (t.text != "(") {
            const Primitive& p = lookup(t);
            if (!p.is_terminal())
                fail(t.line, t.text, "arity error: function used without arguments (expected "
                                         + std::to_string(p.arity) + ")");
            nodes_.push_back(Node{*Registry::instance().find(t.text), {}});
            return;
        }
        const Token& head = next();
        if (head.text == "(" || head.text == ")")
            fail(head.line, head.text, "expected a primitive name");
        const Primitive& p = lookup(head);
        Node node{*Registry::instance().find(head.text), {}};
        if (p.takes_constant) {
            const Token& kt = next();
            const auto k = parse_constant(kt.text);
            if (!k)
                fail(kt.line, kt.text, "expected a two-decimal constant in [0.01, 1.00]");
            node.k = *k;
        }
        nodes_.push_back(node);
        int children = 0;
        while (pos_ < end_ && tokens_[pos_].text != ")") {
            if (children == p.arity)
                fail(tokens_[pos_].line, tokens_[pos_].text,
                     "arity error: '" + p.token + "' takes " + std::to_string(p.arity) + " argument(s)");
            parse_expr();
            ++children;
        }
        const Token& close = next();
        if (close.text != ")")
            fail(close.line, close.text, "expected ')'");
        if (children != p.arity)
            fail(head.line, head.text,
                 "arity error: '" + p.token + "' takes " + std::to_string(p.arity) + " argument(s), got "
                     + std::to_string(children));
    }

    Role role_;
    const std::vector<Token>& tokens_;
    std::size_t pos_;
    std::size_t end_;
    std::vector<Node> nodes_;
};

ExprTree build_tree(Role role, const std::vector<Token>& tokens, std::size_t begin, std::size_t end, int depth_limit)
{
    TreeParser parser(role, tokens, begin, end);
    ExprTree tree(role, parser.parse_all());
    if (tree.depth() > depth_limit)
        throw ParseError(tokens[begin].line, tokens[begin].text,
                         "depth " + std::to_string(tree.depth()) + " exceeds limit " + std::to_string(depth_limit));
    return tree;
}

void sexpr_into(const ExprTree& tree, std::size_t& i, std::string& out)
{
    const auto& reg = Registry::instance();
    const Node& n = tree.nodes()[i++];
    const Primitive& p = reg.at(n.id);
    if (p.is_terminal()) {
        out += p.token;
        return;
    }
    out += '(';
    out += p.token;
    if (p.takes_constant) {
        out += ' ';
        out += format_constant(n.k);
    }
    for (int a = 0; a < p.arity; ++a) {
        out += ' ';
        sexpr_into(tree, i, out);
    }
    out += ')';
}

void infix_into(const ExprTree& tree, std::size_t& i, std::string& out)
{
    const auto& reg = Registry::instance();
    const Node& n = tree.nodes()[i++];
    const Primitive& p = reg.at(n.id);
    if (p.is_terminal()) {
        out += p.token;
        return;
    }
    auto child = [&] {
        std::string s;
        infix_into(tree, i, s);
        return s;
    };
    const std::string k = format_constant(n.k);
    using Op = Primitive::Op;
    switch (p.op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
        const char* sym = p.op == Op::Add ? " + " : p.op == Op::Sub ? " - " : p.op == Op::Mul ? " x " : " / ";
        const std::string a = child();
        const std::string b = child();
        out += "(" + a + sym + b + ")";
        return;
    }
    case Op::KMul:
        out += "(" + child() + " x " + k + ")";
        return;
    case Op::KDiv:
        out += "(" + child() + " / " + k + ")";
        return;
    case Op::KRoot:
        out += "(" + child() + ")^(1/" + k + ")";
        return;
    case Op::KPow:
        out += "(" + child() + ")^" + k;
        return;
    case Op::KAddInv:
        out += "(" + child() + " + 1/" + k + ")";
        return;
    case Op::KSubInv:
        out += "(" + child() + " - 1/" + k + ")";
        return;
    case Op::Square:
        out += "(" + child() + ")^2";
        return;
    default:
        break;
    }
    out += p.token + "(";
    for (int a = 0; a < p.arity; ++a) {
        if (a)
            out += ", ";
        out += child();
    }
    out += ")";
}

} // namespace

std::string to_sexpr(const ExprTree& tree)
{
    if (tree.empty())
        throw ContractViolation("to_sexpr: empty tree");
    std::string out;
    std::size_t i = 0;
    sexpr_into(tree, i, out);
    if (out.front() != '(')
        out = "(" + out + ")";
    return out;
}

std::string to_infix(const ExprTree& tree)
{
    std::string out;
    std::size_t i = 0;
    infix_into(tree, i, out);
    return out;
}

std::string serialize(const Chromosome& chromosome)
{
    std::string out;
    for (Role r : kRoles) {
        out += role_name(r);
        out += ": ";
        out += to_sexpr(chromosome.tree(r));
        out += '\n';
    }
    return out;
}

ExprTree parse_tree(Role role, std::string_view text, std::size_t first_line, int depth_limit)
{
    const auto tokens = tokenize(text, first_line);
    if (tokens.empty())
        throw ParseError(first_line, "", "empty expression");
    return build_tree(role, tokens, 0, tokens.size(), depth_limit);
}

Chromosome parse_chromosome(std::string_view text, int depth_limit)
{
    const auto tokens = tokenize(text, 1);
    struct Section {
        Role role;
        std::size_t begin, end;
        std::size_t line;
    };
    std::vector<Section> sections;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.text.size() > 1 && t.text.back() == ':') {
            const auto role = role_from_name(std::string_view(t.text).substr(0, t.text.size() - 1));
            if (!role)
                throw ParseError(t.line, t.text, "unknown role header");
            if (!sections.empty())
                sections.back().end = i;
            sections.push_back({*role, i + 1, tokens.size(), t.line});
        } else if (sections.empty()) {
            throw ParseError(t.line, t.text, "expression before any role header");
        }
    }

    Chromosome c;
    std::array<bool, 4> seen{};
    for (const auto& s : sections) {
        const auto idx = static_cast<std::size_t>(s.role);
        if (seen[idx])
            throw ParseError(s.line, std::string(role_name(s.role)) + ":", "duplicate role");
        seen[idx] = true;
        if (s.begin >= s.end)
            throw ParseError(s.line, std::string(role_name(s.role)) + ":", "missing expression");
        c.trees[idx] = build_tree(s.role, tokens, s.begin, s.end, depth_limit);
    }
    for (Role r : kRoles)
        if (!seen[static_cast<std::size_t>(r)])
            throw ParseError(tokens.empty() ? 1 : tokens.back().line, std::string(role_name(r)) + ":",
                             "missing role");
    return c;
}

Chromosome read_chromosome(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read chromosome file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_chromosome(ss.str());
}

void write_chromosome(const std::filesystem::path& path, const Chromosome& chromosome)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write chromosome file: " + path.string());
    out << serialize(chromosome);
}

std::uint64_t stable_hash(std::string_view text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace evosal
