#include "nehari/expression.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace nehari {

namespace {

enum class Op { Number, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Sign, Abs };

} // namespace

struct Expression::Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
    const std::string& src;
    std::size_t pos = 0;

    explicit Parser(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression parse error at position " +
                                    std::to_string(pos) + ": " + what + " in \"" + src + "\"");
    }

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
        auto n = std::make_shared<Expression::Node>();
        n->op = op;
        n->value = v;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = make(Op::Add, lhs, parse_term());
            else if (eat('-'))
                lhs = make(Op::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            if (eat('*'))
                lhs = make(Op::Mul, lhs, parse_factor());
            else if (eat('/'))
                lhs = make(Op::Div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    // right-associative power binds tighter than unary minus on the left,
    // i.e. -x^2 parses as -(x^2)
    NodePtr parse_factor() {
        if (eat('-')) return make(Op::Neg, parse_factor());
        if (eat('+')) return parse_factor();
        NodePtr base = parse_primary();
        if (eat('^')) return make(Op::Pow, base, parse_factor());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input");
        const char c = src[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        std::size_t end = pos;
        while (end < src.size() &&
               (std::isdigit(static_cast<unsigned char>(src[end])) || src[end] == '.' ||
                src[end] == 'e' || src[end] == 'E' ||
                ((src[end] == '+' || src[end] == '-') && end > pos &&
                 (src[end - 1] == 'e' || src[end - 1] == 'E'))))
            ++end;
        const std::string tok = src.substr(pos, end - pos);
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) fail("malformed number '" + tok + "'");
            pos = end;
            return make(Op::Number, nullptr, nullptr, v);
        } catch (const std::invalid_argument&) {
            fail("malformed number '" + tok + "'");
        } catch (const std::out_of_range&) {
            fail("number out of range '" + tok + "'");
        }
    }

    NodePtr parse_ident() {
        std::size_t end = pos;
        while (end < src.size() && std::isalpha(static_cast<unsigned char>(src[end]))) ++end;
        const std::string name = src.substr(pos, end - pos);
        pos = end;
        if (name == "x") return make(Op::VarX);
        if (name == "y") return make(Op::VarY);
        if (name == "pi") return make(Op::Number, nullptr, nullptr, 3.141592653589793);
        if (name == "sin" || name == "cos" || name == "sign" || name == "abs") {
            if (!eat('(')) fail("expected '(' after " + name);
            NodePtr arg = parse_expr();
            if (!eat(')')) fail("expected ')'");
            if (name == "sin") return make(Op::Sin, arg);
            if (name == "cos") return make(Op::Cos, arg);
            if (name == "sign") return make(Op::Sign, arg);
            return make(Op::Abs, arg);
        }
        fail("unknown identifier '" + name + "'");
    }
};

double eval_node(const Expression::Node& n, double x, double y) {
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
        case Op::Sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
        case Op::Mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
        case Op::Div: return eval_node(*n.a, x, y) / eval_node(*n.b, x, y);
        case Op::Pow: return std::pow(eval_node(*n.a, x, y), eval_node(*n.b, x, y));
        case Op::Neg: return -eval_node(*n.a, x, y);
        case Op::Sin: return std::sin(eval_node(*n.a, x, y));
        case Op::Cos: return std::cos(eval_node(*n.a, x, y));
        case Op::Sign: {
            const double v = eval_node(*n.a, x, y);
            return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        }
        case Op::Abs: return std::fabs(eval_node(*n.a, x, y));
    }
    return 0.0;
}

} // namespace

Expression Expression::parse(const std::string& src) {
    Parser parser(src);
    Expression e;
    e.root_ = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != src.size()) parser.fail("trailing input");
    e.source_ = src;
    return e;
}

double Expression::eval(double x, double y) const {
    if (!root_) throw std::logic_error("empty expression");
    return eval_node(*root_, x, y);
}

} // namespace nehari
