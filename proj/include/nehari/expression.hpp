#ifndef NEHARI_EXPRESSION_HPP
#define NEHARI_EXPRESSION_HPP

#include <memory>
#include <string>

namespace nehari {

/// Tiny closed-form expression grammar for the weight functions h, b:
/// +, -, *, /, ^ (right associative), sin, cos, sign, abs, numeric
/// literals, pi, and the coordinates x, y.
class Expression {
public:
    /// Throws std::invalid_argument with the offending position on a
    /// parse error.
    static Expression parse(const std::string& src);

    double eval(double x, double y = 0.0) const;
    const std::string& source() const { return source_; }

    struct Node;  // AST node; defined in the implementation

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

} // namespace nehari

#endif
