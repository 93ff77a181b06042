#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "degen/geometry.hpp"

namespace degen {

/// Raised for malformed expression text; carries the 0-based offending offset.
class ExpressionError : public std::runtime_error {
public:
    ExpressionError(const std::string& message, std::size_t position)
        : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
          position_(position) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

enum class Variable { X = 0, Y = 1 };

namespace detail {
struct ExprNode;
struct Program;
}  // namespace detail

/// Immutable scalar field f(x, y) given by an arithmetic expression tree.
///
/// Grammar (x and y are aliases for the two Cartesian coordinates xi1 and xi2):
///
///     expr    := term  { ('+' | '-') term }
///     term    := unary { ('*' | '/') unary }
///     unary   := ('-' | '+') unary | power
///     power   := primary [ '^' unary ]
///     primary := number | 'x' | 'y' | 'xi1' | 'xi2' | 'pi'
///              | func '(' expr ')' | '(' expr ')'
///     func    := sin | cos | tan | exp | log | sqrt | sinc
///
/// `sinc(t) = sin(t)/t` with `sinc(0) = 1`. Exponentiation is right
/// associative and binds tighter than unary minus, so `-x^2 == -(x^2)`.
///
/// Evaluation runs a flat stack program compiled once at construction, so
/// copies are cheap (shared) and evaluation is reentrant.
class FieldExpression {
public:
    /// The zero field.
    FieldExpression();

    static FieldExpression parse(std::string_view text);
    static FieldExpression constant(double value);
    static FieldExpression variable(Variable v);
    static FieldExpression x() { return variable(Variable::X); }
    static FieldExpression y() { return variable(Variable::Y); }

    [[nodiscard]] double operator()(double x, double y) const;
    [[nodiscard]] double operator()(Vec2 p) const { return (*this)(p.x, p.y); }

    /// Exact symbolic partial derivative.
    [[nodiscard]] FieldExpression derivative(Variable v) const;
    [[nodiscard]] FieldExpression dx() const { return derivative(Variable::X); }
    [[nodiscard]] FieldExpression dy() const { return derivative(Variable::Y); }

    [[nodiscard]] Vec2 gradient(Vec2 p) const;

    [[nodiscard]] bool is_constant() const;
    /// Value when `is_constant()`; NaN otherwise.
    [[nodiscard]] double constant_value() const;

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::size_t node_count() const;

    friend FieldExpression operator+(const FieldExpression& a, const FieldExpression& b);
    friend FieldExpression operator-(const FieldExpression& a, const FieldExpression& b);
    friend FieldExpression operator*(const FieldExpression& a, const FieldExpression& b);
    friend FieldExpression operator/(const FieldExpression& a, const FieldExpression& b);
    friend FieldExpression operator-(const FieldExpression& a);

    friend FieldExpression pow(const FieldExpression& base, const FieldExpression& exponent);
    friend FieldExpression sin(const FieldExpression& a);
    friend FieldExpression cos(const FieldExpression& a);
    friend FieldExpression tan(const FieldExpression& a);
    friend FieldExpression exp(const FieldExpression& a);
    friend FieldExpression log(const FieldExpression& a);
    friend FieldExpression sqrt(const FieldExpression& a);
    friend FieldExpression sinc(const FieldExpression& a);

private:
    explicit FieldExpression(std::shared_ptr<const detail::ExprNode> root);

    std::shared_ptr<const detail::ExprNode> root_;
    std::shared_ptr<const detail::Program> program_;
};

inline FieldExpression operator+(const FieldExpression& a, double b) { return a + FieldExpression::constant(b); }
inline FieldExpression operator+(double a, const FieldExpression& b) { return FieldExpression::constant(a) + b; }
inline FieldExpression operator-(const FieldExpression& a, double b) { return a - FieldExpression::constant(b); }
inline FieldExpression operator-(double a, const FieldExpression& b) { return FieldExpression::constant(a) - b; }
inline FieldExpression operator*(const FieldExpression& a, double b) { return a * FieldExpression::constant(b); }
inline FieldExpression operator*(double a, const FieldExpression& b) { return FieldExpression::constant(a) * b; }
inline FieldExpression operator/(const FieldExpression& a, double b) { return a / FieldExpression::constant(b); }
inline FieldExpression operator/(double a, const FieldExpression& b) { return FieldExpression::constant(a) / b; }
inline FieldExpression pow(const FieldExpression& a, double e) { return pow(a, FieldExpression::constant(e)); }

/// Symbolic Hessian entries of a scalar field, built once and reused for
/// repeated pointwise evaluation.
struct DerivativeSet {
    explicit DerivativeSet(const FieldExpression& f);

    FieldExpression f, fx, fy, fxx, fxy, fyy;
};

}  // namespace degen
