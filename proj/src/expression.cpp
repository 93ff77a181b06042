#include "degen/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace degen {

namespace detail {

enum class Op : unsigned char { Const, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class Fn : unsigned char { Sin, Cos, Tan, Exp, Log, Sqrt, Sinc, DSinc };

struct ExprNode {
    Op op = Op::Const;
    Fn fn = Fn::Sin;
    double value = 0.0;
    std::shared_ptr<const ExprNode> a;
    std::shared_ptr<const ExprNode> b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

struct Instr {
    Op op;
    Fn fn;
    double value;
};

struct Program {
    std::vector<Instr> code;
    std::size_t max_depth = 0;
};

namespace {

double sinc_value(double t) {
    if (std::abs(t) < 1e-4) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

// d/dt sinc(t) = (t cos t - sin t) / t^2
double dsinc_value(double t) {
    if (std::abs(t) < 1e-3) {
        const double t2 = t * t;
        return t * (-1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0);
    }
    return (t * std::cos(t) - std::sin(t)) / (t * t);
}

double apply_fn(Fn fn, double v) {
    switch (fn) {
        case Fn::Sin: return std::sin(v);
        case Fn::Cos: return std::cos(v);
        case Fn::Tan: return std::tan(v);
        case Fn::Exp: return std::exp(v);
        case Fn::Log: return std::log(v);
        case Fn::Sqrt: return std::sqrt(v);
        case Fn::Sinc: return sinc_value(v);
        case Fn::DSinc: return dsinc_value(v);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

const char* fn_name(Fn fn) {
    switch (fn) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Tan: return "tan";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Sqrt: return "sqrt";
        case Fn::Sinc: return "sinc";
        case Fn::DSinc: return "dsinc";
    }
    return "?";
}

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

NodePtr make_var(Variable v) {
    auto n = std::make_shared<ExprNode>();
    n->op = v == Variable::X ? Op::VarX : Op::VarY;
    return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

NodePtr make_binary(Op op, NodePtr a, NodePtr b);

NodePtr make_neg(NodePtr a) {
    if (a->op == Op::Const) return make_const(-a->value);
    if (a->op == Op::Neg) return a->a;
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Neg;
    n->a = std::move(a);
    return n;
}

NodePtr make_fn(Fn fn, NodePtr a) {
    if (a->op == Op::Const) return make_const(apply_fn(fn, a->value));
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Func;
    n->fn = fn;
    n->a = std::move(a);
    return n;
}

double fold(Op op, double a, double b) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div: return a / b;
        case Op::Pow: return std::pow(a, b);
        default: return std::numeric_limits<double>::quiet_NaN();
    }
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return make_const(fold(op, a->value, b->value));
    switch (op) {
        case Op::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            if (b->op == Op::Neg) return make_binary(Op::Sub, a, b->a);
            break;
        case Op::Sub:
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return make_neg(b);
            if (b->op == Op::Neg) return make_binary(Op::Add, a, b->a);
            break;
        case Op::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            if (is_const(a, -1.0)) return make_neg(b);
            if (is_const(b, -1.0)) return make_neg(a);
            break;
        case Op::Div:
            if (is_const(a, 0.0)) return make_const(0.0);
            if (is_const(b, 1.0)) return a;
            break;
        case Op::Pow:
            if (is_const(b, 0.0)) return make_const(1.0);
            if (is_const(b, 1.0)) return a;
            break;
        default:
            break;
    }
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr differentiate(const NodePtr& n, Variable v) {
    switch (n->op) {
        case Op::Const:
            return make_const(0.0);
        case Op::VarX:
            return make_const(v == Variable::X ? 1.0 : 0.0);
        case Op::VarY:
            return make_const(v == Variable::Y ? 1.0 : 0.0);
        case Op::Neg:
            return make_neg(differentiate(n->a, v));
        case Op::Add:
            return make_binary(Op::Add, differentiate(n->a, v), differentiate(n->b, v));
        case Op::Sub:
            return make_binary(Op::Sub, differentiate(n->a, v), differentiate(n->b, v));
        case Op::Mul: {
            auto da = differentiate(n->a, v);
            auto db = differentiate(n->b, v);
            return make_binary(Op::Add, make_binary(Op::Mul, da, n->b), make_binary(Op::Mul, n->a, db));
        }
        case Op::Div: {
            auto da = differentiate(n->a, v);
            auto db = differentiate(n->b, v);
            auto first = make_binary(Op::Div, da, n->b);
            auto second = make_binary(Op::Div, make_binary(Op::Mul, n->a, db),
                                      make_binary(Op::Mul, n->b, n->b));
            return make_binary(Op::Sub, first, second);
        }
        case Op::Pow: {
            auto da = differentiate(n->a, v);
            if (n->b->op == Op::Const) {
                const double c = n->b->value;
                return make_binary(Op::Mul,
                                   make_binary(Op::Mul, make_const(c),
                                               make_binary(Op::Pow, n->a, make_const(c - 1.0))),
                                   da);
            }
            // a^b (b' log a + b a'/a)
            auto db = differentiate(n->b, v);
            auto inner = make_binary(Op::Add, make_binary(Op::Mul, db, make_fn(Fn::Log, n->a)),
                                     make_binary(Op::Div, make_binary(Op::Mul, n->b, da), n->a));
            return make_binary(Op::Mul, n, inner);
        }
        case Op::Func: {
            auto da = differentiate(n->a, v);
            if (is_const(da, 0.0)) return make_const(0.0);
            NodePtr outer;
            switch (n->fn) {
                case Fn::Sin: outer = make_fn(Fn::Cos, n->a); break;
                case Fn::Cos: outer = make_neg(make_fn(Fn::Sin, n->a)); break;
                case Fn::Tan: {
                    auto c = make_fn(Fn::Cos, n->a);
                    outer = make_binary(Op::Div, make_const(1.0), make_binary(Op::Mul, c, c));
                    break;
                }
                case Fn::Exp: outer = n; break;
                case Fn::Log: outer = make_binary(Op::Div, make_const(1.0), n->a); break;
                case Fn::Sqrt:
                    outer = make_binary(Op::Div, make_const(0.5), n);
                    break;
                case Fn::Sinc: outer = make_fn(Fn::DSinc, n->a); break;
                case Fn::DSinc:
                    throw std::domain_error("second derivative of sinc() is not supported");
            }
            return make_binary(Op::Mul, outer, da);
        }
    }
    return make_const(0.0);
}

void compile(const NodePtr& n, Program& p, std::size_t depth) {
    switch (n->op) {
        case Op::Const:
        case Op::VarX:
        case Op::VarY:
            p.code.push_back({n->op, Fn::Sin, n->value});
            p.max_depth = std::max(p.max_depth, depth + 1);
            return;
        case Op::Neg:
        case Op::Func:
            compile(n->a, p, depth);
            p.code.push_back({n->op, n->fn, 0.0});
            return;
        default:
            compile(n->a, p, depth);
            compile(n->b, p, depth + 1);
            p.code.push_back({n->op, Fn::Sin, 0.0});
            return;
    }
}

int precedence(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

void print(const NodePtr& n, std::ostringstream& os, int parent_prec) {
    const int prec = precedence(n->op);
    const bool paren = prec < parent_prec;
    if (paren) os << '(';
    switch (n->op) {
        case Op::Const: {
            std::ostringstream num;
            num.precision(17);
            num << n->value;
            if (n->value < 0) {
                os << '(' << num.str() << ')';
            } else {
                os << num.str();
            }
            break;
        }
        case Op::VarX: os << 'x'; break;
        case Op::VarY: os << 'y'; break;
        case Op::Neg:
            os << '-';
            print(n->a, os, prec + 1);
            break;
        case Op::Func:
            os << fn_name(n->fn) << '(';
            print(n->a, os, 0);
            os << ')';
            break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            static constexpr std::array<char, 10> sym{'?', '?', '?', '?', '+', '-', '*', '/', '^', '?'};
            print(n->a, os, prec);
            os << ' ' << sym[static_cast<std::size_t>(n->op)] << ' ';
            print(n->b, os, prec + 1);
            break;
        }
        case Op::Pow:
            print(n->a, os, prec + 1);
            os << '^';
            print(n->b, os, prec);
            break;
    }
    if (paren) os << ')';
}

std::size_t count_nodes(const NodePtr& n) {
    if (!n) return 0;
    return 1 + count_nodes(n->a) + count_nodes(n->b);
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        auto result = expression();
        skip_space();
        if (pos_ != text_.size()) {
            throw ExpressionError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        return result;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(Op::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make_binary(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary(Op::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make_binary(Op::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_neg(unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (accept('^')) return make_binary(Op::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ExpressionError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = expression();
            if (!accept(')')) throw ExpressionError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ExpressionError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) throw ExpressionError("malformed number", start);
        return make_const(value);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x" || name == "xi1") return make_var(Variable::X);
        if (name == "y" || name == "xi2") return make_var(Variable::Y);
        if (name == "pi") return make_const(std::numbers::pi);

        static constexpr std::array<std::pair<std::string_view, Fn>, 7> functions{{
            {"sin", Fn::Sin},
            {"cos", Fn::Cos},
            {"tan", Fn::Tan},
            {"exp", Fn::Exp},
            {"log", Fn::Log},
            {"sqrt", Fn::Sqrt},
            {"sinc", Fn::Sinc},
        }};
        for (const auto& [fname, fn] : functions) {
            if (name == fname) {
                if (!accept('(')) throw ExpressionError("expected '(' after " + std::string(name), pos_);
                auto arg = expression();
                if (!accept(')')) throw ExpressionError("expected ')'", pos_);
                return make_fn(fn, arg);
            }
        }
        throw ExpressionError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace
}  // namespace detail

using detail::NodePtr;
using detail::Op;

FieldExpression::FieldExpression() : FieldExpression(detail::make_const(0.0)) {}

FieldExpression::FieldExpression(std::shared_ptr<const detail::ExprNode> root) : root_(std::move(root)) {
    auto program = std::make_shared<detail::Program>();
    detail::compile(root_, *program, 0);
    program_ = std::move(program);
}

FieldExpression FieldExpression::parse(std::string_view text) {
    return FieldExpression(detail::Parser(text).parse());
}

FieldExpression FieldExpression::constant(double value) { return FieldExpression(detail::make_const(value)); }

FieldExpression FieldExpression::variable(Variable v) { return FieldExpression(detail::make_var(v)); }

double FieldExpression::operator()(double x, double y) const {
    constexpr std::size_t kInline = 64;
    std::array<double, kInline> inline_stack;
    std::vector<double> heap_stack;
    double* stack = inline_stack.data();
    if (program_->max_depth > kInline) {
        heap_stack.resize(program_->max_depth);
        stack = heap_stack.data();
    }
    std::size_t top = 0;
    for (const auto& ins : program_->code) {
        switch (ins.op) {
            case Op::Const: stack[top++] = ins.value; break;
            case Op::VarX: stack[top++] = x; break;
            case Op::VarY: stack[top++] = y; break;
            case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
            case Op::Func: stack[top - 1] = detail::apply_fn(ins.fn, stack[top - 1]); break;
            default: {
                const double b = stack[--top];
                stack[top - 1] = detail::fold(ins.op, stack[top - 1], b);
                break;
            }
        }
    }
    return stack[0];
}

FieldExpression FieldExpression::derivative(Variable v) const {
    return FieldExpression(detail::differentiate(root_, v));
}

Vec2 FieldExpression::gradient(Vec2 p) const {
    return {dx()(p), dy()(p)};
}

bool FieldExpression::is_constant() const { return root_->op == Op::Const; }

double FieldExpression::constant_value() const {
    return is_constant() ? root_->value : std::numeric_limits<double>::quiet_NaN();
}

std::string FieldExpression::to_string() const {
    std::ostringstream os;
    detail::print(root_, os, 0);
    return os.str();
}

std::size_t FieldExpression::node_count() const { return detail::count_nodes(root_); }

FieldExpression operator+(const FieldExpression& a, const FieldExpression& b) {
    return FieldExpression(detail::make_binary(Op::Add, a.root_, b.root_));
}
FieldExpression operator-(const FieldExpression& a, const FieldExpression& b) {
    return FieldExpression(detail::make_binary(Op::Sub, a.root_, b.root_));
}
FieldExpression operator*(const FieldExpression& a, const FieldExpression& b) {
    return FieldExpression(detail::make_binary(Op::Mul, a.root_, b.root_));
}
FieldExpression operator/(const FieldExpression& a, const FieldExpression& b) {
    return FieldExpression(detail::make_binary(Op::Div, a.root_, b.root_));
}
FieldExpression operator-(const FieldExpression& a) { return FieldExpression(detail::make_neg(a.root_)); }

FieldExpression pow(const FieldExpression& base, const FieldExpression& exponent) {
    return FieldExpression(detail::make_binary(Op::Pow, base.root_, exponent.root_));
}
FieldExpression sin(const FieldExpression& a) { return FieldExpression(detail::make_fn(detail::Fn::Sin, a.root_)); }
FieldExpression cos(const FieldExpression& a) { return FieldExpression(detail::make_fn(detail::Fn::Cos, a.root_)); }
FieldExpression tan(const FieldExpression& a) { return FieldExpression(detail::make_fn(detail::Fn::Tan, a.root_)); }
FieldExpression exp(const FieldExpression& a) { return FieldExpression(detail::make_fn(detail::Fn::Exp, a.root_)); }
FieldExpression log(const FieldExpression& a) { return FieldExpression(detail::make_fn(detail::Fn::Log, a.root_)); }
FieldExpression sqrt(const FieldExpression& a) { return FieldExpression(detail::make_fn(detail::Fn::Sqrt, a.root_)); }
FieldExpression sinc(const FieldExpression& a) { return FieldExpression(detail::make_fn(detail::Fn::Sinc, a.root_)); }

DerivativeSet::DerivativeSet(const FieldExpression& e)
    : f(e), fx(e.dx()), fy(e.dy()), fxx(fx.dx()), fxy(fx.dy()), fyy(fy.dy()) {}

}  // namespace degen
