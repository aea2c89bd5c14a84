#pragma once

// Arithmetic expression mini-language for source/initial data, evaluated at
// cell centers. Grammar (recursive descent, '^' binds tightest and is
// right-associative):
//
//   expr   := term { ('+' | '-') term }
//   term   := factor { ('*' | '/') factor }
//   factor := ('+' | '-') factor | power
//   power  := atom [ '^' factor ]
//   atom   := NUMBER | 'pi' | 'x' | 'y' | 'r'
//           | NAME '(' expr { ',' expr } ')' | '(' expr ')'
//
// Functions: sin, cos, exp, pow, min, max.

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symmheat {

struct EvalPoint {
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;
};

class ExpressionError : public std::runtime_error {
  public:
    ExpressionError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

namespace expr_detail {

struct Node {
    virtual ~Node() = default;
    virtual double eval(const EvalPoint& p) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Constant : Node {
    double value;
    explicit Constant(double v) : value(v) {}
    double eval(const EvalPoint&) const override { return value; }
};

struct Variable : Node {
    char which;  // 'x', 'y', 'r'
    explicit Variable(char w) : which(w) {}
    double eval(const EvalPoint& p) const override {
        switch (which) {
            case 'x': return p.x;
            case 'y': return p.y;
            default: return p.r;
        }
    }
};

struct Unary : Node {
    char op;
    NodePtr arg;
    Unary(char o, NodePtr a) : op(o), arg(std::move(a)) {}
    double eval(const EvalPoint& p) const override {
        const double v = arg->eval(p);
        return op == '-' ? -v : v;
    }
};

struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char o, NodePtr a, NodePtr b) : op(o), lhs(std::move(a)), rhs(std::move(b)) {}
    double eval(const EvalPoint& p) const override {
        const double a = lhs->eval(p), b = rhs->eval(p);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
        }
    }
};

enum class Fn { Sin, Cos, Exp, Pow, Min, Max };

struct Call : Node {
    Fn fn;
    std::vector<NodePtr> args;
    Call(Fn f, std::vector<NodePtr> a) : fn(f), args(std::move(a)) {}
    double eval(const EvalPoint& p) const override {
        switch (fn) {
            case Fn::Sin: return std::sin(args[0]->eval(p));
            case Fn::Cos: return std::cos(args[0]->eval(p));
            case Fn::Exp: return std::exp(args[0]->eval(p));
            case Fn::Pow: return std::pow(args[0]->eval(p), args[1]->eval(p));
            case Fn::Min: return std::min(args[0]->eval(p), args[1]->eval(p));
            default: return std::max(args[0]->eval(p), args[1]->eval(p));
        }
    }
};

class Parser {
  public:
    explicit Parser(std::string text) : text_(std::move(text)) {}

    NodePtr parse() {
        NodePtr root = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ExpressionError("unexpected trailing input", pos_);
        return root;
    }

  private:
    std::string text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = std::make_unique<Binary>('+', std::move(lhs), parse_term());
            else if (consume('-'))
                lhs = std::make_unique<Binary>('-', std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            if (consume('*'))
                lhs = std::make_unique<Binary>('*', std::move(lhs), parse_factor());
            else if (consume('/'))
                lhs = std::make_unique<Binary>('/', std::move(lhs), parse_factor());
            else
                return lhs;
        }
    }

    NodePtr parse_factor() {
        if (consume('-')) return std::make_unique<Unary>('-', parse_factor());
        if (consume('+')) return parse_factor();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^'))
            return std::make_unique<Binary>('^', std::move(base), parse_factor());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ExpressionError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        if (consume('(')) {
            NodePtr e = parse_expr();
            if (!consume(')')) throw ExpressionError("expected ')'", pos_);
            return e;
        }
        throw ExpressionError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' was not an exponent
            }
        }
        try {
            return std::make_unique<Constant>(std::stod(text_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            throw ExpressionError("malformed number", start);
        }
    }

    NodePtr parse_name() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "x" || name == "y" || name == "r") return std::make_unique<Variable>(name[0]);
        if (name == "pi") return std::make_unique<Constant>(3.14159265358979323846);
        Fn fn;
        std::size_t arity;
        if (name == "sin") fn = Fn::Sin, arity = 1;
        else if (name == "cos") fn = Fn::Cos, arity = 1;
        else if (name == "exp") fn = Fn::Exp, arity = 1;
        else if (name == "pow") fn = Fn::Pow, arity = 2;
        else if (name == "min") fn = Fn::Min, arity = 2;
        else if (name == "max") fn = Fn::Max, arity = 2;
        else throw ExpressionError("unknown name '" + name + "'", start);
        if (!consume('(')) throw ExpressionError("expected '(' after '" + name + "'", pos_);
        std::vector<NodePtr> args;
        args.push_back(parse_expr());
        while (consume(',')) args.push_back(parse_expr());
        if (!consume(')')) throw ExpressionError("expected ')'", pos_);
        if (args.size() != arity)
            throw ExpressionError("'" + name + "' takes " + std::to_string(arity) + " argument(s)",
                                  start);
        return std::make_unique<Call>(fn, std::move(args));
    }
};

}  // namespace expr_detail

// A parsed expression over the variables {x, y, r}.
class Expression {
  public:
    explicit Expression(const std::string& text)
        : text_(text), root_(expr_detail::Parser(text).parse()) {}

    double operator()(const EvalPoint& p) const { return root_->eval(p); }
    const std::string& text() const { return text_; }

  private:
    std::string text_;
    std::shared_ptr<const expr_detail::Node> root_;
};

}  // namespace symmheat
