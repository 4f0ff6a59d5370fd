#include "fracvar/expression.hpp"

#include "fracvar/special.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace fracvar {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("at position " + std::to_string(position) + ": " + message),
      message_(message), position_(position)
{
}

namespace {

constexpr std::array<std::string_view, var_count> var_names = {"t",  "x",  "d",  "x1",
                                                               "x2", "d1", "d2", "d3"};

struct FuncEntry {
    std::string_view name;
    Func func;
};
constexpr std::array<FuncEntry, 7> functions = {{{"sin", Func::sin},
                                                 {"cos", Func::cos},
                                                 {"exp", Func::exp},
                                                 {"ln", Func::ln},
                                                 {"sqrt", Func::sqrt},
                                                 {"abs", Func::abs},
                                                 {"gammafn", Func::gammafn}}};

std::string_view func_name(Func f)
{
    for (const auto& e : functions)
        if (e.func == f)
            return e.name;
    return "?";
}

double checked(double v, const char* what)
{
    if (!std::isfinite(v))
        throw EvaluationError(std::string("non-finite result in ") + what);
    return v;
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (v < 0.0)
        return "(" + s + ")";
    return s;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expression run()
    {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("empty expression", pos_);
        Expression e = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression parse_sum()
    {
        Expression lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = Expression::binary(BinaryOp::add, lhs, parse_product());
            else if (accept('-'))
                lhs = Expression::binary(BinaryOp::sub, lhs, parse_product());
            else
                return lhs;
        }
    }

    Expression parse_product()
    {
        Expression lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = Expression::binary(BinaryOp::mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = Expression::binary(BinaryOp::div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    Expression parse_unary()
    {
        if (accept('-'))
            return Expression::negate(parse_unary());
        if (accept('+'))
            return parse_unary();
        return parse_power();
    }

    Expression parse_power()
    {
        Expression base = parse_primary();
        if (accept('^'))
            return Expression::binary(BinaryOp::pow, base, parse_unary());
        return base;
    }

    Expression parse_primary()
    {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expression inner = parse_sum();
            if (!accept(')'))
                throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expression parse_number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                digits();
            else
                pos_ = save; // not an exponent
        }
        double v = 0.0;
        const char* first = src_.data() + start;
        const char* last = src_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            throw ParseError("malformed number '" + std::string(first, last) + "'", start);
        return Expression::number(v);
    }

    Expression parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        for (const auto& f : functions) {
            if (f.name != name)
                continue;
            if (!accept('('))
                throw ParseError("function '" + std::string(name) + "' needs an argument list",
                                 pos_);
            std::vector<Expression> args;
            if (!accept(')')) {
                do {
                    args.push_back(parse_sum());
                } while (accept(','));
                if (!accept(')'))
                    throw ParseError("expected ')'", pos_);
            }
            if (args.size() != 1)
                throw ParseError("function '" + std::string(name) + "' takes 1 argument, got " +
                                     std::to_string(args.size()),
                                 start);
            return Expression::call(f.func, args.front());
        }
        if (name == "pi")
            return Expression::number(std::numbers::pi);
        if (auto v = var_from_name(name))
            return Expression::variable(*v);
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace

std::string_view var_name(Var v) { return var_names[static_cast<std::size_t>(v)]; }

std::optional<Var> var_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < var_names.size(); ++i)
        if (var_names[i] == name)
            return static_cast<Var>(i);
    return std::nullopt;
}

Expression Expression::number(double v)
{
    Expression e;
    e.nodes_.push_back(Node{Kind::number, v});
    return e;
}

Expression Expression::variable(Var v)
{
    Expression e;
    Node n{Kind::variable};
    n.var = v;
    e.nodes_.push_back(n);
    return e;
}

std::size_t Expression::append(const Expression& other)
{
    const std::size_t offset = nodes_.size();
    for (Node n : other.nodes_) {
        if (n.kind == Kind::negate || n.kind == Kind::call || n.kind == Kind::binary)
            n.lhs += offset;
        if (n.kind == Kind::binary)
            n.rhs += offset;
        nodes_.push_back(n);
    }
    return other.root_ + offset;
}

Expression Expression::negate(const Expression& arg)
{
    Expression e;
    Node n{Kind::negate};
    n.lhs = e.append(arg);
    e.nodes_.push_back(n);
    e.root_ = e.nodes_.size() - 1;
    return e;
}

Expression Expression::binary(BinaryOp op, const Expression& lhs, const Expression& rhs)
{
    Expression e;
    Node n{Kind::binary};
    n.op = op;
    n.lhs = e.append(lhs);
    n.rhs = e.append(rhs);
    e.nodes_.push_back(n);
    e.root_ = e.nodes_.size() - 1;
    return e;
}

Expression Expression::call(Func f, const Expression& arg)
{
    Expression e;
    Node n{Kind::call};
    n.func = f;
    n.lhs = e.append(arg);
    e.nodes_.push_back(n);
    e.root_ = e.nodes_.size() - 1;
    return e;
}

double Expression::evaluate(const Environment& env) const { return eval_node(root_, env); }

double Expression::eval_node(std::size_t i, const Environment& env) const
{
    const Node& n = nodes_[i];
    switch (n.kind) {
    case Kind::number:
        return n.value;
    case Kind::variable:
        return env[static_cast<std::size_t>(n.var)];
    case Kind::negate:
        return -eval_node(n.lhs, env);
    case Kind::binary: {
        const double a = eval_node(n.lhs, env);
        const double b = eval_node(n.rhs, env);
        switch (n.op) {
        case BinaryOp::add:
            return checked(a + b, "addition");
        case BinaryOp::sub:
            return checked(a - b, "subtraction");
        case BinaryOp::mul:
            return checked(a * b, "multiplication");
        case BinaryOp::div:
            if (b == 0.0)
                throw EvaluationError("division by zero");
            return checked(a / b, "division");
        case BinaryOp::pow:
            if (a < 0.0 && b != std::floor(b))
                throw EvaluationError("negative base raised to a non-integer power");
            if (a == 0.0 && b < 0.0)
                throw EvaluationError("zero raised to a negative power");
            return checked(std::pow(a, b), "power");
        }
        break;
    }
    case Kind::call: {
        const double a = eval_node(n.lhs, env);
        switch (n.func) {
        case Func::sin:
            return std::sin(a);
        case Func::cos:
            return std::cos(a);
        case Func::exp:
            return checked(std::exp(a), "exp");
        case Func::ln:
            if (!(a > 0.0))
                throw EvaluationError("ln of a non-positive number");
            return std::log(a);
        case Func::sqrt:
            if (a < 0.0)
                throw EvaluationError("sqrt of a negative number");
            return std::sqrt(a);
        case Func::abs:
            return std::abs(a);
        case Func::gammafn:
            try {
                return checked(gamma(a), "gammafn");
            } catch (const PoleError& e) {
                throw EvaluationError(e.what());
            }
        }
        break;
    }
    }
    throw EvaluationError("corrupt expression node");
}

void Expression::print_node(std::size_t i, std::string& out) const
{
    const Node& n = nodes_[i];
    switch (n.kind) {
    case Kind::number:
        out += format_number(n.value);
        return;
    case Kind::variable:
        out += var_name(n.var);
        return;
    case Kind::negate:
        out += "(-";
        print_node(n.lhs, out);
        out += ")";
        return;
    case Kind::binary: {
        static constexpr char symbols[] = {'+', '-', '*', '/', '^'};
        out += "(";
        print_node(n.lhs, out);
        out += symbols[static_cast<int>(n.op)];
        print_node(n.rhs, out);
        out += ")";
        return;
    }
    case Kind::call:
        out += func_name(n.func);
        out += "(";
        print_node(n.lhs, out);
        out += ")";
        return;
    }
}

std::string Expression::to_string() const
{
    std::string out;
    print_node(root_, out);
    return out;
}

std::vector<Var> Expression::variables() const
{
    std::vector<Var> vars;
    for (const Node& n : nodes_)
        if (n.kind == Kind::variable && std::find(vars.begin(), vars.end(), n.var) == vars.end())
            vars.push_back(n.var);
    return vars;
}

Expression parse(std::string_view source) { return Parser(source).run(); }

} // namespace fracvar
