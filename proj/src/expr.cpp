#include "charbvp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace charbvp::expr {

Expr constant(Complex v) { return std::make_shared<const Node>(Node{Kind::constant, v, nullptr, nullptr}); }

Expr variable() { return std::make_shared<const Node>(Node{Kind::variable, {}, nullptr, nullptr}); }

Expr make_unary(Kind kind, Expr operand) {
    return std::make_shared<const Node>(Node{kind, {}, std::move(operand), nullptr});
}

Expr make_binary(Kind kind, Expr lhs, Expr rhs) {
    return std::make_shared<const Node>(Node{kind, {}, std::move(lhs), std::move(rhs)});
}

namespace {

bool is_binary(Kind k) {
    return k == Kind::add || k == Kind::sub || k == Kind::mul || k == Kind::div || k == Kind::pow;
}

// ---------------------------------------------------------------- parsing

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run() {
        skip_space();
        if (pos_ >= src_.size()) throw SyntaxError("empty expression", pos_);
        Expr e = parse_sum();
        skip_space();
        if (pos_ < src_.size()) throw SyntaxError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = make_binary(Kind::add, lhs, parse_product());
            else if (accept('-')) lhs = make_binary(Kind::sub, lhs, parse_product());
            else return lhs;
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make_binary(Kind::mul, lhs, parse_unary());
            else if (accept('/')) lhs = make_binary(Kind::div, lhs, parse_unary());
            else return lhs;
        }
    }

    Expr parse_unary() {
        if (accept('-')) return make_unary(Kind::neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (accept('^')) return make_binary(Kind::pow, base, parse_unary());
        return base;
    }

    Expr parse_primary() {
        skip_space();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_sum();
            if (!accept(')')) throw SyntaxError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") throw SyntaxError("malformed number", start);
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) throw SyntaxError("malformed number", start);
        if (pos_ < src_.size() && src_[pos_] == 'i' &&
            !(pos_ + 1 < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '_'))) {
            ++pos_;
            return constant({0.0, v});
        }
        return constant({v, 0.0});
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "t") return variable();
        if (name == "i") return constant({0.0, 1.0});
        if (name == "pi") return constant({std::numbers::pi, 0.0});
        Kind kind;
        if (name == "exp") kind = Kind::exp;
        else if (name == "log") kind = Kind::log;
        else if (name == "sin") kind = Kind::sin;
        else if (name == "cos") kind = Kind::cos;
        else if (name == "sqrt") kind = Kind::sqrt;
        else throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);
        if (!accept('(')) throw SyntaxError("expected '(' after " + std::string(name), pos_);
        Expr arg = parse_sum();
        if (!accept(')')) throw SyntaxError("expected ')'", pos_);
        return make_unary(kind, arg);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ------------------------------------------------------------- evaluation

bool is_small_integer(Complex v, int& out) {
    if (v.imag() != 0.0) return false;
    const double r = v.real();
    if (std::abs(r) > 64.0 || std::floor(r) != r) return false;
    out = static_cast<int>(r);
    return true;
}

Complex int_power(Complex base, int k, double t) {
    if (k < 0) {
        if (base == Complex(0.0)) throw DomainError("zero raised to a negative power", t);
        return Complex(1.0) / int_power(base, -k, t);
    }
    Complex result(1.0);
    Complex factor = base;
    while (k > 0) {
        if (k & 1) result *= factor;
        factor *= factor;
        k >>= 1;
    }
    return result;
}

Complex power(Complex base, Complex ex, double t) {
    int k = 0;
    if (is_small_integer(ex, k)) return int_power(base, k, t);
    if (base == Complex(0.0)) {
        if (ex.real() > 0.0) return Complex(0.0);
        throw DomainError("zero raised to a non-positive power", t);
    }
    return std::pow(base, ex);
}

Complex eval_node(const Node& n, double t) {
    switch (n.kind) {
        case Kind::constant: return n.value;
        case Kind::variable: return {t, 0.0};
        case Kind::add: return eval_node(*n.lhs, t) + eval_node(*n.rhs, t);
        case Kind::sub: return eval_node(*n.lhs, t) - eval_node(*n.rhs, t);
        case Kind::mul: return eval_node(*n.lhs, t) * eval_node(*n.rhs, t);
        case Kind::div: {
            const Complex den = eval_node(*n.rhs, t);
            if (den == Complex(0.0)) throw DomainError("division by zero", t);
            return eval_node(*n.lhs, t) / den;
        }
        case Kind::pow: return power(eval_node(*n.lhs, t), eval_node(*n.rhs, t), t);
        case Kind::neg: return -eval_node(*n.lhs, t);
        case Kind::exp: return std::exp(eval_node(*n.lhs, t));
        case Kind::log: {
            const Complex u = eval_node(*n.lhs, t);
            if (u == Complex(0.0)) throw DomainError("log of zero", t);
            return std::log(u);
        }
        case Kind::sin: return std::sin(eval_node(*n.lhs, t));
        case Kind::cos: return std::cos(eval_node(*n.lhs, t));
        case Kind::sqrt: return std::sqrt(eval_node(*n.lhs, t));
    }
    return {};
}

// ---------------------------------------------------------- simplification

bool is_const(const Expr& e, Complex v) { return e->kind == Kind::constant && e->value == v; }

Expr fold(const Expr& e) {
    // Evaluation of a constant subtree; left unfolded when non-finite.
    try {
        const Complex v = eval_node(*e, 0.0);
        if (std::isfinite(v.real()) && std::isfinite(v.imag())) return constant(v);
    } catch (const DomainError&) {
    }
    return e;
}

Expr simplify_node(const Expr& e) {
    if (e->kind == Kind::constant || e->kind == Kind::variable) return e;
    if (!is_binary(e->kind)) {
        Expr u = simplify_node(e->lhs);
        if (e->kind == Kind::neg && u->kind == Kind::neg) return u->lhs;
        Expr out = make_unary(e->kind, u);
        return u->kind == Kind::constant ? fold(out) : out;
    }
    Expr x = simplify_node(e->lhs);
    Expr y = simplify_node(e->rhs);
    const Complex zero(0.0), one(1.0);
    switch (e->kind) {
        case Kind::add:
            if (is_const(x, zero)) return y;
            if (is_const(y, zero)) return x;
            break;
        case Kind::sub:
            if (is_const(y, zero)) return x;
            if (is_const(x, zero)) return simplify_node(make_unary(Kind::neg, y));
            break;
        case Kind::mul:
            if (is_const(x, zero) || is_const(y, zero)) return constant(zero);
            if (is_const(x, one)) return y;
            if (is_const(y, one)) return x;
            break;
        case Kind::div:
            if (is_const(x, zero) && !is_const(y, zero)) return constant(zero);
            if (is_const(y, one)) return x;
            break;
        case Kind::pow:
            if (is_const(y, zero)) return constant(one);
            if (is_const(y, one)) return x;
            break;
        default: break;
    }
    Expr out = make_binary(e->kind, x, y);
    return (x->kind == Kind::constant && y->kind == Kind::constant) ? fold(out) : out;
}

// --------------------------------------------------------- differentiation

Expr derive_once(const Expr& e) {
    const Complex zero(0.0);
    const Expr& u = e->lhs;
    const Expr& v = e->rhs;
    switch (e->kind) {
        case Kind::constant: return constant(zero);
        case Kind::variable: return constant(1.0);
        case Kind::add: return make_binary(Kind::add, derive_once(u), derive_once(v));
        case Kind::sub: return make_binary(Kind::sub, derive_once(u), derive_once(v));
        case Kind::mul:
            return make_binary(Kind::add, make_binary(Kind::mul, derive_once(u), v),
                               make_binary(Kind::mul, u, derive_once(v)));
        case Kind::div:
            return make_binary(Kind::div,
                               make_binary(Kind::sub, make_binary(Kind::mul, derive_once(u), v),
                                           make_binary(Kind::mul, u, derive_once(v))),
                               make_binary(Kind::pow, v, constant(2.0)));
        case Kind::neg: return make_unary(Kind::neg, derive_once(u));
        case Kind::pow:
            if (!depends_on_t(v)) {
                return make_binary(Kind::mul,
                                   make_binary(Kind::mul, v, make_binary(Kind::pow, u, make_binary(Kind::sub, v, constant(1.0)))),
                                   derive_once(u));
            }
            return make_binary(Kind::mul, e,
                               make_binary(Kind::add, make_binary(Kind::mul, derive_once(v), make_unary(Kind::log, u)),
                                           make_binary(Kind::div, make_binary(Kind::mul, v, derive_once(u)), u)));
        case Kind::exp: return make_binary(Kind::mul, e, derive_once(u));
        case Kind::log: return make_binary(Kind::div, derive_once(u), u);
        case Kind::sin: return make_binary(Kind::mul, make_unary(Kind::cos, u), derive_once(u));
        case Kind::cos: return make_unary(Kind::neg, make_binary(Kind::mul, make_unary(Kind::sin, u), derive_once(u)));
        case Kind::sqrt:
            return make_binary(Kind::div, derive_once(u), make_binary(Kind::mul, constant(2.0), e));
    }
    return constant(zero);
}

// ----------------------------------------------------------------- printing

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_constant(Complex v) {
    if (v.imag() == 0.0) {
        return v.real() < 0.0 || std::signbit(v.real()) ? "(" + format_real(v.real()) + ")" : format_real(v.real());
    }
    const std::string im = format_real(std::abs(v.imag())) + "i";
    if (v.real() == 0.0) return v.imag() < 0.0 ? "(-" + im + ")" : im;
    return "(" + format_real(v.real()) + (v.imag() < 0.0 ? "-" : "+") + im + ")";
}

const char* function_name(Kind k) {
    switch (k) {
        case Kind::exp: return "exp";
        case Kind::log: return "log";
        case Kind::sin: return "sin";
        case Kind::cos: return "cos";
        case Kind::sqrt: return "sqrt";
        default: return nullptr;
    }
}

char operator_symbol(Kind k) {
    switch (k) {
        case Kind::add: return '+';
        case Kind::sub: return '-';
        case Kind::mul: return '*';
        case Kind::div: return '/';
        case Kind::pow: return '^';
        default: return '?';
    }
}

}  // namespace

Expr parse(std::string_view src) { return Parser(src).run(); }

Expr simplify(const Expr& e) { return simplify_node(e); }

Expr differentiate(const Expr& e, int order) {
    if (order < 0) throw ValidationError("derivative order must be >= 0");
    Expr out = simplify(e);
    for (int k = 0; k < order; ++k) out = simplify(derive_once(out));
    return out;
}

Complex evaluate(const Expr& e, double t) {
    const Complex v = eval_node(*e, t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite value", t);
    return v;
}

std::string to_string(const Expr& e) {
    switch (e->kind) {
        case Kind::constant: return format_constant(e->value);
        case Kind::variable: return "t";
        case Kind::neg: return "(-" + to_string(e->lhs) + ")";
        default: break;
    }
    if (const char* fn = function_name(e->kind)) return std::string(fn) + "(" + to_string(e->lhs) + ")";
    return "(" + to_string(e->lhs) + operator_symbol(e->kind) + to_string(e->rhs) + ")";
}

bool depends_on_t(const Expr& e) {
    if (e->kind == Kind::variable) return true;
    if (e->kind == Kind::constant) return false;
    return depends_on_t(e->lhs) || (e->rhs && depends_on_t(e->rhs));
}

bool structurally_equal(const Expr& x, const Expr& y) {
    if (x->kind != y->kind) return false;
    if (x->kind == Kind::constant) return x->value == y->value;
    if (x->kind == Kind::variable) return true;
    if (!structurally_equal(x->lhs, y->lhs)) return false;
    return !x->rhs || structurally_equal(x->rhs, y->rhs);
}

// -------------------------------------------------------------- MatrixExpr

MatrixExpr::MatrixExpr(Eigen::Index rows, Eigen::Index cols, std::vector<Expr> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(entries_.size()) != rows * cols)
        throw ValidationError("matrix expression is not rectangular");
}

MatrixExpr MatrixExpr::parse(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty() || rows.front().empty()) throw ValidationError("empty matrix expression");
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.front().size());
    std::vector<Expr> entries(static_cast<std::size_t>(r * c));
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c)
            throw ValidationError("matrix expression is not rectangular");
        for (Eigen::Index j = 0; j < c; ++j)
            entries[static_cast<std::size_t>(j * r + i)] =
                expr::parse(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    return MatrixExpr(r, c, std::move(entries));
}

MatrixExpr MatrixExpr::from_constant(const CMatrix& value) {
    std::vector<Expr> entries;
    entries.reserve(static_cast<std::size_t>(value.size()));
    for (Eigen::Index j = 0; j < value.cols(); ++j)
        for (Eigen::Index i = 0; i < value.rows(); ++i) entries.push_back(constant(value(i, j)));
    return MatrixExpr(value.rows(), value.cols(), std::move(entries));
}

bool MatrixExpr::is_constant() const {
    for (const auto& e : entries_)
        if (depends_on_t(e)) return false;
    return true;
}

CMatrix MatrixExpr::evaluate(double t) const {
    CMatrix out(rows_, cols_);
    for (Eigen::Index j = 0; j < cols_; ++j)
        for (Eigen::Index i = 0; i < rows_; ++i) out(i, j) = expr::evaluate(at(i, j), t);
    return out;
}

MatrixFunction MatrixExpr::to_function(int max_order) const {
    if (is_constant()) return MatrixFunction::constant(evaluate(0.0));
    if (max_order < 0) throw ValidationError("derivative order must be >= 0");
    // table[k] holds the k-th derivative of every entry, column-major
    auto table = std::make_shared<std::vector<std::vector<Expr>>>();
    std::vector<Expr> current = entries_;
    for (int k = 0; k <= max_order; ++k) {
        for (auto& e : current) e = k == 0 ? simplify(e) : differentiate(e, 1);
        table->push_back(current);
    }
    const Eigen::Index r = rows_, c = cols_;
    return MatrixFunction(r, c, max_order, [table, r, c](double t, int order) -> CMatrix {
        const auto& layer = (*table)[static_cast<std::size_t>(order)];
        CMatrix out(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) out(i, j) = expr::evaluate(layer[static_cast<std::size_t>(j * r + i)], t);
        return out;
    });
}

VectorFunction MatrixExpr::to_vector_function(int max_order) const {
    if (cols_ != 1) throw ValidationError("vector expression must have one column");
    const MatrixFunction m = to_function(max_order);
    return VectorFunction(rows_, 1, m.maxDerivOrder(), [m](double t, int order) -> CVector { return m(t, order).col(0); });
}

}  // namespace charbvp::expr
