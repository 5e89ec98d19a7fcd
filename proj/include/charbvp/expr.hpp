#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "charbvp/model.hpp"

/// Scalar expressions in the variable t with exact symbolic derivatives.
///
/// Grammar (standard precedence, `^` binds tighter than unary minus):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('-' | '+') unary | power
///     power   := primary ('^' unary)?
///     primary := number | 't' | 'i' | 'pi' | func '(' expr ')' | '(' expr ')'
///     func    := exp | log | sin | cos | sqrt
///
/// A number immediately followed by `i` is imaginary (`2i`, `1.5e-3i`).
namespace charbvp::expr {

enum class Kind { constant, variable, add, sub, mul, div, pow, neg, exp, log, sin, cos, sqrt };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
    Kind kind;
    Complex value;  // constant only
    Expr lhs;       // operand of unary nodes, left operand of binary nodes
    Expr rhs;
};

Expr constant(Complex v);
Expr variable();
Expr make_unary(Kind kind, Expr operand);
Expr make_binary(Kind kind, Expr lhs, Expr rhs);

Expr parse(std::string_view src);

/// Exact derivative of the given order, constant-folded.
Expr differentiate(const Expr& e, int order);

/// Constant folding and neutral-element elimination.
Expr simplify(const Expr& e);

/// Value at t; non-finite results raise DomainError.
Complex evaluate(const Expr& e, double t);

/// Fully parenthesized text that parses back to an equivalent tree.
std::string to_string(const Expr& e);

bool depends_on_t(const Expr& e);
bool structurally_equal(const Expr& x, const Expr& y);

/// Rectangular grid of expressions.
class MatrixExpr {
public:
    MatrixExpr(Eigen::Index rows, Eigen::Index cols, std::vector<Expr> entries);

    static MatrixExpr parse(const std::vector<std::vector<std::string>>& rows);
    static MatrixExpr from_constant(const CMatrix& value);

    Eigen::Index rows() const noexcept { return rows_; }
    Eigen::Index cols() const noexcept { return cols_; }
    const Expr& at(Eigen::Index r, Eigen::Index c) const { return entries_[static_cast<std::size_t>(c * rows_ + r)]; }

    bool is_constant() const;
    CMatrix evaluate(double t) const;

    /// Matrix function with symbolic derivatives precomputed to max_order.
    /// Constant matrices report unbounded order.
    MatrixFunction to_function(int max_order) const;
    VectorFunction to_vector_function(int max_order) const;

private:
    Eigen::Index rows_;
    Eigen::Index cols_;
    std::vector<Expr> entries_;  // column-major
};

}  // namespace charbvp::expr
