// SPDX-License-Identifier: Apache-2.0

#include "config/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <iterator>
#include <numbers>

#include "common/error.hpp"

namespace ddpgd::config
{

struct Expression::Node
{
  enum class Kind
  {
    Number,
    Variable,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Call
  };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::size_t variable = 0;
  int function = 0;  // index into kFunctions
  std::vector<std::shared_ptr<const Node>> args;
};

namespace
{

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

struct FunctionInfo
{
  const char *name;
  std::size_t arity;
};

// Order matters: Eval switches on the index.
constexpr FunctionInfo kFunctions[] = {{"sin", 1},  {"cos", 1},  {"tan", 1}, {"exp", 1},
                                       {"log", 1},  {"sqrt", 1}, {"abs", 1}, {"min", 2},
                                       {"max", 2},  {"between", 3}};

class Parser
{
public:
  Parser(const std::string &text, const std::vector<std::string> &vars, std::vector<bool> &used)
    : text_(text), vars_(vars), used_(used)
  {
  }

  NodePtr ParseAll()
  {
    auto n = Expr();
    Skip();
    if (pos_ != text_.size())
    {
      Fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return n;
  }

private:
  [[noreturn]] void Fail(const std::string &what) const
  {
    throw ConfigError("expression \"" + text_ + "\", column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void Skip()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool Accept(char c)
  {
    Skip();
    if (pos_ < text_.size() && text_[pos_] == c)
    {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr Make(Node::Kind k, std::vector<NodePtr> args)
  {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = std::move(args);
    return n;
  }

  NodePtr Expr()
  {
    auto lhs = Term();
    for (;;)
    {
      if (Accept('+'))
        lhs = Make(Node::Kind::Add, {lhs, Term()});
      else if (Accept('-'))
        lhs = Make(Node::Kind::Sub, {lhs, Term()});
      else
        return lhs;
    }
  }

  NodePtr Term()
  {
    auto lhs = Unary();
    for (;;)
    {
      if (Accept('*'))
        lhs = Make(Node::Kind::Mul, {lhs, Unary()});
      else if (Accept('/'))
        lhs = Make(Node::Kind::Div, {lhs, Unary()});
      else
        return lhs;
    }
  }

  NodePtr Unary()
  {
    if (Accept('-')) return Make(Node::Kind::Negate, {Unary()});
    if (Accept('+')) return Unary();
    return Power();
  }

  NodePtr Power()
  {
    auto base = Primary();
    if (Accept('^')) return Make(Node::Kind::Pow, {base, Unary()});
    return base;
  }

  NodePtr Primary()
  {
    Skip();
    if (pos_ >= text_.size())
    {
      Fail("unexpected end of expression");
    }
    const char c = text_[pos_];
    if (Accept('('))
    {
      auto inner = Expr();
      if (!Accept(')')) Fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
    {
      return Number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
    {
      return Name();
    }
    Fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr Number()
  {
    const char *begin = text_.data() + pos_;
    const char *end = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc())
    {
      Fail("malformed number");
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->value = v;
    return n;
  }

  NodePtr Name()
  {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
    {
      ++pos_;
    }
    const std::string name = text_.substr(start, pos_ - start);
    if (Accept('('))
    {
      const FunctionInfo *info = nullptr;
      int index = 0;
      for (int k = 0; k < static_cast<int>(std::size(kFunctions)); ++k)
      {
        if (name == kFunctions[k].name)
        {
          info = &kFunctions[k];
          index = k;
        }
      }
      if (!info)
      {
        pos_ = start;
        Fail("unknown function '" + name + "'");
      }
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Call;
      n->function = index;
      n->args.push_back(Expr());
      while (Accept(',')) n->args.push_back(Expr());
      if (!Accept(')')) Fail("expected ')' after arguments of " + name);
      if (n->args.size() != info->arity)
      {
        pos_ = start;
        Fail(name + " takes " + std::to_string(info->arity) + " argument(s)");
      }
      return n;
    }
    for (std::size_t k = 0; k < vars_.size(); ++k)
    {
      if (vars_[k] == name)
      {
        used_[k] = true;
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Variable;
        n->variable = k;
        return n;
      }
    }
    if (name == "pi")
    {
      auto n = std::make_shared<Node>();
      n->value = std::numbers::pi;
      return n;
    }
    pos_ = start;
    Fail("unknown name '" + name + "'");
  }

  const std::string &text_;
  const std::vector<std::string> &vars_;
  std::vector<bool> &used_;
  std::size_t pos_ = 0;
};

double Eval(const Node &n, std::span<const double> v)
{
  switch (n.kind)
  {
    case Node::Kind::Number: return n.value;
    case Node::Kind::Variable: return v[n.variable];
    case Node::Kind::Negate: return -Eval(*n.args[0], v);
    case Node::Kind::Add: return Eval(*n.args[0], v) + Eval(*n.args[1], v);
    case Node::Kind::Sub: return Eval(*n.args[0], v) - Eval(*n.args[1], v);
    case Node::Kind::Mul: return Eval(*n.args[0], v) * Eval(*n.args[1], v);
    case Node::Kind::Div: return Eval(*n.args[0], v) / Eval(*n.args[1], v);
    case Node::Kind::Pow:
    {
      const double b = Eval(*n.args[0], v);
      const double e = Eval(*n.args[1], v);
      if (e == 2.0) return b * b;
      return std::pow(b, e);
    }
    case Node::Kind::Call: break;
  }
  const double a = Eval(*n.args[0], v);
  switch (n.function)
  {
    case 0: return std::sin(a);
    case 1: return std::cos(a);
    case 2: return std::tan(a);
    case 3: return std::exp(a);
    case 4: return std::log(a);
    case 5: return std::sqrt(a);
    case 6: return std::abs(a);
    case 7: return std::min(a, Eval(*n.args[1], v));
    case 8: return std::max(a, Eval(*n.args[1], v));
    default: return (a >= Eval(*n.args[1], v) && a <= Eval(*n.args[2], v)) ? 1.0 : 0.0;
  }
}

}  // namespace

Expression Expression::Parse(const std::string &text, const std::vector<std::string> &variables)
{
  Expression e;
  e.text_ = text;
  e.used_.assign(variables.size(), false);
  Parser p(e.text_, variables, e.used_);
  e.root_ = p.ParseAll();
  return e;
}

double Expression::Evaluate(std::span<const double> values) const
{
  if (!root_)
  {
    throw ArgumentError("evaluating an empty expression");
  }
  if (values.size() < used_.size())
  {
    throw ArgumentError("expression \"" + text_ + "\" needs " + std::to_string(used_.size()) + " values");
  }
  return Eval(*root_, values);
}

bool Expression::Uses(std::size_t variable) const
{
  return variable < used_.size() && used_[variable];
}

}  // namespace ddpgd::config
