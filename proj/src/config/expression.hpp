// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_CONFIG_EXPRESSION_HPP
#define DDPGD_CONFIG_EXPRESSION_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ddpgd::config
{

//
// Arithmetic expression over named variables.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: sin cos tan exp log sqrt abs (one argument), min max (two), and
// between(v, lo, hi) which is 1 for lo <= v <= hi and 0 otherwise. The constant pi is built in.
//
class Expression
{
public:
  // Throws ConfigError naming the column of the first problem.
  static Expression Parse(const std::string &text, const std::vector<std::string> &variables);

  double Evaluate(std::span<const double> values) const;
  bool Uses(std::size_t variable) const;
  const std::string &text() const { return text_; }

  struct Node;

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  std::vector<bool> used_;
};

}  // namespace ddpgd::config

#endif  // DDPGD_CONFIG_EXPRESSION_HPP
