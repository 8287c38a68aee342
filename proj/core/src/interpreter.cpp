#include "dapip/interpreter.hpp"

namespace dapip {

ApiResult Interpreter::evaluate(const Expr& expr, std::string_view input) const {
  switch (expr.kind) {
    case Expr::Kind::InputVar:
      return std::string(input);
    case Expr::Kind::ConstStr:
      return constants_->literal(expr.constant_id());
    case Expr::Kind::Apply: {
      const auto arg = evaluate(expr.args[0], input);
      if (!arg) return std::nullopt;
      return library_->eval(expr.api(), *arg);
    }
    case Expr::Kind::Concat: {
      std::string out;
      for (const Expr& child : expr.args) {
        const auto part = evaluate(child, input);
        if (!part) return std::nullopt;
        out += *part;
      }
      return out;
    }
  }
  return std::nullopt;
}

ApiResult Interpreter::evaluate(const Program& program, std::string_view input) const {
  return evaluate(program.root(), input);
}

bool Interpreter::consistent(const Program& program,
                             std::span<const ExamplePair> examples) const {
  for (const ExamplePair& e : examples) {
    const auto out = evaluate(program, e.input);
    if (!out || *out != e.output) return false;
  }
  return true;
}

std::vector<ApiResult> Interpreter::apply_all(const Program& program,
                                              std::span<const std::string> inputs) const {
  std::vector<ApiResult> out;
  out.reserve(inputs.size());
  for (const std::string& s : inputs) out.push_back(evaluate(program, s));
  return out;
}

ApiResult evaluate(const Program& program, std::string_view input) {
  return Interpreter().evaluate(program, input);
}

bool consistent(const Program& program, std::span<const ExamplePair> examples) {
  return Interpreter().consistent(program, examples);
}

std::vector<ApiResult> apply_all(const Program& program, std::span<const std::string> inputs) {
  return Interpreter().apply_all(program, inputs);
}

}  // namespace dapip
