#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dapip/api_library.hpp"
#include "dapip/dsl.hpp"

namespace dapip {

struct ExamplePair {
  std::string input;
  std::string output;
  bool operator==(const ExamplePair&) const = default;
};

/// Evaluates programs against a fixed API library and constant universe.
/// Holds references; both must outlive the interpreter.
class Interpreter {
 public:
  Interpreter(const ApiLibrary& library = ApiLibrary::defaults(),
              const ConstantTable& constants = ConstantTable::defaults())
      : library_(&library), constants_(&constants) {}

  /// Concatenation of child results; Failure anywhere fails the program.
  ApiResult evaluate(const Program& program, std::string_view input) const;
  ApiResult evaluate(const Expr& expr, std::string_view input) const;

  /// True iff every pair's input evaluates exactly to its output.
  bool consistent(const Program& program, std::span<const ExamplePair> examples) const;

  std::vector<ApiResult> apply_all(const Program& program,
                                   std::span<const std::string> inputs) const;

  const ApiLibrary& library() const { return *library_; }
  const ConstantTable& constants() const { return *constants_; }

 private:
  const ApiLibrary* library_;
  const ConstantTable* constants_;
};

ApiResult evaluate(const Program& program, std::string_view input);
bool consistent(const Program& program, std::span<const ExamplePair> examples);
std::vector<ApiResult> apply_all(const Program& program, std::span<const std::string> inputs);

}  // namespace dapip
