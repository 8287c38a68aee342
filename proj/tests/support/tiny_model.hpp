#pragma once

// Small grammar and model configurations for fast neural tests.

#include <string>
#include <vector>

#include "dapip/interpreter.hpp"
#include "dapip/r3nn.hpp"

namespace dapip::testing {

/// Two constants: SPACE and DOT.
inline const ConstantTable& tiny_constants() {
  static const ConstantTable table({{"SPACE", " "}, {"DOT", "."}});
  return table;
}

/// GetFirstWord, GetLastWord and ToUppercase over tiny_constants().
inline Grammar tiny_grammar() {
  return Grammar({api_by_name("GetFirstWord"), api_by_name("GetLastWord"), api_by_name("ToUppercase")},
                 tiny_constants());
}

inline R3nnConfig tiny_config(std::size_t M = 4, std::size_t H = 4, std::size_t T = 8) {
  R3nnConfig cfg;
  cfg.M = M;
  cfg.encoder.T = T;
  cfg.encoder.H = H;
  cfg.encoder.embed_dim = 4;
  return cfg;
}

/// Instance whose pairs are produced by running `text` on `inputs`.
inline TrainingInstance tiny_instance(const std::string& text, const std::vector<std::string>& inputs) {
  const Program p = parse_program(text, tiny_constants());
  const Interpreter interp(ApiLibrary::defaults(), tiny_constants());
  TrainingInstance inst{p, {}};
  for (const std::string& in : inputs) inst.pairs.push_back({in, interp.evaluate(p, in).value()});
  return inst;
}

inline const std::vector<std::string>& tiny_inputs() {
  static const std::vector<std::string> inputs{"ab cd", "Go now", "x y z", "red fox", "hi yo"};
  return inputs;
}

}  // namespace dapip::testing
