#pragma once

#include <stdexcept>
#include <string>

namespace sbst {

/// Caller violated an operation's input contract (arity, width, bit index, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad group definition, unknown builtin, invalid run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed artifact file (operands, stimuli, data section).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbst
