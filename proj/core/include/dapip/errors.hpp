#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dapip {

/// Base class for every fault raised by the library. Partial-function
/// failures (an API that finds no match) are values, never exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownApi : public Error {
 public:
  explicit UnknownApi(const std::string& name)
      : Error("unknown API '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class UnknownConstant : public Error {
 public:
  explicit UnknownConstant(const std::string& ident)
      : Error("unknown constant '" + ident + "'") {}
};

class CompleteTree : public Error {
 public:
  CompleteTree() : Error("partial tree has no unexpanded leaves") {}
};

class InvalidExpansion : public Error {
 public:
  using Error::Error;
};

class NotInGrammar : public Error {
 public:
  using Error::Error;
};

class DataFormatError : public Error {
 public:
  DataFormatError(const std::string& file, std::size_t line,
                  const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class MissingTable : public Error {
 public:
  explicit MissingTable(const std::string& table)
      : Error("missing or empty dictionary table '" + table + "'") {}
};

class UnsatisfiableProgram : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class GrammarMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dapip
