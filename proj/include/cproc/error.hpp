#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cproc {

// Base of every error raised by the library. The CLI maps NumericalError to
// exit code 3 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class ScoreIngestError : public Error {
 public:
  ScoreIngestError(std::size_t row, const std::string& what)
      : Error("scores row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A label stratum (full calibration set or a neighborhood) holds too few
// graphs with the requested label.
class StratumError : public Error {
 public:
  StratumError(int label, const std::string& what)
      : Error("label " + std::to_string(label) + ": " + what), label_(label) {}

  int label() const noexcept { return label_; }

 private:
  int label_;
};

class DegenerateTestError : public Error {
 public:
  using Error::Error;
};

}  // namespace cproc
