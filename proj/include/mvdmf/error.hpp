#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvdmf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteEntry : public Error {
 public:
  NonFiniteEntry(std::size_t view, std::size_t row, std::size_t col)
      : Error("non-finite entry in view " + std::to_string(view) + " at (" +
              std::to_string(row) + ", " + std::to_string(col) + ")"),
        view(view), row(row), col(col) {}

  std::size_t view;
  std::size_t row;
  std::size_t col;
};

class LabelRangeError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SolverStall : public Error {
 public:
  using Error::Error;
};

class InfeasibleGeometry : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MissingManifest : public IoError {
 public:
  using IoError::IoError;
};

class MissingFile : public IoError {
 public:
  explicit MissingFile(const std::string& path)
      : IoError("missing file: " + path), path(path) {}
  std::string path;
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& file, std::size_t line, std::size_t column,
             const std::string& what)
      : IoError(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
                ": " + what),
        file(file), line(line), column(column) {}

  std::string file;
  std::size_t line;
  std::size_t column;
};

class SchemaVersionMismatch : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace mvdmf
