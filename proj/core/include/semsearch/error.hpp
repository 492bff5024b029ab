#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semsearch {

/// Base class for every failure caused by input data rather than by a
/// programming error. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed line in an input file.
class ParseError : public DataError {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what);

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// A record refers to an id that no loaded record defines.
class DanglingReferenceError : public DataError {
 public:
  explicit DanglingReferenceError(std::string id, const std::string& context);
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// The class hierarchy or the hypernym graph contains a cycle.
class CycleError : public DataError {
 public:
  explicit CycleError(std::string member, const std::string& graph);
  const std::string& member() const noexcept { return member_; }

 private:
  std::string member_;
};

class UnknownIdError : public DataError {
 public:
  explicit UnknownIdError(const std::string& what) : DataError(what) {}
};

/// Raised by msc_hypernym when the senses share no ancestor.
class NoCommonHypernymError : public DataError {
 public:
  explicit NoCommonHypernymError(const std::string& what) : DataError(what) {}
};

}  // namespace semsearch
